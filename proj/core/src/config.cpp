#include "plapx/config.hpp"

#include "plapx/error.hpp"
#include "plapx/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace plapx {

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& text)
{
    const std::string t = trim(text);
    double v = 0.0;
    const auto* end = t.data() + t.size();
    const auto [ptr, ec] = std::from_chars(t.data(), end, v);
    if (ec != std::errc() || ptr != end || t.empty()) throw ConfigError(key + ": '" + text + "' is not a number");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) {
        cur = trim(cur);
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

const std::vector<std::string>& ExperimentConfig::known_keys()
{
    static const std::vector<std::string> keys = {
        "domain.shape",    "domain.vertices",   "domain.corner_radius", "domain.arc_segments",
        "domain.center",   "domain.radius",     "domain.segments",      "p.expr",
        "p.p1",            "p.p2",              "p.lip",                "f.expr",
        "g.expr",          "q.expr",            "u.exact.expr",         "eps.start",
        "eps.stop",        "eps.factor",        "mesh.h",               "mesh.refinements",
        "newton.tol",      "newton.max_iter",   "newton.kacanov",       "s.exponent",
        "mollify.delta",   "h2.grid_spacing",   "output.path",          "seed",
        "sweep.p1_list",   "sweep.radii",       "sweep.r0",             "sweep.levels",
        "sweep.window",    "identity.functions", "identity.n_quad",
    };
    return keys;
}

void ExperimentConfig::set(const std::string& key, const std::string& value)
{
    const auto& keys = known_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw ConfigError("unknown config key '" + key + "'");
    values_[key] = value;
}

ExperimentConfig ExperimentConfig::parse(std::string_view text)
{
    ExperimentConfig cfg;
    std::istringstream is{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value', got '" + t + "'");
        const std::string key = trim(std::string_view(t).substr(0, eq));
        const std::string value = trim(std::string_view(t).substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        if (cfg.has(key)) throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        cfg.set(key, value);
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

const std::string& ExperimentConfig::get(const std::string& key) const
{
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing required key '" + key + "'");
    return it->second;
}

std::string ExperimentConfig::get(const std::string& key, const std::string& fallback) const
{
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double ExperimentConfig::get_double(const std::string& key) const { return to_double(key, get(key)); }

double ExperimentConfig::get_double(const std::string& key, double fallback) const
{
    return has(key) ? get_double(key) : fallback;
}

int ExperimentConfig::get_int(const std::string& key, int fallback) const
{
    if (!has(key)) return fallback;
    const double v = get_double(key);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError(key + ": expected an integer");
    return static_cast<int>(v);
}

std::uint64_t ExperimentConfig::get_seed() const
{
    if (!has("seed")) return 0;
    const std::string t = trim(get("seed"));
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) throw ConfigError("seed: expected a non-negative integer");
    return v;
}

std::vector<double> ExperimentConfig::get_list(const std::string& key) const
{
    std::vector<double> out;
    for (const auto& item : split(get(key), ',')) out.push_back(to_double(key, item));
    return out;
}

ConvexDomain build_domain(const ExperimentConfig& cfg)
{
    const std::string shape = cfg.get("domain.shape", "polygon");
    if (shape == "disk") {
        Point2 c{};
        if (cfg.has("domain.center")) {
            const auto xy = cfg.get_list("domain.center");
            if (xy.size() != 2) throw ConfigError("domain.center: expected 'x, y'");
            c = {xy[0], xy[1]};
        }
        return ConvexDomain::disk(c, cfg.get_double("domain.radius", 1.0), cfg.get_int("domain.segments", 64));
    }
    if (shape != "polygon") throw ConfigError("domain.shape: expected 'polygon' or 'disk', got '" + shape + "'");
    std::vector<Point2> verts;
    if (cfg.has("domain.vertices")) {
        for (const auto& pair : split(cfg.get("domain.vertices"), ';')) {
            const auto xy = split(pair, ',');
            if (xy.size() != 2) throw ConfigError("domain.vertices: expected 'x,y' pairs separated by ';'");
            verts.push_back({to_double("domain.vertices", xy[0]), to_double("domain.vertices", xy[1])});
        }
    } else {
        verts = {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
    }
    return ConvexDomain::polygon(std::move(verts), cfg.get_double("domain.corner_radius", 0.0),
                                 cfg.get_int("domain.arc_segments", 16));
}

ProblemSpec build_problem(const ExperimentConfig& cfg)
{
    ProblemSpec spec;
    spec.domain = build_domain(cfg);
    auto p_fn = parse_field_ptr(cfg.get("p.expr"));
    if (cfg.has("p.p1") && cfg.has("p.p2") && cfg.has("p.lip"))
        spec.p = ExponentField(p_fn, cfg.get_double("p.p1"), cfg.get_double("p.p2"), cfg.get_double("p.lip"));
    else
        spec.p = ExponentField::sampled(p_fn, spec.domain);
    spec.f = parse_field_ptr(cfg.get("f.expr"));
    spec.g = parse_field_ptr(cfg.get("g.expr"));
    if (cfg.has("q.expr")) spec.q = parse_field_ptr(cfg.get("q.expr"));
    spec.mesh_h = cfg.get_double("mesh.h");
    spec.refinements = cfg.get_int("mesh.refinements", spec.refinements);
    spec.eps_start = cfg.get_double("eps.start", spec.eps_start);
    spec.eps_stop = cfg.get_double("eps.stop", spec.eps_stop);
    spec.eps_factor = cfg.get_double("eps.factor", spec.eps_factor);
    spec.newton_tol = cfg.get_double("newton.tol", spec.newton_tol);
    spec.newton_max_iter = cfg.get_int("newton.max_iter", spec.newton_max_iter);
    spec.kacanov_fallback = cfg.get_int("newton.kacanov", 1) != 0;
    spec.s_exponent = cfg.get_double("s.exponent", spec.s_exponent);
    spec.mollify_delta = cfg.get_double("mollify.delta", spec.mollify_delta);
    spec.h2_grid_spacing = cfg.get_double("h2.grid_spacing", spec.h2_grid_spacing);
    try {
        spec.check();
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
    return spec;
}

std::map<std::string, std::string> resolved_config(const ExperimentConfig& cfg)
{
    std::map<std::string, std::string> out = cfg.entries();
    const ProblemSpec defaults;
    auto fill = [&](const std::string& key, const std::string& value) { out.emplace(key, value); };
    fill("domain.shape", "polygon");
    if (out["domain.shape"] == "polygon") {
        fill("domain.vertices", "0,0; 1,0; 1,1; 0,1");
        fill("domain.corner_radius", "0");
        fill("domain.arc_segments", "16");
    } else {
        fill("domain.center", "0, 0");
        fill("domain.radius", "1");
        fill("domain.segments", "64");
    }
    fill("eps.start", fmt(defaults.eps_start));
    fill("eps.stop", fmt(defaults.eps_stop));
    fill("eps.factor", fmt(defaults.eps_factor));
    fill("mesh.refinements", std::to_string(defaults.refinements));
    fill("newton.tol", fmt(defaults.newton_tol));
    fill("newton.max_iter", std::to_string(defaults.newton_max_iter));
    fill("newton.kacanov", "1");
    fill("s.exponent", fmt(defaults.s_exponent));
    fill("mollify.delta", fmt(defaults.mollify_delta));
    fill("h2.grid_spacing", fmt(defaults.h2_grid_spacing));
    fill("seed", "0");
    return out;
}

}  // namespace plapx
