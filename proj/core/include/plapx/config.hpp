#pragma once

#include "plapx/geometry.hpp"
#include "plapx/problem.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace plapx {

/// Flat "section.key = value" document. '#' starts a comment; blank lines are ignored.
/// Keys outside the known set are rejected with a ConfigError naming the key.
class ExperimentConfig {
public:
    static ExperimentConfig parse(std::string_view text);
    static ExperimentConfig load(const std::string& path);

    [[nodiscard]] static const std::vector<std::string>& known_keys();

    void set(const std::string& key, const std::string& value);
    [[nodiscard]] bool has(const std::string& key) const { return values_.count(key) != 0; }
    [[nodiscard]] const std::map<std::string, std::string>& entries() const { return values_; }

    /// ConfigError when a required key is missing or a value does not parse.
    [[nodiscard]] const std::string& get(const std::string& key) const;
    [[nodiscard]] std::string get(const std::string& key, const std::string& fallback) const;
    [[nodiscard]] double get_double(const std::string& key) const;
    [[nodiscard]] double get_double(const std::string& key, double fallback) const;
    [[nodiscard]] int get_int(const std::string& key, int fallback) const;
    [[nodiscard]] std::uint64_t get_seed() const;
    /// Comma-separated numbers.
    [[nodiscard]] std::vector<double> get_list(const std::string& key) const;

private:
    std::map<std::string, std::string> values_;
};

/// Domain from domain.shape (polygon | disk), domain.vertices ("x,y; x,y; ..."),
/// domain.corner_radius, domain.arc_segments, domain.center, domain.radius, domain.segments.
/// The default is the unit square.
[[nodiscard]] ConvexDomain build_domain(const ExperimentConfig& cfg);

/// Requires p.expr, f.expr, g.expr and mesh.h. Exponent bounds come from p.p1/p.p2/p.lip when
/// all three are given and from dense sampling otherwise.
[[nodiscard]] ProblemSpec build_problem(const ExperimentConfig& cfg);

/// Every key with its effective value, defaults included.
[[nodiscard]] std::map<std::string, std::string> resolved_config(const ExperimentConfig& cfg);

}  // namespace plapx
