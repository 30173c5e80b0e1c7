#include "plapx/assembly.hpp"
#include "plapx/linear_solve.hpp"
#include "plapx/mesh.hpp"
#include "plapx/varexp.hpp"

#include <benchmark/benchmark.h>

#include <memory>

using namespace plapx;

namespace {

MeshPtr square(double h) { return std::make_shared<const TriMesh>(triangulate_convex(ConvexDomain::unit_square(), h)); }

const ExponentField& exponent()
{
    static const ExponentField p(parse_field_ptr("1.5 + 0.5*y"), 1.5, 2.0, 0.5);
    return p;
}

void BM_Triangulate(benchmark::State& st)
{
    const double h = 1.0 / static_cast<double>(st.range(0));
    const auto dom = round_corners(ConvexDomain::unit_square(), 0.1);
    for (auto _ : st) benchmark::DoNotOptimize(triangulate_convex(dom, h));
}
BENCHMARK(BM_Triangulate)->Arg(20)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

void BM_AssembleJacobian(benchmark::State& st)
{
    const auto m = square(1.0 / static_cast<double>(st.range(0)));
    const QuadratureContext q(*m);
    const auto u = P1Function::interpolate(m, *parse_field_ptr("sin(3*x)*y"));
    const auto d = quad_data(q, exponent(), *constant_field(1.0));
    for (auto _ : st) benchmark::DoNotOptimize(assemble_jacobian(u, d, 1e-4));
    st.counters["triangles"] = static_cast<double>(m->num_triangles());
}
BENCHMARK(BM_AssembleJacobian)->Arg(20)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

void BM_AssembleResidual(benchmark::State& st)
{
    const auto m = square(1.0 / static_cast<double>(st.range(0)));
    const QuadratureContext q(*m);
    const auto u = P1Function::interpolate(m, *parse_field_ptr("sin(3*x)*y"));
    const auto d = quad_data(q, exponent(), *constant_field(1.0));
    for (auto _ : st) benchmark::DoNotOptimize(assemble_residual(u, d, 1e-4));
}
BENCHMARK(BM_AssembleResidual)->Arg(20)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

void BM_LinearSolve(benchmark::State& st)
{
    const auto m = square(1.0 / static_cast<double>(st.range(0)));
    const QuadratureContext q(*m);
    const auto sys =
        apply_dirichlet(assemble_stiffness(*m), assemble_load(*constant_field(1.0), q), *m, *constant_field(0.0));
    for (auto _ : st) benchmark::DoNotOptimize(linear_solve(sys.matrix, sys.rhs));
}
BENCHMARK(BM_LinearSolve)->Arg(20)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

void BM_LuxemburgNorm(benchmark::State& st)
{
    const auto m = square(1.0 / static_cast<double>(st.range(0)));
    const QuadratureContext q(*m);
    const auto u = sample(at_points(parse_field_ptr("1 + sin(5*x)*cos(3*y)")), q);
    const auto p = sample(at_points(exponent()), q);
    std::vector<double> w(q.size());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = q.points()[k].weight;
    for (auto _ : st) benchmark::DoNotOptimize(luxemburg_norm(u, p, w));
}
BENCHMARK(BM_LuxemburgNorm)->Arg(20)->Arg(80)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
