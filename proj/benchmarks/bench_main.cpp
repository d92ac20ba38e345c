#include <benchmark/benchmark.h>

#include "moptree/asymptotics.hpp"
#include "moptree/spectral.hpp"

using namespace moptree;

namespace {

using CB = Complex<BigFloat>;

SystemSpec reference(Backend b) {
  auto s = lebesgue_system({{Rational(-1), Rational(-1, 2)}, {Rational(1, 2), Rational(1)}});
  s.backend.backend = b;
  return s;
}

// Fresh family each iteration so the moment solves are not cached.
template <class T>
void TypeIISolve(benchmark::State& state) {
  const Backend b = is_exact_v<T> ? Backend::rational : Backend::bigfloat;
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto fam = make_family<T>(reference(b));
    benchmark::DoNotOptimize(fam->type2(MultiIndex({n, n})).P.coeffs().size());
  }
}
BENCHMARK(TypeIISolve<Rational>)->DenseRange(2, 8, 3)->Unit(benchmark::kMillisecond);
BENCHMARK(TypeIISolve<BigFloat>)->DenseRange(2, 8, 3)->Unit(benchmark::kMillisecond);

void RecurrenceWindow(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto t = make_table<Rational>(reference(Backend::rational));
    t->fill(MultiIndex({n, n}));
    benchmark::DoNotOptimize(t->entries().size());
  }
}
BENCHMARK(RecurrenceWindow)->DenseRange(2, 5, 1)->Unit(benchmark::kMillisecond);

void PropagatedLevels(benchmark::State& state) {
  for (auto _ : state) {
    PropagatedCoefficients<BigFloat> c(reference(Backend::bigfloat), static_cast<int>(state.range(0)));
    benchmark::DoNotOptimize(c.max_level());
  }
}
BENCHMARK(PropagatedLevels)->Arg(20)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

// Leaf-first elimination on the homogeneous tree: linear in the vertex count.
void ConstantTreeResolvent(benchmark::State& state) {
  const int D = static_cast<int>(state.range(0));
  std::vector<BigFloat> A{BigFloat(1) / 64, BigFloat(1) / 64}, B{BigFloat(-0.75), BigFloat(0.75)};
  auto op = assemble_constant<BigFloat>(A, B, {BigFloat(0), BigFloat(1)}, D);
  for (auto _ : state) {
    benchmark::DoNotOptimize(resolvent_column(op, 0, CB(5))[0]);
  }
  state.SetComplexityN(op.size());
}
BENCHMARK(ConstantTreeResolvent)->DenseRange(8, 16, 2)->Unit(benchmark::kMillisecond)->Complexity(benchmark::oN);

void FiniteTreeGreen(benchmark::State& state) {
  auto t = make_table<Rational>(reference(Backend::rational));
  const MultiIndex N({static_cast<int>(state.range(0)), static_cast<int>(state.range(0))});
  auto op = assemble_finite<Rational>(*t, {Rational(0), Rational(1)}, N, false);
  const Complex<Rational> z(Rational(2), Rational(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(green_direct(op, 0, 0, z).value);
    benchmark::DoNotOptimize(cf_finite<Rational>(*t, N, 1, z).value);
  }
}
BENCHMARK(FiniteTreeGreen)->DenseRange(2, 5, 1)->Unit(benchmark::kMillisecond);

void SurfaceMap(benchmark::State& state) {
  std::vector<Interval> ivs;
  for (int i = 0; i < state.range(0); ++i) {
    ivs.push_back({BigFloat(3 * i), BigFloat(3 * i + 1)});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_surface(ivs).residual);
  }
}
BENCHMARK(SurfaceMap)->DenseRange(1, 4, 1)->Unit(benchmark::kMillisecond);

void ChiTracking(benchmark::State& state) {
  auto map = solve_surface(std::vector<Interval>{{BigFloat(-1), BigFloat(-0.5)}, {BigFloat(0.5), BigFloat(1)}});
  for (auto _ : state) {
    benchmark::DoNotOptimize(chi_sheet0(map, CB(BigFloat(0.3), BigFloat(0.2))));
  }
}
BENCHMARK(ChiTracking)->Unit(benchmark::kMicrosecond);

}  // namespace

int main(int argc, char** argv) {
  PrecisionScope scope(256);
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) {
    return 1;
  }
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
