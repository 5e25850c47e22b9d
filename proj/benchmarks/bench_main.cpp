#include <random>

#include <benchmark/benchmark.h>

#include "nilheat/htype.hpp"
#include "nilheat/weilbrezin.hpp"

using namespace nilheat;

namespace {

void BM_kt_real(benchmark::State& st) {
  KernelEvaluator ev(KernelKind::hn, 0.5, int(st.range(0)));
  GroupPoint g = GroupPoint::identity(int(st.range(0)));
  g.x[0] = 0.3, g.u[0] = -0.2, g.xi = 0.7;
  const ComplexPoint p = ComplexPoint::from(g);
  for (auto _ : st) benchmark::DoNotOptimize(ev.kt(p));
}
BENCHMARK(BM_kt_real)->Arg(1)->Arg(2);

void BM_kt_complex(benchmark::State& st) {
  KernelEvaluator ev(KernelKind::hn, 0.5, 1);
  const ComplexPoint p{{cplx(0.3, 0.4)}, {cplx(-0.2, 0.1)}, cplx(0.7, -0.3)};
  for (auto _ : st) benchmark::DoNotOptimize(ev.kt(p));
}
BENCHMARK(BM_kt_complex);

void BM_kernel_setup(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(KernelEvaluator(KernelKind::hn, 0.5, 2).c());
}
BENCHMARK(BM_kernel_setup)->Unit(benchmark::kMillisecond);

void BM_hermite_matrix(benchmark::State& st) {
  const TestFunction f = sample_functions(3, 1, 3)[0];
  for (auto _ : st) benchmark::DoNotOptimize(hermite_matrix(1.3, f, int(st.range(0))));
}
BENCHMARK(BM_hermite_matrix)->Arg(8)->Arg(16);

void BM_normal_form(benchmark::State& st) {
  std::mt19937_64 rng(1);
  const DivisorChain chain = DivisorChain::parse({"1", "2", "6"});
  const RatMatrix v = apply_to_vectors(random_integer_symplectic(3, rng), divisor_basis(chain, Rational(2, 3)));
  for (auto _ : st) benchmark::DoNotOptimize(normal_form(v).chain.n());
}
BENCHMARK(BM_normal_form)->Unit(benchmark::kMicrosecond);

void BM_weil_brezin_norm(benchmark::State& st) {
  const DivisorChain chain = DivisorChain::parse({"1", "2"});
  const NilFunction F = weil_brezin(1, chain, sample_functions(2, 1, 4)[0]);
  for (auto _ : st) benchmark::DoNotOptimize(l2m_norm(F));
}
BENCHMARK(BM_weil_brezin_norm)->Unit(benchmark::kMillisecond);

void BM_qt_fiber(benchmark::State& st) {
  KernelEvaluator ev(KernelKind::htype, 0.5, 2, 3);
  const Eigen::VectorXd v = Eigen::VectorXd::Constant(4, 0.3);
  for (auto _ : st) benchmark::DoNotOptimize(qt_radon(ev, v, 0.4));
}
BENCHMARK(BM_qt_fiber)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
