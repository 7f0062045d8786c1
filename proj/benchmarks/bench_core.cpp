#include <benchmark/benchmark.h>

#include "seabed/cg.hpp"
#include "seabed/diagnostics.hpp"
#include "seabed/kl_prior.hpp"
#include "seabed/likelihood.hpp"
#include "seabed/wave_solver.hpp"

using namespace seabed;

namespace {

SeabedCurve flat(double level) {
  SeabedCurve h;
  h.xs = {-3.0, 3.0};
  h.values = {level, level};
  return h;
}

void BM_KlAssemble(benchmark::State& state) {
  KlConfig cfg;
  cfg.n_kl = static_cast<int>(state.range(0));
  cfg.grid_n = 512;
  Rng rng(1);
  const auto beta = standard_normal(rng, cfg.n_kl);
  const auto method = state.range(1) ? KlMethod::direct : KlMethod::fast_cosine;
  for (auto _ : state) benchmark::DoNotOptimize(kl_values(beta, 0.0, cfg, 0.75, method));
}
BENCHMARK(BM_KlAssemble)->Args({32, 0})->Args({32, 1})->Args({256, 0})->Args({256, 1});

void BM_CoeffFields(benchmark::State& state) {
  const auto mesh = build_mesh(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)) / 2);
  KlConfig kl;
  Rng rng(2);
  const auto h = sample_prior(rng, kl, 0.75);
  for (auto _ : state) benchmark::DoNotOptimize(coeff_fields(h, mesh, MaterialConstants{}));
}
BENCHMARK(BM_CoeffFields)->Arg(48)->Arg(188);

void BM_MassSolve(benchmark::State& state) {
  const int nx = static_cast<int>(state.range(0));
  const auto mesh = build_mesh(nx, nx / 2);
  const auto ops = assemble(mesh, coeff_fields(flat(-0.5), mesh, MaterialConstants{}), SourceLayout{});
  std::vector<double> rhs(ops.size());
  for (int i = 0; i < ops.size(); ++i) rhs[i] = std::sin(0.01 * i);
  for (auto _ : state) benchmark::DoNotOptimize(cg_solve(ops.R, rhs, 1e-10, 500));
}
BENCHMARK(BM_MassSolve)->Arg(47)->Arg(94)->Arg(188);

void BM_Step(benchmark::State& state) {
  const int nx = static_cast<int>(state.range(0));
  const auto mesh = build_mesh(nx, nx / 2);
  const auto ops = assemble(mesh, coeff_fields(flat(-0.5), mesh, MaterialConstants{}), SourceLayout{});
  Stepper stepper(ops, 0.0076 * 47.0 / nx, 1e-10, 500);
  auto s = zero_state(ops.size());
  for (auto _ : state) stepper.step(s, 1.0);
}
BENCHMARK(BM_Step)->Arg(47)->Arg(94)->Arg(188);

void BM_Potential(benchmark::State& state) {
  const auto mesh = build_mesh(47, 24);
  SolverConfig cfg;
  cfg.dt = 0.0076;
  cfg.t_max = 3.952;
  cfg.frequencies = {1.0};
  cfg.threads = 1;
  KlConfig kl;
  kl.n_kl = 32;
  auto ctx = ForwardContext::create(mesh, cfg, MaterialConstants{}, kl);
  Rng rng(3);
  auto obs = ctx->predict(sample_prior(rng, kl, 0.75));
  obs.sigma = noise_sigma(obs, 0.01);
  const Likelihood lik(ctx, obs);
  const auto beta = standard_normal(rng, kl.n_kl);
  for (auto _ : state) benchmark::DoNotOptimize(lik.potential(beta, 0.75));
  state.SetLabel("47x24, 520 steps");
}
BENCHMARK(BM_Potential)->Unit(benchmark::kMillisecond);

void BM_Ess(benchmark::State& state) {
  Rng rng(4);
  const auto chain = standard_normal(rng, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ess(chain));
}
BENCHMARK(BM_Ess)->Arg(10000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
