#include <Eigen/Dense>
#include <cmath>

#include "doctest.h"
#include "seabed/cg.hpp"
#include "seabed/error.hpp"
#include "seabed/wave_solver.hpp"
#include "support.hpp"

using namespace seabed;

namespace {

SeabedCurve wavy(double shift = 0.0) {
  SeabedCurve h;
  for (int i = 0; i <= 300; ++i) {
    const double x = -3.0 + 6.0 * i / 300;
    h.xs.push_back(x);
    h.values.push_back(-0.4 + 0.2 * std::sin(1.3 * x) + shift);
  }
  return h;
}

SolverConfig small_config() {
  SolverConfig cfg;
  cfg.dt = 0.0076;
  cfg.t_max = 1.0;
  cfg.frequencies = {1.5};
  cfg.threads = 1;
  return cfg;
}

}  // namespace

TEST_CASE("config validation") {
  SolverConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.num_steps() == 2079);
  cfg.dt = 0.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.t_max = 0.001;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.frequencies.clear();
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.cg_tol = 1.5;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("zero source keeps the zero state") {
  const auto mesh = build_mesh(12, 6);
  const auto ops = assemble(mesh, uniform_material(mesh, 1.0, 1.5), SourceLayout{});
  Stepper stepper(ops, 0.01, 1e-10, 200, 0.0);
  auto s = zero_state(ops.size());
  for (int n = 0; n < 50; ++n) stepper.step(s, 2.0);
  for (double v : s.u) CHECK(v == 0.0);
  for (double v : s.v) CHECK(v == 0.0);
  CHECK(s.n == 50);
}

TEST_CASE("first step closed form") {
  const auto mesh = build_mesh(10, 6);
  const auto mat = coeff_fields(wavy(), mesh, MaterialConstants{});
  const auto ops = assemble(mesh, mat, SourceLayout{});
  const double dt = 0.01, f0 = 3.0;
  const auto next = step(zero_state(ops.size()), ops, f0, dt, 1e-13, 500);

  // Independent dense solves.
  const int n = ops.size();
  auto dense = [&](const CsrMatrix& m) {
    const auto d = m.to_dense();
    return Eigen::Map<const Eigen::Matrix<double, -1, -1, Eigen::RowMajor>>(d.data(), n, n).eval();
  };
  const Eigen::MatrixXd r = dense(ops.R), d = dense(ops.D), c = dense(ops.C);
  const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(ops.b.data(), n);
  const auto llt = r.llt();
  const Eigen::VectorXd vhalf = 0.5 * dt * llt.solve(source_time(f0, 0.0) * b);
  const Eigen::VectorXd u1 = dt * vhalf;
  const Eigen::VectorXd v1 =
      vhalf + 0.5 * dt * llt.solve(source_time(f0, dt) * b - d * u1 - c * vhalf);
  const double su = u1.cwiseAbs().maxCoeff(), sv = v1.cwiseAbs().maxCoeff();
  for (int i = 0; i < n; ++i) {
    CHECK(next.u[i] == doctest::Approx(u1(i)).epsilon(1e-9).scale(su));
    CHECK(next.v[i] == doctest::Approx(v1(i)).epsilon(1e-9).scale(sv));
  }
  CHECK(next.n == 1);
}

TEST_CASE("closed domain conserves energy after the source stops") {
  const auto mesh = build_mesh(24, 12);
  const auto mat = uniform_material(mesh, 1.0, 1.5);
  const auto ops = assemble(mesh, mat, SourceLayout{}, false);
  const double dt = 0.01;
  Stepper stepper(ops, dt, 1e-12, 500);
  auto s = zero_state(ops.size());
  // f0 = 2: the wavelet is below 1e-16 of its peak after t = 1.
  while (s.n * dt < 1.0) stepper.step(s, 2.0);
  const double e0 = energy(s, ops);
  const double m0 = modified_energy(s, ops, dt);
  double worst = 0.0, worst_mod = 0.0;
  for (int k = 1; k <= 2000; ++k) {
    stepper.step(s, 2.0);
    if (k % 100 == 0) {
      worst = std::max(worst, std::abs(energy(s, ops) - e0) / e0);
      worst_mod = std::max(worst_mod, std::abs(modified_energy(s, ops, dt) - m0) / m0);
    }
  }
  CHECK(e0 > 0.0);
  CHECK(worst < 0.01);
  CHECK(worst_mod < 1e-7);
}

TEST_CASE("absorbing boundary dissipates energy") {
  const auto mesh = build_mesh(24, 12);
  const auto mat = coeff_fields(wavy(), mesh, MaterialConstants{});
  const auto ops = assemble(mesh, mat, SourceLayout{});
  const double dt = 0.01;
  Stepper stepper(ops, dt, 1e-12, 500);
  auto s = zero_state(ops.size());
  while (s.n * dt < 1.0) stepper.step(s, 2.0);
  double prev = modified_energy(s, ops, dt);
  const double peak = prev;
  for (int k = 1; k <= 1000; ++k) {
    stepper.step(s, 2.0);
    const double e = modified_energy(s, ops, dt);
    CHECK(e <= prev * (1.0 + 1e-9));
    prev = e;
  }
  CHECK(prev < 0.05 * peak);
}

TEST_CASE("blow-up is reported as an instability") {
  const auto mesh = build_mesh(12, 6);
  const auto ops = assemble(mesh, uniform_material(mesh, 1.0, 6.4), SourceLayout{}, false);
  Stepper stepper(ops, 0.5, 1e-10, 500, 1e3);
  auto s = zero_state(ops.size());
  try {
    for (int n = 0; n < 500; ++n) stepper.step(s, 1.0);
    FAIL("expected an instability error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::instability);
  }
}

TEST_CASE("CFL guard warns") {
  std::vector<std::string> seen;
  set_warning_sink([&](const std::string& m) { seen.push_back(m); });
  const auto mesh = build_mesh(12, 6);
  const auto mat = uniform_material(mesh, 1.0, 6.4);
  CHECK(check_cfl(mesh, mat, 0.001) < 0.5);
  CHECK(seen.empty());
  CHECK(check_cfl(mesh, mat, 0.2) > 0.5);
  CHECK(seen.size() == 1);
  set_warning_sink({});
}

TEST_CASE("zero amplitude gives zero traces") {
  const auto mesh = build_mesh(12, 6);
  auto cfg = small_config();
  cfg.source_amplitude = 0.0;
  const auto tr = simulate(wavy(), cfg, mesh, MaterialConstants{});
  for (double v : tr.data[0]) CHECK(v == 0.0);
  CHECK(tr.n_time == cfg.num_records());
  CHECK(tr.data[0].size() == static_cast<std::size_t>(tr.n_time) * 13);
}

TEST_CASE("concurrent frequencies match sequential runs bitwise") {
  const auto mesh = build_mesh(16, 8);
  auto cfg = small_config();
  cfg.frequencies = {1.0, 2.0, 3.0};
  cfg.threads = 1;
  const auto seq = simulate(wavy(), cfg, mesh, MaterialConstants{});
  cfg.threads = 3;
  const auto par = simulate(wavy(), cfg, mesh, MaterialConstants{});
  for (std::size_t i = 0; i < 3; ++i) CHECK(seq.data[i] == par.data[i]);
  // Each channel equals the single-frequency run.
  auto one = small_config();
  one.frequencies = {2.0};
  CHECK(simulate(wavy(), one, mesh, MaterialConstants{}).data[0] == seq.data[1]);
}

TEST_CASE("record stride subsamples the step history") {
  const auto mesh = build_mesh(12, 6);
  auto cfg = small_config();
  const auto full = simulate(wavy(), cfg, mesh, MaterialConstants{});
  cfg.record_stride = 4;
  const auto sub = simulate(wavy(), cfg, mesh, MaterialConstants{});
  CHECK(sub.n_time == full.n_time / 4);
  CHECK(sub.dt_record == doctest::Approx(4 * cfg.dt));
  const std::size_t w = full.top_xs.size();
  for (int l = 0; l < sub.n_time; ++l) {
    for (std::size_t k = 0; k < w; ++k) {
      CHECK(sub.data[0][l * w + k] == full.data[0][(4 * l + 3) * w + k]);
    }
  }
}

TEST_CASE("observe extracts sensor nodes") {
  const auto mesh = build_mesh(12, 6);
  auto cfg = small_config();
  const auto tr = simulate(wavy(), cfg, mesh, MaterialConstants{});
  const auto all = observe(tr, tr.top_xs);
  CHECK(all.data == tr.data[0]);
  CHECK(all.meta.mesh_nx == 12);

  const auto xs = default_sensor_xs(12);
  const auto m = observe(tr, xs);
  CHECK(m.n_sensor == 10);
  std::vector<double> reversed(xs.rbegin(), xs.rend());
  const auto mr = observe(tr, reversed);
  for (int l = 0; l < m.n_time; ++l)
    for (int k = 0; k < 10; ++k) CHECK(mr.at(0, k, l) == m.at(0, 9 - k, l));
  const std::vector<double> off{0.1};
  CHECK_THROWS_AS(observe(tr, off), Error);
}

TEST_CASE("production layout maps 186 sensors to distinct nodes") {
  Traces tr;
  const auto mesh = build_mesh(188, 95);
  for (int n : mesh.top_nodes()) tr.top_xs.push_back(mesh.x[n]);
  tr.n_time = 1;
  tr.data = {std::vector<double>(tr.top_xs.size())};
  for (std::size_t k = 0; k < tr.top_xs.size(); ++k) tr.data[0][k] = static_cast<double>(k);
  const auto m = observe(tr, default_sensor_xs(188));
  CHECK(m.n_sensor == 186);
  for (int k = 0; k < 186; ++k) CHECK(m.at(0, k, 0) == k + 1);
}

TEST_CASE("traces stay bounded over prior curves") {
  const auto mesh = build_mesh(24, 12);
  auto cfg = small_config();
  cfg.dt = 0.0152;
  cfg.t_max = 2.0;
  KlConfig kl;
  kl.n_kl = 32;
  Rng rng(31);
  double lo = 1e300, hi = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto h = sample_prior(rng, kl, 1.0);
    const auto tr = simulate(h, cfg, mesh, MaterialConstants{});
    const std::size_t w = tr.top_xs.size();
    double sup = 0.0;
    for (int l = 0; l < tr.n_time; ++l) {
      double s = 0.0;
      for (std::size_t k = 0; k < w; ++k) s += tr.data[0][l * w + k] * tr.data[0][l * w + k] * mesh.hx;
      sup = std::max(sup, std::sqrt(s));
    }
    lo = std::min(lo, sup);
    hi = std::max(hi, sup);
  }
  CHECK(hi / lo < 10.0);
}

TEST_CASE("traces depend Lipschitz-continuously on the interface") {
  const auto mesh = build_mesh(24, 12);
  auto cfg = small_config();
  cfg.dt = 0.0152;
  cfg.t_max = 2.0;
  const auto base = simulate(wavy(), cfg, mesh, MaterialConstants{});
  std::vector<double> ratios;
  for (double eps : {1e-1, 3e-2, 1e-2, 3e-3, 1e-3}) {
    const auto pert = simulate(wavy(eps), cfg, mesh, MaterialConstants{});
    double d = 0.0;
    for (std::size_t i = 0; i < base.data[0].size(); ++i) {
      d += (pert.data[0][i] - base.data[0][i]) * (pert.data[0][i] - base.data[0][i]);
    }
    // ||delta||_L2 over [-3, 3] for a constant shift eps.
    ratios.push_back(std::sqrt(d) / (eps * std::sqrt(6.0)));
  }
  const auto [mn, mx] = std::minmax_element(ratios.begin(), ratios.end());
  CHECK(*mn > 0.0);
  CHECK(*mx / *mn < 5.0);
}

TEST_CASE("no signal reaches a distant sensor before the first arrival") {
  const auto mesh = build_mesh(96, 48);
  SolverConfig cfg;
  cfg.dt = 0.005;
  cfg.t_max = 4.0;
  cfg.frequencies = {2.0};
  cfg.sources.xs = {-2.4};
  cfg.threads = 1;
  SeabedCurve h;
  h.xs = {-3.0, 3.0};
  h.values = {-1.0, -1.0};
  const auto tr = simulate(h, cfg, mesh, MaterialConstants{});
  const std::size_t w = tr.top_xs.size();
  const std::size_t k = w - 9;  // x = 2.4
  const double d = tr.top_xs[k] + 2.4;
  const double c_max = material_bounds(MaterialConstants{}).c_max;
  double peak = 0.0;
  for (double v : tr.data[0]) peak = std::max(peak, std::abs(v));
  double early = 0.0;
  // The wavelet is centred at t = 0 and about 0.5 wide; allow for that.
  const double arrival = d / c_max - 0.5;
  for (int l = 0; l < tr.n_time; ++l) {
    if ((l + 1) * tr.dt_record >= arrival) break;
    early = std::max(early, std::abs(tr.data[0][l * w + k]));
  }
  CHECK(early < 1e-8 * peak);
}

TEST_CASE("solver errors carry the frequency index") {
  const auto mesh = build_mesh(12, 6);
  auto cfg = small_config();
  cfg.frequencies = {1.0, 2.0};
  cfg.cg_max_iter = 1;
  cfg.cg_tol = 1e-14;
  try {
    simulate(wavy(), cfg, mesh, MaterialConstants{});
    FAIL("expected a convergence error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::convergence);
    CHECK(std::string(e.what()).find("frequency 0") != std::string::npos);
  }
}
