#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

#include "seabed/diagnostics.hpp"
#include "seabed/error.hpp"
#include "seabed/fes.hpp"
#include "seabed/io.hpp"
#include "seabed/likelihood.hpp"
#include "seabed/samplers.hpp"
#include "seabed/wave_solver.hpp"

namespace seabed::cli {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Independent stream `k` derived from a user seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint32_t k) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), k};
  std::uint32_t v[2];
  seq.generate(v, v + 2);
  return (static_cast<std::uint64_t>(v[0]) << 32) | v[1];
}

MaterialConstants constants_from(const Options& o) {
  MaterialConstants k;
  k.rho0 = o.rho0;
  k.rho_minus = o.rho_rock;
  k.lambda0 = o.lambda0;
  k.alpha_bottom = o.alpha_rock;
  k.validate();
  return k;
}

MaterialSampling sampling_from(const Options& o) {
  if (o.sampling == "cell_average") return MaterialSampling::cell_average;
  if (o.sampling == "centroid") return MaterialSampling::centroid;
  fail(ErrorKind::config, "unknown material sampling '" + o.sampling + "'");
}

KlConfig kl_from(const Options& o, int n_kl) {
  KlConfig kl;
  kl.n_kl = n_kl;
  kl.grid_n = o.grid_n;
  kl.ell = o.ell;
  kl.validate();
  return kl;
}

NoiseModel noise_from(const Options& o) {
  NoiseModel n;
  n.rel_level = o.noise_rel;
  if (o.sigma_convention == "variance") {
    n.convention = SigmaConvention::variance;
  } else if (o.sigma_convention == "literal") {
    n.convention = SigmaConvention::literal;
  } else {
    fail(ErrorKind::config, "unknown sigma convention '" + o.sigma_convention + "'");
  }
  n.validate();
  return n;
}

SolverConfig solver_from(const Options& o) {
  SolverConfig s;
  s.dt = o.dt;
  s.t_max = o.t_max;
  s.frequencies = o.freq;
  s.cg_tol = o.cg_tol;
  s.cg_max_iter = o.cg_max_iter;
  s.record_stride = o.record_stride;
  s.absorbing = !o.closed;
  s.sources.xs = o.source_x;
  s.sources.depth = o.source_depth;
  s.sources.width = o.source_width;
  s.source_amplitude = o.amplitude;
  s.threads = o.threads;
  return s;
}

int thread_count(const SolverConfig& s) {
  const int t = s.threads > 0 ? s.threads : default_thread_count();
  return std::min<int>(t, static_cast<int>(s.frequencies.size()));
}

std::string trace_svg(const Measurement& m) {
  std::vector<PlotSeries> series;
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  const int k = m.n_sensor / 2;
  for (int i = 0; i < m.n_freq; ++i) {
    PlotSeries p;
    std::ostringstream label;
    label << "f0 = " << m.meta.frequencies[i];
    p.label = label.str();
    p.color = colors[i % 5];
    for (int l = 0; l < m.n_time; ++l) {
      p.x.push_back((l + 1) * m.meta.dt);
      p.y.push_back(m.at(i, k, l));
    }
    series.push_back(std::move(p));
  }
  std::ostringstream title;
  title << "surface displacement at x = " << m.meta.sensor_xs[k];
  return svg_line_plot(series, title.str(), "t", "u");
}

void add_output(RunContext& ctx, const std::string& option, const std::string& path) {
  ctx.outputs.push_back({option, path});
}

}  // namespace

int cmd_forward(const Options& o, RunContext& ctx) {
  require(o.has_seabed != o.has_flat, ErrorKind::usage,
          "forward needs exactly one of --seabed or --flat");
  const auto t0 = Clock::now();
  const Mesh mesh = build_mesh(o.nx, o.ny);
  SeabedCurve h;
  if (o.has_seabed) {
    h = io::read_curve(o.seabed);
    ctx.inputs.push_back(o.seabed);
  } else {
    require(std::abs(o.flat) < kVerticalHalfExtent, ErrorKind::config,
            "flat seabed level must lie inside (-1.5, 1.5)");
    h.xs = {mesh.rect.x0, mesh.rect.x1};
    h.values = {o.flat, o.flat};
  }
  SolverConfig solver = solver_from(o);
  solver.sensor_xs = default_sensor_xs(o.nx, mesh.rect);
  ctx.threads = thread_count(solver);

  const Traces tr = simulate(h, solver, mesh, constants_from(o), sampling_from(o));
  const Measurement m = observe(tr, solver.sensor_xs);
  write_measurement(o.out, m);
  add_output(ctx, "--out", o.out);
  if (!o.svg.empty()) {
    io::atomic_write(o.svg, trace_svg(m));
    add_output(ctx, "--svg", o.svg);
  }
  ctx.timings["total_s"] = seconds_since(t0);
  ctx.out << "forward: " << m.n_freq << " channel(s), " << m.n_sensor << " sensors, "
          << m.n_time << " snapshots, " << tr.cg_iterations << " CG iterations\n";
  return 0;
}

int cmd_generate_data(const Options& o, RunContext& ctx) {
  if (o.nx == o.inference_nx && o.ny == o.inference_ny && !o.allow_inverse_crime) {
    fail(ErrorKind::config, "data mesh " + std::to_string(o.nx) + "x" + std::to_string(o.ny) +
                                " equals the inference mesh; pass --allow-inverse-crime to "
                                "generate data on it anyway");
  }
  const auto t0 = Clock::now();
  SeabedCurve truth;
  if (o.has_truth) {
    truth = io::read_curve(o.truth);
    ctx.inputs.push_back(o.truth);
  } else {
    const KlConfig kl = kl_from(o, o.n_kl);
    Rng rng(derive_seed(o.seed, 0));
    truth = sample_prior(rng, kl, o.truth_s, o.mean_offset);
    if (!o.truth_out.empty()) {
      io::write_curve(o.truth_out, truth, {o.ell, o.n_kl, o.seed});
      add_output(ctx, "--truth-out", o.truth_out);
    }
  }
  ctx.seeds["seed"] = o.seed;

  const Mesh mesh = build_mesh(o.nx, o.ny);
  SolverConfig solver = solver_from(o);
  solver.sensor_xs = default_sensor_xs(o.inference_nx, mesh.rect);
  ctx.threads = thread_count(solver);
  const Traces tr = simulate(truth, solver, mesh, constants_from(o), sampling_from(o));
  ctx.timings["forward_s"] = seconds_since(t0);

  Measurement clean = observe(tr, solver.sensor_xs);
  clean.meta.seed = o.seed;
  const auto sigma = noise_sigma(clean, o.noise_rel);
  Rng noise_rng(derive_seed(o.seed, 1));
  Measurement noisy = add_noise(clean, sigma, noise_rng);
  noisy.meta.rel_noise = o.noise_rel;
  write_measurement(o.out, noisy);
  add_output(ctx, "--out", o.out);
  if (!o.clean_out.empty()) {
    write_measurement(o.clean_out, clean);
    add_output(ctx, "--clean-out", o.clean_out);
  }
  if (!o.svg.empty()) {
    io::atomic_write(o.svg, trace_svg(noisy));
    add_output(ctx, "--svg", o.svg);
  }
  ctx.timings["total_s"] = seconds_since(t0);
  ctx.out << "generate-data: " << clean.n_sensor << " sensors, " << clean.n_time
          << " snapshots on a " << o.nx << "x" << o.ny << " mesh; sigma =";
  for (double s : sigma) ctx.out << ' ' << s;
  ctx.out << '\n';
  return 0;
}

int cmd_sample(const std::string& mode, const Options& o, RunContext& ctx) {
  const auto t0 = Clock::now();
  Measurement obs = read_measurement(o.data);
  ctx.inputs.push_back(o.data);
  require(obs.sigma.size() == static_cast<std::size_t>(obs.n_freq), ErrorKind::config,
          "data file carries no noise sigma (use the noisy output of generate-data)");

  const Mesh mesh = build_mesh(o.nx, o.ny);
  SolverConfig solver = solver_from(o);
  const auto& meta = obs.meta;
  if (o.has_record_stride) {
    solver.record_stride = o.record_stride;
  } else if (o.has_dt) {
    solver.record_stride = std::max(1, static_cast<int>(std::lround(meta.dt / o.dt)));
  } else {
    solver.record_stride = meta.record_stride;
  }
  solver.dt = o.has_dt ? o.dt : meta.dt / solver.record_stride;
  solver.t_max = o.has_t_max ? o.t_max : meta.t_max;
  solver.frequencies = o.has_freq ? o.freq : meta.frequencies;
  solver.sensor_xs = meta.sensor_xs;
  if (!meta.source_xs.empty()) {
    if (!o.has_source_x) solver.sources.xs = meta.source_xs;
    if (!o.has_source_depth) solver.sources.depth = meta.source_depth;
    if (!o.has_source_width) solver.sources.width = meta.source_width;
  }
  ctx.threads = thread_count(solver);

  const KlConfig kl = kl_from(o, o.n_kl);
  auto fwd = ForwardContext::create(mesh, solver, constants_from(o), kl, o.mean_offset,
                                    sampling_from(o));
  const Likelihood lik(fwd, std::move(obs), noise_from(o));
  const Potential phi = [&lik](std::span<const double> beta, double s) {
    return lik.potential(beta, s);
  };

  SamplerConfig cfg;
  cfg.beta_h = o.beta_h;
  cfg.beta_s = o.beta_s;
  cfg.n_inner_h = o.n_inner_h;
  cfg.n_inner_s = mode == "mwg" ? o.n_inner_s : 0;
  cfg.target_accept = o.target_accept;
  cfg.kappa0 = o.kappa0;
  cfg.bounds = {o.s_lo, o.s_hi};
  require(o.init == "zero" || o.init == "prior", ErrorKind::config,
          "--init must be zero or prior");

  Rng init_rng(o.init_seed);
  auto initial_state = [&]() {
    ChainState st;
    if (o.init == "prior") {
      st.coeffs = standard_normal(init_rng, o.n_kl);
    } else {
      st.coeffs.assign(o.n_kl, 0.0);
    }
    if (mode == "mwg") {
      st.s = o.init == "prior" ? sample_s_prior(init_rng, cfg.bounds) : o.s_init;
    } else {
      st.s = o.s;
    }
    return st;
  };
  ctx.seeds["seed"] = o.seed;
  ctx.seeds["init_seed"] = o.init_seed;

  const std::uint64_t warm_seed = derive_seed(o.seed, 0);
  const std::uint64_t online_seed = derive_seed(o.seed, 1);
  SampleSet result;

  if (mode == "fes") {
    FesConfig fes;
    fes.n_low_modes = o.low_modes;
    fes.n_walkers = o.walkers;
    fes.stretch = o.stretch;
    fes.stretch_floor = o.stretch_floor;
    std::vector<ChainState> walkers;
    // Walkers start from prior draws so the ensemble spans the low modes.
    for (int w = 0; w < o.walkers; ++w) {
      ChainState st;
      st.coeffs = standard_normal(init_rng, o.n_kl);
      st.s = o.s;
      walkers.push_back(std::move(st));
    }
    if (o.n_warmup > 0) {
      cfg.phase = Phase::warmup;
      cfg.n_sample = o.n_warmup;
      cfg.seed = warm_seed;
      const SampleSet warm = fes_run(fes, cfg, phi, walkers);
      ctx.timings["warmup_s"] = seconds_since(t0);
      if (!o.warmup_out.empty()) {
        io::write_samples(o.warmup_out, warm);
        add_output(ctx, "--warmup-out", o.warmup_out);
      }
      walkers = warm.final_states;
      cfg.beta_h = warm.beta_h;
      fes.stretch = warm.stretch;
      ctx.out << "warm-up: beta_h = " << warm.beta_h << ", stretch = " << warm.stretch << '\n';
    }
    cfg.phase = Phase::online;
    cfg.n_sample = o.n_sample;
    cfg.seed = online_seed;
    result = fes_run(fes, cfg, phi, std::move(walkers));
  } else {
    ChainState state = initial_state();
    if (o.n_warmup > 0) {
      cfg.phase = Phase::warmup;
      cfg.n_sample = o.n_warmup;
      cfg.seed = warm_seed;
      const SampleSet warm = gibbs_run(cfg, phi, state);
      ctx.timings["warmup_s"] = seconds_since(t0);
      if (!o.warmup_out.empty()) {
        io::write_samples(o.warmup_out, warm);
        add_output(ctx, "--warmup-out", o.warmup_out);
      }
      state = warm.final_states.front();
      cfg.beta_h = warm.beta_h;
      cfg.beta_s = warm.beta_s;
      ctx.out << "warm-up: beta_h = " << warm.beta_h;
      if (mode == "mwg") ctx.out << ", beta_s = " << warm.beta_s;
      ctx.out << '\n';
    }
    cfg.phase = Phase::online;
    cfg.n_sample = o.n_sample;
    cfg.seed = online_seed;
    result = gibbs_run(cfg, phi, std::move(state));
  }
  if (mode == "fixed") result.sampler = "pcn";
  if (mode == "mwg") result.sampler = "mwg";

  io::write_samples(o.out, result);
  add_output(ctx, "--out", o.out);
  ctx.timings["total_s"] = seconds_since(t0);

  auto rate = [](long a, long p) { return p > 0 ? static_cast<double>(a) / p : 0.0; };
  ctx.out << "sample-" << mode << ": " << result.samples.size() << " samples, accept_h = "
          << rate(result.accepted_h, result.proposed_h);
  if (mode == "mwg") ctx.out << ", accept_s = " << rate(result.accepted_s, result.proposed_s);
  if (mode == "fes") {
    ctx.out << ", accept_stretch = " << rate(result.accepted_stretch, result.proposed_stretch);
  }
  ctx.out << '\n';
  return 0;
}

namespace {

nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

// ESS of a chain, NaN when the chain never moved.
double chain_ess(std::span<const double> chain) {
  try {
    return ess(chain);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::degenerate) throw;
    return std::numeric_limits<double>::quiet_NaN();
  }
}

std::string csv_row(std::initializer_list<double> values) {
  std::string row;
  for (double v : values) {
    if (!row.empty()) row += ',';
    row += io::format_double(v);
  }
  return row;
}

}  // namespace

int cmd_diagnose(const Options& o, RunContext& ctx) {
  SampleSet all = io::read_samples(o.samples);
  ctx.inputs.push_back(o.samples);
  require(o.burn >= 0 && o.burn < static_cast<int>(all.samples.size()), ErrorKind::config,
          "--burn must leave at least one sample");
  SampleSet set = all;
  set.samples.assign(all.samples.begin() + o.burn, all.samples.end());
  const int n = static_cast<int>(set.samples.size());
  const int n_coeff = std::min(o.n_coeff, set.n_kl);
  fs::create_directories(o.out_dir);
  auto out_path = [&](const std::string& name) { return (fs::path(o.out_dir) / name).string(); };
  auto emit = [&](const std::string& name, const std::string& content) {
    io::atomic_write(out_path(name), content);
    add_output(ctx, "--out-dir", out_path(name));
  };

  SeabedCurve truth;
  if (o.has_truth) {
    truth = io::read_curve(o.truth);
    ctx.inputs.push_back(o.truth);
  }
  const bool truth_coeffs = o.has_truth && static_cast<int>(truth.coeffs.size()) >= n_coeff;

  nlohmann::json summary;
  summary["sampler"] = set.sampler;
  summary["n_samples"] = n;
  summary["burn"] = o.burn;
  summary["n_kl"] = set.n_kl;
  auto rate = [](long a, long p) { return p > 0 ? static_cast<double>(a) / p : 0.0; };
  summary["accept_h"] = rate(set.accepted_h, set.proposed_h);
  summary["accept_s"] = rate(set.accepted_s, set.proposed_s);
  summary["beta_h"] = set.beta_h;
  summary["beta_s"] = set.beta_s;
  if (set.stretch > 0.0) {
    summary["stretch"] = set.stretch;
    summary["accept_stretch"] = rate(set.accepted_stretch, set.proposed_stretch);
  }

  // Coefficient marginals.
  std::string coeff_csv = "j,mean,sd,hpd_lo,hpd_hi,ess";
  if (truth_coeffs) coeff_csv += ",truth,truth_in_hpd";
  coeff_csv += '\n';
  auto coeffs_json = nlohmann::json::array();
  for (int j = 0; j < n_coeff; ++j) {
    const auto c = set.coefficient(j);
    double mean = 0.0;
    for (double v : c) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : c) var += (v - mean) * (v - mean);
    const double sd = n > 1 ? std::sqrt(var / (n - 1)) : 0.0;
    const Interval iv = hpd(c, o.hpd_level);
    const double e = chain_ess(c);
    coeff_csv += std::to_string(j + 1) + ',' + csv_row({mean, sd, iv.lo, iv.hi, e});
    nlohmann::json cj{{"j", j + 1}, {"mean", mean}, {"sd", sd}, {"hpd", {iv.lo, iv.hi}},
                      {"ess", number_or_null(e)}};
    if (truth_coeffs) {
      const double t = truth.coeffs[j];
      coeff_csv += ',' + io::format_double(t) + ',' + (iv.contains(t) ? "1" : "0");
      cj["truth"] = t;
      cj["truth_in_hpd"] = iv.contains(t);
    }
    coeff_csv += '\n';
    coeffs_json.push_back(cj);
    ctx.out << "ess beta_" << (j + 1) << " = " << e << '\n';
  }
  summary["coefficients"] = coeffs_json;
  emit("coefficients.csv", coeff_csv);

  // Trace of s, phi and the leading coefficients.
  std::string trace = "iteration,walker,s,phi";
  for (int j = 0; j < n_coeff; ++j) trace += ",beta_" + std::to_string(j + 1);
  trace += '\n';
  for (const auto& smp : set.samples) {
    trace += std::to_string(smp.iteration) + ',' + std::to_string(smp.walker) + ',' +
             csv_row({smp.s, smp.phi});
    for (int j = 0; j < n_coeff; ++j) trace += ',' + io::format_double(smp.coeffs[j]);
    trace += '\n';
  }
  emit("trace.csv", trace);

  const auto phi_chain = set.phi_chain();
  const double phi_ess = chain_ess(phi_chain);
  summary["ess_phi"] = number_or_null(phi_ess);
  ctx.out << "ess phi = " << phi_ess << '\n';

  const auto s_chain = set.s_chain();
  const auto [s_min, s_max] = std::minmax_element(s_chain.begin(), s_chain.end());
  const bool s_varies = *s_max > *s_min;
  std::vector<PlotSeries> kde_series;
  if (s_varies) {
    std::vector<double> sorted = s_chain;
    std::sort(sorted.begin(), sorted.end());
    double mean = 0.0;
    for (double v : s_chain) mean += v;
    mean /= n;
    const Interval iv = hpd(s_chain, o.hpd_level);
    const double e = chain_ess(s_chain);
    summary["s"] = {{"mean", mean},
                    {"median", quantile_sorted(sorted, 0.5)},
                    {"hpd", {iv.lo, iv.hi}},
                    {"ess", number_or_null(e)}};
    ctx.out << "ess s = " << e << '\n';
    ctx.out << "s median = " << quantile_sorted(sorted, 0.5) << ", " << o.hpd_level
            << " HPD = [" << iv.lo << ", " << iv.hi << "]\n";
    const Kde density = kde(s_chain);
    std::string csv = "s,density\n";
    for (std::size_t i = 0; i < density.x.size(); ++i) {
      csv += csv_row({density.x[i], density.density[i]}) + '\n';
    }
    emit("kde_s.csv", csv);
    summary["s"]["kde_bandwidth"] = density.bandwidth;
    summary["s"]["kde_mode"] = density.mode();
    kde_series.push_back({"KDE of s", density.x, density.density, "#1f77b4", false});
  } else {
    summary["s"] = {{"fixed", s_chain.empty() ? 0.0 : s_chain.front()}};
  }

  // Posterior mean seabed and pointwise band.
  const KlConfig kl = kl_from(o, set.n_kl);
  const SeabedCurve hbar = posterior_mean_seabed(set, kl, o.mean_offset);
  {
    io::atomic_write(out_path("posterior_mean.csv"), io::curve_to_csv(hbar, {o.ell, set.n_kl, 0}));
    add_output(ctx, "--out-dir", out_path("posterior_mean.csv"));
  }
  std::vector<PlotSeries> band_series;
  if (n >= 30) {
    require(o.band == "equal" || o.band == "hpd", ErrorKind::config, "--band must be equal or hpd");
    const BandKind kind = o.band == "hpd" ? BandKind::hpd : BandKind::equal_tailed;
    const CredibilityBand band = credibility_band(set, kl, o.mean_offset, o.level, kind);
    std::string csv = "x,lower,mean,upper,posterior_mean";
    if (o.has_truth) csv += ",truth";
    csv += '\n';
    std::vector<double> truth_values;
    for (std::size_t i = 0; i < band.xs.size(); ++i) {
      csv += csv_row({band.xs[i], band.lower[i], band.mean[i], band.upper[i], hbar.values[i]});
      if (o.has_truth) {
        truth_values.push_back(truth.at(band.xs[i]));
        csv += ',' + io::format_double(truth_values.back());
      }
      csv += '\n';
    }
    emit("band.csv", csv);
    summary["band"] = {{"level", o.level}, {"kind", o.band}};
    if (o.has_truth) {
      const double cov = band.coverage(truth_values, o.window_lo, o.window_hi);
      summary["band"]["truth_coverage"] = cov;
      summary["band"]["window"] = {o.window_lo, o.window_hi};
      ctx.out << "truth inside the " << o.level << " band on [" << o.window_lo << ", "
              << o.window_hi << "]: " << cov << '\n';
      band_series.push_back({"truth", band.xs, truth_values, "#000000", false});
    }
    band_series.push_back({"lower", band.xs, band.lower, "#9ecae1", true});
    band_series.push_back({"upper", band.xs, band.upper, "#9ecae1", true});
    band_series.push_back({"posterior mean", band.xs, hbar.values, "#d62728", false});
  } else {
    ctx.out << "band skipped: " << n << " samples, at least 30 needed\n";
  }

  if (o.plots) {
    std::vector<double> it, sv;
    for (const auto& smp : set.samples) {
      it.push_back(smp.iteration);
      sv.push_back(s_varies ? smp.s : smp.coeffs.front());
    }
    emit("trace.svg", svg_line_plot({{s_varies ? "s" : "beta_1", it, sv, "#1f77b4", false}},
                                    "trace", "iteration", s_varies ? "s" : "beta_1"));
    if (!kde_series.empty()) emit("kde_s.svg", svg_line_plot(kde_series, "posterior of s", "s", "density"));
    if (!band_series.empty()) {
      emit("band.svg", svg_line_plot(band_series, "seabed credibility band", "x", "h"));
    }
  }
  emit("summary.json", summary.dump(2) + "\n");
  return 0;
}

int cmd_make_oop(const Options& o, RunContext& ctx) {
  OutOfPriorConfig cfg;
  cfg.coarse_n = o.coarse_n;
  cfg.fine_n = o.fine_n;
  cfg.kernel_width = o.kernel_width;
  cfg.amplitude = o.oop_amplitude;
  Rng rng(o.seed);
  const SeabedCurve h = out_of_prior_seabed(rng, cfg);
  io::write_curve(o.out, h, {0.0, 0, o.seed});
  add_output(ctx, "--out", o.out);
  ctx.seeds["seed"] = o.seed;
  ctx.out << "make-oop-seabed: " << h.values.size() << " points, range [" << h.min_value()
          << ", " << h.max_value() << "]\n";
  return 0;
}

}  // namespace seabed::cli
