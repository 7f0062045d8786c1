#include "cli.hpp"

#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <set>

#include "CLI11.hpp"
#include "commands.hpp"
#include "seabed/io.hpp"

#ifndef SEABED_VERSION
#define SEABED_VERSION "unknown"
#endif

namespace seabed::cli {
namespace {

namespace fs = std::filesystem;

// Options naming files a run writes; replay redirects them into its out-dir.
const std::vector<std::string> kOutputOptions{"--out",       "--out-dir",    "--truth-out",
                                              "--clean-out", "--warmup-out", "--svg"};

void add_mesh(CLI::App* app, Options& o) {
  app->add_option("--nx", o.nx, "Cells in x")->group("Mesh")->check(CLI::PositiveNumber);
  app->add_option("--ny", o.ny, "Cells in y")->group("Mesh")->check(CLI::PositiveNumber);
}

void add_solver(CLI::App* app, Options& o) {
  const char* g = "Solver";
  app->add_option("--dt", o.dt, "Time step")->group(g);
  app->add_option("--t-max", o.t_max, "Final time")->group(g);
  app->add_option("--freq", o.freq, "Source central frequencies, one channel each")->group(g);
  app->add_option("--cg-tol", o.cg_tol, "Relative CG residual tolerance")->group(g);
  app->add_option("--cg-max-iter", o.cg_max_iter, "CG iteration cap")->group(g);
  app->add_option("--record-stride", o.record_stride, "Solver steps per recorded snapshot")
      ->group(g);
  app->add_flag("--closed", o.closed, "Reflecting walls instead of absorbing ones")->group(g);
  app->add_option("--source-x", o.source_x, "Source x positions")->group(g);
  app->add_option("--source-depth", o.source_depth, "Source y position")->group(g);
  app->add_option("--source-width", o.source_width, "Gaussian source width")->group(g);
  app->add_option("--amplitude", o.amplitude, "Source amplitude")->group(g);
  app->add_option("--threads", o.threads,
                  "Worker threads across frequencies (0: SEABED_NUM_THREADS or hardware)")
      ->group(g);
}

void add_material(CLI::App* app, Options& o) {
  const char* g = "Material";
  app->add_option("--rho0", o.rho0, "Water reference density")->group(g);
  app->add_option("--rho-rock", o.rho_rock, "Rock density")->group(g);
  app->add_option("--lambda0", o.lambda0, "Water reference stiffness")->group(g);
  app->add_option("--alpha-rock", o.alpha_rock, "Rock stiffness")->group(g);
  app->add_option("--sampling", o.sampling, "Material sampling per triangle")
      ->group(g)
      ->check(CLI::IsMember({"cell_average", "centroid"}));
}

void add_prior(CLI::App* app, Options& o) {
  const char* g = "Prior";
  app->add_option("--n-kl", o.n_kl, "KL modes")->group(g);
  app->add_option("--grid-n", o.grid_n, "KL grid points")->group(g);
  app->add_option("--ell", o.ell, "Correlation length")->group(g);
  app->add_option("--mean-offset", o.mean_offset, "Prior mean level")->group(g);
}

void add_noise(CLI::App* app, Options& o) {
  app->add_option("--noise-rel", o.noise_rel, "Noise level relative to the largest snapshot")
      ->group("Noise");
  app->add_option("--sigma-convention", o.sigma_convention, "variance or literal")
      ->group("Noise")
      ->check(CLI::IsMember({"variance", "literal"}));
}

void add_chain(CLI::App* app, Options& o, bool hierarchical) {
  const char* g = "Chain";
  app->add_option("--n-sample", o.n_sample, "Online samples (sweeps for ensembles)")->group(g);
  app->add_option("--n-warmup", o.n_warmup, "Adaptive warm-up iterations")->group(g);
  app->add_option("--beta-h", o.beta_h, "Initial pCN step")->group(g);
  app->add_option("--n-inner-h", o.n_inner_h, "pCN updates per outer iteration")->group(g);
  app->add_option("--seed", o.seed, "Sampler seed")->group(g);
  app->add_option("--kappa0", o.kappa0, "Adaptation gain")->group(g);
  app->add_option("--target-accept", o.target_accept, "Warm-up acceptance target")->group(g);
  app->add_option("--init", o.init, "Initial coefficients")
      ->group(g)
      ->check(CLI::IsMember({"zero", "prior"}));
  app->add_option("--init-seed", o.init_seed, "Seed for prior initial states")->group(g);
  if (hierarchical) {
    app->add_option("--beta-s", o.beta_s, "Initial s random-walk step")->group(g);
    app->add_option("--n-inner-s", o.n_inner_s, "s updates per outer iteration")->group(g);
    app->add_option("--s-lo", o.s_lo, "Lower bound of the uniform prior on s")->group(g);
    app->add_option("--s-hi", o.s_hi, "Upper bound of the uniform prior on s")->group(g);
    app->add_option("--s-init", o.s_init, "Initial s when --init zero")->group(g);
  } else {
    app->add_option("--s", o.s, "Fixed regularity")->group(g);
  }
}

struct Command {
  CLI::App* app = nullptr;
  std::unique_ptr<Options> opts;
};

std::string long_name(const CLI::Option* opt) {
  const auto& names = opt->get_lnames();
  return names.empty() ? std::string() : "--" + names.front();
}

bool skip_in_manifest(const std::string& name) {
  return name.empty() || name == "--help" || name == "--config" || name == "--manifest";
}

bool truthy(const std::string& v) {
  return !(v == "false" || v == "0" || v == "off" || v == "no" || v.empty());
}

// Arguments that reproduce the parsed options, config-file values included.
std::vector<std::string> canonical_args(const CLI::App* app) {
  std::vector<std::string> args;
  for (const CLI::Option* opt : app->get_options()) {
    const std::string name = long_name(opt);
    if (skip_in_manifest(name) || opt->count() == 0) continue;
    if (opt->get_expected_max() == 0) {
      if (truthy(opt->results().empty() ? "true" : opt->results().back())) args.push_back(name);
      continue;
    }
    for (const auto& r : opt->results()) args.push_back(name + "=" + r);
  }
  return args;
}

nlohmann::json resolved_options(const CLI::App* app) {
  nlohmann::json j = nlohmann::json::object();
  for (const CLI::Option* opt : app->get_options()) {
    const std::string name = long_name(opt);
    if (skip_in_manifest(name)) continue;
    if (opt->count() > 0) {
      j[name.substr(2)] = opt->get_expected_max() == 0 ? nlohmann::json(true)
                                                       : nlohmann::json(opt->results());
    } else {
      j[name.substr(2)] = opt->get_default_str();
    }
  }
  return j;
}

void mark_given(const CLI::App* app, Options& o) {
  auto given = [&](const char* name) {
    for (const CLI::Option* opt : app->get_options()) {
      if (long_name(opt) == name) return opt->count() > 0;
    }
    return false;
  };
  o.has_seabed = given("--seabed");
  o.has_flat = given("--flat");
  o.has_truth = given("--truth");
  o.has_dt = given("--dt");
  o.has_t_max = given("--t-max");
  o.has_freq = given("--freq");
  o.has_record_stride = given("--record-stride");
  o.has_source_x = given("--source-x");
  o.has_source_depth = given("--source-depth");
  o.has_source_width = given("--source-width");
}

std::string replay_path(const std::string& option, const std::string& path,
                        const std::string& out_dir, const std::string& orig_out_dir) {
  if (option == "--out-dir") {
    const auto rel = fs::path(path).lexically_relative(orig_out_dir);
    return (fs::path(out_dir) / rel).string();
  }
  return (fs::path(out_dir) / fs::path(path).filename()).string();
}

int run_replay(const std::string& manifest_path, const std::string& out_dir, std::ostream& out,
               std::ostream& err) {
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(io::read_file(manifest_path));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::io, "cannot parse manifest " + manifest_path + ": " + e.what());
  }
  require(m.value("schema", "") == io::kManifestSchema, ErrorKind::config,
          "not a run manifest: " + manifest_path);
  const std::string command = m.at("command").get<std::string>();
  require(command != "replay", ErrorKind::config, "cannot replay a replay manifest");
  for (const auto& in : m.at("inputs")) {
    const std::string p = in.at("path").get<std::string>();
    require(io::sha256_file(p) == in.at("sha256").get<std::string>(), ErrorKind::config,
            "input " + p + " changed since the recorded run");
  }
  fs::create_directories(out_dir);

  std::string orig_out_dir;
  std::vector<std::string> args{command};
  for (const auto& a : m.at("args")) {
    const std::string s = a.get<std::string>();
    if (s.rfind("--out-dir=", 0) == 0) orig_out_dir = s.substr(10);
  }
  for (const auto& a : m.at("args")) {
    std::string s = a.get<std::string>();
    const auto eq = s.find('=');
    const std::string name = s.substr(0, eq);
    if (eq != std::string::npos &&
        std::find(kOutputOptions.begin(), kOutputOptions.end(), name) != kOutputOptions.end()) {
      s = name == "--out-dir" ? name + "=" + out_dir
                              : name + "=" + replay_path(name, s.substr(eq + 1), out_dir, orig_out_dir);
    }
    args.push_back(s);
  }
  args.push_back("--manifest=" + (fs::path(out_dir) / "replay.manifest.json").string());

  const int code = run(args, out, err);
  if (code != kExitOk) return code;

  int mismatches = 0;
  for (const auto& o : m.at("outputs")) {
    const std::string option = o.at("option").get<std::string>();
    const std::string path = o.at("path").get<std::string>();
    const std::string fresh = replay_path(option, path, out_dir, orig_out_dir);
    const bool same = fs::exists(fresh) && io::sha256_file(fresh) == o.at("sha256").get<std::string>();
    out << (same ? "identical " : "DIFFERENT ") << fresh << '\n';
    if (!same) ++mismatches;
  }
  if (mismatches > 0) {
    err << "replay: " << mismatches << " output(s) differ from the manifest\n";
    return kExitFailure;
  }
  out << "replay: all " << m.at("outputs").size() << " outputs are bitwise identical\n";
  return kExitOk;
}

// Inserts the entries of a --config file ahead of the command line arguments.
// Keys also given on the command line are skipped so flags override the file.
// Top-level keys and keys in a section named after the subcommand apply.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  if (args.empty()) return args;
  std::string path;
  std::set<std::string> given;
  for (std::size_t i = 1; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) != 0) continue;
    const auto eq = a.find('=');
    const std::string name = a.substr(2, eq == std::string::npos ? std::string::npos : eq - 2);
    given.insert(name);
    if (name == "config") {
      if (eq != std::string::npos) {
        path = a.substr(eq + 1);
      } else if (i + 1 < args.size()) {
        path = args[i + 1];
      }
    }
  }
  if (path.empty()) return args;
  require(fs::exists(path), ErrorKind::io, "config file " + path + " not found");
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_file(path);
  } catch (const CLI::Error& e) {
    fail(ErrorKind::config, "cannot parse config file " + path + ": " + e.what());
  }
  std::vector<std::string> out{args.front()};
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    if (!item.parents.empty() && !(item.parents.size() == 1 && item.parents[0] == args.front())) {
      continue;
    }
    if (given.count(item.name) > 0) continue;
    if (item.inputs.size() == 1 && (item.inputs[0] == "true" || item.inputs[0] == "false")) {
      if (item.inputs[0] == "true") out.push_back("--" + item.name);
      continue;
    }
    for (const auto& v : item.inputs) out.push_back("--" + item.name + "=" + v);
  }
  out.insert(out.end(), args.begin() + 1, args.end());
  return out;
}

}  // namespace

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::usage:
      return kExitUsage;
    case ErrorKind::config:
    case ErrorKind::alignment:
    case ErrorKind::io:
    case ErrorKind::index:
    case ErrorKind::shape:
    case ErrorKind::domain:
      return kExitConfig;
    case ErrorKind::convergence:
    case ErrorKind::instability:
    case ErrorKind::singularity:
    case ErrorKind::degenerate:
      return kExitNumerical;
  }
  return kExitFailure;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Seabed interface inference from surface wave measurements", "seabed"};
  app.set_version_flag("--version", SEABED_VERSION);
  app.require_subcommand(1, 1);
  app.option_defaults()->always_capture_default();

  std::map<std::string, Command> cmds;
  auto sub = [&](const std::string& name, const std::string& desc) -> Options& {
    auto& c = cmds[name];
    c.opts = std::make_unique<Options>();
    c.app = app.add_subcommand(name, desc);
    c.app->add_option("--config", c.opts->config, "Key-value configuration file (flags override it)")
        ->group("Files");
    c.app->add_option("--manifest", c.opts->manifest, "Run manifest path")->group("Files");
    return *c.opts;
  };

  {
    auto& o = sub("forward", "Simulate one seabed and write the sensor traces");
    auto* a = cmds["forward"].app;
    a->add_option("--seabed", o.seabed, "Seabed curve file")->group("Files");
    a->add_option("--flat", o.flat, "Flat seabed at this level")->group("Files");
    a->add_option("--out", o.out, "Measurement file")->required()->group("Files");
    a->add_option("--svg", o.svg, "Trace plot")->group("Files");
    add_mesh(a, o);
    add_solver(a, o);
    add_material(a, o);
  }
  {
    auto& o = sub("generate-data", "Simulate a truth on a fine mesh and add noise");
    o.nx = 376;
    o.ny = 190;
    auto* a = cmds["generate-data"].app;
    a->add_option("--truth", o.truth, "Truth seabed file (default: a prior draw)")->group("Files");
    a->add_option("--truth-out", o.truth_out, "Where to write the drawn truth")->group("Files");
    a->add_option("--out", o.out, "Noisy measurement file")->required()->group("Files");
    a->add_option("--clean-out", o.clean_out, "Noise-free measurement file")->group("Files");
    a->add_option("--svg", o.svg, "Trace plot")->group("Files");
    a->add_option("--truth-s", o.truth_s, "Regularity of the drawn truth")->group("Truth");
    a->add_option("--seed", o.seed, "Seed for the truth draw and the noise")->group("Truth");
    a->add_option("--inference-nx", o.inference_nx, "Inference mesh cells in x (sets sensors)")
        ->group("Mesh");
    a->add_option("--inference-ny", o.inference_ny, "Inference mesh cells in y")->group("Mesh");
    a->add_flag("--allow-inverse-crime", o.allow_inverse_crime,
                "Allow data on the inference mesh")
        ->group("Mesh");
    add_mesh(a, o);
    add_solver(a, o);
    add_material(a, o);
    add_prior(a, o);
    add_noise(a, o);
  }
  for (const std::string mode : {"fixed-s", "mwg", "fes"}) {
    const std::string name = "sample-" + mode;
    auto& o = sub(name, mode == "fixed-s" ? "pCN at fixed regularity"
                        : mode == "mwg"   ? "Metropolis-within-Gibbs over coefficients and s"
                                          : "Ensemble stretch moves on low modes plus pCN");
    auto* a = cmds[name].app;
    a->add_option("--data", o.data, "Noisy measurement file")->required()->group("Files");
    a->add_option("--out", o.out, "Sample file")->required()->group("Files");
    a->add_option("--warmup-out", o.warmup_out, "Warm-up sample file")->group("Files");
    add_mesh(a, o);
    add_solver(a, o);
    add_material(a, o);
    add_prior(a, o);
    add_noise(a, o);
    add_chain(a, o, mode == "mwg");
    if (mode == "fes") {
      a->add_option("--walkers", o.walkers, "Ensemble size")->group("Ensemble");
      a->add_option("--low-modes", o.low_modes, "Modes moved by stretch moves")->group("Ensemble");
      a->add_option("--stretch", o.stretch, "Initial stretch scale")->group("Ensemble");
      a->add_option("--stretch-floor", o.stretch_floor, "Smallest stretch scale")
          ->group("Ensemble");
    }
  }
  {
    auto& o = sub("diagnose", "ESS, KDE, HPD and credibility bands from a sample file");
    auto* a = cmds["diagnose"].app;
    a->add_option("--samples", o.samples, "Sample file")->required()->group("Files");
    a->add_option("--out-dir", o.out_dir, "Output directory")->required()->group("Files");
    a->add_option("--truth", o.truth, "Truth seabed for coverage checks")->group("Files");
    a->add_flag("--svg", o.plots, "Also write SVG plots")->group("Files");
    a->add_option("--burn", o.burn, "Leading samples to drop");
    a->add_option("--level", o.level, "Band level");
    a->add_option("--band", o.band, "Band kind")->check(CLI::IsMember({"equal", "hpd"}));
    a->add_option("--hpd-level", o.hpd_level, "HPD level for marginals");
    a->add_option("--n-coeff", o.n_coeff, "Leading coefficients to summarize");
    a->add_option("--window-lo", o.window_lo, "Coverage window start");
    a->add_option("--window-hi", o.window_hi, "Coverage window end");
    add_prior(a, o);
  }
  {
    auto& o = sub("make-oop-seabed", "Smoothed white-noise seabed outside the prior");
    auto* a = cmds["make-oop-seabed"].app;
    a->add_option("--out", o.out, "Curve file")->required()->group("Files");
    a->add_option("--seed", o.seed, "Seed");
    a->add_option("--coarse-n", o.coarse_n, "White-noise points");
    a->add_option("--fine-n", o.fine_n, "Output points");
    a->add_option("--kernel-width", o.kernel_width, "Gaussian kernel width");
    a->add_option("--amplitude", o.oop_amplitude, "Largest |h|");
  }
  std::string replay_manifest, replay_out;
  {
    auto* a = app.add_subcommand("replay", "Re-run a manifest and compare outputs bitwise");
    a->add_option("--manifest", replay_manifest, "Manifest to replay")->required();
    a->add_option("--out-dir", replay_out, "Directory for the replayed outputs")->required();
  }

  std::vector<std::string> argv = args;
  try {
    argv = expand_config(args);
  } catch (const Error& e) {
    err << "seabed: " << e.what() << '\n';
    return exit_code(e.kind());
  }
  std::vector<std::string> rev(argv.rbegin(), argv.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const CLI::App* chosen = app.get_subcommands().front();
  const std::string command = chosen->get_name();
  try {
    if (command == "replay") return run_replay(replay_manifest, replay_out, out, err);

    Options& o = *cmds.at(command).opts;
    mark_given(chosen, o);
    RunContext ctx{out, err};
    int code = 0;
    if (command == "forward") {
      code = cmd_forward(o, ctx);
    } else if (command == "generate-data") {
      code = cmd_generate_data(o, ctx);
    } else if (command == "sample-fixed-s") {
      code = cmd_sample("fixed", o, ctx);
    } else if (command == "sample-mwg") {
      code = cmd_sample("mwg", o, ctx);
    } else if (command == "sample-fes") {
      code = cmd_sample("fes", o, ctx);
    } else if (command == "diagnose") {
      code = cmd_diagnose(o, ctx);
    } else {
      code = cmd_make_oop(o, ctx);
    }
    if (code == kExitOk) {
      ManifestRecord rec{command, canonical_args(chosen), resolved_options(chosen)};
      write_manifest(o.manifest.empty() ? default_manifest_path(o, command) : o.manifest, rec,
                     ctx);
    }
    return code;
  } catch (const Error& e) {
    err << "seabed " << command << ": " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "seabed " << command << ": " << e.what() << '\n';
    return kExitFailure;
  }
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace seabed::cli
