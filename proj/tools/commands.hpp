#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

namespace seabed::cli {

/// Every option of every subcommand; each subcommand registers the groups it uses.
struct Options {
  // mesh
  int nx = 188;
  int ny = 95;
  // solver
  double dt = 0.0019;
  double t_max = 3.95;
  std::vector<double> freq{4.0};
  double cg_tol = 1e-10;
  int cg_max_iter = 500;
  int record_stride = 1;
  bool closed = false;
  std::vector<double> source_x{-2.4, -1.2, 0.0, 1.2, 2.4};
  double source_depth = 1.4;
  double source_width = 0.0025;
  double amplitude = 1.0;
  int threads = 0;
  // material
  double rho0 = 1.0;
  double rho_rock = 3.0;
  double lambda0 = 1.5;
  double alpha_rock = 6.4;
  std::string sampling = "cell_average";
  // prior
  int n_kl = 256;
  int grid_n = 512;
  double ell = 1.0;
  double mean_offset = 0.0;
  // noise
  double noise_rel = 0.01;
  std::string sigma_convention = "variance";
  // chain
  int n_sample = 20000;
  int n_warmup = 10000;
  double beta_h = 0.1;
  double beta_s = 0.1;
  int n_inner_h = 1;
  int n_inner_s = 1;
  std::uint64_t seed = 1;
  double kappa0 = 1.0;
  double target_accept = 0.234;
  double s_lo = 0.5;
  double s_hi = 5.0;
  double s = 0.75;
  double s_init = 1.0;
  std::string init = "zero";
  std::uint64_t init_seed = 2;
  // ensemble
  int walkers = 40;
  int low_modes = 10;
  double stretch = 2.0;
  double stretch_floor = 1.2;

  // files
  std::string seabed;
  double flat = 0.0;
  std::string out;
  std::string out_dir;
  std::string svg;
  std::string data;
  std::string truth;
  std::string truth_out;
  std::string clean_out;
  std::string warmup_out;
  std::string samples;
  std::string manifest;
  std::string config;

  // generate-data
  double truth_s = 0.75;
  int inference_nx = 188;
  int inference_ny = 95;
  bool allow_inverse_crime = false;

  // diagnose
  int burn = 0;
  double level = 0.99;
  std::string band = "equal";
  double hpd_level = 0.95;
  int n_coeff = 5;
  bool plots = false;
  double window_lo = -2.0;
  double window_hi = 2.0;

  // make-oop-seabed
  int coarse_n = 64;
  int fine_n = 512;
  double kernel_width = 0.25;
  double oop_amplitude = 0.25;

  // which optional choices were given explicitly
  bool has_seabed = false;
  bool has_flat = false;
  bool has_truth = false;
  bool has_dt = false;
  bool has_t_max = false;
  bool has_freq = false;
  bool has_record_stride = false;
  bool has_source_x = false;
  bool has_source_depth = false;
  bool has_source_width = false;
};

struct OutputFile {
  std::string option;
  std::string path;
};

/// Collects what a subcommand read and wrote, for the run manifest.
struct RunContext {
  RunContext(std::ostream& o, std::ostream& e) : out(o), err(e) {}

  std::ostream& out;
  std::ostream& err;
  std::vector<std::string> inputs;
  std::vector<OutputFile> outputs;
  nlohmann::json seeds = nlohmann::json::object();
  nlohmann::json timings = nlohmann::json::object();
  int threads = 0;
};

int cmd_forward(const Options& o, RunContext& ctx);
int cmd_generate_data(const Options& o, RunContext& ctx);
int cmd_sample(const std::string& mode, const Options& o, RunContext& ctx);
int cmd_diagnose(const Options& o, RunContext& ctx);
int cmd_make_oop(const Options& o, RunContext& ctx);

struct ManifestRecord {
  std::string command;
  std::vector<std::string> args;
  nlohmann::json options = nlohmann::json::object();
};

/// Hashes inputs and outputs and writes the manifest atomically.
void write_manifest(const std::string& path, const ManifestRecord& rec, const RunContext& ctx);

/// Default manifest location for a run.
std::string default_manifest_path(const Options& o, const std::string& command);

}  // namespace seabed::cli
