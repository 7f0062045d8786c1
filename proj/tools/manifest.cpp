#include <filesystem>

#include "commands.hpp"
#include "seabed/io.hpp"
#include "seabed/wave_solver.hpp"

#ifndef SEABED_VERSION
#define SEABED_VERSION "unknown"
#endif

namespace seabed::cli {

namespace fs = std::filesystem;

void write_manifest(const std::string& path, const ManifestRecord& rec, const RunContext& ctx) {
  nlohmann::json m;
  m["schema"] = io::kManifestSchema;
  m["version"] = SEABED_VERSION;
  m["command"] = rec.command;
  m["args"] = rec.args;
  m["options"] = rec.options;
  m["seeds"] = ctx.seeds;
  m["threads"] = ctx.threads;
  m["timings"] = ctx.timings;
  auto inputs = nlohmann::json::array();
  for (const auto& p : ctx.inputs) {
    inputs.push_back({{"path", p}, {"sha256", io::sha256_file(p)}});
  }
  m["inputs"] = inputs;
  auto outputs = nlohmann::json::array();
  for (const auto& f : ctx.outputs) {
    outputs.push_back({{"option", f.option}, {"path", f.path}, {"sha256", io::sha256_file(f.path)}});
  }
  m["outputs"] = outputs;
  io::atomic_write(path, m.dump(2) + "\n");
}

std::string default_manifest_path(const Options& o, const std::string& command) {
  if (command == "diagnose" || command == "replay") {
    return (fs::path(o.out_dir) / "manifest.json").string();
  }
  return o.out + ".manifest.json";
}

}  // namespace seabed::cli
