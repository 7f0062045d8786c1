#include "seabed/error.hpp"

#include <iostream>
#include <mutex>

namespace seabed {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::index: return "index";
    case ErrorKind::config: return "config";
    case ErrorKind::alignment: return "alignment";
    case ErrorKind::shape: return "shape";
    case ErrorKind::singularity: return "singularity";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::instability: return "instability";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::io: return "io";
    case ErrorKind::usage: return "usage";
  }
  return "unknown";
}

namespace {
std::mutex sink_mutex;
WarningSink& sink() {
  static WarningSink s = [](const std::string& m) { std::cerr << "warning: " << m << '\n'; };
  return s;
}
}  // namespace

void set_warning_sink(WarningSink s) {
  std::lock_guard lock(sink_mutex);
  sink() = std::move(s);
}

void warn(const std::string& message) {
  std::lock_guard lock(sink_mutex);
  if (sink()) sink()(message);
}

void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, std::string(to_string(kind)) + " error: " + what);
}

}  // namespace seabed
