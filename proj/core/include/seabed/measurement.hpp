#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace seabed {

inline constexpr const char* kMeasurementSchema = "seabed.measurement.v1";

struct MeasurementMeta {
  /// Interval between recorded snapshots; snapshot l is taken at (l + 1) dt.
  double dt = 0.0;
  double t_max = 0.0;
  std::vector<double> sensor_xs;
  std::vector<double> frequencies;
  int mesh_nx = 0;
  int mesh_ny = 0;
  std::uint64_t seed = 0;
  /// Relative noise level used to derive sigma; 0 for clean data.
  double rel_noise = 0.0;
  /// Solver steps per snapshot; the solver step is dt / record_stride.
  int record_stride = 1;
  /// Source layout used to generate the data; empty when unknown.
  std::vector<double> source_xs;
  double source_depth = 0.0;
  double source_width = 0.0;
};

/// Readings indexed by (frequency i, sensor k, snapshot l). Storage keeps each
/// snapshot contiguous: data[(i * n_time + l) * n_sensor + k].
struct Measurement {
  int n_freq = 0;
  int n_sensor = 0;
  int n_time = 0;
  std::vector<double> data;
  /// Per-frequency noise scale; empty when no noise model was applied.
  std::vector<double> sigma;
  MeasurementMeta meta;

  Measurement() = default;
  Measurement(int nf, int ns, int nt);

  std::size_t index(int i, int k, int l) const {
    return (static_cast<std::size_t>(i) * n_time + l) * n_sensor + k;
  }
  double& at(int i, int k, int l) { return data[index(i, k, l)]; }
  double at(int i, int k, int l) const { return data[index(i, k, l)]; }
  std::span<double> snapshot(int i, int l) {
    return {data.data() + index(i, 0, l), static_cast<std::size_t>(n_sensor)};
  }
  std::span<const double> snapshot(int i, int l) const {
    return {data.data() + index(i, 0, l), static_cast<std::size_t>(n_sensor)};
  }
  /// All snapshots of channel i.
  std::span<const double> channel(int i) const {
    return {data.data() + index(i, 0, 0), static_cast<std::size_t>(n_time) * n_sensor};
  }
  std::span<double> channel(int i) {
    return {data.data() + index(i, 0, 0), static_cast<std::size_t>(n_time) * n_sensor};
  }
  bool same_shape(const Measurement& other) const {
    return n_freq == other.n_freq && n_sensor == other.n_sensor && n_time == other.n_time;
  }
};

/// CSV with a leading "# {json}" metadata line and columns
/// freq_idx,sensor_idx,time_idx,value. Values round-trip exactly.
std::string measurement_to_csv(const Measurement& m);
Measurement measurement_from_csv(const std::string& text);
void write_measurement(const std::string& path, const Measurement& m);
Measurement read_measurement(const std::string& path);

}  // namespace seabed
