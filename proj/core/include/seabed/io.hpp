#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>

#include "seabed/kl_prior.hpp"
#include "seabed/samplers.hpp"

namespace seabed::io {

inline constexpr const char* kCurveSchema = "seabed.curve.v1";
inline constexpr const char* kSamplesSchema = "seabed.samples.v1";
inline constexpr const char* kManifestSchema = "seabed.manifest.v1";

/// Writes to a temporary sibling and renames it into place.
void atomic_write(const std::string& path, std::string_view content);
std::string read_file(const std::string& path);

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::string& path);

/// Shortest round-trip-safe text for a double (%.17g).
std::string format_double(double v);
double parse_double(std::string_view text);

/// Splits "# {json}\n<rest>" into the JSON text and the remaining body;
/// io error if the header line is missing.
std::pair<std::string, std::string> split_header(const std::string& text);

/// How a curve was produced; zero fields are omitted from the header.
struct CurveProvenance {
  double ell = 0.0;
  int n_kl = 0;
  std::uint64_t seed = 0;
};

/// Curve CSV: "# {json}" header (schema, s, mean offset, periodicity,
/// coefficients, provenance) then x,h rows.
std::string curve_to_csv(const SeabedCurve& h, const CurveProvenance& prov = {});
SeabedCurve curve_from_csv(const std::string& text, CurveProvenance* prov = nullptr);
void write_curve(const std::string& path, const SeabedCurve& h, const CurveProvenance& prov = {});
SeabedCurve read_curve(const std::string& path, CurveProvenance* prov = nullptr);

/// Sample CSV: "# {json}" header (schema, sampler, acceptance counts, final
/// step sizes, final states) then
/// iteration,s,phi,accepted_h_rate,accepted_s_rate,beta_1..beta_n.
std::string samples_to_csv(const SampleSet& set);
SampleSet samples_from_csv(const std::string& text);
void write_samples(const std::string& path, const SampleSet& set);
SampleSet read_samples(const std::string& path);

}  // namespace seabed::io
