#include "seabed/io.hpp"

#include <openssl/evp.h>
#include <unistd.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "seabed/error.hpp"

namespace seabed::io {

using nlohmann::json;

void atomic_write(const std::string& path, std::string_view content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorKind::io, "cannot open " + tmp + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    require(static_cast<bool>(out), ErrorKind::io, "write to " + tmp + " failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorKind::io, "cannot move " + tmp + " to " + path);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  require(EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) == 1,
          ErrorKind::io, "sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

std::string sha256_file(const std::string& path) { return sha256_hex(read_file(path)); }

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\r')) text.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    // from_chars rejects "inf"/"nan" spellings produced by printf
    const std::string s(text);
    if (s == "inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
    if (s == "nan" || s == "-nan") return std::nan("");
    fail(ErrorKind::io, "cannot parse number '" + s + "'");
  }
  return v;
}

std::pair<std::string, std::string> split_header(const std::string& text) {
  require(text.rfind("# ", 0) == 0, ErrorKind::io, "missing '# {json}' header line");
  const auto eol = text.find('\n');
  require(eol != std::string::npos, ErrorKind::io, "truncated header line");
  return {text.substr(2, eol - 2), text.substr(eol + 1)};
}

std::string curve_to_csv(const SeabedCurve& h, const CurveProvenance& prov) {
  json head;
  head["schema"] = kCurveSchema;
  head["s"] = h.s;
  head["mean_offset"] = h.mean_offset;
  head["periodic"] = h.periodic;
  head["period"] = h.period;
  json coeffs = json::array();
  for (double c : h.coeffs) coeffs.push_back(format_double(c));
  head["coeffs"] = coeffs;
  if (prov.ell > 0.0) head["ell"] = prov.ell;
  if (prov.n_kl > 0) head["n_kl"] = prov.n_kl;
  if (prov.seed != 0) head["seed"] = prov.seed;
  std::string out = "# " + head.dump() + "\nx,h\n";
  for (std::size_t i = 0; i < h.xs.size(); ++i) {
    out += format_double(h.xs[i]);
    out += ',';
    out += format_double(h.values[i]);
    out += '\n';
  }
  return out;
}

SeabedCurve curve_from_csv(const std::string& text, CurveProvenance* prov) {
  const auto [header, body] = split_header(text);
  json head;
  try {
    head = json::parse(header);
  } catch (const json::exception& e) {
    fail(ErrorKind::io, std::string("bad curve header: ") + e.what());
  }
  require(head.value("schema", "") == kCurveSchema, ErrorKind::io,
          "not a seabed curve file (schema tag mismatch)");
  SeabedCurve h;
  h.s = head.value("s", 0.0);
  h.mean_offset = head.value("mean_offset", 0.0);
  h.periodic = head.value("periodic", false);
  h.period = head.value("period", 0.0);
  for (const auto& c : head.value("coeffs", json::array())) {
    h.coeffs.push_back(parse_double(c.get<std::string>()));
  }
  if (prov) {
    prov->ell = head.value("ell", 0.0);
    prov->n_kl = head.value("n_kl", 0);
    prov->seed = head.value("seed", std::uint64_t{0});
  }
  std::istringstream in(body);
  std::string line;
  std::getline(in, line);
  require(line.rfind("x,h", 0) == 0, ErrorKind::io, "curve file lacks the x,h header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    require(comma != std::string::npos, ErrorKind::io, "malformed curve row: " + line);
    h.xs.push_back(parse_double(std::string_view(line).substr(0, comma)));
    h.values.push_back(parse_double(std::string_view(line).substr(comma + 1)));
  }
  require(h.xs.size() >= 2, ErrorKind::io, "curve file holds fewer than two points");
  return h;
}

void write_curve(const std::string& path, const SeabedCurve& h, const CurveProvenance& prov) {
  atomic_write(path, curve_to_csv(h, prov));
}

SeabedCurve read_curve(const std::string& path, CurveProvenance* prov) {
  return curve_from_csv(read_file(path), prov);
}

namespace {

json double_array(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(format_double(x));
  return a;
}

std::vector<double> double_array(const json& a) {
  std::vector<double> v;
  for (const auto& x : a) v.push_back(parse_double(x.get<std::string>()));
  return v;
}

}  // namespace

std::string samples_to_csv(const SampleSet& set) {
  json head;
  head["schema"] = kSamplesSchema;
  head["sampler"] = set.sampler;
  head["n_kl"] = set.n_kl;
  head["n_samples"] = set.samples.size();
  head["proposed_h"] = set.proposed_h;
  head["accepted_h"] = set.accepted_h;
  head["proposed_s"] = set.proposed_s;
  head["accepted_s"] = set.accepted_s;
  head["proposed_stretch"] = set.proposed_stretch;
  head["accepted_stretch"] = set.accepted_stretch;
  head["beta_h"] = format_double(set.beta_h);
  head["beta_s"] = format_double(set.beta_s);
  head["stretch"] = format_double(set.stretch);
  json finals = json::array();
  for (const auto& st : set.final_states) {
    finals.push_back({{"s", format_double(st.s)},
                      {"phi", format_double(st.phi)},
                      {"coeffs", double_array(st.coeffs)}});
  }
  head["final_states"] = finals;

  std::string out = "# " + head.dump() + "\niteration,walker,s,phi,accepted_h_rate,accepted_s_rate";
  for (int j = 1; j <= set.n_kl; ++j) out += ",beta_" + std::to_string(j);
  out += '\n';
  for (const auto& c : set.samples) {
    out += std::to_string(c.iteration);
    out += ',';
    out += std::to_string(c.walker);
    for (double v : {c.s, c.phi, c.rate_h, c.rate_s}) {
      out += ',';
      out += format_double(v);
    }
    for (double v : c.coeffs) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

SampleSet samples_from_csv(const std::string& text) {
  const auto [header, body] = split_header(text);
  json head;
  try {
    head = json::parse(header);
  } catch (const json::exception& e) {
    fail(ErrorKind::io, std::string("bad sample header: ") + e.what());
  }
  require(head.value("schema", "") == kSamplesSchema, ErrorKind::io,
          "not a sample file (schema tag mismatch)");
  SampleSet set;
  set.sampler = head.value("sampler", "gibbs");
  set.n_kl = head.at("n_kl").get<int>();
  set.proposed_h = head.value("proposed_h", 0L);
  set.accepted_h = head.value("accepted_h", 0L);
  set.proposed_s = head.value("proposed_s", 0L);
  set.accepted_s = head.value("accepted_s", 0L);
  set.proposed_stretch = head.value("proposed_stretch", 0L);
  set.accepted_stretch = head.value("accepted_stretch", 0L);
  set.beta_h = parse_double(head.at("beta_h").get<std::string>());
  set.beta_s = parse_double(head.at("beta_s").get<std::string>());
  set.stretch = parse_double(head.at("stretch").get<std::string>());
  for (const auto& f : head.value("final_states", json::array())) {
    ChainState st;
    st.s = parse_double(f.at("s").get<std::string>());
    st.phi = parse_double(f.at("phi").get<std::string>());
    st.coeffs = double_array(f.at("coeffs"));
    set.final_states.push_back(std::move(st));
  }

  std::istringstream in(body);
  std::string line;
  std::getline(in, line);
  require(line.rfind("iteration,", 0) == 0, ErrorKind::io, "sample file lacks its header");
  const std::size_t expected = 6 + static_cast<std::size_t>(set.n_kl);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string_view> cells;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      cells.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    require(cells.size() == expected, ErrorKind::io, "sample row has the wrong column count");
    ChainSample c;
    c.iteration = static_cast<int>(parse_double(cells[0]));
    c.walker = static_cast<int>(parse_double(cells[1]));
    c.s = parse_double(cells[2]);
    c.phi = parse_double(cells[3]);
    c.rate_h = parse_double(cells[4]);
    c.rate_s = parse_double(cells[5]);
    c.accepted_h = c.rate_h > 0.0;
    c.accepted_s = c.rate_s > 0.0;
    for (std::size_t j = 6; j < cells.size(); ++j) c.coeffs.push_back(parse_double(cells[j]));
    set.samples.push_back(std::move(c));
  }
  require(set.samples.size() == head.value("n_samples", set.samples.size()), ErrorKind::io,
          "sample file is truncated");
  return set;
}

void write_samples(const std::string& path, const SampleSet& set) {
  atomic_write(path, samples_to_csv(set));
}

SampleSet read_samples(const std::string& path) { return samples_from_csv(read_file(path)); }

}  // namespace seabed::io
