#include "seabed/measurement.hpp"

#include <sstream>
#include <tuple>

#include "json.hpp"
#include "seabed/error.hpp"
#include "seabed/io.hpp"

namespace seabed {

using nlohmann::json;

Measurement::Measurement(int nf, int ns, int nt) : n_freq(nf), n_sensor(ns), n_time(nt) {
  require(nf >= 0 && ns >= 0 && nt >= 0, ErrorKind::shape, "negative measurement dimension");
  data.assign(static_cast<std::size_t>(nf) * ns * nt, 0.0);
}

namespace {

json doubles(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(io::format_double(x));
  return a;
}

std::vector<double> doubles(const json& a) {
  std::vector<double> v;
  for (const auto& x : a) v.push_back(io::parse_double(x.get<std::string>()));
  return v;
}

}  // namespace

std::string measurement_to_csv(const Measurement& m) {
  json head;
  head["schema"] = kMeasurementSchema;
  head["n_freq"] = m.n_freq;
  head["n_sensor"] = m.n_sensor;
  head["n_time"] = m.n_time;
  head["dt"] = io::format_double(m.meta.dt);
  head["t_max"] = io::format_double(m.meta.t_max);
  head["sensor_xs"] = doubles(m.meta.sensor_xs);
  head["frequencies"] = doubles(m.meta.frequencies);
  head["mesh"] = {m.meta.mesh_nx, m.meta.mesh_ny};
  head["seed"] = m.meta.seed;
  head["rel_noise"] = io::format_double(m.meta.rel_noise);
  head["sigma"] = doubles(m.sigma);
  head["record_stride"] = m.meta.record_stride;
  if (!m.meta.source_xs.empty()) {
    head["source_xs"] = doubles(m.meta.source_xs);
    head["source_depth"] = io::format_double(m.meta.source_depth);
    head["source_width"] = io::format_double(m.meta.source_width);
  }

  std::string out = "# " + head.dump() + "\nfreq_idx,sensor_idx,time_idx,value\n";
  out.reserve(out.size() + m.data.size() * 36);
  for (int i = 0; i < m.n_freq; ++i) {
    for (int l = 0; l < m.n_time; ++l) {
      for (int k = 0; k < m.n_sensor; ++k) {
        out += std::to_string(i);
        out += ',';
        out += std::to_string(k);
        out += ',';
        out += std::to_string(l);
        out += ',';
        out += io::format_double(m.at(i, k, l));
        out += '\n';
      }
    }
  }
  return out;
}

Measurement measurement_from_csv(const std::string& text) {
  const auto [header, body] = io::split_header(text);
  json head;
  try {
    head = json::parse(header);
  } catch (const json::exception& e) {
    fail(ErrorKind::io, std::string("bad measurement header: ") + e.what());
  }
  require(head.value("schema", "") == kMeasurementSchema, ErrorKind::io,
          "not a measurement file (schema tag mismatch)");
  Measurement m;
  try {
    m = Measurement(head.at("n_freq").get<int>(), head.at("n_sensor").get<int>(),
                  head.at("n_time").get<int>());
    m.meta.dt = io::parse_double(head.at("dt").get<std::string>());
    m.meta.t_max = io::parse_double(head.at("t_max").get<std::string>());
    m.meta.sensor_xs = doubles(head.at("sensor_xs"));
    m.meta.frequencies = doubles(head.at("frequencies"));
    m.meta.mesh_nx = head.at("mesh").at(0).get<int>();
    m.meta.mesh_ny = head.at("mesh").at(1).get<int>();
    m.meta.seed = head.value("seed", std::uint64_t{0});
    m.meta.rel_noise = io::parse_double(head.at("rel_noise").get<std::string>());
    m.sigma = doubles(head.at("sigma"));
    m.meta.record_stride = head.value("record_stride", 1);
    if (head.contains("source_xs")) {
      m.meta.source_xs = doubles(head.at("source_xs"));
      m.meta.source_depth = io::parse_double(head.at("source_depth").get<std::string>());
      m.meta.source_width = io::parse_double(head.at("source_width").get<std::string>());
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::io, std::string("bad measurement header: ") + e.what());
  }

  std::istringstream in(body);
  std::string line;
  std::getline(in, line);
  require(line.rfind("freq_idx", 0) == 0, ErrorKind::io, "measurement file lacks its header");
  std::vector<char> seen(m.data.size(), 0);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    int idx[3];
    std::size_t pos = 0;
    for (int c = 0; c < 3; ++c) {
      const auto comma = line.find(',', pos);
      require(comma != std::string::npos, ErrorKind::io, "malformed measurement row: " + line);
      idx[c] = std::stoi(line.substr(pos, comma - pos));
      pos = comma + 1;
    }
    const auto [i, k, l] = std::tuple{idx[0], idx[1], idx[2]};
    require(i >= 0 && i < m.n_freq && k >= 0 && k < m.n_sensor && l >= 0 && l < m.n_time,
            ErrorKind::io, "measurement index out of range: " + line);
    m.at(i, k, l) = io::parse_double(std::string_view(line).substr(pos));
    seen[m.index(i, k, l)] = 1;
  }
  for (char s : seen) require(s == 1, ErrorKind::io, "measurement file is incomplete");
  require(m.meta.sensor_xs.size() == static_cast<std::size_t>(m.n_sensor), ErrorKind::io,
          "sensor list does not match n_sensor");
  return m;
}

void write_measurement(const std::string& path, const Measurement& m) {
  io::atomic_write(path, measurement_to_csv(m));
}

Measurement read_measurement(const std::string& path) {
  return measurement_from_csv(io::read_file(path));
}

}  // namespace seabed
