/*
 * Copyright 2026 The qdtpi developers
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 */

#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qdtpi/emitter.hpp"
#include "qdtpi/experiment.hpp"
#include "qdtpi/tempfit.hpp"

namespace qdtpi::io {

inline constexpr const char* tool_version = "0.1.0";

// ---------------------------------------------------------------------------
// CSV primitives. Lines starting with '#' are comments; the first data line
// must be the expected header.
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  return out;
}

inline std::vector<std::vector<std::string>> read_csv(const std::string& path,
                                                      const std::string& expected_header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open CSV file: " + path);
  std::string line;
  bool header_seen = false;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto fields = split_csv_line(line);
    if (!header_seen) {
      std::string got;
      for (std::size_t i = 0; i < fields.size(); ++i)
        got += (i ? "," : "") + fields[i];
      if (got != expected_header)
        throw std::runtime_error(path + ": expected header '" + expected_header +
                                 "', got '" + got + "'");
      header_seen = true;
      continue;
    }
    rows.push_back(std::move(fields));
  }
  if (!header_seen) throw std::runtime_error(path + ": missing CSV header");
  return rows;
}

inline double to_double(const std::string& s, const std::string& context) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(context + ": cannot parse number '" + s + "'");
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Input formats
// ---------------------------------------------------------------------------

/// Fringe-contrast trace: CSV `delay_ps,contrast,sigma`.
inline experiment::FringeContrast read_fringe_csv(const std::string& path) {
  std::vector<experiment::FringePoint> pts;
  for (const auto& row : detail::read_csv(path, "delay_ps,contrast,sigma")) {
    if (row.size() != 3) throw std::runtime_error(path + ": expected 3 columns");
    pts.push_back({detail::to_double(row[0], path), detail::to_double(row[1], path),
                   detail::to_double(row[2], path)});
  }
  return experiment::FringeContrast(std::move(pts));
}

/// Visibility dataset rows: CSV `temperature_K,visibility,sigma`.
inline std::vector<tempfit::VisibilityPoint> read_visibility_csv(const std::string& path) {
  std::vector<tempfit::VisibilityPoint> pts;
  for (const auto& row : detail::read_csv(path, "temperature_K,visibility,sigma")) {
    if (row.size() != 3) throw std::runtime_error(path + ": expected 3 columns");
    pts.push_back({detail::to_double(row[0], path), detail::to_double(row[1], path),
                   detail::to_double(row[2], path)});
  }
  return pts;
}

/// Coincidence histogram: CSV `delay_ns,counts` plus a JSON sidecar with
/// acquisition_time_s, rep_period_ns, pair_separation_ns.
inline experiment::CoincidenceHistogram read_histogram(const std::string& csv_path,
                                                       const std::string& meta_path) {
  std::vector<experiment::HistogramBin> bins;
  for (const auto& row : detail::read_csv(csv_path, "delay_ns,counts")) {
    if (row.size() != 2) throw std::runtime_error(csv_path + ": expected 2 columns");
    const double counts = detail::to_double(row[1], csv_path);
    bins.push_back({detail::to_double(row[0], csv_path),
                    static_cast<std::int64_t>(std::llround(counts))});
  }
  std::ifstream in(meta_path);
  if (!in) throw std::runtime_error("cannot open metadata file: " + meta_path);
  nlohmann::json meta;
  try {
    in >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(meta_path + ": invalid JSON: " + e.what());
  }
  for (const char* key : {"acquisition_time_s", "rep_period_ns", "pair_separation_ns"})
    if (!meta.contains(key))
      throw std::runtime_error(meta_path + ": missing field '" + std::string(key) + "'");
  return experiment::CoincidenceHistogram(
      std::move(bins), meta["acquisition_time_s"].get<double>(),
      meta["rep_period_ns"].get<double>(), meta["pair_separation_ns"].get<double>());
}

/// Emitter/filter configuration record. Accepts gamma_ps_inv or T1_ps,
/// kappa_meV or kappa_ps_inv, delta_meV or delta_ps_inv.
struct EmitterFilterConfig {
  emitter::EmitterParams emitter_params;
  CavityFilter filter;
};

inline EmitterFilterConfig parse_emitter_filter_config(const nlohmann::json& j,
                                                       const std::string& context) {
  auto pick = [&](const char* a, const char* b) -> std::optional<std::pair<double, bool>> {
    if (j.contains(a)) return std::make_pair(j[a].get<double>(), true);
    if (j.contains(b)) return std::make_pair(j[b].get<double>(), false);
    return std::nullopt;
  };

  const auto g = pick("gamma_ps_inv", "T1_ps");
  if (!g) throw std::runtime_error(context + ": need gamma_ps_inv or T1_ps");
  const double gamma = g->second ? g->first : 1.0 / g->first;

  const auto k = pick("kappa_ps_inv", "kappa_meV");
  if (!k) throw std::runtime_error(context + ": need kappa_ps_inv or kappa_meV");
  const double kappa = k->second ? k->first : k->first * constants::mev_to_ps_inv;

  double delta = 0.0;
  if (const auto d = pick("delta_ps_inv", "delta_meV"))
    delta = d->second ? d->first : d->first * constants::mev_to_ps_inv;

  return {emitter::EmitterParams(gamma), CavityFilter(kappa, delta)};
}

inline EmitterFilterConfig read_config_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": invalid JSON: " + e.what());
  }
  return parse_emitter_filter_config(j, path);
}

// ---------------------------------------------------------------------------
// Output formats
// ---------------------------------------------------------------------------

/// Provenance block stamped on every output: tool version, the fully
/// resolved parameter set and the seed.
struct Provenance {
  std::string command;
  std::vector<std::pair<std::string, std::string>> params;
  unsigned seed = 0;

  void add(const std::string& key, double value) {
    std::ostringstream os;
    os.precision(12);
    os << value;
    params.emplace_back(key, os.str());
  }
  void add(const std::string& key, const std::string& value) {
    params.emplace_back(key, value);
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["tool"] = "qdtpi";
    j["version"] = tool_version;
    j["command"] = command;
    j["seed"] = seed;
    nlohmann::json p = nlohmann::json::object();
    for (const auto& [k, v] : params) p[k] = v;
    j["parameters"] = p;
    return j;
  }
};

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const Provenance& prov, const std::string& header)
      : out_(path) {
    if (!out_) throw std::runtime_error("cannot open output file: " + path);
    out_ << "# qdtpi " << tool_version << "\n";
    out_ << "# command: " << prov.command << "\n";
    for (const auto& [k, v] : prov.params) out_ << "# " << k << ": " << v << "\n";
    out_ << "# seed: " << prov.seed << "\n";
    out_ << header << "\n";
    out_.precision(12);
  }

  template <class... Ts>
  void row(Ts... values) {
    bool first = true;
    ((out_ << (first ? "" : ",") << values, first = false), ...);
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

inline void write_json_report(const std::string& path, const Provenance& prov,
                              const nlohmann::json& results) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  nlohmann::json j = prov.to_json();
  j["results"] = results;
  out << j.dump(2) << "\n";
}

}  // namespace qdtpi::io
