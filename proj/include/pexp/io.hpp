#pragma once

// CSV tables and JSON documents for signals, profiles and reports. Every
// writer takes the run configuration and echoes it into the file: CSVs carry
// it as a leading "# config: {...}" comment line, JSON under "config".
//
// Needs nlohmann/json (vendor/json.hpp).

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "pexp/classify.hpp"
#include "pexp/errors.hpp"
#include "pexp/estimate.hpp"
#include "pexp/generators.hpp"
#include "pexp/global_reg.hpp"
#include "pexp/leaders.hpp"
#include "pexp/signal.hpp"

namespace pexp::io {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Shortest text that parses back to the same double; inf/nan spelled out.
inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// JSON has no inf/nan: infinities become the strings "inf"/"-inf", NaN null.
inline json num(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline double to_double(const json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw InvalidArgument("expected a number, got '" + s + "'");
  }
  if (!j.is_number()) throw InvalidArgument("expected a number, got " + j.dump());
  return j.get<double>();
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  return out;
}

inline void write_config_line(std::ostream& out, const json& config) { out << "# config: " << config.dump() << '\n'; }

inline void write_json(const std::filesystem::path& path, const json& doc) {
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
}

inline json to_json(const SignalMeta& m) {
  json j;
  j["generator"] = m.generator;
  json params = json::object();
  for (const auto& [k, v] : m.params) params[k] = num(v);
  j["params"] = params;
  if (!m.pieces.empty()) {
    json pcs = json::array();
    for (const auto& pc : m.pieces) pcs.push_back({{"slope", pc.slope}, {"intercept", pc.intercept}});
    j["pieces"] = pcs;
  }
  j["l_max"] = m.l_max;
  j["resolution_warning"] = m.resolution_warning;
  j["min_fit_level"] = m.min_fit_level;
  return j;
}

inline SignalMeta meta_from_json(const json& j) {
  SignalMeta m;
  m.generator = j.value("generator", std::string{});
  if (j.contains("params")) {
    for (const auto& [k, v] : j.at("params").items()) m.params[k] = to_double(v);
  }
  if (j.contains("pieces")) {
    for (const auto& pc : j.at("pieces")) m.pieces.push_back({to_double(pc.at("slope")), to_double(pc.at("intercept"))});
  }
  m.l_max = j.value("l_max", 0);
  m.resolution_warning = j.value("resolution_warning", false);
  m.min_fit_level = j.value("min_fit_level", 1);
  return m;
}

/// Signal table: i, x, value.
inline void write_signal_csv(const std::filesystem::path& path, const Signal& sig, const json& config) {
  auto out = open_out(path);
  write_config_line(out, config);
  out << "i,x,value\n";
  for (std::size_t i = 0; i < sig.size(); ++i) out << i << ',' << fmt(sig.x(i)) << ',' << fmt(sig.samples[i]) << '\n';
}

/// Companion document: L, x0, generator meta and the config echo.
inline void write_signal_meta(const std::filesystem::path& path, const Signal& sig, const json& config) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["L"] = sig.L;
  doc["N"] = sig.size();
  doc["x0"] = sig.x0;
  doc["meta"] = to_json(sig.meta);
  doc["config"] = config;
  write_json(path, doc);
}

inline std::filesystem::path meta_path_for(const std::filesystem::path& csv) {
  auto p = csv;
  p.replace_extension(".meta.json");
  return p;
}

/// Reads the last column of a CSV (or a bare one-value-per-line file).
/// Lines starting with '#' and a non-numeric header are skipped. A
/// "<stem>.meta.json" next to the file supplies x0 and generator meta.
inline Signal read_signal_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read " + path.string());
  Signal sig;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find_last_of(',');
    const std::string cell = comma == std::string::npos ? line : line.substr(comma + 1);
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str()) {
      if (sig.samples.empty()) continue;  // header
      throw InvalidArgument(path.string() + ":" + std::to_string(lineno) + ": not a number");
    }
    sig.samples.push_back(v);
  }
  if (!is_power_of_two(sig.samples.size())) {
    throw InvalidArgument(path.string() + ": sample count " + std::to_string(sig.samples.size()) +
                          " is not a power of two");
  }
  sig.L = log2_exact(sig.samples.size());
  sig.meta.generator = "file";
  const auto mp = meta_path_for(path);
  if (std::filesystem::exists(mp)) {
    std::ifstream min(mp);
    json doc;
    try {
      doc = json::parse(min);
    } catch (const json::exception& e) {
      throw InvalidArgument(mp.string() + ": " + e.what());
    }
    sig.x0 = doc.value("x0", 0.5);
    if (doc.contains("meta")) sig.meta = meta_from_json(doc.at("meta"));
  }
  validate(sig);
  return sig;
}

/// Profile table: p, h_hat, stderr, r2, j1, j2, admissible, n_excluded,
/// direct_tp, error. Failed entries have nan estimates and a message.
inline void write_profile_csv(const std::filesystem::path& path, const PExponentProfile& prof, const json& config) {
  auto out = open_out(path);
  write_config_line(out, config);
  out << "p,h_hat,stderr,r2,j1,j2,admissible,n_excluded,direct_tp,error\n";
  for (std::size_t i = 0; i < prof.size(); ++i) {
    const auto& f = prof.fits[i];
    const auto& d = prof.direct[i];
    out << fmt(prof.p_grid[i]) << ',' << fmt(prof.h_hat[i]) << ',' << (f ? fmt(f->stderr_slope) : "nan") << ','
        << (f ? fmt(f->r2) : "nan") << ',' << prof.fit_range.j1 << ',' << prof.fit_range.j2 << ','
        << (prof.admissible[i] ? 1 : 0) << ',' << (f ? f->n_excluded : 0) << ','
        << (d ? fmt(d->estimate) : "nan") << ',';
    std::string err = prof.errors[i];
    for (char& c : err) {
      if (c == ',' || c == '\n') c = ';';
    }
    out << err << '\n';
  }
}

/// Scaling function table: p, eta, stderr, r2, admissible. The p = inf row
/// holds h_min.
inline void write_scaling_csv(const std::filesystem::path& path, const ScalingFunction& sf, const json& config) {
  auto out = open_out(path);
  write_config_line(out, config);
  out << "p,eta,stderr,r2,admissible\n";
  for (std::size_t i = 0; i < sf.p_grid.size(); ++i) {
    const auto& f = sf.fits[i];
    out << fmt(sf.p_grid[i]) << ',' << fmt(sf.eta[i]) << ',' << (f ? fmt(f->stderr_slope) : "nan") << ','
        << (f ? fmt(f->r2) : "nan") << ',' << (sf.admissible[i] ? 1 : 0) << '\n';
  }
}

/// Per-scale (p,s)-leader table at x0 for plotting: p, j, log2_scale,
/// log2_leader, in_fit.
inline void write_leader_table(const std::filesystem::path& path, const WaveletCoeffs& coeffs, double x0,
                               const std::vector<double>& p_grid, double s, const FitRange& fit,
                               const json& config) {
  auto out = open_out(path);
  write_config_line(out, config);
  out << "p,j,log2_scale,log2_leader,in_fit\n";
  for (double p : p_grid) {
    const auto field = compute_leaders(coeffs, p, s);
    for (int j = 1; j <= coeffs.J; ++j) {
      const double v = field.level(j)[cube_index(x0, coeffs.L, j)];
      const bool in_fit = j >= fit.j1 && j <= fit.j2;
      out << fmt(p) << ',' << j << ',' << fmt(field.log2_scale(j)) << ',' << fmt(std::log2(v)) << ','
          << (in_fit ? 1 : 0) << '\n';
    }
  }
}

inline json to_json(const RegressionFit& f) {
  return {{"slope", num(f.slope)},     {"intercept", num(f.intercept)}, {"stderr", num(f.stderr_slope)},
          {"r2", num(f.r2)},           {"j1", f.j1},                    {"j2", f.j2},
          {"n_points", f.points.size()}, {"n_excluded", f.n_excluded}};
}

inline json to_json(const PExponentProfile& prof) {
  json rows = json::array();
  for (std::size_t i = 0; i < prof.size(); ++i) {
    json r;
    r["p"] = num(prof.p_grid[i]);
    r["h_hat"] = num(prof.h_hat[i]);
    r["admissible"] = static_cast<bool>(prof.admissible[i]);
    r["valid"] = prof.valid(i);
    r["fit"] = prof.fits[i] ? to_json(*prof.fits[i]) : json(nullptr);
    r["direct_tp"] = prof.direct[i] ? num(prof.direct[i]->estimate) : json(nullptr);
    if (!prof.errors[i].empty()) r["error"] = prof.errors[i];
    rows.push_back(r);
  }
  json eta = json::array();
  for (double e : prof.eta) eta.push_back(num(e));
  return {{"x0", prof.x0},
          {"s", prof.s},
          {"wavelet", prof.wavelet},
          {"fit_range", {prof.fit_range.j1, prof.fit_range.j2}},
          {"eta_range", {prof.eta_range.j1, prof.eta_range.j2}},
          {"p0", num(prof.p0)},
          {"hmin", num(prof.hmin)},
          {"eta", eta},
          {"rows", rows},
          {"warnings", prof.warnings}};
}

inline json to_json(const SingularityReport& rep, const json& config) {
  json beta = json::array();
  for (double b : rep.beta_per_s) beta.push_back(num(b));
  json shifted = json::array();
  for (const auto& p : rep.profiles_s) shifted.push_back(to_json(p));
  return {{"schema_version", kSchemaVersion},
          {"label", to_string(rep.label)},
          {"p_invariant", rep.p_invariant},
          {"canonical_test", rep.canonical_test},
          {"beta_hat", num(rep.beta_hat)},
          {"beta_per_s", beta},
          {"reasons", rep.reasons},
          {"tolerances",
           {{"invariance", rep.config.tol_invariance},
            {"canonical", rep.config.tol_canonical},
            {"beta_significance", rep.config.beta_significance}}},
          {"evidence", {{"s0", to_json(rep.profile_s0)}, {"shifted", shifted}}},
          {"config", config}};
}

}  // namespace pexp::io
