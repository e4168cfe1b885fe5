// pexp: generate reference signals, estimate p-exponent profiles, classify
// singularities.
//
//   pexp gen cusp --alpha 0.6 --out data
//   pexp analyze --input data/cusp.csv --s 0.5,1
//   pexp classify chirp --alpha -0.3 --beta 1
//
// Every flag can also come from a JSON file given with --config; flags given
// on the command line win. The merged configuration is echoed into every
// output file, and feeding that echo back through --config reproduces the
// run. Exit codes: 0 ok, 2 bad usage or input, 3 estimation failure.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pexp/io.hpp"
#include "pexp/pexp.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum class Type { number, integer, text, boolean, list };

struct Key {
  std::string name;
  Type type;
  json def;
  std::string help;
};

// null defaults are filled per generator kind (see generator_defaults).
const std::vector<Key>& signal_keys() {
  static const std::vector<Key> keys{
      {"kind", Type::text, "cusp", "generator: cusp, chirp, comb, general_comb, cusp_plus_chirp, wgn"},
      {"L", Type::integer, 16, "log2 of the sample count"},
      {"x0", Type::number, nullptr, "singularity / analysis location (default 0.5, combs 0)"},
      {"alpha", Type::number, nullptr, "exponent alpha"},
      {"beta", Type::number, nullptr, "chirp oscillation exponent"},
      {"gamma", Type::number, nullptr, "comb width exponent, or the cusp exponent of cusp_plus_chirp"},
      {"seed", Type::integer, 0, "wgn seed"},
      {"pieces", Type::text, "0:0.5,1:0", "general_comb pieces slope:intercept,..."},
      {"p0", Type::number, "inf", "general_comb integrability limit"},
      {"l2_damping", Type::boolean, false, "general_comb: scale tooth l by 1/l^2"},
  };
  return keys;
}

const std::vector<Key>& analysis_keys() {
  static const std::vector<Key> keys{
      {"input", Type::text, "", "signal CSV to analyse instead of generating one"},
      {"wavelet", Type::integer, nullptr, "Daubechies vanishing moments (1..10); 1 for combs, else 3"},
      {"J", Type::integer, 0, "decomposition depth, 0 = deepest"},
      {"j1", Type::integer, 0, "pointwise fit range start, 0 = automatic"},
      {"j2", Type::integer, 0, "pointwise fit range end"},
      {"eta_j1", Type::integer, 0, "scaling-function fit range start, 0 = [3, J-2]"},
      {"eta_j2", Type::integer, 0, "scaling-function fit range end"},
      {"margin", Type::number, 2.0, "admissibility margin in standard errors"},
      {"boundary", Type::text, "automatic", "edge leaders: automatic, exclude, include"},
      {"direct", Type::boolean, true, "also run the direct T^p estimator"},
      {"poly", Type::text, "zero", "direct estimator polynomial: zero, constant"},
      {"p_grid", Type::list, json::array({0.25, 0.5, 1, 2, 4, 8, "inf"}), "p values, ascending"},
  };
  return keys;
}

const std::vector<Key>& analyze_keys() {
  static const std::vector<Key> keys{
      {"s", Type::list, json::array(), "fractional orders besides 0"},
      {"integration", Type::text, "leaders", "how to integrate: leaders, fourier"},
  };
  return keys;
}

const std::vector<Key>& classify_keys() {
  static const std::vector<Key> keys{
      {"s", Type::list, json::array({0.5, 1}), "fractional orders tested"},
      {"tol_invariance", Type::number, 0.1, "p-invariance tolerance"},
      {"tol_canonical", Type::number, 0.15, "canonical shift tolerance"},
      {"beta_significance", Type::number, 0.1, "smallest oscillation exponent called oscillating"},
  };
  return keys;
}

const std::vector<Key>& output_keys() {
  static const std::vector<Key> keys{
      {"out", Type::text, ".", "output directory"},
      {"name", Type::text, "", "output file stem, default from kind or input"},
  };
  return keys;
}

std::vector<const Key*> keys_for(const std::string& cmd) {
  std::vector<const Key*> ks;
  auto add = [&](const std::vector<Key>& v) {
    for (const auto& k : v) ks.push_back(&k);
  };
  add(signal_keys());
  add(output_keys());
  if (cmd != "gen") add(analysis_keys());
  if (cmd == "analyze") add(analyze_keys());
  if (cmd == "classify") add(classify_keys());
  return ks;
}

double parse_double(const std::string& s, const std::string& what) {
  const char* b = s.c_str();
  char* e = nullptr;
  const double v = std::strtod(b, &e);
  if (e == b || *e != '\0') throw pexp::InvalidArgument(what + ": '" + s + "' is not a number");
  return v;
}

json parse_value(const Key& k, const std::string& raw) {
  switch (k.type) {
    case Type::number: {
      const double v = parse_double(raw, k.name);
      return pexp::io::num(v);
    }
    case Type::integer: {
      const double v = parse_double(raw, k.name);
      if (v != std::floor(v)) throw pexp::InvalidArgument(k.name + " must be an integer");
      return static_cast<long long>(v);
    }
    case Type::text: return raw;
    case Type::boolean:
      if (raw == "true" || raw == "1" || raw == "yes") return true;
      if (raw == "false" || raw == "0" || raw == "no") return false;
      throw pexp::InvalidArgument(k.name + " must be true or false");
    case Type::list: {
      json arr = json::array();
      std::stringstream ss(raw);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (!item.empty()) arr.push_back(pexp::io::num(parse_double(item, k.name)));
      }
      return arr;
    }
  }
  return nullptr;
}

// Type check for values read from a config file.
json check_value(const Key& k, const json& v) {
  if (v.is_null()) return v;
  switch (k.type) {
    case Type::number: return pexp::io::num(pexp::io::to_double(v));
    case Type::integer:
      if (!v.is_number_integer()) throw pexp::InvalidArgument("config: " + k.name + " must be an integer");
      return v;
    case Type::text:
      if (!v.is_string()) throw pexp::InvalidArgument("config: " + k.name + " must be a string");
      return v;
    case Type::boolean:
      if (!v.is_boolean()) throw pexp::InvalidArgument("config: " + k.name + " must be true or false");
      return v;
    case Type::list: {
      if (!v.is_array()) throw pexp::InvalidArgument("config: " + k.name + " must be an array");
      json arr = json::array();
      for (const auto& x : v) arr.push_back(pexp::io::num(pexp::io::to_double(x)));
      return arr;
    }
  }
  return v;
}

std::string normalise(std::string s) {
  for (char& c : s) {
    if (c == '-') c = '_';
  }
  return s;
}

std::string flag_name(const std::string& key) {
  std::string f = key;
  for (char& c : f) {
    if (c == '_') c = '-';
  }
  return "--" + f;
}

json load_config_file(const std::string& path, const std::vector<const Key*>& keys) {
  std::ifstream in(path);
  if (!in) throw pexp::InvalidArgument("cannot read config " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw pexp::InvalidArgument("config " + path + ": " + e.what());
  }
  if (!doc.is_object()) throw pexp::InvalidArgument("config " + path + " must hold a JSON object");
  // An echoed config carries the subcommand; it is informational here.
  doc.erase("command");
  json out = json::object();
  for (const auto& [raw_key, v] : doc.items()) {
    const auto key = normalise(raw_key);
    const Key* k = nullptr;
    for (const auto* cand : keys) {
      if (cand->name == key) k = cand;
    }
    if (!k) throw pexp::InvalidArgument("config " + path + ": unknown key '" + raw_key + "'");
    out[key] = check_value(*k, v);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Generators.

void generator_defaults(json& cfg) {
  const auto kind = cfg.at("kind").get<std::string>();
  auto fill = [&](const char* key, json v) {
    if (cfg[key].is_null()) cfg[key] = std::move(v);
  };
  if (kind == "cusp") {
    fill("alpha", 0.6);
  } else if (kind == "chirp") {
    fill("alpha", -0.3);
    fill("beta", 1.0);
  } else if (kind == "comb") {
    fill("alpha", -0.2);
    fill("gamma", 3.0);
    fill("x0", 0.0);
  } else if (kind == "general_comb") {
    fill("x0", 0.0);
  } else if (kind == "cusp_plus_chirp") {
    fill("alpha", -0.3);
    fill("gamma", -0.2);
    fill("beta", 1.0);
  } else if (kind != "wgn") {
    throw pexp::InvalidArgument("unknown generator kind '" + kind + "'");
  }
  fill("x0", 0.5);
}

std::vector<pexp::AffinePiece> parse_pieces(const std::string& text) {
  std::vector<pexp::AffinePiece> pieces;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw pexp::InvalidArgument("pieces: expected slope:intercept, got '" + item + "'");
    pieces.push_back({parse_double(item.substr(0, colon), "pieces"), parse_double(item.substr(colon + 1), "pieces")});
  }
  return pieces;
}

double need(const json& cfg, const char* key) {
  if (cfg[key].is_null()) throw pexp::InvalidArgument(std::string("--") + key + " is required for this kind");
  return pexp::io::to_double(cfg[key]);
}

pexp::Signal generate(const json& cfg) {
  const auto kind = cfg.at("kind").get<std::string>();
  const int L = cfg.at("L").get<int>();
  const double x0 = pexp::io::to_double(cfg.at("x0"));
  if (kind == "cusp") return pexp::gen_cusp(need(cfg, "alpha"), x0, L);
  if (kind == "chirp") return pexp::gen_chirp(need(cfg, "alpha"), need(cfg, "beta"), x0, L);
  if (kind == "comb") {
    pexp::CombSpec spec{need(cfg, "alpha"), need(cfg, "gamma")};
    return pexp::gen_lacunary_comb(spec, L);
  }
  if (kind == "general_comb") {
    pexp::AffineFamily fam;
    fam.pieces = parse_pieces(cfg.at("pieces").get<std::string>());
    fam.p0 = pexp::io::to_double(cfg.at("p0"));
    fam.l2_damping = cfg.at("l2_damping").get<bool>();
    return pexp::gen_general_comb(fam, L);
  }
  if (kind == "cusp_plus_chirp") {
    return pexp::gen_cusp_plus_chirp(need(cfg, "gamma"), need(cfg, "alpha"), need(cfg, "beta"), x0, L);
  }
  if (kind == "wgn") {
    const auto seed = cfg.at("seed").get<long long>();
    if (seed < 0) throw pexp::InvalidArgument("seed must be >= 0");
    return pexp::gen_wgn(L, static_cast<std::uint64_t>(seed));
  }
  throw pexp::InvalidArgument("unknown generator kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Analysis configuration.

std::vector<double> as_list(const json& v) {
  std::vector<double> out;
  for (const auto& x : v) out.push_back(pexp::io::to_double(x));
  return out;
}

pexp::PExpConfig pexp_config(const json& cfg) {
  pexp::PExpConfig pc;
  pc.n_vanishing = cfg.at("wavelet").get<int>();
  pc.J = cfg.at("J").get<int>();
  pc.fit = {cfg.at("j1").get<int>(), cfg.at("j2").get<int>()};
  pc.eta_fit = {cfg.at("eta_j1").get<int>(), cfg.at("eta_j2").get<int>()};
  if ((pc.fit.j1 > 0) != (pc.fit.j2 > 0)) throw pexp::InvalidArgument("give both --j1 and --j2");
  if ((pc.eta_fit.j1 > 0) != (pc.eta_fit.j2 > 0)) throw pexp::InvalidArgument("give both --eta-j1 and --eta-j2");
  pc.margin = pexp::io::to_double(cfg.at("margin"));
  const auto b = cfg.at("boundary").get<std::string>();
  if (b == "automatic") {
    pc.boundary = pexp::BoundaryPolicy::automatic;
  } else if (b == "exclude") {
    pc.boundary = pexp::BoundaryPolicy::exclude;
  } else if (b == "include") {
    pc.boundary = pexp::BoundaryPolicy::include;
  } else {
    throw pexp::InvalidArgument("boundary must be automatic, exclude or include");
  }
  pc.direct = cfg.at("direct").get<bool>();
  const auto poly = cfg.at("poly").get<std::string>();
  if (poly == "zero") {
    pc.poly = pexp::PolyMode::zero;
  } else if (poly == "constant") {
    pc.poly = pexp::PolyMode::constant;
  } else {
    throw pexp::InvalidArgument("poly must be zero or constant");
  }
  return pc;
}

struct Loaded {
  pexp::Signal sig;
  std::string stem;
};

// Reads --input or runs the generator. Fills x0 and generator parameters
// into cfg so the echo is complete.
Loaded load_signal(json& cfg) {
  const auto input = cfg.at("input").get<std::string>();
  Loaded ld;
  if (!input.empty()) {
    ld.sig = pexp::io::read_signal_csv(input);
    ld.stem = fs::path(input).stem().string();
    if (cfg["x0"].is_null()) cfg["x0"] = ld.sig.x0;
    ld.sig.x0 = pexp::io::to_double(cfg["x0"]);
    cfg["kind"] = ld.sig.meta.generator;
  } else {
    generator_defaults(cfg);
    ld.sig = generate(cfg);
    ld.stem = cfg.at("kind").get<std::string>();
  }
  // longer filters smear neighbouring comb teeth into the leader window
  if (cfg["wavelet"].is_null()) {
    const auto kind = ld.sig.meta.generator;
    cfg["wavelet"] = (kind == "comb" || kind == "general_comb") ? 1 : 3;
  }
  const auto name = cfg.at("name").get<std::string>();
  if (!name.empty()) ld.stem = name;
  return ld;
}

std::string s_tag(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "s%g", s);
  return buf;
}

void print_profile(const pexp::PExponentProfile& prof) {
  std::printf("x0 = %g  s = %g  fit [%d, %d]  %s\n", prof.x0, prof.s, prof.fit_range.j1, prof.fit_range.j2,
              prof.wavelet.c_str());
  std::printf("%8s %10s %9s %6s\n", "p", "h_hat", "stderr", "valid");
  for (std::size_t i = 0; i < prof.size(); ++i) {
    std::printf("%8g %10.4f %9.4f %6s\n", prof.p_grid[i], prof.h_hat[i], prof.stderr_at(i),
                prof.valid(i) ? "yes" : "no");
  }
  for (const auto& w : prof.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
}

// ---------------------------------------------------------------------------
// Subcommands.

int cmd_gen(json cfg) {
  generator_defaults(cfg);
  const auto sig = generate(cfg);
  const auto name = cfg.at("name").get<std::string>();
  const fs::path out = cfg.at("out").get<std::string>();
  const auto stem = name.empty() ? cfg.at("kind").get<std::string>() : name;
  const auto csv = out / (stem + ".csv");
  pexp::io::write_signal_csv(csv, sig, cfg);
  pexp::io::write_signal_meta(pexp::io::meta_path_for(csv), sig, cfg);
  if (sig.meta.resolution_warning) {
    std::fprintf(stderr, "warning: finest tooth is narrower than 8 samples\n");
  }
  std::printf("wrote %s (N = %zu)\n", csv.string().c_str(), sig.size());
  return 0;
}

int cmd_analyze(json cfg) {
  auto ld = load_signal(cfg);
  const auto pc = pexp_config(cfg);
  const auto grid = as_list(cfg.at("p_grid"));
  const auto integration = cfg.at("integration").get<std::string>();
  if (integration != "leaders" && integration != "fourier") {
    throw pexp::InvalidArgument("integration must be leaders or fourier");
  }
  std::vector<double> s_list{0.0};
  for (double s : as_list(cfg.at("s"))) {
    if (!(s >= 0.0)) throw pexp::InvalidArgument("fractional orders must be >= 0");
    if (s > 0.0) s_list.push_back(s);
  }
  const double x0 = pexp::io::to_double(cfg.at("x0"));
  const fs::path out = cfg.at("out").get<std::string>();

  const auto w = pexp::WaveletSpec::daubechies(pc.n_vanishing);
  const auto coeffs = pexp::forward_dwt(ld.sig, w, pexp::resolve_depth(pc, ld.sig.size(), w));
  const auto er = pexp::resolve_range(pc.eta_fit, coeffs.J);
  const auto sf = pexp::scaling_function(coeffs, grid, er, pc.margin);
  pexp::io::write_scaling_csv(out / (ld.stem + "_scaling.csv"), sf, cfg);

  json summary;
  summary["schema_version"] = pexp::io::kSchemaVersion;
  summary["signal"] = {{"L", ld.sig.L}, {"x0", x0}, {"meta", pexp::io::to_json(ld.sig.meta)}};
  summary["profiles"] = json::array();
  bool failed = false;
  for (double s : s_list) {
    pexp::PExponentProfile prof;
    if (s > 0.0 && integration == "fourier") {
      // Integrate the samples, then read plain leaders; admissibility still
      // comes from the original scaling function.
      auto integrated = pexp::fractional_integrate_fourier(ld.sig, s);
      const auto ic = pexp::forward_dwt(integrated, w, coeffs.J);
      auto ipc = pc;
      ipc.direct = false;
      prof = pexp::pexp_profile(integrated, ic, x0, grid, 0.0, ipc, sf);
      prof.s = s;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double shift = std::isinf(grid[i]) ? s : s * grid[i];
        prof.admissible[i] = sf.fits[i] && sf.eta[i] + shift > pc.margin * sf.fits[i]->stderr_slope;
      }
      pexp::io::write_leader_table(out / (ld.stem + "_leaders_" + s_tag(s) + ".csv"), ic, x0, grid, 0.0,
                                   prof.fit_range, cfg);
    } else {
      prof = pexp::pexp_profile(ld.sig, coeffs, x0, grid, s, pc, sf);
      pexp::io::write_leader_table(out / (ld.stem + "_leaders_" + s_tag(s) + ".csv"), coeffs, x0, grid, s,
                                   prof.fit_range, cfg);
    }
    pexp::io::write_profile_csv(out / (ld.stem + "_profile_" + s_tag(s) + ".csv"), prof, cfg);
    summary["profiles"].push_back(pexp::io::to_json(prof));
    print_profile(prof);
    for (std::size_t i = 0; i < prof.size(); ++i) {
      if (!prof.errors[i].empty()) {
        failed = true;
        std::fprintf(stderr, "estimation failed at p = %g, s = %g: %s\n", grid[i], s, prof.errors[i].c_str());
      }
    }
  }
  json eta = json::array();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    eta.push_back({{"p", pexp::io::num(grid[i])},
                   {"eta", pexp::io::num(sf.eta[i])},
                   {"admissible", static_cast<bool>(sf.admissible[i])}});
  }
  summary["scaling"] = {{"rows", eta},
                        {"hmin", pexp::io::num(pexp::detail::eta_value(coeffs, pexp::kInf, er))},
                        {"p0", pexp::io::num(sf.p0_estimate)},
                        {"range", {er.j1, er.j2}}};
  summary["config"] = cfg;
  pexp::io::write_json(out / (ld.stem + "_analysis.json"), summary);
  return failed ? 3 : 0;
}

int cmd_classify(json cfg) {
  auto ld = load_signal(cfg);
  pexp::ClassifyConfig cc;
  cc.pexp = pexp_config(cfg);
  cc.p_grid = as_list(cfg.at("p_grid"));
  cc.s_list = as_list(cfg.at("s"));
  for (double s : cc.s_list) {
    if (!(s > 0.0)) throw pexp::InvalidArgument("classification needs fractional orders s > 0");
  }
  if (cc.s_list.empty()) throw pexp::InvalidArgument("classification needs at least one s");
  cc.tol_invariance = pexp::io::to_double(cfg.at("tol_invariance"));
  cc.tol_canonical = pexp::io::to_double(cfg.at("tol_canonical"));
  cc.beta_significance = pexp::io::to_double(cfg.at("beta_significance"));
  const double x0 = pexp::io::to_double(cfg.at("x0"));
  const auto rep = pexp::classify_singularity(ld.sig, x0, cc);
  const fs::path out = cfg.at("out").get<std::string>();
  pexp::io::write_json(out / (ld.stem + "_report.json"), pexp::io::to_json(rep, cfg));
  std::printf("%s  beta_hat = %.3f  p_invariant = %s\n", pexp::to_string(rep.label).c_str(), rep.beta_hat,
              rep.p_invariant ? "yes" : "no");
  for (const auto& r : rep.reasons) std::printf("  %s\n", r.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"p-exponents and wavelet p-leaders"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "pexp 1.0");

  struct Sub {
    CLI::App* app;
    std::string config_path;
    std::map<std::string, std::string> raw;
    std::string kind_pos;
  };
  std::map<std::string, Sub> subs;
  const std::map<std::string, std::string> blurbs{
      {"gen", "write a reference signal (CSV + meta JSON)"},
      {"analyze", "scaling function, h_min and p-exponent profiles"},
      {"classify", "singularity label from profiles with and without integration"}};
  for (const auto& [cmd, blurb] : blurbs) {
    auto& sub = subs[cmd];
    sub.app = app.add_subcommand(cmd, blurb);
    sub.app->add_option("generator", sub.kind_pos, "generator kind, same as --kind");
    sub.app->add_option("--config", sub.config_path, "JSON file with any of the options below");
    for (const auto* k : keys_for(cmd)) {
      std::string help = k->help + " [" + (k->def.is_null() ? "per kind" : k->def.dump()) + "]";
      sub.app->add_option(flag_name(k->name), sub.raw[k->name], help);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  for (auto& [cmd, sub] : subs) {
    if (!sub.app->parsed()) continue;
    try {
      const auto keys = keys_for(cmd);
      json cfg = json::object();
      for (const auto* k : keys) cfg[k->name] = check_value(*k, k->def);
      if (!sub.config_path.empty()) cfg.update(load_config_file(sub.config_path, keys));
      for (const auto* k : keys) {
        if (sub.app->get_option(flag_name(k->name))->count() > 0) cfg[k->name] = parse_value(*k, sub.raw[k->name]);
      }
      if (!sub.kind_pos.empty()) cfg["kind"] = sub.kind_pos;
      cfg["command"] = cmd;
      if (cmd == "gen") return cmd_gen(cfg);
      if (cmd == "analyze") return cmd_analyze(cfg);
      return cmd_classify(cfg);
    } catch (const pexp::InvalidArgument& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return 2;
    } catch (const std::invalid_argument& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return 2;
    } catch (const nlohmann::json::exception& e) {
      std::fprintf(stderr, "error: bad config value: %s\n", e.what());
      return 2;
    } catch (const fs::filesystem_error& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return 2;
    } catch (const pexp::EstimationError& e) {
      std::fprintf(stderr, "estimation failed: %s\n", e.what());
      return 3;
    }
  }
  return 2;
}
