#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "qdmft/dmft.hpp"
#include "qdmft/errors.hpp"
#include "qdmft/format.hpp"

namespace qdmft {

struct DosSpec {
  double delta = 0.05;
  double omega_min = -6.0;
  double omega_max = 6.0;
  std::size_t points = 1201;
  std::string spectral;  // optional spectral.json to plot instead of solving
};

enum class Fault { none, zstring_sign };

struct VerifySpec {
  std::size_t draws = 20;
  std::uint64_t seed = 1;
  Fault inject_fault = Fault::none;
};

struct RunConfig {
  TwoSiteParams model{4.0, 2.0, 0.0, 0.745356};
  SolveOptions solver;
  std::size_t report_shots = 5000;  // re-evaluation shots for the optimal-angle column, 0 disables
  DmftConfig dmft;
  std::vector<double> u_sweep;
  double sweep_eta = 1e-4;
  DosSpec dos;
  VerifySpec verify;
  std::string out_dir = "out";
};

namespace detail {

using boost::property_tree::ptree;

inline const std::map<std::string, std::set<std::string>>& config_schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"model", {"U", "mu", "eps2", "V"}},
      {"solver",
       {"method", "ansatz", "mode", "shots", "seed", "restarts", "max_sweeps", "tol", "exploit_symmetry",
        "spam_p01", "spam_p10", "spam_correct", "group_commuting", "report_shots"}},
      {"dmft",
       {"ph_symmetric", "V0", "eps2_0", "eta", "occ_tol", "max_iters", "alpha", "eps2_damping", "regularize",
        "average_window", "u_sweep", "sweep_eta"}},
      {"dos", {"delta", "omega_min", "omega_max", "points", "spectral"}},
      {"verify", {"draws", "seed", "inject_fault"}},
      {"output", {"dir"}},
  };
  return s;
}

inline void check_key(const std::string& section, const std::string& key) {
  auto& s = config_schema();
  auto it = s.find(section);
  if (it == s.end()) throw ConfigError("unknown section [" + section + "]");
  if (!it->second.count(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
}

class ConfigReader {
 public:
  explicit ConfigReader(const ptree& t) : t_(t) {}

  std::optional<std::string> raw(const std::string& sec, const std::string& key) const {
    auto s = t_.get_child_optional(sec);
    if (!s) return std::nullopt;
    auto v = s->get_optional<std::string>(ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    return trim(*v);
  }

  double num(const std::string& sec, const std::string& key, double fallback) const {
    auto v = raw(sec, key);
    if (!v) return fallback;
    try {
      return parse_double(*v);
    } catch (const ParameterError&) {
      throw ConfigError(sec + "." + key + ": not a number: '" + *v + "'");
    }
  }

  std::uint64_t count(const std::string& sec, const std::string& key, std::uint64_t fallback) const {
    auto v = raw(sec, key);
    if (!v) return fallback;
    std::uint64_t out = 0;
    auto res = std::from_chars(v->data(), v->data() + v->size(), out);
    if (v->empty() || res.ec != std::errc() || res.ptr != v->data() + v->size())
      throw ConfigError(sec + "." + key + ": not a non-negative integer: '" + *v + "'");
    return out;
  }

  bool flag(const std::string& sec, const std::string& key, bool fallback) const {
    auto v = raw(sec, key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw ConfigError(sec + "." + key + ": not a boolean: '" + *v + "'");
  }

  std::string text(const std::string& sec, const std::string& key, const std::string& fallback) const {
    return raw(sec, key).value_or(fallback);
  }

  std::vector<double> list(const std::string& sec, const std::string& key) const {
    std::vector<double> out;
    auto v = raw(sec, key);
    if (!v || v->empty()) return out;
    std::stringstream ss(*v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        out.push_back(parse_double(trim(item)));
      } catch (const ParameterError&) {
        throw ConfigError(sec + "." + key + ": bad list entry '" + item + "'");
      }
    }
    return out;
  }

  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
  }

 private:
  const ptree& t_;
};

inline void apply_override(ptree& t, const std::string& assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq)
    throw ConfigError("override must look like section.key=value, got '" + assignment + "'");
  const std::string sec = ConfigReader::trim(assignment.substr(0, dot));
  const std::string key = ConfigReader::trim(assignment.substr(dot + 1, eq - dot - 1));
  check_key(sec, key);
  if (!t.get_child_optional(sec)) t.add_child(sec, ptree());
  t.get_child(sec).put(ptree::path_type(key, '\0'), ConfigReader::trim(assignment.substr(eq + 1)));
}

}  // namespace detail

// Builds a RunConfig from INI text plus `section.key=value` overrides.
// Unknown sections or keys, malformed values and shots mode without a seed
// raise ConfigError.
inline RunConfig parse_config(const std::string& ini_text, const std::vector<std::string>& overrides = {}) {
  using detail::ptree;
  ptree t;
  try {
    std::istringstream in(ini_text);
    boost::property_tree::ini_parser::read_ini(in, t);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  for (auto& [sec, body] : t) {
    if (body.empty() && !body.data().empty()) throw ConfigError("key '" + sec + "' outside any section");
    for (auto& kv : body) detail::check_key(sec, kv.first);
  }
  for (auto& o : overrides) detail::apply_override(t, o);

  const detail::ConfigReader r(t);
  RunConfig c;

  c.model.U = r.num("model", "U", 4.0);
  c.model.mu = r.num("model", "mu", c.model.U / 2);
  c.model.eps2 = r.num("model", "eps2", 0.0);
  c.model.V = r.num("model", "V", 0.745356);

  const std::string method = r.text("solver", "method", "CR");
  if (method == "CR") c.solver.method = Method::CR;
  else if (method == "PT") c.solver.method = Method::PT;
  else throw ConfigError("solver.method must be CR or PT, got '" + method + "'");
  try {
    c.solver.pt_ansatz = parse_ansatz(r.text("solver", "ansatz", "PT4"));
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("solver.ansatz: ") + e.what());
  }
  if (c.solver.pt_ansatz != AnsatzKind::PT4 && c.solver.pt_ansatz != AnsatzKind::PT4X)
    throw ConfigError("solver.ansatz must be PT4 or PT4X");

  const std::string mode = r.text("solver", "mode", "exact");
  const bool shots_mode = mode == "shots";
  if (mode != "exact" && !shots_mode) throw ConfigError("solver.mode must be exact or shots, got '" + mode + "'");
  const auto seed = r.raw("solver", "seed");
  if (shots_mode && !seed) throw ConfigError("solver.seed is mandatory in shots mode");
  c.solver.seed = r.count("solver", "seed", 0);
  if (shots_mode) {
    const auto shots = r.count("solver", "shots", 10000);
    if (shots == 0) throw ConfigError("solver.shots must be at least 1");
    c.solver.mode = EvalMode::sampled(shots, derive_seed(c.solver.seed, {0x73686f74}));
  }
  c.solver.restarts = r.count("solver", "restarts", 5);
  if (c.solver.restarts == 0) throw ConfigError("solver.restarts must be at least 1");
  c.solver.rotosolve.max_sweeps = r.count("solver", "max_sweeps", shots_mode ? 10 : 400);
  c.solver.rotosolve.tol = r.num("solver", "tol", 1e-13);
  c.solver.exploit_symmetry = r.flag("solver", "exploit_symmetry", true);
  const double p01 = r.num("solver", "spam_p01", 0.0), p10 = r.num("solver", "spam_p10", 0.0);
  if (p01 != 0.0 || p10 != 0.0) {
    if (!shots_mode) throw ConfigError("SPAM settings need shots mode");
    const std::size_t n = c.solver.method == Method::CR ? 2 : 4;
    try {
      c.solver.mode.readout = SpamModel::uniform(n, p01, p10);
    } catch (const Error& e) {
      throw ConfigError(std::string("solver.spam: ") + e.what());
    }
    c.solver.mode.correct_readout = r.flag("solver", "spam_correct", false);
  }
  c.solver.mode.group_commuting = r.flag("solver", "group_commuting", false);
  c.report_shots = r.count("solver", "report_shots", 5000);

  auto& d = c.dmft;
  d.U = c.model.U;
  d.ph_symmetric = r.flag("dmft", "ph_symmetric", true);
  d.mu = c.model.mu;
  d.V0 = r.num("dmft", "V0", 1.0);
  d.eps2_0 = r.num("dmft", "eps2_0", c.model.eps2);
  d.eta = r.num("dmft", "eta", 0.01);
  d.occ_tol = r.num("dmft", "occ_tol", 1e-4);
  d.max_iters = r.count("dmft", "max_iters", 50);
  d.alpha = r.num("dmft", "alpha", shots_mode ? 0.5 : 1.0);
  d.eps2_damping = r.num("dmft", "eps2_damping", 1.0);
  d.regularize = r.flag("dmft", "regularize", true);
  d.average_window = r.count("dmft", "average_window", 3);
  d.solver = c.solver;
  c.u_sweep = r.list("dmft", "u_sweep");
  c.sweep_eta = r.num("dmft", "sweep_eta", 1e-4);

  c.dos.delta = r.num("dos", "delta", 0.05);
  c.dos.omega_min = r.num("dos", "omega_min", -6.0);
  c.dos.omega_max = r.num("dos", "omega_max", 6.0);
  c.dos.points = r.count("dos", "points", 1201);
  c.dos.spectral = r.text("dos", "spectral", "");
  d.delta = c.dos.delta;

  c.verify.draws = r.count("verify", "draws", 20);
  c.verify.seed = r.count("verify", "seed", 1);
  const std::string fault = r.text("verify", "inject_fault", "none");
  if (fault == "none") c.verify.inject_fault = Fault::none;
  else if (fault == "zstring_sign") c.verify.inject_fault = Fault::zstring_sign;
  else throw ConfigError("verify.inject_fault must be none or zstring_sign, got '" + fault + "'");

  c.out_dir = r.text("output", "dir", "out");

  try {
    d.validate();
    (void)ImpurityModel::two_site(c.model);
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  if (!(c.dos.delta > 0.0)) throw ConfigError("dos.delta must be positive");
  if (!(c.dos.omega_max > c.dos.omega_min) || c.dos.points < 2) throw ConfigError("dos grid is empty");
  if (!(c.sweep_eta > 0.0)) throw ConfigError("dmft.sweep_eta must be positive");
  return c;
}

inline RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {}) {
  std::string text;
  if (!path.empty()) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    text = ss.str();
  }
  return parse_config(text, overrides);
}

// Creates `dir` and checks that a file can be written there.
inline std::filesystem::path prepare_output_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir + ": " + ec.message());
  const auto probe = std::filesystem::path(dir) / ".write_probe";
  {
    std::ofstream f(probe);
    if (!f) throw ConfigError("output directory " + dir + " is not writable");
  }
  std::filesystem::remove(probe, ec);
  return dir;
}

}  // namespace qdmft
