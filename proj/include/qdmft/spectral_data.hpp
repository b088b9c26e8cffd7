#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "qdmft/errors.hpp"
#include "qdmft/model.hpp"

namespace qdmft {

// One Lehmann pole. `sector` and `index` identify the N0 +- 1 eigenstate
// E_{N,index} the pole comes from; `lambda` holds one weight per orbital.
struct Pole {
  double omega = 0.0;
  std::vector<double> lambda;
  Sector sector;
  int index = 0;
};

struct SpectralData {
  int n0 = 0;
  double e0 = 0.0;
  std::vector<Pole> particle;
  std::vector<Pole> hole;

  std::size_t n_orbitals() const {
    if (!particle.empty()) return particle.front().lambda.size();
    if (!hole.empty()) return hole.front().lambda.size();
    return 0;
  }

  double weight_sum(std::size_t alpha) const {
    double s = 0.0;
    for (auto& p : particle) s += p.lambda.at(alpha);
    for (auto& p : hole) s += p.lambda.at(alpha);
    return s;
  }

  double hole_weight(std::size_t alpha) const {
    double s = 0.0;
    for (auto& p : hole) s += p.lambda.at(alpha);
    return s;
  }

  void sort_poles() {
    auto by = [](const Pole& a, const Pole& b) {
      if (a.omega != b.omega) return a.omega < b.omega;
      if (a.sector.sz != b.sector.sz) return a.sector.sz > b.sector.sz;
      return a.index < b.index;
    };
    std::stable_sort(particle.begin(), particle.end(), by);
    std::stable_sort(hole.begin(), hole.end(), by);
  }

  // Throws unless weights lie in [0,1], lists are sorted, and the sum rule
  // holds to `tol` for every orbital.
  void validate(double tol = 1e-8) const {
    const std::size_t no = n_orbitals();
    auto check_list = [&](const std::vector<Pole>& ps, const char* name) {
      for (std::size_t k = 0; k < ps.size(); ++k) {
        if (ps[k].lambda.size() != no) throw DimensionError(std::string(name) + " pole weight count differs");
        if (!std::isfinite(ps[k].omega)) throw ParameterError(std::string(name) + " pole energy not finite");
        for (double l : ps[k].lambda)
          if (!(l >= -1e-12 && l <= 1.0 + 1e-12)) throw ParameterError(std::string(name) + " weight outside [0,1]");
        if (k > 0 && ps[k].omega < ps[k - 1].omega) throw ParameterError(std::string(name) + " poles not sorted");
      }
    };
    check_list(particle, "particle");
    check_list(hole, "hole");
    for (std::size_t a = 0; a < no; ++a)
      if (std::abs(weight_sum(a) - 1.0) > tol)
        throw ParameterError("sum rule violated for orbital " + std::to_string(a) + ": " +
                             std::to_string(weight_sum(a)));
  }
};

inline nlohmann::ordered_json pole_to_json(const Pole& p) {
  nlohmann::ordered_json j;
  j["omega"] = p.omega;
  j["lambda"] = p.lambda;
  j["n_electrons"] = p.sector.n_electrons;
  j["sz"] = p.sector.sz;
  j["index"] = p.index;
  return j;
}

inline nlohmann::ordered_json to_json(const SpectralData& s) {
  nlohmann::ordered_json j;
  j["n0"] = s.n0;
  j["e0"] = s.e0;
  j["particle"] = nlohmann::ordered_json::array();
  for (auto& p : s.particle) j["particle"].push_back(pole_to_json(p));
  j["hole"] = nlohmann::ordered_json::array();
  for (auto& p : s.hole) j["hole"].push_back(pole_to_json(p));
  return j;
}

inline SpectralData spectral_from_json(const nlohmann::json& j) {
  SpectralData s;
  s.n0 = j.at("n0").get<int>();
  s.e0 = j.at("e0").get<double>();
  auto read = [](const nlohmann::json& arr) {
    std::vector<Pole> out;
    for (auto& e : arr) {
      Pole p;
      p.omega = e.at("omega").get<double>();
      p.lambda = e.at("lambda").get<std::vector<double>>();
      if (e.contains("n_electrons")) p.sector = Sector(e.at("n_electrons").get<int>(), e.value("sz", 0));
      p.index = e.value("index", 0);
      out.push_back(std::move(p));
    }
    return out;
  };
  s.particle = read(j.at("particle"));
  s.hole = read(j.at("hole"));
  return s;
}

}  // namespace qdmft
