#pragma once

// Pants decompositions with per-curve Fenchel-Nielsen data and the
// surviving-subsurface construction: keep the curves whose data converges,
// cut along the ones that pinch or whose twisting runs away.

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace ibundle {

struct PantsDecomposition {
  // pants[p].cuffs[s] = curve id, or -1 for a boundary leg
  struct Pants {
    int cuffs[3] = {-1, -1, -1};
  };
  std::vector<Pants> pants;
  int num_curves = 0;

  void validate() const {
    std::vector<int> uses(size_t(num_curves), 0);
    for (const auto& p : pants)
      for (int s = 0; s < 3; ++s) {
        int c = p.cuffs[s];
        if (c < -1 || c >= num_curves) throw std::invalid_argument("cuff out of range");
        if (c >= 0) ++uses[size_t(c)];
      }
    for (int c = 0; c < num_curves; ++c)
      if (uses[size_t(c)] != 2)
        throw std::invalid_argument("curve " + std::to_string(c) +
                                    " must join exactly two cuff slots");
  }

  std::vector<std::vector<int>> pants_of_curve() const {
    std::vector<std::vector<int>> out(static_cast<size_t>(num_curves), std::vector<int>{});
    for (size_t p = 0; p < pants.size(); ++p)
      for (int s = 0; s < 3; ++s)
        if (pants[p].cuffs[s] >= 0) out[size_t(pants[p].cuffs[s])].push_back(int(p));
    return out;
  }
};

enum class CurveClass { shrinks, converges, twist_diverges };

inline std::string to_string(CurveClass c) {
  switch (c) {
    case CurveClass::shrinks: return "shrinks";
    case CurveClass::converges: return "converges";
    default: return "twist_diverges";
  }
}

// Fenchel-Nielsen data of one curve along the sequence: either a declared
// asymptotic class or raw numbers (at least 8 terms).
struct FnEntry {
  bool declared = false;
  bool declared_length_to_zero = false;
  bool declared_twist_diverges = false;
  std::vector<double> lengths;
  std::vector<double> twists;
};

struct FnThresholds {
  double pinch = 1e-3;
  double twist_span = 1e3;
};

inline CurveClass classify_curve(const FnEntry& e, FnThresholds cfg = {}) {
  if (e.declared) {
    if (e.declared_length_to_zero) return CurveClass::shrinks;
    if (e.declared_twist_diverges) return CurveClass::twist_diverges;
    return CurveClass::converges;
  }
  if (e.lengths.size() < 8 || e.twists.size() != e.lengths.size())
    throw std::invalid_argument("numeric sequence too short (need >= 8 terms)");
  for (double l : e.lengths)
    if (l <= 0) throw std::invalid_argument("lengths must be positive");

  bool decreasing = true;
  for (size_t i = 1; i < e.lengths.size(); ++i)
    if (e.lengths[i] > e.lengths[i - 1]) decreasing = false;
  if (decreasing && e.lengths.back() < cfg.pinch) return CurveClass::shrinks;

  double lo = *std::min_element(e.twists.begin(), e.twists.end());
  double hi = *std::max_element(e.twists.begin(), e.twists.end());
  if (hi - lo > cfg.twist_span) {
    // monotone tail over the last half
    size_t start = e.twists.size() / 2;
    bool up = true, down = true;
    for (size_t i = start + 1; i < e.twists.size(); ++i) {
      if (e.twists[i] < e.twists[i - 1]) up = false;
      if (e.twists[i] > e.twists[i - 1]) down = false;
    }
    if (up || down) return CurveClass::twist_diverges;
  }
  return CurveClass::converges;
}

struct Subsurface {
  std::set<int> pants;            // kept pants
  std::set<int> interior_curves;  // kept curves (converging)
  std::set<int> frontier_curves;  // cut curves (shrinking or twist-diverging)

  bool operator==(const Subsurface& o) const {
    return pants == o.pants && interior_curves == o.interior_curves &&
           frontier_curves == o.frontier_curves;
  }
};

// The maximal subsurface where the data converges: all pants survive, the
// converging curves stay interior, and the surface is cut along every curve
// that shrinks or twist-diverges (those stay as frontier).
inline Subsurface surviving_subsurface(const PantsDecomposition& p,
                                       const std::vector<CurveClass>& classes) {
  p.validate();
  if (int(classes.size()) != p.num_curves)
    throw std::invalid_argument("need one class per interior curve");
  Subsurface s;
  for (size_t i = 0; i < p.pants.size(); ++i) s.pants.insert(int(i));
  for (int c = 0; c < p.num_curves; ++c) {
    if (classes[size_t(c)] == CurveClass::converges)
      s.interior_curves.insert(c);
    else
      s.frontier_curves.insert(c);
  }
  return s;
}

// Connected components of the kept complex (pants glued along interior curves).
inline std::vector<std::set<int>> subsurface_components(const PantsDecomposition& p,
                                                        const Subsurface& s) {
  auto poc = p.pants_of_curve();
  std::vector<int> comp(p.pants.size(), -1);
  int nc = 0;
  for (size_t seed = 0; seed < p.pants.size(); ++seed) {
    if (comp[seed] >= 0 || !s.pants.count(int(seed))) continue;
    std::vector<int> stack{int(seed)};
    comp[seed] = nc;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int cs = 0; cs < 3; ++cs) {
        int c = p.pants[size_t(v)].cuffs[cs];
        if (c < 0 || !s.interior_curves.count(c)) continue;
        for (int q : poc[size_t(c)])
          if (comp[size_t(q)] < 0 && s.pants.count(q)) {
            comp[size_t(q)] = nc;
            stack.push_back(q);
          }
      }
    }
    ++nc;
  }
  std::vector<std::set<int>> out(static_cast<size_t>(nc), std::set<int>{});
  for (size_t i = 0; i < comp.size(); ++i)
    if (comp[i] >= 0) out[size_t(comp[i])].insert(int(i));
  return out;
}

}  // namespace ibundle
