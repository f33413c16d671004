#pragma once

// Finite metric trees with boundary labels and their duality with weighted
// non-crossing arc systems in a disc (optional cone point) or annulus.
//
// Arc systems are combinatorial: the boundary circle carries n boundary arcs
// A_1..A_n in a cyclic order; arc endpoints live in the gaps between them,
// ordered by rank within each gap.  Chords join two gap positions; radial
// arcs join a gap position to the cone point and form at most one bundle.
// Regions of the complement are the tree vertices, arcs its edges.

#include <boost/rational.hpp>

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "amalgam.hpp"

namespace ibundle {

using Rat = boost::rational<long long>;

inline std::string rat_to_string(const Rat& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

inline Rat rat_from_string(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rat(std::stoll(s));
    long long num = std::stoll(s.substr(0, slash));
    long long den = std::stoll(s.substr(slash + 1));
    return Rat(num, den);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad rational '" + s + "'");
  }
}

// --- trees -------------------------------------------------------------------

struct TreeVertex {
  std::set<int> labels;  // boundary-arc numbers carried by this vertex
  bool vP = false;       // marks the paring-torus vertex (annulus base)
  bool cone = false;     // marks a collapsed cone subtree
};

struct TreeEdge {
  int u = 0, v = 0;
  Rat len{1};
  bool in_cone = false;
};

struct MetricLabeledTree {
  std::vector<TreeVertex> verts;
  std::vector<TreeEdge> edges;

  int add_vertex(TreeVertex v = {}) {
    verts.push_back(std::move(v));
    return int(verts.size()) - 1;
  }
  void add_edge(int u, int v, Rat len, bool in_cone = false) {
    edges.push_back({u, v, len, in_cone});
  }

  std::vector<std::vector<std::pair<int, int>>> adjacency() const {  // (neighbour, edge idx)
    std::vector<std::vector<std::pair<int, int>>> adj(verts.size());
    for (size_t e = 0; e < edges.size(); ++e) {
      adj[size_t(edges[e].u)].push_back({edges[e].v, int(e)});
      adj[size_t(edges[e].v)].push_back({edges[e].u, int(e)});
    }
    return adj;
  }

  void validate() const {
    if (verts.empty()) throw std::invalid_argument("tree has no vertices");
    if (edges.size() + 1 != verts.size())
      throw std::invalid_argument("edge count must be vertex count - 1");
    for (const auto& e : edges) {
      if (e.u < 0 || e.v < 0 || e.u >= int(verts.size()) || e.v >= int(verts.size()) || e.u == e.v)
        throw std::invalid_argument("bad edge endpoints");
      if (e.len <= 0) throw std::invalid_argument("edge lengths must be positive");
    }
    // connectivity
    std::vector<bool> seen(verts.size(), false);
    std::vector<int> stack{0};
    seen[0] = true;
    auto adj = adjacency();
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (auto [w, e] : adj[size_t(v)])
        if (!seen[size_t(w)]) {
          seen[size_t(w)] = true;
          stack.push_back(w);
        }
    }
    for (bool s : seen)
      if (!s) throw std::invalid_argument("tree is not connected");
  }

  Rat total_length() const {
    Rat s{0};
    for (const auto& e : edges) s += e.len;
    return s;
  }
};

// --- arc systems -------------------------------------------------------------

enum class BaseKind { disc, annulus };

struct ArcEnd {
  int gap = 0;   // gap g lies between boundary arcs at positions g and g+1 (mod n)
  int rank = 0;  // order within the gap, increasing along the circle
  bool operator==(const ArcEnd& o) const { return gap == o.gap && rank == o.rank; }
};

struct Arc {
  ArcEnd a;
  std::optional<ArcEnd> b;  // empty: radial arc running from a to the cone point
  Rat weight{1};
  bool is_radial() const { return !b.has_value(); }
};

struct ArcSystem {
  BaseKind base = BaseKind::disc;
  int n = 0;               // number of boundary arcs
  std::vector<int> order;  // labels at cyclic positions 0..n-1
  int cone_order = 1;      // p; disc base only
  std::vector<Arc> arcs;
  // For an annulus base the inner boundary sits in the region visible at this
  // insertion point (gap, before this rank); defaults to the region at the
  // end of the last gap.
  std::optional<ArcEnd> hole;

  static ArcSystem disc(int n_) {
    ArcSystem s;
    s.n = n_;
    s.order.resize(size_t(n_));
    std::iota(s.order.begin(), s.order.end(), 1);
    return s;
  }
  static ArcSystem annulus(int n_) {
    ArcSystem s = disc(n_);
    s.base = BaseKind::annulus;
    return s;
  }
};

namespace rtree_detail {

// Items on the cut-open circle, in order: BARC(0), gap-0 ends, BARC(1), ...,
// BARC(n-1), gap-(n-1) ends, [cut].
struct Layout {
  int n = 0;
  std::vector<int> barc_pos;                 // position of boundary arc i
  std::vector<int> arc_pos_a, arc_pos_b;     // endpoint positions per arc (-1 if radial b)
  int total = 0;
  std::vector<std::pair<int, int>> chord_iv; // normalized (lo,hi) per chord, -1 for radials
  int hole_pos = -1;                         // insertion position of the annulus hole
};

inline Layout layout(const ArcSystem& s) {
  Layout L;
  L.n = s.n;
  if (s.n < 1) throw std::invalid_argument("arc system needs at least one boundary arc");
  if (int(s.order.size()) != s.n) throw std::invalid_argument("order length mismatch");
  {
    std::set<int> labels(s.order.begin(), s.order.end());
    if (int(labels.size()) != s.n) throw std::invalid_argument("duplicate boundary labels");
  }
  // collect gap occupants: (rank, arc index, which end, is_hole)
  struct Occ {
    int rank;
    int arc;
    int end;  // 0 = a, 1 = b, 2 = hole marker
  };
  std::vector<std::vector<Occ>> gaps(static_cast<size_t>(s.n), std::vector<Occ>{});
  auto place = [&](const ArcEnd& e, int arc, int end) {
    if (e.gap < 0 || e.gap >= s.n) throw std::invalid_argument("arc endpoint gap out of range");
    gaps[size_t(e.gap)].push_back({e.rank, arc, end});
  };
  for (size_t i = 0; i < s.arcs.size(); ++i) {
    const Arc& a = s.arcs[i];
    if (a.weight <= 0) throw std::invalid_argument("arc weights must be positive");
    place(a.a, int(i), 0);
    if (a.b) place(*a.b, int(i), 1);
  }
  ArcEnd hole_at{s.n - 1, 1 << 30};
  if (s.base == BaseKind::annulus && s.hole) hole_at = *s.hole;
  if (s.base == BaseKind::annulus) {
    if (hole_at.gap < 0 || hole_at.gap >= s.n) throw std::invalid_argument("hole gap out of range");
    // the hole marker sits just before the endpoint of that rank
    gaps[size_t(hole_at.gap)].push_back({hole_at.rank, -1, 2});
  }
  L.barc_pos.resize(size_t(s.n));
  L.arc_pos_a.assign(s.arcs.size(), -1);
  L.arc_pos_b.assign(s.arcs.size(), -1);
  int pos = 0;
  for (int g = 0; g < s.n; ++g) {
    L.barc_pos[size_t(g)] = pos++;
    auto& occ = gaps[size_t(g)];
    std::stable_sort(occ.begin(), occ.end(), [](const Occ& x, const Occ& y) {
      if (x.rank != y.rank) return x.rank < y.rank;
      return x.end > y.end;  // hole marker before an endpoint with the same rank
    });
    for (size_t i = 0; i + 1 < occ.size(); ++i)
      if (occ[i].end != 2 && occ[i + 1].end != 2 && occ[i].rank == occ[i + 1].rank)
        throw std::invalid_argument("two arc endpoints share a gap rank");
    for (const Occ& o : occ) {
      if (o.end == 2)
        L.hole_pos = pos++;
      else if (o.end == 0)
        L.arc_pos_a[size_t(o.arc)] = pos++;
      else
        L.arc_pos_b[size_t(o.arc)] = pos++;
    }
  }
  L.total = pos;
  L.chord_iv.assign(s.arcs.size(), {-1, -1});
  for (size_t i = 0; i < s.arcs.size(); ++i) {
    if (s.arcs[i].is_radial()) continue;
    int p1 = L.arc_pos_a[i], p2 = L.arc_pos_b[i];
    L.chord_iv[i] = {std::min(p1, p2), std::max(p1, p2)};
  }
  // non-crossing: intervals pairwise nested or disjoint
  for (size_t i = 0; i < s.arcs.size(); ++i) {
    if (s.arcs[i].is_radial()) continue;
    for (size_t j = i + 1; j < s.arcs.size(); ++j) {
      if (s.arcs[j].is_radial()) continue;
      auto [a1, b1] = L.chord_iv[i];
      auto [a2, b2] = L.chord_iv[j];
      bool i_in_j = a2 < a1 && b1 < b2;
      bool j_in_i = a1 < a2 && b2 < b1;
      bool disjoint = b1 < a2 || b2 < a1;
      if (!(i_in_j || j_in_i || disjoint)) throw std::invalid_argument("arcs cross");
    }
  }
  return L;
}

// Region of a position: index of the innermost chord whose open interval
// contains it, or -1 for the root region.
inline int region_of(const Layout& L, const ArcSystem& s, int pos) {
  int best = -1;
  int best_width = 1 << 30;
  for (size_t i = 0; i < s.arcs.size(); ++i) {
    if (s.arcs[i].is_radial()) continue;
    auto [lo, hi] = L.chord_iv[i];
    if (lo < pos && pos < hi && hi - lo < best_width) {
      best = int(i);
      best_width = hi - lo;
    }
  }
  return best;
}

}  // namespace rtree_detail

// Dual tree: regions of the complement become vertices, arcs become edges
// with length equal to their weight.  A region touching boundary arc A_k
// carries label k; the region at the annulus hole carries v_P.  A radial
// bundle subdivides its region into sectors around a cone vertex; the edge
// dual to a radial joins the cone vertex to the sector that follows it.
inline MetricLabeledTree dual_tree(const ArcSystem& s) {
  using namespace rtree_detail;
  Layout L = layout(s);

  std::vector<int> radials;
  for (size_t i = 0; i < s.arcs.size(); ++i)
    if (s.arcs[i].is_radial()) radials.push_back(int(i));
  if (radials.size() == 1)
    throw std::invalid_argument("a singular-axis bundle needs at least two radial arcs");
  if (!radials.empty() && s.base == BaseKind::annulus)
    throw std::invalid_argument("radial arcs need a disc base");

  int cone_region = -2;  // region index (-1 root) containing the bundle
  if (!radials.empty()) {
    for (int r : radials) {
      int reg = region_of(L, s, L.arc_pos_a[size_t(r)]);
      if (cone_region == -2)
        cone_region = reg;
      else if (cone_region != reg)
        throw std::invalid_argument("radial arcs must share one region");
    }
    std::sort(radials.begin(), radials.end(), [&](int x, int y) {
      return L.arc_pos_a[size_t(x)] < L.arc_pos_a[size_t(y)];
    });
  }

  // essentiality: both sides of every chord contain a label, the hole, or the bundle
  {
    std::vector<int> content;  // positions of content items
    for (int i = 0; i < L.n; ++i) content.push_back(L.barc_pos[size_t(i)]);
    if (L.hole_pos >= 0) content.push_back(L.hole_pos);
    for (int r : radials) content.push_back(L.arc_pos_a[size_t(r)]);
    for (size_t i = 0; i < s.arcs.size(); ++i) {
      if (s.arcs[i].is_radial()) continue;
      auto [lo, hi] = L.chord_iv[i];
      int inside = 0, outside = 0;
      for (int p : content) (lo < p && p < hi ? inside : outside)++;
      if (inside == 0 || outside == 0)
        throw std::invalid_argument("inessential arc (one side has no content)");
    }
  }

  MetricLabeledTree t;
  // vertex per region; regions indexed by chord id, root = -1
  std::map<int, int> region_vertex;
  auto region_vert = [&](int reg) {
    auto it = region_vertex.find(reg);
    if (it != region_vertex.end()) return it->second;
    int v = t.add_vertex();
    region_vertex[reg] = v;
    return v;
  };

  int n_sectors = int(radials.size());
  std::vector<int> sector_vertex;
  int cone_vertex = -1;
  auto sector_of_pos = [&](int pos) {
    // sector i covers positions in (radial_i, radial_{i+1}); the wrap sector
    // is the last one
    for (int i = 0; i + 1 < n_sectors; ++i)
      if (L.arc_pos_a[size_t(radials[size_t(i)])] < pos &&
          pos < L.arc_pos_a[size_t(radials[size_t(i) + 1])])
        return i;
    return n_sectors - 1;
  };
  if (!radials.empty()) {
    TreeVertex cz;
    cz.cone = true;
    cone_vertex = t.add_vertex(cz);
    for (int i = 0; i < n_sectors; ++i) {
      sector_vertex.push_back(t.add_vertex());
      t.add_edge(cone_vertex, sector_vertex.back(), s.arcs[size_t(radials[size_t(i)])].weight);
    }
  }

  auto vertex_at_pos = [&](int pos) {
    int reg = region_of(L, s, pos);
    if (!radials.empty() && reg == cone_region) return sector_vertex[size_t(sector_of_pos(pos))];
    return region_vert(reg);
  };

  // chords: edge between inner region and the vertex at the parent side
  for (size_t i = 0; i < s.arcs.size(); ++i) {
    if (s.arcs[i].is_radial()) continue;
    auto [lo, hi] = L.chord_iv[i];
    int vin;
    if (!radials.empty() && int(i) == cone_region) {
      // the cone region's own chord attaches to its wrap sector
      vin = sector_vertex[size_t(n_sectors - 1)];
    } else {
      vin = region_vert(int(i));
    }
    // parent side: region just outside the interval
    int parent_reg = -1;
    int best_width = 1 << 30;
    for (size_t j = 0; j < s.arcs.size(); ++j) {
      if (j == i || s.arcs[j].is_radial()) continue;
      auto [lo2, hi2] = L.chord_iv[j];
      if (lo2 < lo && hi < hi2 && hi2 - lo2 < best_width) {
        parent_reg = int(j);
        best_width = hi2 - lo2;
      }
    }
    int vout;
    if (!radials.empty() && parent_reg == cone_region)
      vout = sector_vertex[size_t(sector_of_pos(lo))];
    else
      vout = region_vert(parent_reg);
    t.add_edge(vin, vout, s.arcs[i].weight);
  }

  // labels
  for (int i = 0; i < L.n; ++i) {
    int v = vertex_at_pos(L.barc_pos[size_t(i)]);
    t.verts[size_t(v)].labels.insert(s.order[size_t(i)]);
  }
  if (L.hole_pos >= 0) t.verts[size_t(vertex_at_pos(L.hole_pos))].vP = true;

  // make sure the root region exists even with no arcs
  if (t.verts.empty()) region_vert(-1);
  t.validate();
  return t;
}

// --- cone subtree collapse -----------------------------------------------------

inline MetricLabeledTree collapse_cone_subtree(const MetricLabeledTree& t) {
  t.validate();
  std::vector<int> cone_edges;
  for (size_t e = 0; e < t.edges.size(); ++e)
    if (t.edges[e].in_cone) cone_edges.push_back(int(e));
  if (cone_edges.empty()) return t;

  // connectivity of the marked subtree
  std::set<int> cone_verts;
  for (int e : cone_edges) {
    cone_verts.insert(t.edges[size_t(e)].u);
    cone_verts.insert(t.edges[size_t(e)].v);
  }
  std::map<int, int> comp;
  for (int v : cone_verts) comp[v] = v;
  std::function<int(int)> find = [&](int v) { return comp[v] == v ? v : comp[v] = find(comp[v]); };
  for (int e : cone_edges) comp[find(t.edges[size_t(e)].u)] = find(t.edges[size_t(e)].v);
  int root = find(*cone_verts.begin());
  for (int v : cone_verts)
    if (find(v) != root) throw std::invalid_argument("cone subtree is not connected");

  for (int v : cone_verts)
    if (!t.verts[size_t(v)].labels.empty() || t.verts[size_t(v)].vP)
      throw std::invalid_argument("numbered vertices may not be collapsed");

  MetricLabeledTree out;
  std::vector<int> remap(t.verts.size(), -1);
  TreeVertex cz;
  cz.cone = true;
  int zc = out.add_vertex(cz);
  for (size_t v = 0; v < t.verts.size(); ++v) {
    if (cone_verts.count(int(v)))
      remap[v] = zc;
    else
      remap[v] = out.add_vertex(t.verts[v]);
  }
  for (const auto& e : t.edges) {
    if (e.in_cone) continue;
    out.add_edge(remap[size_t(e.u)], remap[size_t(e.v)], e.len);
  }
  out.validate();
  return out;
}

// --- isomorphism ----------------------------------------------------------------

namespace rtree_detail {

inline std::string canon_encode(const MetricLabeledTree& t, int v, int parent,
                                const std::vector<std::vector<std::pair<int, int>>>& adj) {
  std::vector<std::string> kids;
  for (auto [w, e] : adj[size_t(v)]) {
    if (w == parent) continue;
    kids.push_back("[" + rat_to_string(t.edges[size_t(e)].len) + ":" +
                   canon_encode(t, w, v, adj) + "]");
  }
  std::sort(kids.begin(), kids.end());
  std::string lab;
  for (int l : t.verts[size_t(v)].labels) lab += std::to_string(l) + ",";
  if (t.verts[size_t(v)].vP) lab += "P";
  std::string out = "(" + lab;
  for (auto& k : kids) out += k;
  out += ")";
  return out;
}

inline std::vector<int> centroids(const MetricLabeledTree& t) {
  int n = int(t.verts.size());
  if (n == 1) return {0};
  auto adj = t.adjacency();
  std::vector<int> sz(size_t(n), 1), order, parent(size_t(n), -1);
  order.reserve(size_t(n));
  std::vector<int> stack{0};
  std::vector<bool> seen(size_t(n), false);
  seen[0] = true;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    order.push_back(v);
    for (auto [w, e] : adj[size_t(v)])
      if (!seen[size_t(w)]) {
        seen[size_t(w)] = true;
        parent[size_t(w)] = v;
        stack.push_back(w);
      }
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    if (parent[size_t(*it)] >= 0) sz[size_t(parent[size_t(*it)])] += sz[size_t(*it)];
  std::vector<int> cents;
  for (int v = 0; v < n; ++v) {
    int worst = n - sz[size_t(v)];
    for (auto [w, e] : adj[size_t(v)])
      if (parent[size_t(w)] == v) worst = std::max(worst, sz[size_t(w)]);
    if (worst <= n / 2) cents.push_back(v);
  }
  return cents;
}

inline std::string canonical_form(const MetricLabeledTree& t) {
  auto adj = t.adjacency();
  std::string best;
  for (int c : centroids(t)) {
    std::string enc = canon_encode(t, c, -1, adj);
    if (best.empty() || enc < best) best = enc;
  }
  return best;
}

}  // namespace rtree_detail

// Label- and length-preserving isomorphism, exact rational lengths.  Cone
// markers are not compared.
inline bool trees_isomorphic(const MetricLabeledTree& a, const MetricLabeledTree& b) {
  if (a.verts.size() != b.verts.size() || a.edges.size() != b.edges.size()) return false;
  return rtree_detail::canonical_form(a) == rtree_detail::canonical_form(b);
}

// --- realization ------------------------------------------------------------------

struct Realization {
  std::vector<int> cyclic_order;  // labels in contour order
  ArcSystem arcs;
  std::vector<int> sigma;  // sigma[j-1] = image of label j; applies (1..n) -> cyclic_order
};

// Realize a labeled tree in the base surface.  The cone subtree is collapsed
// first; the root is the v_P vertex, else the cone vertex, else the vertex
// carrying label 1.  Children are ordered by the minimal label in their
// subtree and a vertex's own labels sit at its first corner.
inline Realization realize(const MetricLabeledTree& t_in, int n) {
  MetricLabeledTree t = collapse_cone_subtree(t_in);
  t.validate();

  std::vector<int> label_vertex(size_t(n) + 1, -1);
  int vP_vertex = -1, cone_vertex = -1;
  for (size_t v = 0; v < t.verts.size(); ++v) {
    for (int l : t.verts[v].labels) {
      if (l < 1 || l > n) throw std::invalid_argument("label out of range 1..n");
      if (label_vertex[size_t(l)] >= 0) throw std::invalid_argument("duplicated label");
      label_vertex[size_t(l)] = int(v);
    }
    if (t.verts[v].vP) {
      if (vP_vertex >= 0) throw std::invalid_argument("two v_P vertices");
      vP_vertex = int(v);
    }
    if (t.verts[v].cone) cone_vertex = int(v);
  }
  for (int l = 1; l <= n; ++l)
    if (label_vertex[size_t(l)] < 0) throw std::invalid_argument("missing label");
  if (vP_vertex >= 0 && cone_vertex >= 0)
    throw std::invalid_argument("a tree cannot carry both v_P and a cone vertex");

  int root = vP_vertex >= 0 ? vP_vertex : (cone_vertex >= 0 ? cone_vertex : label_vertex[1]);

  auto adj = t.adjacency();
  // min label in each subtree seen from the root
  std::vector<int> minlab(t.verts.size(), 1 << 30);
  std::function<int(int, int)> dfs_min = [&](int v, int par) {
    int m = t.verts[size_t(v)].labels.empty() ? (1 << 30) : *t.verts[size_t(v)].labels.begin();
    if (t.verts[size_t(v)].vP) m = std::min(m, 0);
    for (auto [w, e] : adj[size_t(v)])
      if (w != par) m = std::min(m, dfs_min(w, v));
    minlab[size_t(v)] = m;
    return m;
  };
  dfs_min(root, -1);
  for (size_t v = 0; v < t.verts.size(); ++v)
    if (minlab[v] == (1 << 30) && int(v) != root)
      throw std::invalid_argument("subtree without labels cannot be realized essentially");

  // contour: positions of labels; per-edge label blocks
  std::vector<int> contour;
  struct Block {
    int edge;
    int first, last;  // label positions covered by the subtree below this edge
    int depth;        // nesting depth, for rank tie-breaks on identical blocks
  };
  std::vector<Block> blocks;
  std::function<void(int, int, int)> walk = [&](int v, int par, int depth) {
    std::vector<int> ls(t.verts[size_t(v)].labels.begin(), t.verts[size_t(v)].labels.end());
    for (int l : ls) contour.push_back(l);
    std::vector<std::pair<int, int>> kids;  // (min label, adj index)
    for (size_t k = 0; k < adj[size_t(v)].size(); ++k) {
      auto [w, e] = adj[size_t(v)][k];
      if (w == par) continue;
      kids.push_back({minlab[size_t(w)], int(k)});
    }
    std::sort(kids.begin(), kids.end());
    for (auto [m, k] : kids) {
      auto [w, e] = adj[size_t(v)][size_t(k)];
      int first = int(contour.size());
      walk(w, v, depth + 1);
      int last = int(contour.size()) - 1;
      if (first > last) throw std::invalid_argument("empty subtree block");
      blocks.push_back({e, first, last, depth + 1});
    }
  };
  walk(root, -1, 0);
  if (int(contour.size()) != n) throw std::invalid_argument("labels do not fill 1..n");

  Realization out;
  out.cyclic_order = contour;
  out.sigma.resize(size_t(n));
  for (int i = 0; i < n; ++i) out.sigma[size_t(i)] = contour[size_t(i)];

  ArcSystem& s = out.arcs;
  s.n = n;
  s.order = contour;
  s.base = vP_vertex >= 0 ? BaseKind::annulus : BaseKind::disc;

  // cone-incident edges become radial arcs when the cone vertex is the root
  // and has degree >= 2
  std::set<int> radial_edges;
  if (cone_vertex >= 0 && root == cone_vertex && adj[size_t(root)].size() >= 2)
    for (auto [w, e] : adj[size_t(root)]) radial_edges.insert(e);

  // rank bookkeeping per gap: enders (innermost first), radials, starters
  // (outermost first); identical blocks nest by tree depth
  struct Pending {
    int gap;
    int kind;  // 0 = ender, 1 = radial, 2 = starter
    int blocklen;
    int depth;
    size_t arc_index;
    bool is_a_end;
  };
  std::vector<Pending> pend;
  for (const Block& b : blocks) {
    const TreeEdge& e = t.edges[size_t(b.edge)];
    int gap_left = (b.first - 1 + n) % n;
    int gap_right = b.last % n;
    if (radial_edges.count(b.edge)) {
      Arc a;
      a.a = {gap_left, 0};
      a.b = std::nullopt;
      a.weight = e.len;
      s.arcs.push_back(a);
      pend.push_back({gap_left, 1, 0, b.depth, s.arcs.size() - 1, true});
    } else {
      Arc a;
      a.a = {gap_left, 0};
      a.b = ArcEnd{gap_right, 0};
      a.weight = e.len;
      s.arcs.push_back(a);
      int blocklen = b.last - b.first;
      pend.push_back({gap_left, 2, blocklen, b.depth, s.arcs.size() - 1, true});
      pend.push_back({gap_right, 0, blocklen, b.depth, s.arcs.size() - 1, false});
    }
  }
  // assign ranks gap by gap
  for (int g = 0; g < n; ++g) {
    std::vector<Pending*> here;
    for (auto& p : pend)
      if (p.gap == g) here.push_back(&p);
    std::sort(here.begin(), here.end(), [](const Pending* x, const Pending* y) {
      if (x->kind != y->kind) return x->kind < y->kind;
      if (x->kind == 0) {  // enders: innermost first = smaller block, deeper edge
        if (x->blocklen != y->blocklen) return x->blocklen < y->blocklen;
        return x->depth > y->depth;
      }
      if (x->blocklen != y->blocklen) return x->blocklen > y->blocklen;  // starters: outer first
      return x->depth < y->depth;
    });
    int r = 0;
    for (Pending* p : here) {
      if (p->is_a_end)
        s.arcs[p->arc_index].a.rank = r++;
      else
        s.arcs[p->arc_index].b->rank = r++;
    }
  }
  return out;
}

// --- translation length ------------------------------------------------------

// Translation length of a conjugacy class on the dual tree of a block-shaped
// arc system: the sum, over cyclic syllable transitions that cross between
// distinct blocks, of the tree distance between the block vertices.
inline Rat tree_translation_length(const ArcSystem& s, const std::vector<std::set<int>>& blocks,
                                   const BookGroup& G, const NormalForm& w) {
  MetricLabeledTree t = dual_tree(s);
  // map each block to its region vertex
  std::map<int, int> page_block;
  for (size_t b = 0; b < blocks.size(); ++b)
    for (int l : blocks[b]) page_block[l] = int(b);
  std::vector<int> block_vertex(blocks.size(), -1);
  for (size_t v = 0; v < t.verts.size(); ++v) {
    if (t.verts[v].labels.empty()) continue;
    int b = page_block.at(*t.verts[v].labels.begin());
    if (t.verts[v].labels != blocks[size_t(b)])
      throw std::invalid_argument("arc system regions do not match the blocks");
    block_vertex[size_t(b)] = int(v);
  }
  for (size_t b = 0; b < blocks.size(); ++b)
    if (block_vertex[b] < 0) throw std::invalid_argument("block without a region");

  NormalForm c = G.cyclic_form(w);
  if (c.syl.size() < 2) return Rat(0);

  // all-pairs distances on the tree (small)
  auto adj = t.adjacency();
  auto dist_from = [&](int src) {
    std::vector<Rat> d(t.verts.size(), Rat(-1));
    std::vector<int> stack{src};
    d[size_t(src)] = Rat(0);
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (auto [u, e] : adj[size_t(v)])
        if (d[size_t(u)] < 0) {
          d[size_t(u)] = d[size_t(v)] + t.edges[size_t(e)].len;
          stack.push_back(u);
        }
    }
    return d;
  };
  std::map<int, std::vector<Rat>> dcache;
  Rat total(0);
  for (size_t i = 0; i < c.syl.size(); ++i) {
    int p1 = c.syl[i].page, p2 = c.syl[(i + 1) % c.syl.size()].page;
    int b1 = page_block.at(p1), b2 = page_block.at(p2);
    if (b1 == b2) continue;
    int v1 = block_vertex[size_t(b1)], v2 = block_vertex[size_t(b2)];
    if (!dcache.count(v1)) dcache[v1] = dist_from(v1);
    total += dcache[v1][size_t(v2)];
  }
  return total;
}

}  // namespace ibundle
