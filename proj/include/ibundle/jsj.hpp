#pragma once

// Combinatorial model of pared manifolds of book type: a single solid-torus
// or thickened-torus core with pages (product I-bundles) or opaque
// acylindrical pieces attached along annuli in a cyclic order.

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace ibundle {

enum class CoreKind { solid, thickened };

struct PageSpec {
  int genus = 1;
  bool orientable = true;
  bool operator==(const PageSpec& o) const {
    return genus == o.genus && orientable == o.orientable;
  }
  bool operator<(const PageSpec& o) const {
    return genus != o.genus ? genus < o.genus : orientable < o.orientable;
  }
};

// A piece attached to the core: an I-pair over a page, or an opaque
// acylindrical piece (supported for window computation only).
struct Attachment {
  bool opaque = false;
  PageSpec page;
  bool operator==(const Attachment& o) const {
    return opaque == o.opaque && (opaque || page == o.page);
  }
};

struct JsjGraph {
  CoreKind core = CoreKind::solid;
  int p = 1;  // multiplicity of the gluing curve; p = 1 is primitive
  std::vector<Attachment> pieces;  // piece j is pieces[j-1]
  std::vector<int> order;          // circular attachment order, 1-based piece ids
  std::set<int> flips;             // pages with flipped attaching annulus

  int valency() const { return int(order.size()); }
  bool is_book() const {
    for (const auto& a : pieces)
      if (a.opaque) return false;
    return valency() >= 3;
  }
  void validate() const {
    if (pieces.empty()) throw std::invalid_argument("graph has no pieces");
    if (p < 1) throw std::invalid_argument("multiplicity p must be positive");
    if (order.size() != pieces.size())
      throw std::invalid_argument("cyclic order length must match piece count");
    std::vector<bool> seen(pieces.size(), false);
    for (int v : order) {
      if (v < 1 || v > int(pieces.size()) || seen[v - 1])
        throw std::invalid_argument("cyclic order is not a permutation of the pieces");
      seen[v - 1] = true;
    }
    for (const auto& a : pieces)
      if (!a.opaque && a.page.genus < 1)
        throw std::invalid_argument("page genus must be >= 1");
    for (int f : flips)
      if (f < 1 || f > int(pieces.size())) throw std::invalid_argument("flip mark out of range");
  }
};

inline JsjGraph build_book(int n, const std::vector<PageSpec>& pages, int p) {
  if (n < 3) throw std::invalid_argument("a book needs an integer greater than 2 pages");
  if (int(pages.size()) != n) throw std::invalid_argument("page list length must equal n");
  if (p < 1) throw std::invalid_argument("multiplicity p must be positive");
  JsjGraph g;
  g.core = CoreKind::solid;
  g.p = p;
  for (const auto& ps : pages) g.pieces.push_back({false, ps});
  for (int j = 1; j <= n; ++j) g.order.push_back(j);
  g.validate();
  return g;
}

// --- window -------------------------------------------------------------------

struct WindowComponent {
  enum class Kind { i_pair, annulus } kind = Kind::i_pair;
  int page = 0;      // i_pair: the page id
  int position = 0;  // annulus: cyclic position of the retained frontier annulus
};

struct Window {
  std::vector<WindowComponent> components;
  int count(WindowComponent::Kind k) const {
    int c = 0;
    for (const auto& w : components) c += (w.kind == k);
    return c;
  }
};

// The window: one I-pair component per page; frontier annuli of the core are
// retained only where the neighbouring piece is not an I-pair, and properly
// homotopic candidates (those not separated by any page attachment around the
// core) are deduplicated keeping the smallest cyclic position.
inline Window window(const JsjGraph& g) {
  g.validate();
  Window w;
  for (size_t j = 0; j < g.pieces.size(); ++j)
    if (!g.pieces[j].opaque)
      w.components.push_back({WindowComponent::Kind::i_pair, int(j) + 1, 0});

  int n = g.valency();
  std::vector<int> candidates;  // positions whose neighbour is opaque
  bool any_page_attachment = false;
  for (int pos = 0; pos < n; ++pos) {
    if (g.pieces[g.order[pos] - 1].opaque)
      candidates.push_back(pos);
    else
      any_page_attachment = true;
  }
  if (candidates.empty()) return w;
  if (!any_page_attachment) {
    // nothing blocks the sliding homotopy; one representative survives
    w.components.push_back({WindowComponent::Kind::annulus, 0, candidates.front()});
    return w;
  }
  // Candidates with no page attachment between them around the core are
  // properly homotopic; keep one per family, smallest cyclic position first.
  int last_page = -1;
  for (int pos = n - 1; pos >= 0; --pos)
    if (!g.pieces[g.order[pos] - 1].opaque) {
      last_page = pos;
      break;
    }
  std::vector<int> family_of(n, -1);
  int cur = last_page;
  for (int step = 0; step < n; ++step) {
    int pos = (last_page + 1 + step) % n;
    if (!g.pieces[g.order[pos] - 1].opaque)
      cur = pos;
    else
      family_of[pos] = cur;
  }
  std::set<int> seen_families;
  for (int pos : candidates) {
    if (seen_families.insert(family_of[pos]).second)
      w.components.push_back({WindowComponent::Kind::annulus, 0, pos});
  }
  return w;
}

// --- moves --------------------------------------------------------------------

// perm[j-1] = image of piece j; the new cyclic order applies perm entrywise.
inline JsjGraph shuffle(const JsjGraph& g, const std::vector<int>& perm) {
  g.validate();
  if (int(perm.size()) != int(g.pieces.size()))
    throw std::invalid_argument("shuffle: permutation length mismatch");
  std::vector<bool> seen(perm.size(), false);
  for (int v : perm) {
    if (v < 1 || v > int(perm.size()) || seen[v - 1])
      throw std::invalid_argument("shuffle: not a permutation");
    seen[v - 1] = true;
  }
  JsjGraph out = g;
  for (size_t i = 0; i < g.order.size(); ++i) out.order[i] = perm[g.order[i] - 1];
  return out;
}

inline JsjGraph flip(const JsjGraph& g, int page) {
  g.validate();
  if (page < 1 || page > int(g.pieces.size())) throw std::invalid_argument("flip: bad page index");
  JsjGraph out = g;
  if (!out.flips.erase(page)) out.flips.insert(page);
  return out;
}

// --- classification -------------------------------------------------------

enum class PairClass { homeomorphic, homotopy_equivalent_only, inequivalent };

inline std::string to_string(PairClass c) {
  switch (c) {
    case PairClass::homeomorphic: return "homeomorphic";
    case PairClass::homotopy_equivalent_only: return "homotopy-equivalent-only";
    default: return "inequivalent";
  }
}

namespace detail {

inline std::vector<PageSpec> type_sequence(const JsjGraph& g) {
  std::vector<PageSpec> seq;
  for (int v : g.order) seq.push_back(g.pieces[v - 1].page);
  return seq;
}

// Lexicographically minimal rotation or reflection of the circular word.
inline std::vector<PageSpec> dihedral_canonical(std::vector<PageSpec> seq) {
  std::vector<PageSpec> best = seq;
  for (int refl = 0; refl < 2; ++refl) {
    for (size_t r = 0; r < seq.size(); ++r) {
      std::vector<PageSpec> cand;
      for (size_t i = 0; i < seq.size(); ++i) cand.push_back(seq[(i + r) % seq.size()]);
      if (cand < best) best = cand;
    }
    std::reverse(seq.begin(), seq.end());
  }
  return best;
}

}  // namespace detail

// Books are homeomorphic iff their page-type circular words agree up to
// rotation and reflection; homotopy equivalent iff the page-type multisets
// and the gluing multiplicity agree.  Flip marks do not matter for books.
inline PairClass classify_pair(const JsjGraph& a, const JsjGraph& b) {
  if (!a.is_book() || !b.is_book())
    throw std::invalid_argument("classify_pair: both graphs must be books");
  if (a.p != b.p || a.core != b.core) return PairClass::inequivalent;
  auto sa = detail::type_sequence(a), sb = detail::type_sequence(b);
  if (sa.size() != sb.size()) return PairClass::inequivalent;
  auto ma = sa, mb = sb;
  std::sort(ma.begin(), ma.end());
  std::sort(mb.begin(), mb.end());
  if (ma != mb) return PairClass::inequivalent;
  if (detail::dihedral_canonical(sa) == detail::dihedral_canonical(sb))
    return PairClass::homeomorphic;
  return PairClass::homotopy_equivalent_only;
}

}  // namespace ibundle
