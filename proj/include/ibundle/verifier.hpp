#pragma once

// Convergence verdicts for restrictions of automorphism-twisted
// representations, the window biconditional test, planarity of block
// constraints via non-crossing partitions, and the rectification pipeline
// that shuffles a book until the diverging pairs are separated by a
// non-crossing annulus system.

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "amalgam.hpp"
#include "jsj.hpp"
#include "repvar.hpp"
#include "rtree.hpp"

namespace ibundle {

// --- verdicts -----------------------------------------------------------------

enum class VerdictStatus { converges, diverges, undetermined };

inline std::string to_string(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::converges: return "converges";
    case VerdictStatus::diverges: return "diverges";
    default: return "undetermined";
  }
}

struct DivergenceCertificate {
  std::string word;                  // tested subgroup word
  std::vector<long long> lengths;    // conjugacy lengths per i
  int growth_run = 0;                // longest strictly increasing run
  bool has_trace_certificate = false;
  double max_abs_trace = 0;
};

struct Verdict {
  SubgroupSpec subgroup;
  VerdictStatus status = VerdictStatus::undetermined;
  long long pattern_coeff = 0;  // converges: verified conjugator family t^{c i}
  long long i_max = 0;
  DivergenceCertificate certificate;  // diverges
  SearchBudget budget;
};

struct VerifierThresholds {
  int growth_run = 8;        // strict conjugacy-length increase over >= this many i
  double trace_mag = 1e3;    // trace magnitude certifying divergence
};

// Classify the restriction of the sequence rho o f^i to the subgroup H:
// converges when a verified conjugator family t^{c i} exists, diverges on a
// certified length-growth (plus trace growth when a representation is
// supplied), undetermined otherwise.
inline Verdict classify_restriction(const BookGroup& G, const BookAutomorphism& f,
                                    const SubgroupSpec& H, long long i_max,
                                    const Representation* rep = nullptr,
                                    SearchBudget budget = {}, VerifierThresholds th = {}) {
  if (i_max < 4) throw std::invalid_argument("classify_restriction: i_max must be >= 4");
  Verdict v;
  v.subgroup = H;
  v.i_max = i_max;
  v.budget = budget;

  std::vector<Lid> gens = H.generator_ids(G);

  // conjugator family: find h_1, require it to be a core power, then verify
  // t^{c i} against f^i on every generator
  InnerResult h1 = inner_conjugator_on(G, f, H, budget);
  if (h1.found && h1.witness.is_core_power()) {
    long long c = h1.witness.lead;
    bool all_ok = true;
    std::vector<NormalForm> images;
    for (Lid g : gens) images.push_back(G.nf_of_letter(g));
    for (long long i = 1; i <= i_max && all_ok; ++i) {
      for (size_t k = 0; k < gens.size(); ++k) {
        images[k] = G.reduce(f.apply_word(G, G.to_word(images[k])));
        if (G.conj(G.core_power(c * i), G.nf_of_letter(gens[k])) != images[k]) {
          all_ok = false;
          break;
        }
      }
    }
    if (all_ok) {
      v.status = VerdictStatus::converges;
      v.pattern_coeff = c;
      return v;
    }
  }

  // divergence certificates on cross-page test words
  std::vector<Word> test_words;
  std::vector<int> pages = H.pages_involved();
  if (pages.size() == 2) {
    Lid a1 = G.gen_a(pages[0], 1), b1 = G.gen_b(pages[0], 1);
    Lid a2 = G.gen_a(pages[1], 1), b2 = G.gen_b(pages[1], 1);
    test_words = {{a1, a2}, {a1, b2}, {b1, a2}, {b1, b2}};
  } else if (pages.size() == 1) {
    test_words = {{G.gen_a(pages[0], 1)}, {G.gen_b(pages[0], 1)}};
  } else if (gens.size() >= 2) {
    test_words = {{gens[0], gens[1]}};
  }

  for (const Word& w : test_words) {
    DivergenceCertificate cert;
    cert.word = word_to_string(G, w);
    Word cur = w;
    int run = 1, best_run = 1;
    long long prev = -1;
    double max_tr = 0;
    for (long long i = 0; i <= i_max; ++i) {
      NormalForm nf = G.reduce(cur);
      long long len = G.conjugacy_length(nf);
      cert.lengths.push_back(len);
      if (prev >= 0) {
        run = len > prev ? run + 1 : 1;
        best_run = std::max(best_run, run);
      }
      prev = len;
      if (rep) max_tr = std::max(max_tr, std::abs(evaluate(*rep, G, nf).trace));
      if (i < i_max) cur = G.to_word(f.apply(G, cur));
    }
    cert.growth_run = best_run;
    cert.max_abs_trace = max_tr;
    cert.has_trace_certificate = rep != nullptr && max_tr > th.trace_mag;
    bool length_ok = best_run >= th.growth_run;
    bool trace_ok = rep == nullptr || cert.has_trace_certificate;
    if (length_ok && trace_ok) {
      v.status = VerdictStatus::diverges;
      v.certificate = cert;
      return v;
    }
  }

  v.status = VerdictStatus::undetermined;
  return v;
}

// Standard verdict family for a book: all pages and the embedded surfaces
// S_{i,j} at circular distance 1 and 2.
inline std::vector<SubgroupSpec> standard_subgroup_family(int n) {
  std::vector<SubgroupSpec> fam;
  for (int j = 1; j <= n; ++j) fam.push_back(SubgroupSpec::page(j));
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) {
      int d = std::min(j - i, n - (j - i));
      if (d == 1 || d == 2) fam.push_back(SubgroupSpec::surface(i, j));
    }
  return fam;
}

// --- window biconditional -------------------------------------------------------

struct BiconditionalReport {
  int n = 0;
  std::vector<std::vector<int>> satisfying;  // each a set of page labels x
  long long candidates = 0;
};

namespace verifier_detail {

inline void check_coverage(int n, const std::vector<Verdict>& verdicts) {
  std::set<std::pair<int, int>> have_surface;
  std::set<int> have_page;
  for (const auto& v : verdicts) {
    if (v.subgroup.kind == SubgroupSpec::Kind::page) have_page.insert(v.subgroup.i);
    if (v.subgroup.kind == SubgroupSpec::Kind::surface)
      have_surface.insert({std::min(v.subgroup.i, v.subgroup.j),
                           std::max(v.subgroup.i, v.subgroup.j)});
  }
  for (int j = 1; j <= n; ++j)
    if (!have_page.count(j))
      throw std::invalid_argument("insufficient verdict coverage: page " + std::to_string(j));
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) {
      int d = std::min(j - i, n - (j - i));
      if ((d == 1 || d == 2) && !have_surface.count({i, j}))
        throw std::invalid_argument("insufficient verdict coverage: surface(" +
                                    std::to_string(i) + "," + std::to_string(j) + ")");
    }
}

}  // namespace verifier_detail

// Enumerate every union x of page-boundary annuli in the window base (2^n
// candidates) and keep those for which: a subgroup verdict converges exactly
// when the subgroup is conjugate into a component of the book cut along the
// I-bundle over x.  Pages always lie in a component; S_{i,j} does exactly
// when neither boundary annulus is in x.
inline BiconditionalReport window_biconditional_test(const JsjGraph& g,
                                                     const std::vector<Verdict>& verdicts) {
  g.validate();
  if (!g.is_book()) throw std::invalid_argument("window_biconditional_test: graph must be a book");
  int n = g.valency();
  if (n > 20) throw std::invalid_argument("window_biconditional_test: n too large to enumerate");
  verifier_detail::check_coverage(n, verdicts);

  BiconditionalReport rep;
  rep.n = n;
  rep.candidates = 1LL << n;
  for (long long mask = 0; mask < (1LL << n); ++mask) {
    auto in_x = [&](int page) { return (mask >> (page - 1)) & 1; };
    bool ok = true;
    for (const auto& v : verdicts) {
      bool inside;
      if (v.subgroup.kind == SubgroupSpec::Kind::page)
        inside = true;
      else if (v.subgroup.kind == SubgroupSpec::Kind::surface)
        inside = !in_x(v.subgroup.i) && !in_x(v.subgroup.j);
      else
        continue;
      bool conv = v.status == VerdictStatus::converges;
      if (conv != inside) {
        ok = false;
        break;
      }
    }
    if (ok) {
      std::vector<int> x;
      for (int j = 1; j <= n; ++j)
        if (in_x(j)) x.push_back(j);
      rep.satisfying.push_back(x);
    }
  }
  return rep;
}

// --- non-crossing feasibility -----------------------------------------------------

struct BlockConstraints {
  int n = 0;
  std::set<std::pair<int, int>> same;      // labels required homotopic off the lamination
  std::set<std::pair<int, int>> distinct;  // labels required separated
};

using Partition = std::vector<std::set<int>>;

namespace verifier_detail {

inline std::pair<int, int> norm_pair(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

// all partitions of {0..n-1} whose blocks do not interleave in the circular
// order pos[0], pos[1], ..., pos[n-1]
inline void enumerate_noncrossing(int n, std::vector<int>& block_of, int next_block,
                                  const std::function<bool(const std::vector<int>&)>& emit,
                                  bool& stop) {
  size_t idx = 0;
  while (idx < block_of.size() && block_of[idx] >= 0) ++idx;
  if (idx == block_of.size()) {
    if (emit(block_of)) stop = true;
    return;
  }
  // the fresh block comes first so the finest witness is found first
  for (int b = next_block; b >= 0 && !stop; --b) {
    // non-crossing check: joining idx to block b must not interleave with any
    // other existing block
    bool ok = true;
    if (b < next_block) {
      // find last position of block b before idx
      int last_b = -1;
      for (int i = 0; i < int(idx); ++i)
        if (block_of[size_t(i)] == b) last_b = i;
      if (last_b < 0)
        ok = false;  // unreachable: blocks are created in order
      else
        for (int i = last_b + 1; i < int(idx) && ok; ++i)
          if (block_of[size_t(i)] >= 0 && block_of[size_t(i)] != b) {
            // block of i already has members outside (last_b, idx)?
            int ob = block_of[size_t(i)];
            for (int k = 0; k < int(block_of.size()) && ok; ++k)
              if (block_of[size_t(k)] == ob && (k < last_b || k > int(idx))) ok = false;
          }
    }
    if (!ok) continue;
    block_of[idx] = b;
    enumerate_noncrossing(n, block_of, b == next_block ? next_block + 1 : next_block, emit, stop);
    block_of[idx] = -1;
  }
}

}  // namespace verifier_detail

// Search all non-crossing partitions of the labels in the given cyclic order
// for one satisfying the constraints; returns a witness or nothing.
inline std::optional<Partition> noncrossing_feasibility(const BlockConstraints& c,
                                                        std::vector<int> cyclic_order = {}) {
  if (c.n < 2) throw std::invalid_argument("noncrossing_feasibility: n must be >= 2");
  if (cyclic_order.empty()) {
    cyclic_order.resize(size_t(c.n));
    std::iota(cyclic_order.begin(), cyclic_order.end(), 1);
  }
  if (int(cyclic_order.size()) != c.n)
    throw std::invalid_argument("noncrossing_feasibility: order length mismatch");
  for (auto& p : c.same)
    if (c.distinct.count(p))
      throw std::invalid_argument("contradictory constraints: pair (" + std::to_string(p.first) +
                                  "," + std::to_string(p.second) +
                                  ") required both same and distinct");
  auto check_labels = [&](const std::set<std::pair<int, int>>& ps) {
    for (auto& [a, b] : ps)
      if (a < 1 || a > c.n || b < 1 || b > c.n)
        throw std::invalid_argument("constraint label out of range");
  };
  check_labels(c.same);
  check_labels(c.distinct);

  std::vector<int> pos_of_label(size_t(c.n) + 1, -1);
  for (int i = 0; i < c.n; ++i) pos_of_label[size_t(cyclic_order[size_t(i)])] = i;

  std::optional<Partition> result;
  auto emit = [&](const std::vector<int>& block_of) {
    for (auto& [a, b] : c.same)
      if (block_of[size_t(pos_of_label[size_t(a)])] != block_of[size_t(pos_of_label[size_t(b)])])
        return false;
    for (auto& [a, b] : c.distinct)
      if (block_of[size_t(pos_of_label[size_t(a)])] == block_of[size_t(pos_of_label[size_t(b)])])
        return false;
    int nb = *std::max_element(block_of.begin(), block_of.end()) + 1;
    Partition part{size_t(nb)};
    part.assign(size_t(nb), {});
    for (int i = 0; i < c.n; ++i)
      part[size_t(block_of[size_t(i)])].insert(cyclic_order[size_t(i)]);
    result = part;
    return true;
  };
  std::vector<int> block_of(size_t(c.n), -1);
  bool stop = false;
  verifier_detail::enumerate_noncrossing(c.n, block_of, 0, emit, stop);
  return result;
}

// --- rectification ----------------------------------------------------------------

struct Rectification {
  std::vector<int> sigma;      // shuffle permutation, sigma[j-1] = image of page j
  std::vector<int> new_order;  // resulting cyclic order
  Partition blocks;            // transitive closure of converging pairs
  std::vector<long long> block_coeff;  // twist coefficient per block
  ArcSystem arcs;              // weighted annulus system separating the blocks
  std::vector<int> x;          // window-base pieces cut in addition (page ids)
  bool biconditional_verified = false;
};

// Derive block constraints from the verdicts, shuffle the book so the blocks
// sit unseparated around the core (ordered by their twist coefficients),
// and emit the weighted non-crossing annulus system separating them.  The
// weights are calibrated against the rescaling convention of growth_scan:
// the fastest generator pair crosses the system twice, so a crossing between
// blocks with coefficients c and c' carries weight |c - c'| / (2 max_adj),
// making dual-tree translation lengths match mu-normalized limits.
inline Rectification rectify(const JsjGraph& g, const std::vector<Verdict>& verdicts) {
  g.validate();
  if (!g.is_book()) throw std::invalid_argument("rectify: graph must be a book");
  int n = g.valency();
  verifier_detail::check_coverage(n, verdicts);

  Rectification out;

  // constraints and per-page twist coefficients
  BlockConstraints cons;
  cons.n = n;
  std::vector<long long> page_coeff(size_t(n) + 1, 0);
  std::vector<bool> page_converges(size_t(n) + 1, false);
  for (const auto& v : verdicts) {
    if (v.subgroup.kind == SubgroupSpec::Kind::page) {
      if (v.status == VerdictStatus::converges) {
        page_converges[size_t(v.subgroup.i)] = true;
        page_coeff[size_t(v.subgroup.i)] = v.pattern_coeff;
      } else {
        out.x.push_back(v.subgroup.i);
      }
    }
    if (v.subgroup.kind != SubgroupSpec::Kind::surface) continue;
    auto p = verifier_detail::norm_pair(v.subgroup.i, v.subgroup.j);
    if (v.status == VerdictStatus::converges)
      cons.same.insert(p);
    else if (v.status == VerdictStatus::diverges)
      cons.distinct.insert(p);
  }

  // transitive closure of same pairs -> blocks
  std::vector<int> comp(size_t(n) + 1);
  std::iota(comp.begin(), comp.end(), 0);
  std::function<int(int)> find = [&](int v) { return comp[size_t(v)] == v ? v : comp[size_t(v)] = find(comp[size_t(v)]); };
  for (auto& [a, b] : cons.same) comp[size_t(find(a))] = find(b);
  for (auto& [a, b] : cons.distinct)
    if (find(a) == find(b))
      throw std::runtime_error("no rectification found: converging pairs link a diverging pair");

  std::map<int, std::set<int>> by_root;
  for (int j = 1; j <= n; ++j) by_root[find(j)].insert(j);
  for (auto& [r, s] : by_root) out.blocks.push_back(s);

  // block coefficients from the page verdict patterns
  for (auto& blk : out.blocks) {
    long long c = page_coeff[size_t(*blk.begin())];
    out.block_coeff.push_back(c);
  }

  // order the block runs by coefficient (the cut between the extreme blocks
  // keeps dual-tree distances telescoping), smallest label breaking ties
  size_t k = out.blocks.size();
  std::vector<size_t> runs(k);
  std::iota(runs.begin(), runs.end(), size_t(0));
  std::sort(runs.begin(), runs.end(), [&](size_t x, size_t y) {
    if (out.block_coeff[x] != out.block_coeff[y]) return out.block_coeff[x] < out.block_coeff[y];
    return *out.blocks[x].begin() < *out.blocks[y].begin();
  });
  if (k == 2 && !out.blocks[runs[0]].count(1)) std::swap(runs[0], runs[1]);

  std::vector<int> target;
  std::vector<size_t> block_run;  // block index per position
  auto build_from_runs = [&]() {
    target.clear();
    block_run.clear();
    for (size_t bi : runs)
      for (int l : out.blocks[bi]) {
        target.push_back(l);
        block_run.push_back(bi);
      }
  };
  build_from_runs();

  // prefer the identity shuffle when the current order already realizes the
  // blocks contiguously with a block change across the wrap
  auto block_index_of_label = [&](int l) {
    for (size_t b = 0; b < out.blocks.size(); ++b)
      if (out.blocks[b].count(l)) return b;
    throw std::logic_error("label without block");
  };
  if (k == 1) {
    target = g.order;
    block_run.assign(size_t(n), runs[0]);
  } else if (k == 2) {
    int boundaries = 0;
    for (int i = 0; i < n; ++i)
      if (find(g.order[size_t(i)]) != find(g.order[size_t((i + 1) % size_t(n))])) ++boundaries;
    bool wrap_boundary = find(g.order[size_t(n - 1)]) != find(g.order[0]);
    if (boundaries == 2 && wrap_boundary) {
      target = g.order;
      block_run.clear();
      for (int l : target) block_run.push_back(block_index_of_label(l));
    }
  }

  // verify feasibility of the chosen order
  if (!cons.same.empty() || !cons.distinct.empty()) {
    auto wit = noncrossing_feasibility(cons, target);
    if (!wit)
      throw std::runtime_error("no rectification found: chosen order is infeasible (bug)");
  }

  out.new_order = target;
  out.sigma.resize(size_t(n));
  for (int i = 0; i < n; ++i) out.sigma[size_t(g.order[size_t(i)] - 1)] = target[size_t(i)];

  // nested chord system separating consecutive block runs; all chords share
  // the wrap gap, so the dual tree is the line of blocks
  ArcSystem& s = out.arcs;
  s = ArcSystem::disc(n);
  s.order = target;
  s.cone_order = g.p;
  if (k >= 2) {
    long long max_adj = 0;
    for (int i = 0; i < n; ++i) {
      int a = g.order[size_t(i)], b = g.order[size_t((i + 1) % size_t(n))];
      if (find(a) != find(b))
        max_adj = std::max(max_adj, llabs(page_coeff[size_t(a)] - page_coeff[size_t(b)]));
    }
    if (max_adj == 0) max_adj = 1;  // synthetic verdicts without twist patterns
    int shared_gap = n - 1;
    std::vector<int> cut_pos;  // run boundaries other than the wrap
    for (int i = 0; i + 1 < n; ++i)
      if (block_run[size_t(i)] != block_run[size_t(i + 1)]) cut_pos.push_back(i);
    int count = int(cut_pos.size());
    for (int ri = 0; ri < count; ++ri) {
      int pos = cut_pos[size_t(ri)];
      long long ca = out.block_coeff[block_run[size_t(pos)]];
      long long cb = out.block_coeff[block_run[size_t(pos + 1)]];
      long long dc = llabs(ca - cb);
      if (dc == 0) dc = 1;
      Arc a;
      a.a = ArcEnd{pos, 0};
      // later cuts nest inside earlier ones at the shared gap
      a.b = ArcEnd{shared_gap, count - 1 - ri};
      a.weight = Rat(dc, 2 * max_adj);
      s.arcs.push_back(a);
    }
  }

  // verify the rectified biconditional against the verdicts
  auto in_x = [&](int page) {
    return std::find(out.x.begin(), out.x.end(), page) != out.x.end();
  };
  bool ok = true;
  for (const auto& v : verdicts) {
    bool inside;
    if (v.subgroup.kind == SubgroupSpec::Kind::page)
      inside = !in_x(v.subgroup.i);
    else if (v.subgroup.kind == SubgroupSpec::Kind::surface)
      inside = !in_x(v.subgroup.i) && !in_x(v.subgroup.j) &&
               find(v.subgroup.i) == find(v.subgroup.j);
    else
      continue;
    if ((v.status == VerdictStatus::converges) != inside) ok = false;
  }
  out.biconditional_verified = ok;
  return out;
}

}  // namespace ibundle
