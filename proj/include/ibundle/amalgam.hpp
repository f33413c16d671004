#pragma once

// Exact arithmetic in the fundamental group of a book of I-bundles:
//
//   G = < page generators | d_1 = d_2 = ... = d_n >,   d_j = prod_k [a_{j,k}, b_{j,k}]
//
// the free product of the page groups amalgamated over the cyclic subgroup
// generated by the common boundary class t = d_1.  Elements are kept in the
// canonical form  t^e r_1 r_2 ... r_m  where each syllable r_i is the
// shortlex-minimal representative of its right <d_j>-coset in its page group
// and adjacent syllables lie in distinct pages.

#include <cassert>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "words.hpp"

namespace ibundle {

// A raw (unreduced) word; may contain the core letter t.
using Word = FreeWord;

struct Syllable {
  int page = 0;  // 1-based
  FreeWord rep;  // nonempty coset representative, letters of this page only
  bool operator==(const Syllable& o) const { return page == o.page && rep == o.rep; }
};

struct NormalForm {
  long long lead = 0;  // exponent of t in front
  std::vector<Syllable> syl;
  bool is_identity() const { return lead == 0 && syl.empty(); }
  bool is_core_power() const { return syl.empty(); }
  bool operator==(const NormalForm& o) const { return lead == o.lead && syl == o.syl; }
  bool operator!=(const NormalForm& o) const { return !(*this == o); }
};

class BookGroup {
 public:
  // genera[j] is the genus of page j+1; every page has one boundary circle.
  explicit BookGroup(std::vector<int> genera) : genus_(std::move(genera)) {
    if (genus_.size() < 2) throw std::invalid_argument("book group needs at least 2 pages");
    int id = 1;
    for (size_t j = 0; j < genus_.size(); ++j) {
      if (genus_[j] < 1) throw std::invalid_argument("page genus must be >= 1");
      first_id_.push_back(id);
      id += 2 * genus_[j];
    }
    t_id_ = id;
    for (size_t j = 0; j < genus_.size(); ++j) {
      FreeWord d;
      for (int k = 0; k < genus_[j]; ++k) {
        Lid a = gen_a(int(j) + 1, k + 1), b = gen_b(int(j) + 1, k + 1);
        d.push_back(a);
        d.push_back(b);
        d.push_back(-a);
        d.push_back(-b);
      }
      boundary_.push_back(d);
    }
  }

  int pages() const { return int(genus_.size()); }
  int genus(int page) const { return genus_.at(page - 1); }
  Lid t() const { return t_id_; }
  Lid gen_a(int page, int slot) const { return first_id_.at(page - 1) + 2 * (slot - 1); }
  Lid gen_b(int page, int slot) const { return first_id_.at(page - 1) + 2 * (slot - 1) + 1; }
  int num_page_gens() const { return t_id_ - 1; }

  int page_of(Lid x) const {
    Lid g = x > 0 ? x : -x;
    if (g <= 0 || g >= t_id_) throw std::invalid_argument("not a page generator");
    int lo = 0, hi = pages() - 1;
    while (lo < hi) {
      int mid = (lo + hi + 1) / 2;
      if (first_id_[mid] <= g)
        lo = mid;
      else
        hi = mid - 1;
    }
    return lo + 1;
  }

  bool is_t(Lid x) const { return x == t_id_ || x == -t_id_; }

  // slot/letter decode for serialization
  int slot_of(Lid x) const {
    Lid g = x > 0 ? x : -x;
    return int(g - first_id_[page_of(x) - 1]) / 2 + 1;
  }
  bool is_b(Lid x) const {
    Lid g = x > 0 ? x : -x;
    return ((g - first_id_[page_of(x) - 1]) % 2) == 1;
  }

  const FreeWord& boundary(int page) const { return boundary_.at(page - 1); }

  FreeWord boundary_pow(int page, long long e) const { return free_pow(boundary(page), e); }

  // Decompose u in F_page as d^exp * rep with rep shortlex-minimal in the
  // coset { d^m u }.  Word length grows linearly in |m| past |u|/(2g), which
  // bounds the scan.
  void decompose(int page, const FreeWord& u, long long& exp, FreeWord& rep) const {
    if (u.empty()) {
      exp = 0;
      rep.clear();
      return;
    }
    long long g = genus(page);
    long long M = (long long)u.size() / (2 * g) + 1;
    long long best_m = 0;
    FreeWord best = u;
    for (long long m = -M; m <= M; ++m) {
      if (m == 0) continue;
      FreeWord cand = free_mul(boundary_pow(page, m), u);
      if (shortlex_less(cand, best)) {
        best = std::move(cand);
        best_m = m;
      }
    }
    exp = -best_m;
    rep = std::move(best);
  }

  bool in_boundary_subgroup(int page, const FreeWord& u, long long* pow = nullptr) const {
    long long e;
    FreeWord r;
    decompose(page, u, e, r);
    if (!r.empty()) return false;
    if (pow) *pow = e;
    return true;
  }

  // --- normal form construction --------------------------------------------

  // nf := nf * t^e
  void absorb_core(NormalForm& nf, long long e) const {
    for (int i = int(nf.syl.size()) - 1; i >= 0 && e != 0; --i) {
      Syllable& s = nf.syl[i];
      FreeWord w = free_mul(s.rep, boundary_pow(s.page, e));
      long long c;
      FreeWord rep;
      decompose(s.page, w, c, rep);
      assert(!rep.empty());  // s.rep was not in <d>, so w is not either
      s.rep = std::move(rep);
      e = c;
    }
    nf.lead += e;
  }

  // nf := nf * u with u a reduced word in page j's letters
  void push_syllable(NormalForm& nf, int j, const FreeWord& u) const {
    if (u.empty()) return;
    long long c;
    FreeWord rep;
    if (!nf.syl.empty() && nf.syl.back().page == j) {
      FreeWord w = free_mul(nf.syl.back().rep, u);
      nf.syl.pop_back();
      decompose(j, w, c, rep);
    } else {
      decompose(j, u, c, rep);
    }
    absorb_core(nf, c);
    if (!rep.empty()) {
      assert(nf.syl.empty() || nf.syl.back().page != j);
      nf.syl.push_back({j, std::move(rep)});
    }
  }

  NormalForm reduce(const Word& w) const {
    NormalForm nf;
    size_t i = 0;
    while (i < w.size()) {
      if (is_t(w[i])) {
        long long e = 0;
        while (i < w.size() && is_t(w[i])) {
          e += w[i] > 0 ? 1 : -1;
          ++i;
        }
        absorb_core(nf, e);
      } else {
        int j = page_of(w[i]);
        FreeWord run;
        while (i < w.size() && !is_t(w[i]) && page_of(w[i]) == j) {
          free_push(run, w[i]);
          ++i;
        }
        push_syllable(nf, j, run);
      }
    }
    return nf;
  }

  Word to_word(const NormalForm& nf) const {
    Word w;
    long long e = nf.lead;
    for (long long i = 0; i < (e < 0 ? -e : e); ++i) w.push_back(e > 0 ? t_id_ : -t_id_);
    for (const auto& s : nf.syl) w.insert(w.end(), s.rep.begin(), s.rep.end());
    return w;
  }

  NormalForm mul(const NormalForm& x, const NormalForm& y) const {
    NormalForm nf = x;
    absorb_core(nf, y.lead);
    for (const auto& s : y.syl) push_syllable(nf, s.page, s.rep);
    return nf;
  }

  NormalForm inv(const NormalForm& x) const { return reduce(free_inv(to_word(x))); }

  NormalForm conj(const NormalForm& h, const NormalForm& x) const {
    return mul(mul(h, x), inv(h));
  }

  NormalForm nf_of_letter(Lid x) const { return reduce(Word{x}); }
  NormalForm core_power(long long e) const {
    NormalForm nf;
    nf.lead = e;
    return nf;
  }

  // Total letter count of the cyclically reduced conjugacy representative,
  // minimized over syllable rotation and conjugation by core powers.
  // Monotone growth of this quantity is the length certificate for
  // divergence.
  long long conjugacy_length(const NormalForm& x) const {
    NormalForm c = cyclic_form(x);
    if (c.syl.empty()) return llabs(c.lead);
    if (c.syl.size() == 1) {
      FreeWord u = free_mul(boundary_pow(c.syl[0].page, c.lead), c.syl[0].rep);
      return (long long)free_cyclic_reduce(u).core.size();
    }
    long long best = -1;
    NormalForm rot = c;
    for (size_t r = 0; r < c.syl.size(); ++r) {
      long long K = 2 + llabs(rot.lead);
      for (const auto& s : rot.syl) K += (long long)s.rep.size() / (2 * genus(s.page)) + 1;
      for (long long k = -K; k <= K; ++k) {
        NormalForm y = conj(core_power(k), rot);
        long long len = llabs(y.lead);
        for (const auto& s : y.syl) len += (long long)s.rep.size();
        if (best < 0 || len < best) best = len;
      }
      NormalForm g;
      g.syl.push_back(rot.syl.front());
      rot = conj(inv(g), rot);
    }
    return best;
  }

  // Conjugate x into a cyclically reduced representative: lead absorbed, and
  // for syllable length >= 2 the first and last syllables in distinct pages.
  // If conjugator is given, *conjugator h satisfies h x h^-1 = result.
  NormalForm cyclic_form(const NormalForm& x, NormalForm* conjugator = nullptr) const {
    NormalForm cur = x;
    NormalForm h;  // identity
    auto conj_by = [&](const NormalForm& g) {
      cur = conj(g, cur);
      h = mul(g, h);
    };
    // push the lead into the tail
    if (cur.lead != 0 && !cur.syl.empty()) conj_by(core_power(-cur.lead));
    bool progress = true;
    while (progress && cur.syl.size() >= 2) {
      progress = false;
      if (cur.syl.front().page == cur.syl.back().page) {
        NormalForm g;
        g.syl.push_back(cur.syl.front());
        conj_by(inv(g));
        if (cur.lead != 0 && !cur.syl.empty()) conj_by(core_power(-cur.lead));
        progress = true;
      }
    }
    if (conjugator) *conjugator = h;
    return cur;
  }

  std::vector<int> page_sequence(const NormalForm& x) const {
    std::vector<int> out;
    for (const auto& s : x.syl) out.push_back(s.page);
    return out;
  }

 private:
  std::vector<int> genus_;
  std::vector<Lid> first_id_;
  Lid t_id_ = 0;
  std::vector<FreeWord> boundary_;
};

// --- word serialization ------------------------------------------------------

// Tokens: a1 b1 A1 B1 ... t T; capital = inverse.  Slot k>1 written a1.2 etc.
inline std::string word_to_string(const BookGroup& G, const Word& w) {
  std::string out;
  for (Lid x : w) {
    if (G.is_t(x)) {
      out += (x > 0 ? 't' : 'T');
      continue;
    }
    char c = G.is_b(x) ? 'b' : 'a';
    if (x < 0) c = char(std::toupper(c));
    out += c;
    out += std::to_string(G.page_of(x));
    int slot = G.slot_of(x);
    if (slot > 1) {
      out += '.';
      out += std::to_string(slot);
    }
  }
  return out;
}

inline Word word_from_string(const BookGroup& G, const std::string& s) {
  Word w;
  size_t i = 0;
  auto fail = [&](const std::string& msg) {
    throw std::invalid_argument("bad word '" + s + "': " + msg + " at position " +
                                std::to_string(i));
  };
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace((unsigned char)c) || c == '*' || c == '.') {
      // '.' only appears inside a token; stray separators are skipped
      ++i;
      continue;
    }
    if (c == 't' || c == 'T') {
      w.push_back(c == 't' ? G.t() : -G.t());
      ++i;
      continue;
    }
    char lc = char(std::tolower((unsigned char)c));
    if (lc != 'a' && lc != 'b') fail("unknown letter");
    bool invert = std::isupper((unsigned char)c);
    ++i;
    size_t start = i;
    while (i < s.size() && std::isdigit((unsigned char)s[i])) ++i;
    if (i == start) fail("missing page number");
    int page = std::stoi(s.substr(start, i - start));
    int slot = 1;
    if (i < s.size() && s[i] == '.') {
      ++i;
      size_t s2 = i;
      while (i < s.size() && std::isdigit((unsigned char)s[i])) ++i;
      if (i == s2) fail("missing slot number");
      slot = std::stoi(s.substr(s2, i - s2));
    }
    if (page < 1 || page > G.pages()) fail("page out of range");
    if (slot < 1 || slot > G.genus(page)) fail("slot out of range");
    Lid g = lc == 'a' ? G.gen_a(page, slot) : G.gen_b(page, slot);
    w.push_back(invert ? -g : g);
  }
  return w;
}

// --- subgroups ---------------------------------------------------------------

struct SubgroupSpec {
  enum class Kind { page, surface, custom } kind = Kind::page;
  int i = 0, j = 0;            // page / surface indices
  std::vector<Lid> generators; // custom
  std::string name;

  static SubgroupSpec page(int j) {
    SubgroupSpec s;
    s.kind = Kind::page;
    s.i = j;
    s.name = "page(" + std::to_string(j) + ")";
    return s;
  }
  static SubgroupSpec surface(int i, int j) {
    SubgroupSpec s;
    s.kind = Kind::surface;
    s.i = i;
    s.j = j;
    s.name = "surface(" + std::to_string(i) + "," + std::to_string(j) + ")";
    return s;
  }
  static SubgroupSpec custom(std::vector<Lid> gens, std::string name) {
    SubgroupSpec s;
    s.kind = Kind::custom;
    s.generators = std::move(gens);
    s.name = std::move(name);
    return s;
  }

  std::vector<Lid> generator_ids(const BookGroup& G) const {
    std::vector<Lid> out;
    auto add_page = [&](int p) {
      for (int k = 1; k <= G.genus(p); ++k) {
        out.push_back(G.gen_a(p, k));
        out.push_back(G.gen_b(p, k));
      }
    };
    switch (kind) {
      case Kind::page:
        add_page(i);
        break;
      case Kind::surface:
        add_page(i);
        add_page(j);
        break;
      case Kind::custom:
        out = generators;
        break;
    }
    return out;
  }

  std::vector<int> pages_involved() const {
    switch (kind) {
      case Kind::page:
        return {i};
      case Kind::surface:
        return {i, j};
      default:
        return {};
    }
  }
};

// --- automorphisms -----------------------------------------------------------

struct TwistStep {
  int page = 0;
  int dir = 1;
};
struct RelabelStep {
  std::vector<int> perm;  // perm[j-1] = image page of j
};
struct AutStep {
  enum class Kind { twist, relabel } kind = Kind::twist;
  TwistStep twist;
  RelabelStep relabel;
};

class BookAutomorphism {
 public:
  BookAutomorphism() = default;

  static BookAutomorphism identity(const BookGroup& G) {
    BookAutomorphism f;
    f.init_identity(G);
    f.label_ = "id";
    return f;
  }

  // g -> t^dir g t^-dir on page j, fixing all other generators.
  static BookAutomorphism twist(const BookGroup& G, int page, int dir) {
    if (page < 1 || page > G.pages()) throw std::invalid_argument("twist: bad page");
    if (dir != 1 && dir != -1) throw std::invalid_argument("twist: dir must be +-1");
    BookAutomorphism f;
    f.init_identity(G);
    for (int k = 1; k <= G.genus(page); ++k) {
      for (Lid g : {G.gen_a(page, k), G.gen_b(page, k)}) {
        Word w;
        w.push_back(dir > 0 ? G.t() : -G.t());
        w.push_back(g);
        w.push_back(dir > 0 ? -G.t() : G.t());
        f.images_[size_t(g)] = w;
      }
    }
    f.label_ = "twist(" + std::to_string(page) + "," + (dir > 0 ? std::string("+1") : std::string("-1")) + ")";
    AutStep st;
    st.kind = AutStep::Kind::twist;
    st.twist = {page, dir};
    f.script_ = {st};
    f.check_relators(G);
    return f;
  }

  // a_{j,k} -> a_{perm(j),k}; pages must have matching genera.
  static BookAutomorphism relabel(const BookGroup& G, const std::vector<int>& perm) {
    if (int(perm.size()) != G.pages()) throw std::invalid_argument("relabel: bad size");
    std::vector<bool> seen(perm.size(), false);
    for (int v : perm) {
      if (v < 1 || v > G.pages() || seen[v - 1]) throw std::invalid_argument("relabel: not a permutation");
      seen[v - 1] = true;
    }
    for (int j = 1; j <= G.pages(); ++j)
      if (G.genus(j) != G.genus(perm[j - 1]))
        throw std::invalid_argument("relabel: genus mismatch between page " + std::to_string(j) +
                                    " and its image");
    BookAutomorphism f;
    f.init_identity(G);
    for (int j = 1; j <= G.pages(); ++j) {
      for (int k = 1; k <= G.genus(j); ++k) {
        f.images_[size_t(G.gen_a(j, k))] = {G.gen_a(perm[j - 1], k)};
        f.images_[size_t(G.gen_b(j, k))] = {G.gen_b(perm[j - 1], k)};
      }
    }
    f.label_ = "relabel";
    AutStep st;
    st.kind = AutStep::Kind::relabel;
    st.relabel = {perm};
    f.script_ = {st};
    f.check_relators(G);
    return f;
  }

  const std::string& label() const { return label_; }
  const std::vector<AutStep>& script() const { return script_; }

  Word image_of_letter(const BookGroup& G, Lid x) const {
    if (G.is_t(x)) {
      // t = d_1; its image is the image of that word
      Word d1 = apply_word(G, G.boundary(1));
      return x > 0 ? d1 : free_inv(d1);
    }
    Lid g = x > 0 ? x : -x;
    const Word& im = images_.at(size_t(g));
    return x > 0 ? im : free_inv(im);
  }

  Word apply_word(const BookGroup& G, const Word& w) const {
    Word out;
    for (Lid x : w) {
      Word im = image_of_letter(G, x);
      out.insert(out.end(), im.begin(), im.end());
    }
    return out;
  }

  NormalForm apply(const BookGroup& G, const Word& w) const { return G.reduce(apply_word(G, w)); }

  // this o g  (apply g first)
  BookAutomorphism compose_with(const BookGroup& G, const BookAutomorphism& g) const {
    BookAutomorphism out;
    out.init_identity(G);
    for (Lid x = 1; x <= Lid(G.num_page_gens()); ++x)
      out.images_[size_t(x)] = G.to_word(G.reduce(apply_word(G, g.images_[size_t(x)])));
    out.label_ = label_ + "*" + g.label_;
    out.script_ = g.script_;
    out.script_.insert(out.script_.end(), script_.begin(), script_.end());
    out.check_relators(G);
    return out;
  }

  // Structural inverse from the composition script; verified on generators.
  BookAutomorphism inverse(const BookGroup& G) const {
    if (script_.empty() && !is_identity_images(G))
      throw std::runtime_error("inverse not found: automorphism has no composition script");
    BookAutomorphism out = identity(G);
    for (auto it = script_.rbegin(); it != script_.rend(); ++it) {
      BookAutomorphism step;
      if (it->kind == AutStep::Kind::twist)
        step = twist(G, it->twist.page, -it->twist.dir);
      else {
        std::vector<int> ip(it->relabel.perm.size());
        for (size_t j = 0; j < ip.size(); ++j) ip[it->relabel.perm[j] - 1] = int(j) + 1;
        step = relabel(G, ip);
      }
      out = out.compose_with(G, step);
    }
    BookAutomorphism chk = compose_with(G, out);
    for (Lid x = 1; x <= Lid(G.num_page_gens()); ++x)
      if (G.reduce(chk.images_[size_t(x)]) != G.nf_of_letter(x))
        throw std::runtime_error("inverse not found: script inversion failed verification");
    out.label_ = label_ + "^-1";
    return out;
  }

  // Relator soundness: each defining relator d_j d_{j+1}^-1 must map to the
  // identity.
  void check_relators(const BookGroup& G) const {
    for (int j = 1; j < G.pages(); ++j) {
      Word r = free_mul(G.boundary(j), free_inv(G.boundary(j + 1)));
      if (!apply(G, r).is_identity())
        throw std::invalid_argument("automorphism images do not preserve the relations");
    }
  }

  bool is_identity_images(const BookGroup& G) const {
    for (Lid x = 1; x <= Lid(G.num_page_gens()); ++x)
      if (G.reduce(images_[size_t(x)]) != G.nf_of_letter(x)) return false;
    return true;
  }

 private:
  void init_identity(const BookGroup& G) {
    images_.assign(size_t(G.num_page_gens()) + 1, Word{});
    for (Lid x = 1; x <= Lid(G.num_page_gens()); ++x) images_[size_t(x)] = {x};
  }

  std::vector<Word> images_;  // indexed by generator id
  std::string label_;
  std::vector<AutStep> script_;
};

inline BookAutomorphism compose(const BookGroup& G, const BookAutomorphism& f,
                                const BookAutomorphism& g) {
  return f.compose_with(G, g);
}

inline NormalForm apply_power(const BookGroup& G, const BookAutomorphism& f, long long k,
                              const Word& w) {
  const BookAutomorphism* use = &f;
  BookAutomorphism invf;
  if (k < 0) {
    invf = f.inverse(G);
    use = &invf;
    k = -k;
  }
  Word cur = w;
  for (long long i = 0; i < k; ++i) cur = G.to_word(use->apply(G, cur));
  return G.reduce(cur);
}

// --- conjugacy ---------------------------------------------------------------

struct SearchBudget {
  long long core_exponent = 64;
  int word_length = 24;
};

struct ConjugacyResult {
  enum class Status { conjugate, not_conjugate, undetermined } status;
  NormalForm conjugator;  // h with h u h^-1 = v, when conjugate
  SearchBudget budget;
};

namespace detail {

// Free-group conjugacy with witness: h w1 h^-1 = w2.
inline std::optional<FreeWord> free_conjugator(const FreeWord& w1, const FreeWord& w2) {
  CyclicForm c1 = free_cyclic_reduce(w1), c2 = free_cyclic_reduce(w2);
  size_t rot = 0;
  if (!cyclic_words_equal_rotation(c1.core, c2.core, &rot)) return std::nullopt;
  // core2[i] = core1[(i+rot) % n]  =>  core2 = x^-1 core1 x with x = first rot letters
  FreeWord x(c1.core.begin(), c1.core.begin() + long(rot));
  // w2 = p2 c2 p2^-1 = p2 x^-1 c1 x p2^-1 = (p2 x^-1 p1^-1) w1 (...)^-1
  FreeWord h = free_reduce(free_mul(free_mul(c2.prefix, free_inv(x)), free_inv(c1.prefix)));
  return h;
}

}  // namespace detail

// Classification of a cyclically reduced element for conjugacy purposes.
struct ConjClass {
  enum class Kind { core_power, single_page, alternating } kind;
  long long core_exp = 0;          // core_power
  int page = 0;                    // single_page
  FreeWord page_elt;               // single_page: the element of F_page (d^lead * rep)
  NormalForm reduced;              // alternating: cyclically reduced form (lead 0 tracked inside)
  NormalForm to_reduced;           // h with h x h^-1 = reduced-form element
};

inline ConjClass conjugacy_class_shape(const BookGroup& G, const NormalForm& x) {
  ConjClass out;
  NormalForm h;
  NormalForm c = G.cyclic_form(x, &h);
  out.to_reduced = h;
  if (c.syl.empty()) {
    out.kind = ConjClass::Kind::core_power;
    out.core_exp = c.lead;
    out.reduced = c;
    return out;
  }
  if (c.syl.size() == 1) {
    int page = c.syl[0].page;
    FreeWord u = free_mul(G.boundary_pow(page, c.lead), c.syl[0].rep);
    // conjugate within the page into <d>, if possible
    long long g = G.genus(page);
    CyclicForm cf = free_cyclic_reduce(u);
    if (cf.core.size() % (4 * size_t(g)) == 0 && !cf.core.empty()) {
      long long k = (long long)cf.core.size() / (4 * g);
      for (long long sgn : {1LL, -1LL}) {
        if (auto fc = detail::free_conjugator(u, G.boundary_pow(page, sgn * k))) {
          out.kind = ConjClass::Kind::core_power;
          out.core_exp = sgn * k;
          NormalForm hh = G.reduce(*fc);
          out.to_reduced = G.mul(hh, h);
          out.reduced = G.core_power(sgn * k);
          return out;
        }
      }
    }
    out.kind = ConjClass::Kind::single_page;
    out.page = page;
    out.page_elt = u;
    out.reduced = c;
    return out;
  }
  out.kind = ConjClass::Kind::alternating;
  out.reduced = c;
  return out;
}

// Decide conjugacy where exact answers are available; otherwise search core
// conjugators up to the budget.  Every returned witness verifies
// h u h^-1 = v under reduce.
inline ConjugacyResult are_conjugate(const BookGroup& G, const NormalForm& u, const NormalForm& v,
                                     SearchBudget budget = {}) {
  ConjugacyResult res;
  res.budget = budget;
  auto found = [&](NormalForm h) {
    assert(G.conj(h, u) == v);
    res.status = ConjugacyResult::Status::conjugate;
    res.conjugator = std::move(h);
    return res;
  };
  auto no = [&]() {
    res.status = ConjugacyResult::Status::not_conjugate;
    return res;
  };

  if (u == v) return found(NormalForm{});

  ConjClass cu = conjugacy_class_shape(G, u);
  ConjClass cv = conjugacy_class_shape(G, v);
  if (cu.kind != cv.kind) return no();

  switch (cu.kind) {
    case ConjClass::Kind::core_power: {
      if (cu.core_exp != cv.core_exp) return no();
      // h_v^-1 h_u conjugates u to v
      return found(G.mul(G.inv(cv.to_reduced), cu.to_reduced));
    }
    case ConjClass::Kind::single_page: {
      if (cu.page != cv.page) return no();
      auto fc = detail::free_conjugator(cu.page_elt, cv.page_elt);
      if (!fc) return no();
      NormalForm w = G.reduce(*fc);
      return found(G.mul(G.inv(cv.to_reduced), G.mul(w, cu.to_reduced)));
    }
    case ConjClass::Kind::alternating: {
      if (cu.reduced.syl.size() != cv.reduced.syl.size()) return no();
      std::vector<int> pu = G.page_sequence(cu.reduced), pv = G.page_sequence(cv.reduced);
      bool seq_match = false;
      size_t m = pu.size();
      for (size_t r = 0; r < m && !seq_match; ++r) {
        bool ok = true;
        for (size_t i = 0; i < m; ++i)
          if (pu[(i + r) % m] != pv[i]) {
            ok = false;
            break;
          }
        seq_match = seq_match || ok;
      }
      if (!seq_match) return no();
      // try rotations x conjugation by core powers
      NormalForm rot = cu.reduced;
      NormalForm hrot;  // tracks rot = hrot * cu.reduced * hrot^-1
      for (size_t r = 0; r < m; ++r) {
        for (long long k = -budget.core_exponent; k <= budget.core_exponent; ++k) {
          NormalForm cand = G.conj(G.core_power(k), rot);
          if (cand == cv.reduced) {
            NormalForm h = G.mul(G.inv(cv.to_reduced),
                                 G.mul(G.core_power(k), G.mul(hrot, cu.to_reduced)));
            return found(h);
          }
        }
        // rotate: conjugate by the inverse of the first syllable block
        NormalForm g;
        g.syl.push_back(rot.syl.front());
        NormalForm gi = G.inv(g);
        rot = G.conj(gi, rot);
        hrot = G.mul(gi, hrot);
        if (rot.lead != 0) {
          NormalForm cp = G.core_power(-rot.lead);
          rot = G.conj(cp, rot);
          hrot = G.mul(cp, hrot);
        }
      }
      res.status = ConjugacyResult::Status::undetermined;
      return res;
    }
  }
  res.status = ConjugacyResult::Status::undetermined;
  return res;
}

// --- inner conjugators --------------------------------------------------------

struct InnerResult {
  bool found = false;
  NormalForm witness;  // h with f(g) = h g h^-1 for all generators g of H
  SearchBudget budget;
  std::string note;  // search family description when not found
};

// Search h with f(g) = h g h^-1 for every generator of H.  Tries core powers
// t^k first, then the full solution family of the first generator's equation
// (particular solution times its centralizer <g0>), which covers all bounded
// conjugators.
inline InnerResult inner_conjugator_on(const BookGroup& G, const BookAutomorphism& f,
                                       const SubgroupSpec& H, SearchBudget budget = {}) {
  InnerResult out;
  out.budget = budget;
  std::vector<Lid> gens = H.generator_ids(G);
  if (gens.empty()) {
    out.found = true;
    return out;
  }
  std::vector<NormalForm> images;
  images.reserve(gens.size());
  for (Lid g : gens) images.push_back(G.reduce(f.image_of_letter(G, g)));

  auto verify = [&](const NormalForm& h) {
    for (size_t i = 0; i < gens.size(); ++i)
      if (G.conj(h, G.nf_of_letter(gens[i])) != images[i]) return false;
    return true;
  };

  for (long long k = 0; k <= budget.core_exponent; ++k) {
    for (long long s : {k, -k}) {
      NormalForm h = G.core_power(s);
      if (verify(h)) {
        out.found = true;
        out.witness = h;
        return out;
      }
      if (k == 0) break;
    }
  }

  // Particular solution for the first generator, then scan its centralizer
  // coset h0 <g0>.
  NormalForm g0 = G.nf_of_letter(gens[0]);
  ConjugacyResult c = are_conjugate(G, g0, images[0], budget);
  if (c.status == ConjugacyResult::Status::conjugate) {
    for (long long m = 0; m <= budget.core_exponent; ++m) {
      for (long long s : {m, -m}) {
        NormalForm h = G.mul(c.conjugator, G.reduce(free_pow(FreeWord{gens[0]}, s)));
        if (verify(h)) {
          out.found = true;
          out.witness = h;
          return out;
        }
        if (m == 0) break;
      }
    }
  }
  out.found = false;
  out.note = "searched core powers |k|<=" + std::to_string(budget.core_exponent) +
             " and the full conjugator family of the first generator equation";
  return out;
}

}  // namespace ibundle
