#pragma once

// Relation-exact numeric representations of book groups by 2x2 unit
// determinant complex matrices.  Every page tuple is the base tuple
// conjugated inside the centralizer of the common commutator T, so all page
// boundary words evaluate to exactly the same matrix.  Discreteness is not
// certified; traces and translation lengths serve as numeric certificates.

#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "amalgam.hpp"

namespace ibundle {

using Cplx = std::complex<double>;

struct Moebius {
  Cplx a{1}, b{0}, c{0}, d{1};

  Cplx det() const { return a * d - b * c; }
  Cplx trace() const { return a + d; }

  Moebius operator*(const Moebius& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  Moebius inverse() const { return {d, -b, -c, a}; }  // valid for det 1

  void normalize() {
    Cplx s = std::sqrt(det());
    if (std::abs(s) < 1e-300) throw std::runtime_error("singular matrix");
    a /= s;
    b /= s;
    c /= s;
    d /= s;
  }

  double max_abs() const {
    return std::max(std::max(std::abs(a), std::abs(b)), std::max(std::abs(c), std::abs(d)));
  }
  double dist(const Moebius& o) const {
    return std::max(std::max(std::abs(a - o.a), std::abs(b - o.b)),
                    std::max(std::abs(c - o.c), std::abs(d - o.d)));
  }
};

inline Moebius moebius_pow(Moebius m, long long k) {
  if (k < 0) {
    m = m.inverse();
    k = -k;
  }
  Moebius r;
  for (long long i = 0; i < k; ++i) r = r * m;
  return r;
}

inline double trlength_from_abs_trace(double abs_tr) {
  double x = abs_tr / 2.0;
  if (x <= 1.0) return 0.0;
  return 2.0 * std::acosh(x);
}

// Translation length from the trace: twice the log of the expanding
// eigenvalue modulus.  Coincides with 2*acosh(|tr|/2) on real traces and is
// exactly homogeneous under powers, which the |tr| form is not once the
// trace turns complex.
inline double trlength_of_trace(Cplx tr) {
  Cplx h = tr / 2.0;
  Cplx s = std::sqrt(h * h - 1.0);
  double lam = std::max(std::abs(h + s), std::abs(h - s));
  if (lam <= 1.0 + 1e-12) return 0.0;
  return 2.0 * std::log(lam);
}

// Product with magnitude scaling so long words cannot overflow.  The true
// matrix is e^{log_scale} * m.
struct ScaledMoebius {
  Moebius m;
  double log_scale = 0.0;

  void absorb(const Moebius& next) {
    m = m * next;
    double mag = m.max_abs();
    if (mag > 1e100 || (mag < 1e-100 && mag > 0)) {
      m.a /= mag;
      m.b /= mag;
      m.c /= mag;
      m.d /= mag;
      log_scale += std::log(mag);
    }
  }
  double log_abs_trace() const { return log_scale + std::log(std::abs(m.trace())); }
};

struct EvalResult {
  Moebius matrix;       // meaningful when not overflowed
  Cplx trace{2, 0};
  double trlength = 0;
  bool loxodromic = false;
  bool overflowed = false;  // trace not representable in double; logs used
};

struct Representation {
  int n_pages = 0;
  std::vector<int> genus;
  std::vector<std::vector<std::pair<Moebius, Moebius>>> slots;  // [page-1][slot-1] = (A,B)
  Moebius T;
  double trT_abs = 0;
  double trlength_T = 0;
  std::uint64_t seed = 0;
  std::vector<long long> s_exponents;
  double commutator_residual = 0;
  // generator system used for the rescaling factor mu_i: page generators, the
  // core, and the cross-page products along the attachment order
  std::vector<std::pair<std::string, Word>> mu_words;
};

namespace repvar_detail {

inline Moebius letter_matrix(const Representation& rep, const BookGroup& G, Lid x) {
  if (G.is_t(x)) return x > 0 ? rep.T : rep.T.inverse();
  int page = G.page_of(x), slot = G.slot_of(x);
  const auto& pr = rep.slots[size_t(page - 1)][size_t(slot - 1)];
  Moebius m = G.is_b(x) ? pr.second : pr.first;
  return x > 0 ? m : m.inverse();
}

}  // namespace repvar_detail

inline EvalResult evaluate(const Representation& rep, const BookGroup& G, const Word& w) {
  ScaledMoebius acc;
  for (Lid x : w) acc.absorb(repvar_detail::letter_matrix(rep, G, x));
  EvalResult out;
  double lat = acc.log_scale + std::log(std::max(std::abs(acc.m.trace()), 1e-300));
  if (acc.log_scale == 0.0) {
    out.matrix = acc.m;
    out.trace = acc.m.trace();
  } else if (lat < 700.0) {
    out.trace = acc.m.trace() * std::exp(acc.log_scale);
    out.matrix = acc.m;  // scaled form
    out.overflowed = true;
  } else {
    out.trace = Cplx(std::numeric_limits<double>::infinity(), 0);
    out.overflowed = true;
  }
  if (lat > 40.0) {
    // the expanding eigenvalue is the trace up to a vanishing correction
    out.trlength = 2.0 * lat;
    out.loxodromic = true;
  } else {
    out.trlength = trlength_of_trace(acc.m.trace() * std::exp(acc.log_scale));
    out.loxodromic = out.trlength > 0;
  }
  return out;
}

inline EvalResult evaluate(const Representation& rep, const BookGroup& G, const NormalForm& nf) {
  return evaluate(rep, G, G.to_word(nf));
}

inline Representation build_rep(const BookGroup& G, std::uint64_t seed,
                                std::vector<long long> s_exponents = {}) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  auto rand_moebius = [&]() {
    Moebius m{Cplx(1 + u(rng), u(rng)), Cplx(u(rng), u(rng)), Cplx(u(rng), u(rng)),
              Cplx(1 + u(rng), u(rng))};
    if (std::abs(m.det()) < 1e-3) m.a += 1.0;
    m.normalize();
    return m;
  };

  Representation rep;
  rep.n_pages = G.pages();
  rep.seed = seed;
  for (int j = 1; j <= G.pages(); ++j) rep.genus.push_back(G.genus(j));
  if (s_exponents.empty())
    for (int j = 1; j <= G.pages(); ++j) s_exponents.push_back(j);
  if (int(s_exponents.size()) != G.pages())
    throw std::invalid_argument("build_rep: one centralizer exponent per page");
  rep.s_exponents = s_exponents;

  // The trace window keeps the commutator loxodromic, and the entry bounds
  // keep long twisted words within the certificate tolerances.  Degenerate
  // draws reseed automatically.
  bool ok = false;
  for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
    Moebius A = rand_moebius();
    Moebius B = rand_moebius();
    if (A.max_abs() > 3.0 || B.max_abs() > 3.0) continue;
    Moebius T = A * B * A.inverse() * B.inverse();
    T.normalize();
    double at = std::abs(T.trace());
    if (at <= 2.2 || at >= 2.5 || T.max_abs() > 12.0) continue;

    std::vector<std::vector<std::pair<Moebius, Moebius>>> slots;
    for (int j = 1; j <= G.pages(); ++j) {
      Moebius C = moebius_pow(T, rep.s_exponents[size_t(j - 1)]);
      Moebius Ci = C.inverse();
      std::vector<std::pair<Moebius, Moebius>> tuple;
      tuple.push_back({C * A * Ci, C * B * Ci});
      for (int k = 2; k <= G.genus(j); ++k) {
        // commuting same-axis pair: contributes a trivial commutator exactly
        Moebius Q = rand_moebius();
        double l1 = 1.3 + 0.3 * std::abs(u(rng)), l2 = 1.3 + 0.3 * std::abs(u(rng));
        Moebius D1{Cplx(l1, 0), 0, 0, Cplx(1 / l1, 0)};
        Moebius D2{Cplx(l2, 0), 0, 0, Cplx(1 / l2, 0)};
        tuple.push_back({C * (Q * D1 * Q.inverse()) * Ci, C * (Q * D2 * Q.inverse()) * Ci});
      }
      slots.push_back(std::move(tuple));
    }

    // relation residual: each page boundary word must evaluate to T
    double resid = 0;
    for (int j = 1; j <= G.pages(); ++j) {
      Moebius prod;
      for (const auto& [X, Y] : slots[size_t(j - 1)])
        prod = prod * (X * Y * X.inverse() * Y.inverse());
      resid = std::max(resid, prod.dist(T));
    }
    if (resid > 1e-9) continue;

    rep.T = T;
    rep.trT_abs = at;
    rep.trlength_T = trlength_of_trace(T.trace());
    rep.slots = std::move(slots);
    rep.commutator_residual = resid;
    ok = true;
  }
  if (!ok)
    throw std::runtime_error(
        "degenerate seed: no well-conditioned loxodromic commutator in 100 attempts");

  for (int j = 1; j <= G.pages(); ++j)
    for (int k = 1; k <= G.genus(j); ++k) {
      rep.mu_words.push_back({word_to_string(G, {G.gen_a(j, k)}), {G.gen_a(j, k)}});
      rep.mu_words.push_back({word_to_string(G, {G.gen_b(j, k)}), {G.gen_b(j, k)}});
    }
  rep.mu_words.push_back({"t", {G.t()}});
  for (int j = 1; j <= G.pages(); ++j) {
    int nx = j % G.pages() + 1;
    Word w{G.gen_a(j, 1), G.gen_a(nx, 1)};
    rep.mu_words.push_back({word_to_string(G, w), w});
  }
  return rep;
}

// Maximum absolute trace deviation |tr(rho(f(w))) - tr(rho(w))| over the
// given words.  Inner automorphisms keep this at numerical zero.
inline double character_delta(const Representation& rep, const BookGroup& G,
                              const BookAutomorphism& f, const std::vector<Word>& words) {
  if (words.empty()) throw std::invalid_argument("character_delta: empty word list");
  double worst = 0;
  for (const Word& w : words) {
    // evaluate both sides from normal forms so an identity automorphism
    // deviates by exactly zero
    Cplx t0 = evaluate(rep, G, G.reduce(w)).trace;
    Cplx t1 = evaluate(rep, G, f.apply(G, w)).trace;
    worst = std::max(worst, std::abs(t1 - t0));
  }
  return worst;
}

struct GrowthRow {
  long long i = 0;
  Cplx trace{2, 0};
  double trlength = 0;
  bool loxodromic = false;
  double mu = 0;
  double normalized = 0;
};

struct GrowthScan {
  std::vector<GrowthRow> rows;
  double slope = 0;       // least-squares slope of trlength vs i over the tail
  double trlength_T = 0;
  long long tail_start = 8;
};

inline GrowthScan growth_scan(const Representation& rep, const BookGroup& G,
                              const BookAutomorphism& f, const Word& w, long long i_max,
                              long long tail_start = 8) {
  if (i_max < 8) throw std::invalid_argument("growth_scan: i_max must be >= 8");
  GrowthScan out;
  out.trlength_T = rep.trlength_T;
  out.tail_start = tail_start;

  Word cur = w;
  std::vector<Word> mu_cur;
  for (const auto& [name, mw] : rep.mu_words) mu_cur.push_back(mw);

  for (long long i = 0; i <= i_max; ++i) {
    EvalResult ev = evaluate(rep, G, G.reduce(cur));
    double mu = 0;
    for (const auto& mw : mu_cur) mu = std::max(mu, evaluate(rep, G, G.reduce(mw)).trlength);
    GrowthRow row;
    row.i = i;
    row.trace = ev.trace;
    row.trlength = ev.trlength;
    row.loxodromic = ev.loxodromic;
    row.mu = mu;
    row.normalized = mu > 0 ? ev.trlength / mu : 0;
    out.rows.push_back(row);
    if (i < i_max) {
      cur = G.to_word(f.apply(G, cur));
      for (auto& mw : mu_cur) mw = G.to_word(f.apply(G, mw));
    }
  }

  // least-squares fit over the tail, skipping flagged rows
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (const auto& r : out.rows) {
    if (r.i < tail_start || !r.loxodromic) continue;
    sx += double(r.i);
    sy += r.trlength;
    sxx += double(r.i) * double(r.i);
    sxy += double(r.i) * r.trlength;
    ++m;
  }
  if (m >= 2) out.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return out;
}

}  // namespace ibundle
