#include <catch2/catch_amalgamated.hpp>

#include "ibundle/amalgam.hpp"
#include "oracles.hpp"

using namespace ibundle;

namespace {
BookGroup book4() { return BookGroup({1, 1, 1, 1}); }

NormalForm nf(const BookGroup& G, const std::string& s) {
  return G.reduce(word_from_string(G, s));
}
}  // namespace

TEST_CASE("reduce: free cancellation") {
  BookGroup G = book4();
  CHECK(nf(G, "a1A1").is_identity());
  CHECK(nf(G, "a1b1B1A1").is_identity());
}

TEST_CASE("reduce: a page boundary word is the core") {
  BookGroup G = book4();
  NormalForm d2 = G.reduce(G.boundary(2));
  CHECK(d2.lead == 1);
  CHECK(d2.syl.empty());
  NormalForm d3inv = G.reduce(free_inv(G.boundary(3)));
  CHECK(d3inv.lead == -1);
  CHECK(d3inv.syl.empty());
}

TEST_CASE("reduce: conjugate pair cancels (free-rewriting oracle)") {
  BookGroup G = book4();
  // (t a1 t^-1) (t a1^-1 t^-1)
  Word w = word_from_string(G, "ta1TtA1T");
  REQUIRE(oracles::freely_trivial(w));  // oracle: freely trivial with t treated as free
  CHECK(G.reduce(w).is_identity());
}

TEST_CASE("reduce is idempotent and multiplicative") {
  BookGroup G = book4();
  oracles::WordGen gen(G, 12345);
  for (int trial = 0; trial < 500; ++trial) {
    Word u = gen.random_word(int(gen.rng() % 12));
    Word v = gen.random_word(int(gen.rng() % 12));
    NormalForm nu = G.reduce(u), nv = G.reduce(v);
    CHECK(G.reduce(G.to_word(nu)) == nu);
    // reduce(uv) depends only on the normal forms
    CHECK(G.reduce(free_mul(u, v)) == G.mul(nu, nv));
  }
}

TEST_CASE("normal form uniqueness on padded pairs") {
  BookGroup G = book4();
  oracles::WordGen gen(G, 999);
  oracles::ExactRep rep(G);
  int checked_matrices = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    Word w = gen.random_word(int(gen.rng() % 10));
    Word u = gen.padded(w, int(gen.rng() % 4));
    Word v = gen.padded(w, int(gen.rng() % 4));
    NormalForm nu = G.reduce(u), nv = G.reduce(v);
    REQUIRE(nu == nv);
    REQUIRE(G.mul(nu, G.inv(nv)).is_identity());
    if (trial % 100 == 0) {
      REQUIRE(rep.eval(u) == rep.eval(v));
      ++checked_matrices;
    }
  }
  CHECK(checked_matrices == 100);
}

TEST_CASE("distinct elements get distinct normal forms (matrix oracle)") {
  BookGroup G = book4();
  oracles::WordGen gen(G, 4242);
  oracles::ExactRep rep(G);
  for (int trial = 0; trial < 300; ++trial) {
    Word u = gen.random_word(1 + int(gen.rng() % 8));
    Word v = gen.random_word(1 + int(gen.rng() % 8));
    if (rep.eval(u) != rep.eval(v)) CHECK(G.reduce(u) != G.reduce(v));
  }
}

TEST_CASE("higher genus pages reduce correctly") {
  BookGroup G({2, 3, 2});
  NormalForm d2 = G.reduce(G.boundary(2));
  CHECK(d2.lead == 1);
  CHECK(d2.syl.empty());
  CHECK(G.reduce(word_from_string(G, "a1.2A1.2")).is_identity());
  oracles::WordGen gen(G, 77);
  oracles::ExactRep rep(G);
  for (int trial = 0; trial < 2000; ++trial) {
    Word w = gen.random_word(int(gen.rng() % 8));
    Word u = gen.padded(w, int(gen.rng() % 3));
    REQUIRE(G.reduce(u) == G.reduce(w));
    if (trial % 100 == 0) REQUIRE(rep.eval(u) == rep.eval(w));
  }
}

TEST_CASE("word serialization round trips") {
  BookGroup G({2, 1, 1, 1});
  oracles::WordGen gen(G, 31);
  for (int trial = 0; trial < 200; ++trial) {
    Word w = gen.random_word(int(gen.rng() % 10));
    CHECK(word_from_string(G, word_to_string(G, w)) == w);
  }
  CHECK_THROWS_AS(word_from_string(G, "a9"), std::invalid_argument);
  CHECK_THROWS_AS(word_from_string(G, "c1"), std::invalid_argument);
  CHECK_THROWS_AS(word_from_string(G, "a2.2"), std::invalid_argument);
}

TEST_CASE("twist automorphism images") {
  BookGroup G = book4();
  BookAutomorphism tw = BookAutomorphism::twist(G, 1, +1);
  CHECK(tw.apply(G, word_from_string(G, "a1")) == nf(G, "ta1T"));
  CHECK(tw.apply(G, word_from_string(G, "a2")) == nf(G, "a2"));
  // the core is fixed: its image is reduce([t a1 t^-1, t b1 t^-1]) = t
  NormalForm t_img = tw.apply(G, Word{G.t()});
  CHECK(t_img == G.core_power(1));
}

TEST_CASE("automorphism relator soundness and twist commutation") {
  BookGroup G = book4();
  for (int i = 1; i <= 4; ++i)
    for (int j = 1; j <= 4; ++j) {
      if (i == j) continue;
      for (int di : {-1, 1})
        for (int dj : {-1, 1}) {
          auto f = compose(G, BookAutomorphism::twist(G, i, di), BookAutomorphism::twist(G, j, dj));
          auto g = compose(G, BookAutomorphism::twist(G, j, dj), BookAutomorphism::twist(G, i, di));
          for (Lid x = 1; x <= Lid(G.num_page_gens()); ++x)
            CHECK(f.apply(G, Word{x}) == g.apply(G, Word{x}));
        }
    }
}

TEST_CASE("relabel automorphism") {
  BookGroup G = book4();
  auto f = BookAutomorphism::relabel(G, {2, 1, 3, 4});
  CHECK(f.apply(G, word_from_string(G, "a1")) == nf(G, "a2"));
  CHECK(f.apply(G, word_from_string(G, "b2")) == nf(G, "b1"));
  BookGroup H({1, 2, 1});
  CHECK_THROWS_AS(BookAutomorphism::relabel(H, {2, 1, 3}), std::invalid_argument);
}

TEST_CASE("compose and apply_power") {
  BookGroup G = book4();
  auto phi = compose(G, BookAutomorphism::twist(G, 1, +1), BookAutomorphism::twist(G, 3, +1));
  CHECK(apply_power(G, phi, 1, word_from_string(G, "a3")) == nf(G, "ta3T"));
  CHECK(apply_power(G, phi, 5, word_from_string(G, "a2")) == nf(G, "a2"));
  // phi^3(a1 a2) = t^3 a1 t^-3 a2
  NormalForm expect = G.reduce(word_from_string(G, "ttta1TTTa2"));
  CHECK(apply_power(G, phi, 3, word_from_string(G, "a1a2")) == expect);
  // compose(f,g) applies g first
  auto f = BookAutomorphism::twist(G, 1, +1);
  auto g = BookAutomorphism::relabel(G, {2, 1, 3, 4});
  auto fg = compose(G, f, g);
  oracles::WordGen gen(G, 5);
  for (int trial = 0; trial < 50; ++trial) {
    Word w = gen.random_word(int(gen.rng() % 6));
    CHECK(fg.apply(G, w) == f.apply(G, G.to_word(g.apply(G, w))));
  }
  // negative powers use the script inverse
  CHECK(apply_power(G, phi, -2, G.to_word(apply_power(G, phi, 2, word_from_string(G, "a1b3")))) ==
        nf(G, "a1b3"));
}

TEST_CASE("core is phi-invariant across powers") {
  BookGroup G = book4();
  auto phi = compose(G, BookAutomorphism::twist(G, 1, +1), BookAutomorphism::twist(G, 3, +1));
  for (long long k = -32; k <= 32; k += 8)
    CHECK(apply_power(G, phi, k, Word{G.t()}) == G.core_power(1));
}

TEST_CASE("invalid automorphism images are rejected") {
  BookGroup G = book4();
  // twisting only the 'a' generator of page 1 breaks the relations; emulate by
  // composing a valid twist with a relabel of unequal genera is impossible, so
  // check the relator check directly through a bad relabel size
  CHECK_THROWS_AS(BookAutomorphism::relabel(G, {1, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(BookAutomorphism::twist(G, 5, 1), std::invalid_argument);
  CHECK_THROWS_AS(BookAutomorphism::twist(G, 1, 2), std::invalid_argument);
}

TEST_CASE("conjugacy: core conjugate and in-page rotation") {
  BookGroup G = book4();
  auto r1 = are_conjugate(G, nf(G, "a1"), nf(G, "ta1T"));
  REQUIRE(r1.status == ConjugacyResult::Status::conjugate);
  CHECK(G.conj(r1.conjugator, nf(G, "a1")) == nf(G, "ta1T"));
  CHECK(r1.conjugator == G.core_power(1));

  auto r2 = are_conjugate(G, nf(G, "a1b1"), nf(G, "b1a1"));
  REQUIRE(r2.status == ConjugacyResult::Status::conjugate);
  CHECK(G.conj(r2.conjugator, nf(G, "a1b1")) == nf(G, "b1a1"));
  // the witness is a1^-1 up to the centralizer <a1 b1> of the rotated word
  auto coset = are_conjugate(G, r2.conjugator, r2.conjugator);  // sanity: exact status
  CHECK(coset.status == ConjugacyResult::Status::conjugate);
  NormalForm diff = G.mul(nf(G, "a1"), r2.conjugator);  // (a1^-1)^-1 * h
  bool in_centralizer = false;
  for (long long k = -4; k <= 4; ++k)
    if (diff == G.reduce(free_pow(word_from_string(G, "a1b1"), k))) in_centralizer = true;
  CHECK(in_centralizer);
}

TEST_CASE("conjugacy: distinct pages are not conjugate (abelianization oracle)") {
  BookGroup G = book4();
  Word u = word_from_string(G, "a1"), v = word_from_string(G, "a2");
  REQUIRE(oracles::abelianize(G, u) != oracles::abelianize(G, v));
  auto r = are_conjugate(G, G.reduce(u), G.reduce(v));
  CHECK(r.status == ConjugacyResult::Status::not_conjugate);
}

TEST_CASE("conjugacy: core powers separate") {
  BookGroup G = book4();
  CHECK(are_conjugate(G, G.core_power(2), G.core_power(2)).status ==
        ConjugacyResult::Status::conjugate);
  CHECK(are_conjugate(G, G.core_power(2), G.core_power(3)).status ==
        ConjugacyResult::Status::not_conjugate);
  CHECK(are_conjugate(G, G.core_power(1), G.core_power(-1)).status ==
        ConjugacyResult::Status::not_conjugate);
  // a boundary word is conjugate to the core
  auto r = are_conjugate(G, nf(G, "b2a2B2A2"), G.core_power(-1));
  REQUIRE(r.status == ConjugacyResult::Status::conjugate);
  CHECK(G.conj(r.conjugator, nf(G, "b2a2B2A2")) == G.core_power(-1));
}

TEST_CASE("conjugacy: witnesses always verify on random conjugate pairs") {
  BookGroup G = book4();
  oracles::WordGen gen(G, 2024);
  for (int trial = 0; trial < 300; ++trial) {
    Word w = gen.random_word(1 + int(gen.rng() % 6));
    Word h = gen.random_word(int(gen.rng() % 5));
    NormalForm u = G.reduce(w);
    NormalForm v = G.reduce(free_mul(free_mul(h, w), free_inv(h)));
    auto r = are_conjugate(G, u, v);
    if (r.status == ConjugacyResult::Status::conjugate) {
      CHECK(G.conj(r.conjugator, u) == v);
    } else {
      // bounded search may miss large core exponents but must never say no
      CHECK(r.status == ConjugacyResult::Status::undetermined);
    }
  }
}

TEST_CASE("conjugacy: alternating words with mismatched page sequences") {
  BookGroup G = book4();
  auto r = are_conjugate(G, nf(G, "a1a2"), nf(G, "a1a3"));
  CHECK(r.status == ConjugacyResult::Status::not_conjugate);
  auto r2 = are_conjugate(G, nf(G, "a1a2"), nf(G, "a1a2a3a2"));
  CHECK(r2.status == ConjugacyResult::Status::not_conjugate);
  // rotation of the page sequence is conjugate
  auto r3 = are_conjugate(G, nf(G, "a1a2"), nf(G, "a2a1"));
  REQUIRE(r3.status == ConjugacyResult::Status::conjugate);
  CHECK(G.conj(r3.conjugator, nf(G, "a1a2")) == nf(G, "a2a1"));
}

TEST_CASE("inner conjugator on page and surface subgroups") {
  BookGroup G = book4();
  auto phi = compose(G, BookAutomorphism::twist(G, 1, +1), BookAutomorphism::twist(G, 3, +1));

  auto r13 = inner_conjugator_on(G, phi, SubgroupSpec::surface(1, 3));
  REQUIRE(r13.found);
  CHECK(r13.witness == G.core_power(1));

  auto r24 = inner_conjugator_on(G, phi, SubgroupSpec::surface(2, 4));
  REQUIRE(r24.found);
  CHECK(r24.witness.is_identity());

  SearchBudget b20;
  b20.core_exponent = 20;
  auto r12 = inner_conjugator_on(G, phi, SubgroupSpec::surface(1, 2), b20);
  CHECK_FALSE(r12.found);
  CHECK(r12.note.find("20") != std::string::npos);
}

TEST_CASE("inner conjugator verifies for twist powers") {
  BookGroup G = book4();
  auto phi = compose(G, BookAutomorphism::twist(G, 1, +1), BookAutomorphism::twist(G, 3, +1));
  BookAutomorphism cur = BookAutomorphism::identity(G);
  for (int i = 1; i <= 6; ++i) {
    cur = compose(G, phi, cur);
    auto r = inner_conjugator_on(G, cur, SubgroupSpec::surface(1, 3));
    REQUIRE(r.found);
    CHECK(r.witness == G.core_power(i));
  }
}
