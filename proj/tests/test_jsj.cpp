#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>
#include <random>

#include "ibundle/jsj.hpp"

using namespace ibundle;

namespace {
std::vector<PageSpec> genus1(int n) { return std::vector<PageSpec>(size_t(n), PageSpec{1, true}); }
}  // namespace

TEST_CASE("build_book constructor and preconditions") {
  JsjGraph g = build_book(4, genus1(4), 1);
  CHECK(g.order == std::vector<int>{1, 2, 3, 4});
  CHECK(g.flips.empty());
  CHECK(g.p == 1);
  CHECK(g.is_book());

  JsjGraph h = build_book(3, {{2, true}, {2, true}, {2, true}}, 1);
  CHECK(h.order == std::vector<int>{1, 2, 3});
  CHECK(h.pieces[0].page.genus == 2);

  CHECK_THROWS_AS(build_book(2, genus1(2), 1), std::invalid_argument);
  CHECK_THROWS_AS(build_book(4, genus1(3), 1), std::invalid_argument);
  CHECK_THROWS_AS(build_book(4, genus1(4), 0), std::invalid_argument);
}

TEST_CASE("window of a book has one i-pair per page") {
  Window w4 = window(build_book(4, genus1(4), 1));
  CHECK(w4.components.size() == 4);
  CHECK(w4.count(WindowComponent::Kind::i_pair) == 4);
  CHECK(w4.count(WindowComponent::Kind::annulus) == 0);

  Window w3 = window(build_book(3, genus1(3), 2));
  CHECK(w3.components.size() == 3);
  CHECK(w3.count(WindowComponent::Kind::annulus) == 0);
}

TEST_CASE("window count equals page count for random books") {
  std::mt19937 rng(7);
  for (int n = 3; n <= 12; ++n) {
    for (int rep = 0; rep < 5; ++rep) {
      std::vector<PageSpec> pages;
      for (int j = 0; j < n; ++j) pages.push_back({1 + int(rng() % 3), rng() % 4 != 0});
      JsjGraph g = build_book(n, pages, 1 + int(rng() % 3));
      CHECK(window(g).components.size() == size_t(n));
    }
  }
}

TEST_CASE("window retains one annulus for a core between opaque pieces") {
  // hand-trace: both frontier annuli avoid I-pairs, and nothing separates
  // them around the core, so exactly one neighbourhood survives
  JsjGraph g;
  g.core = CoreKind::solid;
  g.p = 1;
  g.pieces.push_back({true, {}});
  g.pieces.push_back({true, {}});
  g.order = {1, 2};
  Window w = window(g);
  CHECK(w.components.size() == 1);
  CHECK(w.components[0].kind == WindowComponent::Kind::annulus);
}

TEST_CASE("window annuli separated by a page are deduplicated through the free side") {
  JsjGraph g;
  g.pieces.push_back({true, {}});
  g.pieces.push_back({false, {1, true}});
  g.pieces.push_back({true, {}});
  g.order = {1, 2, 3};
  Window w = window(g);
  // one i-pair + one annulus: the two candidates slide past the unblocked side
  CHECK(w.count(WindowComponent::Kind::i_pair) == 1);
  CHECK(w.count(WindowComponent::Kind::annulus) == 1);

  // two pages block both gaps: the two candidates are genuinely separate
  JsjGraph h;
  h.pieces.push_back({true, {}});
  h.pieces.push_back({false, {1, true}});
  h.pieces.push_back({true, {}});
  h.pieces.push_back({false, {1, true}});
  h.order = {1, 2, 3, 4};
  Window wh = window(h);
  CHECK(wh.count(WindowComponent::Kind::i_pair) == 2);
  CHECK(wh.count(WindowComponent::Kind::annulus) == 2);
}

TEST_CASE("shuffle applies a permutation to the cyclic order") {
  JsjGraph g = build_book(4, genus1(4), 1);
  CHECK(shuffle(g, {1, 2, 3, 4}).order == g.order);
  CHECK(shuffle(g, {1, 3, 2, 4}).order == std::vector<int>{1, 3, 2, 4});
  CHECK_THROWS_AS(shuffle(g, {1, 1, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(shuffle(g, {1, 2, 3}), std::invalid_argument);
}

TEST_CASE("shuffle is a group action") {
  std::mt19937 rng(11);
  JsjGraph g = build_book(5, genus1(5), 1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> sigma{1, 2, 3, 4, 5}, tau{1, 2, 3, 4, 5};
    std::shuffle(sigma.begin(), sigma.end(), rng);
    std::shuffle(tau.begin(), tau.end(), rng);
    JsjGraph lhs = shuffle(shuffle(g, sigma), tau);
    std::vector<int> comp(5);
    for (int i = 0; i < 5; ++i) comp[size_t(i)] = tau[size_t(sigma[size_t(i)] - 1)];
    JsjGraph rhs = shuffle(g, comp);
    CHECK(lhs.order == rhs.order);
  }
  // a 3-cycle and its inverse compose to the identity
  JsjGraph h = build_book(4, genus1(4), 1);
  JsjGraph once = shuffle(h, {2, 3, 1, 4});
  JsjGraph back = shuffle(once, {3, 1, 2, 4});
  CHECK(back.order == h.order);
}

TEST_CASE("flip is an involution and commutes with shuffles on disjoint data") {
  JsjGraph g = build_book(4, genus1(4), 1);
  CHECK(flip(flip(g, 2), 2).flips == g.flips);
  CHECK(flip(g, 1).flips == std::set<int>{1});
  CHECK_THROWS_AS(flip(g, 9), std::invalid_argument);

  // exhaustive check on n = 4: flip marks are untouched by shuffling
  std::vector<int> perm{1, 2, 3, 4};
  std::sort(perm.begin(), perm.end());
  do {
    for (int j = 1; j <= 4; ++j) {
      JsjGraph a = flip(shuffle(flip(g, j), perm), j);
      JsjGraph b = shuffle(g, perm);
      CHECK(a.order == b.order);
      CHECK(a.flips == b.flips);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
}

namespace {
// brute-force dihedral orbit comparison
bool dihedral_equal(const JsjGraph& a, const JsjGraph& b) {
  auto types = [](const JsjGraph& g) {
    std::vector<PageSpec> seq;
    for (int v : g.order) seq.push_back(g.pieces[size_t(v - 1)].page);
    return seq;
  };
  auto sa = types(a), sb = types(b);
  if (sa.size() != sb.size()) return false;
  for (int refl = 0; refl < 2; ++refl) {
    for (size_t r = 0; r < sa.size(); ++r) {
      bool same = true;
      for (size_t i = 0; i < sa.size(); ++i)
        if (!(sa[(i + r) % sa.size()] == sb[i])) same = false;
      if (same) return true;
    }
    std::reverse(sa.begin(), sa.end());
  }
  return false;
}
}  // namespace

TEST_CASE("classify_pair: rotations are homeomorphic") {
  JsjGraph a = build_book(4, {{1, true}, {2, true}, {3, true}, {4, true}}, 1);
  JsjGraph b = shuffle(a, {2, 3, 4, 1});  // rotate the cyclic word
  CHECK(classify_pair(a, b) == PairClass::homeomorphic);
}

TEST_CASE("classify_pair: distinct genera, swapped middle is homotopy only") {
  JsjGraph a = build_book(4, {{1, true}, {2, true}, {3, true}, {4, true}}, 1);
  JsjGraph b = shuffle(a, {1, 3, 2, 4});
  REQUIRE_FALSE(dihedral_equal(a, b));  // oracle: not in the 8-element orbit
  CHECK(classify_pair(a, b) == PairClass::homotopy_equivalent_only);
}

TEST_CASE("classify_pair: different page multisets are inequivalent") {
  JsjGraph a = build_book(3, {{1, true}, {1, true}, {2, true}}, 1);
  JsjGraph b = build_book(3, {{1, true}, {2, true}, {2, true}}, 1);
  CHECK(classify_pair(a, b) == PairClass::inequivalent);
  JsjGraph c = build_book(3, {{1, true}, {1, true}, {2, true}}, 2);
  CHECK(classify_pair(a, c) == PairClass::inequivalent);
}

TEST_CASE("classify_pair properties on random shuffles") {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    int n = 3 + int(rng() % 4);
    std::vector<PageSpec> pages;
    for (int j = 0; j < n; ++j) pages.push_back({1 + int(rng() % 3), true});
    JsjGraph g = build_book(n, pages, 1);
    std::vector<int> perm(static_cast<size_t>(n), 0);
    std::iota(perm.begin(), perm.end(), 1);
    std::shuffle(perm.begin(), perm.end(), rng);
    JsjGraph h = shuffle(g, perm);
    PairClass c = classify_pair(g, h);
    CHECK(c != PairClass::inequivalent);  // shuffles preserve homotopy type
    CHECK(classify_pair(h, g) == c);      // symmetry
    CHECK((c == PairClass::homeomorphic) == dihedral_equal(g, h));
    CHECK(classify_pair(g, g) == PairClass::homeomorphic);
  }
}

TEST_CASE("classify_pair ignores flips on books") {
  JsjGraph a = build_book(4, genus1(4), 1);
  CHECK(classify_pair(a, flip(a, 2)) == PairClass::homeomorphic);
}

TEST_CASE("classify_pair requires books") {
  JsjGraph g;
  g.pieces.push_back({true, {}});
  g.pieces.push_back({true, {}});
  g.order = {1, 2};
  CHECK_THROWS_AS(classify_pair(g, g), std::invalid_argument);
}
