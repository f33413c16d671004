#pragma once

// Free words over signed generator ids.  A letter is a nonzero int32; -x is
// the inverse of x.  Words are kept freely reduced by the operations below.

#include <algorithm>
#include <cstdint>
#include <vector>

namespace ibundle {

using Lid = std::int32_t;
using FreeWord = std::vector<Lid>;

inline void free_push(FreeWord& w, Lid x) {
  if (!w.empty() && w.back() == -x)
    w.pop_back();
  else
    w.push_back(x);
}

inline FreeWord free_reduce(const FreeWord& w) {
  FreeWord out;
  out.reserve(w.size());
  for (Lid x : w) free_push(out, x);
  return out;
}

// Product of two already-reduced words.
inline FreeWord free_mul(const FreeWord& u, const FreeWord& v) {
  FreeWord out = u;
  out.reserve(u.size() + v.size());
  for (Lid x : v) free_push(out, x);
  return out;
}

inline FreeWord free_inv(const FreeWord& w) {
  FreeWord out;
  out.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back(-*it);
  return out;
}

inline FreeWord free_pow(const FreeWord& w, long long k) {
  FreeWord base = k < 0 ? free_inv(w) : w;
  long long reps = k < 0 ? -k : k;
  FreeWord out;
  for (long long i = 0; i < reps; ++i) out = free_mul(out, base);
  return out;
}

// Conjugating prefix p and cyclically reduced core c with w = p c p^-1.
struct CyclicForm {
  FreeWord prefix;
  FreeWord core;
};

inline CyclicForm free_cyclic_reduce(FreeWord w) {
  FreeWord prefix;
  while (w.size() >= 2 && w.front() == -w.back()) {
    prefix.push_back(w.front());
    w.erase(w.begin());
    w.pop_back();
  }
  return {prefix, w};
}

// Lexicographic letter order used for shortlex tie-breaks: positive id before
// its inverse, lower ids first.
inline bool letter_less(Lid a, Lid b) {
  Lid ka = a > 0 ? 2 * a : -2 * a + 1;
  Lid kb = b > 0 ? 2 * b : -2 * b + 1;
  return ka < kb;
}

inline bool shortlex_less(const FreeWord& a, const FreeWord& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return letter_less(a[i], b[i]);
  }
  return false;
}

// All cyclic rotations of a reduced cyclic word, used for free conjugacy.
inline bool cyclic_words_equal_rotation(const FreeWord& a, const FreeWord& b,
                                        size_t* rot = nullptr) {
  if (a.size() != b.size()) return false;
  if (a.empty()) {
    if (rot) *rot = 0;
    return true;
  }
  for (size_t r = 0; r < a.size(); ++r) {
    bool ok = true;
    for (size_t i = 0; i < a.size(); ++i) {
      if (a[(i + r) % a.size()] != b[i]) {
        ok = false;
        break;
      }
    }
    if (ok) {
      if (rot) *rot = r;
      return true;
    }
  }
  return false;
}

}  // namespace ibundle
