#pragma once

// Test-only oracles, deliberately independent of the library's algebra:
//  - SwapOracle: normal ordering by repeated adjacent swaps of single letters,
//    using only [A_i, B_i] = c_i and commutation of everything else.
//  - CommutativePoly: ordinary commutative polynomials with a classical
//    Poisson bracket, for classical-limit comparisons.

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include "pbo/ncpoly.hpp"

namespace pbo::oracle {

/// Letter index 2*pair (A) or 2*pair+1 (B); canonical order is by index.
using Letters = std::vector<unsigned>;

enum class SwapStrategy { Leftmost, Rightmost, Random };

class SwapOracle {
 public:
  explicit SwapOracle(SystemRef sys, SwapStrategy strategy = SwapStrategy::Leftmost, unsigned seed = 7)
      : sys_(std::move(sys)), strategy_(strategy), rng_(seed) {}

  /// Normal-orders a linear combination of literal letter sequences.
  Poly order(std::map<Letters, ScalarPoly> pending) {
    Poly out(sys_);
    while (!pending.empty()) {
      auto node = pending.extract(pending.begin());
      Letters word = std::move(node.key());
      ScalarPoly coeff = std::move(node.mapped());
      if (coeff.is_zero()) continue;
      auto pos = pick_inversion(word);
      if (!pos) {
        out.add_term(to_word(word), coeff);
        continue;
      }
      std::size_t i = *pos;
      unsigned left = word[i], right = word[i + 1];
      Letters swapped = word;
      std::swap(swapped[i], swapped[i + 1]);
      accumulate(pending, std::move(swapped), coeff);
      // B_k A_k = A_k B_k - c_k
      if (left / 2 == right / 2 && left % 2 == 1 && right % 2 == 0) {
        Letters contracted;
        contracted.insert(contracted.end(), word.begin(), word.begin() + static_cast<long>(i));
        contracted.insert(contracted.end(), word.begin() + static_cast<long>(i) + 2, word.end());
        accumulate(pending, std::move(contracted), -(coeff * sys_->commutator(left / 2)));
      }
    }
    return out;
  }

  Poly order(const Letters& word) { return order(std::map<Letters, ScalarPoly>{{word, ScalarPoly(1)}}); }

  /// Literal letters for a normal-ordered word.
  static Letters letters(const Word& w) {
    Letters out;
    for (unsigned s = 0; s < w.size(); ++s)
      for (unsigned k = 0; k < w[s]; ++k) out.push_back(s);
    return out;
  }

  /// Product of two polynomials by concatenating letters and reordering.
  Poly multiply(const Poly& f, const Poly& g) {
    std::map<Letters, ScalarPoly> pending;
    for (const auto& [wf, cf] : f.terms())
      for (const auto& [wg, cg] : g.terms()) {
        Letters l = letters(wf);
        auto r = letters(wg);
        l.insert(l.end(), r.begin(), r.end());
        accumulate(pending, std::move(l), cf * cg);
      }
    return order(std::move(pending));
  }

  Poly commutator(const Poly& f, const Poly& g) { return multiply(f, g) - multiply(g, f); }

 private:
  static void accumulate(std::map<Letters, ScalarPoly>& m, Letters w, const ScalarPoly& c) {
    auto [it, inserted] = m.try_emplace(std::move(w), c);
    if (!inserted) it->second += c;
  }

  std::optional<std::size_t> pick_inversion(const Letters& w) {
    std::vector<std::size_t> inv;
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
      if (w[i] > w[i + 1]) inv.push_back(i);
    if (inv.empty()) return std::nullopt;
    switch (strategy_) {
      case SwapStrategy::Leftmost: return inv.front();
      case SwapStrategy::Rightmost: return inv.back();
      case SwapStrategy::Random: return inv[std::uniform_int_distribution<std::size_t>(0, inv.size() - 1)(rng_)];
    }
    return inv.front();
  }

  Word to_word(const Letters& l) const {
    Word w(2 * sys_->size(), 0);
    for (auto x : l) ++w[x];
    return w;
  }

  SystemRef sys_;
  SwapStrategy strategy_;
  std::mt19937_64 rng_;
};

/// Commutative polynomial over 2N variables (q1, p1, ..., qN, pN).
class CommutativePoly {
 public:
  using Terms = std::map<Word, ScalarPoly>;

  CommutativePoly() = default;
  explicit CommutativePoly(Terms t) : terms_(std::move(t)) { prune(); }

  /// Reinterpret a normal-ordered polynomial's words as commuting monomials.
  static CommutativePoly from(const Poly& f) {
    Terms t;
    for (const auto& [w, c] : f.terms()) t[w] = c;
    return CommutativePoly(std::move(t));
  }

  Poly to_poly(const SystemRef& sys) const {
    Poly f(sys);
    for (const auto& [w, c] : terms_) f.add_term(w, c);
    return f;
  }

  CommutativePoly derivative(std::size_t slot) const {
    Terms t;
    for (const auto& [w, c] : terms_) {
      if (w[slot] == 0) continue;
      Word d = w;
      --d[slot];
      t[d] += ScalarPoly(static_cast<long long>(w[slot])) * c;
    }
    return CommutativePoly(std::move(t));
  }

  friend CommutativePoly operator*(const CommutativePoly& a, const CommutativePoly& b) {
    Terms t;
    for (const auto& [wa, ca] : a.terms_)
      for (const auto& [wb, cb] : b.terms_) {
        Word w = wa;
        for (std::size_t s = 0; s < w.size(); ++s) w[s] += wb[s];
        t[w] += ca * cb;
      }
    return CommutativePoly(std::move(t));
  }
  friend CommutativePoly operator-(const CommutativePoly& a, const CommutativePoly& b) {
    Terms t = a.terms_;
    for (const auto& [w, c] : b.terms_) t[w] -= c;
    return CommutativePoly(std::move(t));
  }
  friend CommutativePoly operator+(const CommutativePoly& a, const CommutativePoly& b) {
    Terms t = a.terms_;
    for (const auto& [w, c] : b.terms_) t[w] += c;
    return CommutativePoly(std::move(t));
  }

  /// Classical Poisson bracket  sum_i df/dq_i dg/dp_i - df/dp_i dg/dq_i.
  static CommutativePoly poisson(const CommutativePoly& f, const CommutativePoly& g, std::size_t n_pairs) {
    CommutativePoly out;
    for (std::size_t i = 0; i < n_pairs; ++i)
      out = out + (f.derivative(2 * i) * g.derivative(2 * i + 1) - f.derivative(2 * i + 1) * g.derivative(2 * i));
    return out;
  }

  const Terms& terms() const { return terms_; }

 private:
  void prune() {
    for (auto it = terms_.begin(); it != terms_.end();) it = it->second.is_zero() ? terms_.erase(it) : std::next(it);
  }
  Terms terms_;
};

}  // namespace pbo::oracle
