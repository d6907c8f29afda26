#pragma once

// Normal-ordered polynomials in N canonical pairs (A_i, B_i) with central
// commutators [A_i, B_j] = c_i delta_ij and all other generator pairs commuting.
// Every stored word is A_1^a1 B_1^b1 ... A_N^aN B_N^bN.

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "pbo/scalar_poly.hpp"

namespace pbo {

enum class Role : std::uint8_t { A, B };

/// One generator of the algebra: the position-like (A) or momentum-like (B)
/// member of pair `pair`.
struct Generator {
  std::size_t pair = 0;
  Role role = Role::A;

  std::size_t slot() const { return 2 * pair + (role == Role::B ? 1 : 0); }
  Generator partner() const { return {pair, role == Role::A ? Role::B : Role::A}; }
  friend bool operator==(const Generator&, const Generator&) = default;
};

inline Generator gen_a(std::size_t pair = 0) { return {pair, Role::A}; }
inline Generator gen_b(std::size_t pair = 0) { return {pair, Role::B}; }

/// A generator raised to a power; a sequence of these is a literal (not yet
/// normal-ordered) product.
struct Factor {
  Generator gen;
  unsigned power = 1;
};

template <Coefficient C>
class CanonicalSystem {
 public:
  struct Pair {
    std::string a_name;
    std::string b_name;
    C commutator;  // [A_i, B_i]
  };

  explicit CanonicalSystem(std::vector<Pair> pairs) : pairs_(std::move(pairs)) {
    if (pairs_.empty()) throw std::invalid_argument("CanonicalSystem: need at least one canonical pair");
  }

  static std::shared_ptr<const CanonicalSystem> create(std::vector<Pair> pairs) {
    return std::make_shared<const CanonicalSystem>(std::move(pairs));
  }

  /// Pairs named A1,B1,... with the given commutators.
  static std::shared_ptr<const CanonicalSystem> with_commutators(std::vector<C> commutators) {
    std::vector<Pair> pairs;
    const bool single = commutators.size() == 1;
    for (std::size_t i = 0; i < commutators.size(); ++i) {
      auto suffix = single ? std::string{} : std::to_string(i + 1);
      pairs.push_back({"A" + suffix, "B" + suffix, std::move(commutators[i])});
    }
    return create(std::move(pairs));
  }

  std::size_t size() const { return pairs_.size(); }
  const Pair& pair(std::size_t i) const { return pairs_.at(i); }
  const C& commutator(std::size_t i) const { return pairs_.at(i).commutator; }

  const std::string& name(Generator g) const {
    const auto& p = pair(g.pair);
    return g.role == Role::A ? p.a_name : p.b_name;
  }

  /// True when every pair has commutator equal to `value`.
  bool all_commutators_equal(const C& value) const {
    return std::all_of(pairs_.begin(), pairs_.end(), [&](const Pair& p) { return p.commutator == value; });
  }

  friend bool operator==(const CanonicalSystem& a, const CanonicalSystem& b) {
    if (a.pairs_.size() != b.pairs_.size()) return false;
    for (std::size_t i = 0; i < a.pairs_.size(); ++i) {
      const auto& x = a.pairs_[i];
      const auto& y = b.pairs_[i];
      if (x.a_name != y.a_name || x.b_name != y.b_name || !(x.commutator == y.commutator)) return false;
    }
    return true;
  }

 private:
  std::vector<Pair> pairs_;
};

template <Coefficient C>
using SystemPtr = std::shared_ptr<const CanonicalSystem<C>>;

/// Exponent vector (a1, b1, ..., aN, bN).
using Word = std::vector<std::uint32_t>;

template <Coefficient C>
class NCPoly {
 public:
  using Traits = coeff_traits<C>;
  using TermMap = std::map<Word, C>;

  explicit NCPoly(SystemPtr<C> sys) : sys_(std::move(sys)) {
    if (!sys_) throw std::invalid_argument("NCPoly: null system");
  }

  static NCPoly constant(SystemPtr<C> sys, C value) {
    NCPoly p(std::move(sys));
    p.add_term(Word(2 * p.sys_->size(), 0), std::move(value));
    return p;
  }
  static NCPoly one(SystemPtr<C> sys) { return constant(std::move(sys), Traits::one()); }

  static NCPoly generator(SystemPtr<C> sys, Generator g, unsigned power = 1) {
    NCPoly p(std::move(sys));
    p.check_generator(g);
    Word w(2 * p.sys_->size(), 0);
    w[g.slot()] = power;
    p.add_term(std::move(w), Traits::one());
    return p;
  }

  static NCPoly monomial(SystemPtr<C> sys, Word w, C coeff) {
    NCPoly p(std::move(sys));
    if (w.size() != 2 * p.sys_->size()) throw std::invalid_argument("NCPoly::monomial: word length does not match system");
    p.add_term(std::move(w), std::move(coeff));
    return p;
  }

  /// Normal-ordered value of the literal product f_1^p_1 f_2^p_2 ... .
  static NCPoly from_factors(SystemPtr<C> sys, std::span<const Factor> factors, C coeff) {
    NCPoly acc = constant(sys, std::move(coeff));
    for (const auto& f : factors) acc = acc * generator(sys, f.gen, f.power);
    return acc;
  }
  static NCPoly from_factors(SystemPtr<C> sys, std::span<const Factor> factors) {
    return from_factors(std::move(sys), factors, Traits::one());
  }

  const SystemPtr<C>& system() const { return sys_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  /// Total degree; -1 for the zero polynomial.
  int degree() const {
    int d = -1;
    for (const auto& [w, c] : terms_) {
      int s = 0;
      for (auto e : w) s += static_cast<int>(e);
      d = std::max(d, s);
    }
    return d;
  }

  unsigned degree_in(Generator g) const {
    check_generator(g);
    unsigned d = 0;
    for (const auto& [w, c] : terms_) d = std::max(d, w[g.slot()]);
    return d;
  }

  /// True when no generator other than `g` appears.
  bool depends_only_on(Generator g) const {
    check_generator(g);
    for (const auto& [w, c] : terms_)
      for (std::size_t s = 0; s < w.size(); ++s)
        if (s != g.slot() && w[s] != 0) return false;
    return true;
  }

  /// Coefficient of the empty word.
  C constant_term() const {
    auto it = terms_.find(Word(2 * sys_->size(), 0));
    return it == terms_.end() ? Traits::zero() : it->second;
  }

  void add_term(Word w, C coeff) {
    if (Traits::is_zero(coeff)) return;
    auto [it, inserted] = terms_.try_emplace(std::move(w), coeff);
    if (!inserted) {
      it->second = it->second + coeff;
      if (Traits::is_zero(it->second)) terms_.erase(it);
    }
  }

  void check_generator(Generator g) const {
    if (g.pair >= sys_->size())
      throw std::out_of_range("generator pair index " + std::to_string(g.pair) + " outside system of " +
                              std::to_string(sys_->size()) + " pairs");
  }

  /// Apply `fn` to every coefficient, keeping words.
  template <class Fn>
  NCPoly map_coefficients(Fn&& fn) const {
    NCPoly out(sys_);
    for (const auto& [w, c] : terms_) out.add_term(w, fn(c));
    return out;
  }

  NCPoly operator-() const {
    return map_coefficients([](const C& c) { return -c; });
  }

  NCPoly& operator+=(const NCPoly& o) {
    require_same_system(*this, o);
    for (const auto& [w, c] : o.terms_) add_term(w, c);
    return *this;
  }
  NCPoly& operator-=(const NCPoly& o) {
    require_same_system(*this, o);
    for (const auto& [w, c] : o.terms_) add_term(w, -c);
    return *this;
  }

  friend NCPoly operator+(NCPoly a, const NCPoly& b) { return a += b; }
  friend NCPoly operator-(NCPoly a, const NCPoly& b) { return a -= b; }

  friend NCPoly operator*(const C& k, const NCPoly& f) {
    if (Traits::is_zero(k)) return NCPoly(f.sys_);
    return f.map_coefficients([&](const C& c) { return k * c; });
  }
  friend NCPoly operator*(const NCPoly& f, const C& k) { return k * f; }

  friend NCPoly operator*(const NCPoly& f, const NCPoly& g) { return multiply(f, g); }

  friend bool operator==(const NCPoly& a, const NCPoly& b) {
    return same_system(a, b) && a.terms_ == b.terms_;
  }

  static bool same_system(const NCPoly& a, const NCPoly& b) {
    return a.sys_ == b.sys_ || *a.sys_ == *b.sys_;
  }
  static void require_same_system(const NCPoly& a, const NCPoly& b) {
    if (!same_system(a, b)) throw std::invalid_argument("NCPoly: operands belong to different canonical systems");
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [w, c] : terms_) {
      if (!out.empty()) out += " + ";
      out += "(" + Traits::to_string(c) + ")";
      for (std::size_t s = 0; s < w.size(); ++s) {
        if (w[s] == 0) continue;
        out += " " + sys_->name(Generator{s / 2, s % 2 == 0 ? Role::A : Role::B});
        if (w[s] != 1) out += "^" + std::to_string(w[s]);
      }
    }
    return out;
  }

  friend std::ostream& operator<<(std::ostream& os, const NCPoly& p) { return os << p.to_string(); }

 private:
  // Normal ordering of B^b A^c inside one pair with [A,B] = c:
  //   B^b A^c = sum_k k! C(b,k) C(c,k) (-c)^k A^(c-k) B^(b-k).
  // Cross-pair generators commute, so a product of two normal-ordered words
  // factorizes pair by pair.
  class ContractionCache {
   public:
    explicit ContractionCache(const CanonicalSystem<C>& sys) : sys_(sys), neg_powers_(sys.size()) {}

    const C& factor(std::size_t pair, unsigned b, unsigned c, unsigned k) {
      auto key = std::make_tuple(pair, b, c, k);
      if (auto it = cache_.find(key); it != cache_.end()) return it->second;
      BigInt count = 1;
      for (unsigned j = 0; j < k; ++j) count = count * (b - j) * (c - j) / (j + 1);
      // count == C(b,k) C(c,k) k!
      C value = Traits::integer(count) * neg_power(pair, k);
      return cache_.emplace(key, std::move(value)).first->second;
    }

   private:
    const C& neg_power(std::size_t pair, unsigned k) {
      auto& pows = neg_powers_[pair];
      if (pows.empty()) pows.push_back(Traits::one());
      while (pows.size() <= k) pows.push_back(pows.back() * (-sys_.commutator(pair)));
      return pows[k];
    }

    const CanonicalSystem<C>& sys_;
    std::vector<std::vector<C>> neg_powers_;
    std::map<std::tuple<std::size_t, unsigned, unsigned, unsigned>, C> cache_;
  };

  static NCPoly multiply(const NCPoly& f, const NCPoly& g) {
    require_same_system(f, g);
    const auto& sys = *f.sys_;
    const std::size_t n = sys.size();
    NCPoly out(f.sys_);
    if (f.is_zero() || g.is_zero()) return out;

    ContractionCache cache(sys);
    std::vector<bool> central(n);
    for (std::size_t i = 0; i < n; ++i) central[i] = Traits::is_zero(sys.commutator(i));

    std::vector<std::pair<Word, C>> partial;
    std::vector<std::pair<Word, C>> next;
    for (const auto& [wf, cf] : f.terms_) {
      for (const auto& [wg, cg] : g.terms_) {
        partial.clear();
        partial.emplace_back(Word(2 * n, 0), cf * cg);
        for (std::size_t i = 0; i < n; ++i) {
          const unsigned a = wf[2 * i], b = wf[2 * i + 1];
          const unsigned c = wg[2 * i], d = wg[2 * i + 1];
          const unsigned kmax = central[i] ? 0u : std::min(b, c);
          if (kmax == 0) {
            for (auto& [w, k] : partial) {
              w[2 * i] = a + c;
              w[2 * i + 1] = b + d;
            }
            continue;
          }
          next.clear();
          for (const auto& [w, k] : partial) {
            for (unsigned j = 0; j <= kmax; ++j) {
              Word wj = w;
              wj[2 * i] = a + c - j;
              wj[2 * i + 1] = b + d - j;
              if (j == 0) {
                next.emplace_back(std::move(wj), k);
              } else {
                C v = k * cache.factor(i, b, c, j);
                if (!Traits::is_zero(v)) next.emplace_back(std::move(wj), std::move(v));
              }
            }
          }
          partial.swap(next);
        }
        for (auto& [w, k] : partial) out.add_term(std::move(w), std::move(k));
      }
    }
    return out;
  }

  SystemPtr<C> sys_;
  TermMap terms_;
};

/// f^n by repeated multiplication; f^0 = 1.
template <Coefficient C>
NCPoly<C> pow(const NCPoly<C>& f, unsigned n) {
  NCPoly<C> acc = NCPoly<C>::one(f.system());
  for (unsigned i = 0; i < n; ++i) acc = acc * f;
  return acc;
}

/// [f, g] = fg - gf.
template <Coefficient C>
NCPoly<C> commutator(const NCPoly<C>& f, const NCPoly<C>& g) {
  return f * g - g * f;
}

/// The inner derivation delta_x y = [x, y].
template <Coefficient C>
NCPoly<C> delta(const NCPoly<C>& x, const NCPoly<C>& y) {
  return commutator(x, y);
}

/// delta_x^m y.
template <Coefficient C>
NCPoly<C> delta_power(const NCPoly<C>& x, const NCPoly<C>& y, unsigned m) {
  NCPoly<C> acc = y;
  for (unsigned i = 0; i < m && !acc.is_zero(); ++i) acc = commutator(x, acc);
  return acc;
}

using Poly = NCPoly<ScalarPoly>;
using System = CanonicalSystem<ScalarPoly>;
using SystemRef = SystemPtr<ScalarPoly>;

/// Single pair with formal commutator symbol `c`.
inline SystemRef formal_pair_system(std::string_view commutator_symbol = "c") {
  return System::with_commutators({ScalarPoly::symbol(commutator_symbol)});
}

/// N pairs with formal commutators c1..cN.
inline SystemRef formal_system(std::size_t n_pairs) {
  std::vector<ScalarPoly> cs;
  for (std::size_t i = 0; i < n_pairs; ++i) cs.push_back(ScalarPoly::symbol("c" + std::to_string(i + 1)));
  return System::with_commutators(std::move(cs));
}

/// N pairs obeying the standard relations [A_i, B_j] = i hbar delta_ij.
inline SystemRef standard_system(std::size_t n_pairs) {
  return System::with_commutators(std::vector<ScalarPoly>(n_pairs, i_hbar()));
}

/// One pair (x, p) with [x, p] = i hbar.
inline SystemRef position_momentum_system() {
  return System::create({{"x", "p", i_hbar()}});
}

}  // namespace pbo
