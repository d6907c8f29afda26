#pragma once

// Exact coefficient ring: Laurent polynomials in named central symbols
// (hbar, c, m, M, alpha, D, ...) over complex rationals.

#include <algorithm>
#include <complex>
#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pbo/rational.hpp"

namespace pbo {

using SymbolId = std::uint32_t;

/// Process-wide interning of symbol names. Ids are stable for the process
/// lifetime; anything user-visible is ordered by name, never by id.
class SymbolTable {
 public:
  static SymbolId intern(std::string_view name) {
    auto& self = instance();
    std::lock_guard lock(self.mu_);
    if (auto it = self.ids_.find(name); it != self.ids_.end()) return it->second;
    auto id = static_cast<SymbolId>(self.names_.size());
    self.names_.emplace_back(name);
    self.ids_.emplace(self.names_.back(), id);
    return id;
  }

  static std::string name(SymbolId id) {
    auto& self = instance();
    std::lock_guard lock(self.mu_);
    return self.names_.at(id);
  }

 private:
  static SymbolTable& instance() {
    static SymbolTable table;
    return table;
  }

  std::mutex mu_;
  std::map<std::string, SymbolId, std::less<>> ids_;
  std::deque<std::string> names_;
};

/// Product of symbols with signed integer exponents, sorted by symbol id.
class Monomial {
 public:
  using Factor = std::pair<SymbolId, int>;

  Monomial() = default;
  static Monomial of(SymbolId s, int power = 1) {
    Monomial m;
    if (power != 0) m.factors_.emplace_back(s, power);
    return m;
  }

  const std::vector<Factor>& factors() const { return factors_; }
  bool is_one() const { return factors_.empty(); }

  int exponent(SymbolId s) const {
    for (const auto& [id, e] : factors_)
      if (id == s) return e;
    return 0;
  }

  Monomial without(SymbolId s) const {
    Monomial m;
    for (const auto& f : factors_)
      if (f.first != s) m.factors_.push_back(f);
    return m;
  }

  Monomial inverse() const {
    Monomial m = *this;
    for (auto& f : m.factors_) f.second = -f.second;
    return m;
  }

  friend Monomial operator*(const Monomial& a, const Monomial& b) {
    Monomial out;
    out.factors_.reserve(a.factors_.size() + b.factors_.size());
    auto ia = a.factors_.begin();
    auto ib = b.factors_.begin();
    while (ia != a.factors_.end() || ib != b.factors_.end()) {
      if (ib == b.factors_.end() || (ia != a.factors_.end() && ia->first < ib->first)) {
        out.factors_.push_back(*ia++);
      } else if (ia == a.factors_.end() || ib->first < ia->first) {
        out.factors_.push_back(*ib++);
      } else {
        int e = ia->second + ib->second;
        if (e != 0) out.factors_.emplace_back(ia->first, e);
        ++ia;
        ++ib;
      }
    }
    return out;
  }

  friend bool operator==(const Monomial&, const Monomial&) = default;
  friend bool operator<(const Monomial& a, const Monomial& b) { return a.factors_ < b.factors_; }

  /// "1" for the empty product, otherwise name-sorted "a^2*hbar^-1".
  std::string to_string() const {
    if (factors_.empty()) return "1";
    std::vector<std::pair<std::string, int>> named;
    named.reserve(factors_.size());
    for (const auto& [id, e] : factors_) named.emplace_back(SymbolTable::name(id), e);
    std::sort(named.begin(), named.end());
    std::string out;
    for (const auto& [n, e] : named) {
      if (!out.empty()) out += '*';
      out += n;
      if (e != 1) out += '^' + std::to_string(e);
    }
    return out;
  }

  static Monomial parse(std::string_view text) {
    Monomial m;
    if (text == "1") return m;
    while (!text.empty()) {
      auto star = text.find('*');
      auto piece = text.substr(0, star);
      text = star == std::string_view::npos ? std::string_view{} : text.substr(star + 1);
      auto caret = piece.find('^');
      int e = 1;
      if (caret != std::string_view::npos) {
        e = std::stoi(std::string(piece.substr(caret + 1)));
        piece = piece.substr(0, caret);
      }
      if (piece.empty()) throw std::invalid_argument("Monomial::parse: empty symbol name");
      m = m * of(SymbolTable::intern(piece), e);
    }
    return m;
  }

 private:
  std::vector<Factor> factors_;
};

using Bindings = std::map<std::string, std::complex<double>, std::less<>>;

/// Laurent polynomial in formal central symbols with exact complex-rational
/// coefficients. Zero coefficients are never stored.
class ScalarPoly {
 public:
  using TermMap = std::map<Monomial, ComplexRational>;

  ScalarPoly() = default;
  ScalarPoly(ComplexRational c) {  // NOLINT(implicit)
    if (!c.is_zero()) terms_.emplace(Monomial{}, std::move(c));
  }
  ScalarPoly(Rational r) : ScalarPoly(ComplexRational(std::move(r))) {}  // NOLINT(implicit)
  ScalarPoly(int v) : ScalarPoly(ComplexRational(v)) {}                   // NOLINT(implicit)
  ScalarPoly(long long v) : ScalarPoly(ComplexRational(v)) {}             // NOLINT(implicit)

  static ScalarPoly symbol(std::string_view name, int power = 1) {
    return term(Monomial::of(SymbolTable::intern(name), power), ComplexRational(1));
  }
  static ScalarPoly term(Monomial m, ComplexRational c) {
    ScalarPoly p;
    if (!c.is_zero()) p.terms_.emplace(std::move(m), std::move(c));
    return p;
  }
  static ScalarPoly ratio(long long num, long long den) { return ScalarPoly(Rational(num, den)); }
  static ScalarPoly imag_unit() { return ScalarPoly(ComplexRational::i()); }

  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_monomial() const { return terms_.size() == 1; }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one()); }

  /// Constant coefficient (the term with the empty monomial).
  ComplexRational constant_term() const {
    auto it = terms_.find(Monomial{});
    return it == terms_.end() ? ComplexRational{} : it->second;
  }

  /// Multiplicative inverse; only single-term values are invertible.
  ScalarPoly inverse() const {
    if (!is_monomial()) throw std::domain_error("ScalarPoly::inverse: value is not a single term: " + to_string());
    const auto& [m, c] = *terms_.begin();
    return term(m.inverse(), ComplexRational(1) / c);
  }

  /// Lowest exponent of `s` across terms (0 for the zero polynomial).
  int min_exponent(SymbolId s) const {
    if (terms_.empty()) return 0;
    int lo = terms_.begin()->first.exponent(s);
    for (const auto& [m, c] : terms_) lo = std::min(lo, m.exponent(s));
    return lo;
  }

  /// Coefficient of s^power, with `s` removed from each returned monomial.
  ScalarPoly coefficient(SymbolId s, int power) const {
    ScalarPoly out;
    for (const auto& [m, c] : terms_)
      if (m.exponent(s) == power) out.terms_.emplace(m.without(s), c);
    return out;
  }

  std::complex<double> evaluate(const Bindings& bindings) const {
    std::complex<double> total{};
    for (const auto& [m, c] : terms_) {
      std::complex<double> v = c.to_complex();
      for (const auto& [id, e] : m.factors()) {
        auto name = SymbolTable::name(id);
        auto it = bindings.find(name);
        if (it == bindings.end()) throw std::invalid_argument("ScalarPoly::evaluate: unbound symbol '" + name + "'");
        v *= std::pow(it->second, e);
      }
      total += v;
    }
    return total;
  }

  ScalarPoly operator-() const {
    ScalarPoly out = *this;
    for (auto& [m, c] : out.terms_) c = -c;
    return out;
  }

  ScalarPoly& operator+=(const ScalarPoly& o) {
    for (const auto& [m, c] : o.terms_) accumulate(m, c);
    return *this;
  }
  ScalarPoly& operator-=(const ScalarPoly& o) {
    for (const auto& [m, c] : o.terms_) accumulate(m, -c);
    return *this;
  }
  ScalarPoly& operator*=(const ScalarPoly& o) {
    *this = *this * o;
    return *this;
  }

  friend ScalarPoly operator+(ScalarPoly a, const ScalarPoly& b) { return a += b; }
  friend ScalarPoly operator-(ScalarPoly a, const ScalarPoly& b) { return a -= b; }
  friend ScalarPoly operator*(const ScalarPoly& a, const ScalarPoly& b) {
    ScalarPoly out;
    if (a.is_zero() || b.is_zero()) return out;
    if (b.terms_.size() == 1 && b.terms_.begin()->first.is_one()) {
      const auto& k = b.terms_.begin()->second;
      out = a;
      for (auto& [m, c] : out.terms_) c *= k;
      return out;
    }
    if (a.terms_.size() == 1 && a.terms_.begin()->first.is_one()) return b * a;
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) out.accumulate(ma * mb, ca * cb);
    return out;
  }
  friend ScalarPoly operator/(const ScalarPoly& a, const ScalarPoly& b) { return a * b.inverse(); }

  friend bool operator==(const ScalarPoly&, const ScalarPoly&) = default;

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::vector<std::pair<std::string, const ComplexRational*>> named;
    for (const auto& [m, c] : terms_) named.emplace_back(m.to_string(), &c);
    std::sort(named.begin(), named.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    std::string out;
    for (const auto& [mono, c] : named) {
      if (!out.empty()) out += " + ";
      out += c->to_string();
      if (mono != "1") out += "*" + mono;
    }
    return out;
  }

  friend std::ostream& operator<<(std::ostream& os, const ScalarPoly& p) { return os << p.to_string(); }

 private:
  void accumulate(const Monomial& m, const ComplexRational& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  TermMap terms_;
};

/// Frequently used formal symbols.
inline ScalarPoly hbar() { return ScalarPoly::symbol("hbar"); }
inline ScalarPoly i_hbar() { return ScalarPoly::imag_unit() * hbar(); }
inline SymbolId hbar_id() { return SymbolTable::intern("hbar"); }

/// Operations the non-commutative algebra needs from its coefficient ring.
template <class T>
struct coeff_traits;

template <>
struct coeff_traits<ScalarPoly> {
  static ScalarPoly zero() { return {}; }
  static ScalarPoly one() { return ScalarPoly(1); }
  static ScalarPoly ratio(long long num, long long den) { return ScalarPoly::ratio(num, den); }
  static ScalarPoly integer(const BigInt& v) { return ScalarPoly(Rational(v)); }
  static bool is_zero(const ScalarPoly& v) { return v.is_zero(); }
  static ScalarPoly inverse(const ScalarPoly& v) { return v.inverse(); }
  static std::string to_string(const ScalarPoly& v) { return v.to_string(); }
};

template <>
struct coeff_traits<std::complex<double>> {
  using C = std::complex<double>;
  static C zero() { return {}; }
  static C one() { return {1.0, 0.0}; }
  static C ratio(long long num, long long den) { return {static_cast<double>(num) / static_cast<double>(den), 0.0}; }
  static C integer(const BigInt& v) { return {v.convert_to<double>(), 0.0}; }
  static bool is_zero(const C& v) { return v == C{}; }
  static C inverse(const C& v) {
    if (is_zero(v)) throw std::domain_error("inverse of zero");
    return 1.0 / v;
  }
  static std::string to_string(const C& v) {
    std::ostringstream os;
    os << v;
    return os.str();
  }
};

template <class T>
concept Coefficient = requires(const T& a, const T& b) {
  { a + b } -> std::convertible_to<T>;
  { a - b } -> std::convertible_to<T>;
  { a * b } -> std::convertible_to<T>;
  { -a } -> std::convertible_to<T>;
  { a == b } -> std::convertible_to<bool>;
  { coeff_traits<T>::zero() } -> std::convertible_to<T>;
  { coeff_traits<T>::is_zero(a) } -> std::convertible_to<bool>;
};

}  // namespace pbo
