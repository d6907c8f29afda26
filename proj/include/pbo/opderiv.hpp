#pragma once

// Operator derivatives of quantum analysis on normal-ordered polynomials.
//
// The lambda integral  int_0^1 dl (A - l delta_A)^n C  is never integrated
// numerically. It is evaluated through the symmetrized sum
//   (1/(n+1)) sum_k A^(n-k) C A^k,
// and, as an independent route, through the binomial expansion of the
// integrand (A - l delta_A)^n = sum_j C(n,j) (-l)^j A^(n-j) delta_A^j, which
// integrates term by term to sum_j C(n,j) (-1)^j/(j+1) A^(n-j) delta_A^j C.

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pbo/ncpoly.hpp"
#include "pbo/serialize.hpp"

namespace pbo {

/// Largest generator power the derivative machinery accepts.
inline constexpr unsigned kMaxGeneratorPower = 64;

namespace detail {

inline void check_power(unsigned n) {
  if (n > kMaxGeneratorPower)
    throw std::domain_error("generator power " + std::to_string(n) + " exceeds supported maximum " +
                            std::to_string(kMaxGeneratorPower));
}

/// Word restricted to pairs [first, last), all other exponents zero.
inline Word slice(const Word& w, std::size_t first_pair, std::size_t last_pair) {
  Word out(w.size(), 0);
  for (std::size_t s = 2 * first_pair; s < 2 * last_pair; ++s) out[s] = w[s];
  return out;
}

}  // namespace detail

/// int_0^1 dl (g - l delta_g)^n arg, via the symmetrized sum.
template <Coefficient C>
NCPoly<C> lambda_integral_power(Generator g, unsigned n, const NCPoly<C>& arg) {
  detail::check_power(n);
  const auto& sys = arg.system();
  arg.check_generator(g);
  if (n == 0) return arg;
  using T = coeff_traits<C>;
  NCPoly<C> sum(sys);
  for (unsigned k = 0; k <= n; ++k) {
    auto left = NCPoly<C>::generator(sys, g, n - k);
    auto right = NCPoly<C>::generator(sys, g, k);
    sum += left * arg * right;
  }
  return T::ratio(1, static_cast<long long>(n) + 1) * sum;
}

/// Same integral evaluated from the binomial expansion of the integrand.
template <Coefficient C>
NCPoly<C> lambda_integral_by_binomial(Generator g, unsigned n, const NCPoly<C>& arg) {
  detail::check_power(n);
  const auto& sys = arg.system();
  arg.check_generator(g);
  using T = coeff_traits<C>;
  auto gen = NCPoly<C>::generator(sys, g);
  NCPoly<C> sum(sys);
  NCPoly<C> nested = arg;  // delta_g^j arg
  BigInt binom = 1;  // C(n, j)
  for (unsigned j = 0; j <= n && !nested.is_zero(); ++j) {
    auto weight = T::integer(binom) * T::ratio(j % 2 == 0 ? 1 : -1, static_cast<long long>(j) + 1);
    sum += weight * (NCPoly<C>::generator(sys, g, n - j) * nested);
    nested = commutator(gen, nested);
    binom = binom * (n - j) / (j + 1);
  }
  return sum;
}

/// Operator partial derivative  d f / d g {arg}  on the canonical normal form.
/// For each word ... g^e ... the contribution is
///   e * (factors left of g^e) * lambda_integral_power(g, e-1, arg) * (factors right of g^e).
template <Coefficient C>
NCPoly<C> partial_derivative(const NCPoly<C>& f, Generator g, const NCPoly<C>& arg) {
  NCPoly<C>::require_same_system(f, arg);
  f.check_generator(g);
  const auto& sys = f.system();
  const std::size_t n = sys->size();
  const std::size_t slot = g.slot();
  using T = coeff_traits<C>;
  NCPoly<C> out(sys);

  // A c-number argument commutes with everything: the plain power rule.
  const bool scalar_arg = arg.degree() <= 0;
  if (scalar_arg) {
    const C k = arg.constant_term();
    if (T::is_zero(k)) return out;
    for (const auto& [w, c] : f.terms()) {
      if (w[slot] == 0) continue;
      detail::check_power(w[slot]);
      Word dw = w;
      dw[slot] -= 1;
      out.add_term(std::move(dw), T::integer(BigInt(w[slot])) * c * k);
    }
    return out;
  }

  std::map<unsigned, NCPoly<C>> integrals;
  for (const auto& [w, c] : f.terms()) {
    const unsigned e = w[slot];
    if (e == 0) continue;
    detail::check_power(e);
    auto it = integrals.find(e);
    if (it == integrals.end()) it = integrals.emplace(e, lambda_integral_power(g, e - 1, arg)).first;

    Word prefix = detail::slice(w, 0, g.pair);
    Word suffix = detail::slice(w, g.pair + 1, n);
    if (g.role == Role::A) {
      suffix[2 * g.pair + 1] = w[2 * g.pair + 1];
    } else {
      prefix[2 * g.pair] = w[2 * g.pair];
    }
    auto left = NCPoly<C>::monomial(sys, std::move(prefix), T::integer(BigInt(e)) * c);
    auto right = NCPoly<C>::monomial(sys, std::move(suffix), T::one());
    out += left * it->second * right;
  }
  return out;
}

/// d f / d g {1}.
template <Coefficient C>
NCPoly<C> partial_derivative(const NCPoly<C>& f, Generator g) {
  return partial_derivative(f, g, NCPoly<C>::one(f.system()));
}

/// k-fold derivative with c-number argument: the ordinary power rule applied k times.
template <Coefficient C>
NCPoly<C> higher_partial(const NCPoly<C>& f, Generator g, unsigned order) {
  if (order == 0) throw std::invalid_argument("higher_partial: order must be at least 1");
  NCPoly<C> acc = f;
  for (unsigned i = 0; i < order && !acc.is_zero(); ++i) acc = partial_derivative(acc, g);
  return acc;
}

/// Derivative of a literal (not normal-ordered) word such as A^l B^m A^n B^o:
/// each block g^p contributes prefix * p * lambda_integral_power(g, p-1, arg) * suffix.
template <Coefficient C>
NCPoly<C> mixed_word_derivative(const SystemPtr<C>& sys, std::span<const Factor> word, Generator g,
                                const NCPoly<C>& arg) {
  using T = coeff_traits<C>;
  NCPoly<C> out(sys);
  for (std::size_t pos = 0; pos < word.size(); ++pos) {
    const auto& block = word[pos];
    if (!(block.gen == g) || block.power == 0) continue;
    detail::check_power(block.power);
    auto prefix = NCPoly<C>::from_factors(sys, word.subspan(0, pos), T::integer(BigInt(block.power)));
    auto suffix = NCPoly<C>::from_factors(sys, word.subspan(pos + 1));
    out += prefix * lambda_integral_power(g, block.power - 1, arg) * suffix;
  }
  return out;
}

/// Gateaux differential d f(g; direction) of a function of the single generator g.
template <Coefficient C>
NCPoly<C> gateaux(const NCPoly<C>& f, Generator g, const NCPoly<C>& direction) {
  if (!f.depends_only_on(g))
    throw std::invalid_argument("gateaux: polynomial depends on generators other than the differentiation variable");
  return partial_derivative(f, g, direction);
}

/// First-order coefficient in h of f(g + h*direction), with h a formal symbol.
/// Uses only multiplication, independent of the lambda-integral machinery.
inline Poly gateaux_by_expansion(const Poly& f, Generator g, const Poly& direction) {
  if (!f.depends_only_on(g))
    throw std::invalid_argument("gateaux_by_expansion: polynomial depends on other generators");
  Poly::require_same_system(f, direction);
  const auto& sys = f.system();
  const SymbolId h = SymbolTable::intern("gateaux_h");
  auto shifted = Poly::generator(sys, g) + ScalarPoly::symbol("gateaux_h") * direction;
  Poly expanded(sys);
  for (const auto& [w, c] : f.terms()) expanded += c * pow(shifted, w[g.slot()]);
  return expanded.map_coefficients([&](const ScalarPoly& c) { return c.coefficient(h, 1); });
}

/// Right-hand side of  B^n A^m - A^m B^n = m n (delta_B A) int (B - l delta_B)^(n-1) A^(m-1).
template <Coefficient C>
NCPoly<C> formula2_rhs(const SystemPtr<C>& sys, std::size_t pair, unsigned n, unsigned m) {
  if (n < 1 || m < 1) throw std::invalid_argument("formula2_rhs: n and m must be at least 1");
  using T = coeff_traits<C>;
  auto a = NCPoly<C>::generator(sys, gen_a(pair));
  auto b = NCPoly<C>::generator(sys, gen_b(pair));
  auto inner = lambda_integral_power(gen_b(pair), n - 1, NCPoly<C>::generator(sys, gen_a(pair), m - 1));
  return T::integer(BigInt(m) * n) * (delta(b, a) * inner);
}

/// Left-hand side B^n A^m - A^m B^n.
template <Coefficient C>
NCPoly<C> formula2_lhs(const SystemPtr<C>& sys, std::size_t pair, unsigned n, unsigned m) {
  auto bn = NCPoly<C>::generator(sys, gen_b(pair), n);
  auto am = NCPoly<C>::generator(sys, gen_a(pair), m);
  return bn * am - am * bn;
}

template <Coefficient C>
struct Formula3Result {
  bool holds;
  NCPoly<C> residual;
};

/// int (B - l delta_B)^(n-1) A^(m-1)  versus  int (A - l delta_A)^(m-1) B^(n-1).
template <Coefficient C>
Formula3Result<C> formula3_check(const SystemPtr<C>& sys, std::size_t pair, unsigned n, unsigned m) {
  if (n < 1 || m < 1) throw std::invalid_argument("formula3_check: n and m must be at least 1");
  auto lhs = lambda_integral_power(gen_b(pair), n - 1, NCPoly<C>::generator(sys, gen_a(pair), m - 1));
  auto rhs = lambda_integral_power(gen_a(pair), m - 1, NCPoly<C>::generator(sys, gen_b(pair), n - 1));
  auto residual = lhs - rhs;
  return {residual.is_zero(), std::move(residual)};
}

/// One line of the formula verification report.
struct FormulaCheck {
  std::string formula;  // "F1", "F2" or "F3"
  unsigned n = 0;
  std::optional<unsigned> m;
  bool residual_is_zero = false;
};

inline Json to_json(const FormulaCheck& c) {
  Json j{{"formula", c.formula}, {"n", c.n}, {"residual_is_zero", c.residual_is_zero}};
  j["m"] = c.m ? Json(*c.m) : Json(nullptr);
  return j;
}

/// Exact sweep of the three operator identities on one pair with formal [A,B] = c.
/// Formula 1 is checked with argument B (symmetrized sum versus the binomial
/// evaluation of the integral); Formulas 2 and 3 for every 1 <= n, m <= max_order.
inline std::vector<FormulaCheck> formula_sweep(unsigned max_order, const SystemRef& sys = formal_pair_system()) {
  std::vector<FormulaCheck> out;
  auto b = Poly::generator(sys, gen_b(0));
  for (unsigned n = 1; n <= max_order; ++n) {
    auto closed = lambda_integral_power(gen_a(0), n, b);
    auto integral = lambda_integral_by_binomial(gen_a(0), n, b);
    out.push_back({"F1", n, std::nullopt, (closed - integral).is_zero()});
  }
  for (unsigned n = 1; n <= max_order; ++n)
    for (unsigned m = 1; m <= max_order; ++m)
      out.push_back({"F2", n, m, (formula2_lhs(sys, 0, n, m) - formula2_rhs(sys, 0, n, m)).is_zero()});
  for (unsigned n = 1; n <= max_order; ++n)
    for (unsigned m = 1; m <= max_order; ++m) out.push_back({"F3", n, m, formula3_check(sys, 0, n, m).holds});
  return out;
}

}  // namespace pbo
