#pragma once

// Time evolution generated by a Hamiltonian: the quantum canonical equation
// df/dt = {f, H}, the Heisenberg form [f, H]/(i hbar), and three rewritings of
// the right-hand side for H = p^2/2m + V(x) on a single standard pair.

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pbo/poisson.hpp"

namespace pbo {

/// H = p^2 / (2 m) + sum_k potential[k] x^k on one canonical pair.
struct HamiltonianSpec {
  static constexpr std::size_t kMaxPotentialDegree = 8;

  ScalarPoly mass = ScalarPoly::symbol("m");
  std::vector<ScalarPoly> potential;  // potential[k] multiplies x^k
  std::size_t pair = 0;

  void validate() const {
    if (!mass.is_monomial()) throw std::invalid_argument("HamiltonianSpec: mass must be a single nonzero term");
    if (potential.size() > kMaxPotentialDegree + 1)
      throw std::invalid_argument("HamiltonianSpec: potential degree exceeds " + std::to_string(kMaxPotentialDegree));
  }

  /// Coefficients of the k-th derivative V^(k).
  std::vector<ScalarPoly> potential_derivative(unsigned k) const {
    std::vector<ScalarPoly> out;
    for (std::size_t j = k; j < potential.size(); ++j) {
      BigInt falling = 1;
      for (std::size_t t = 0; t < k; ++t) falling *= BigInt(j - t);
      out.push_back(ScalarPoly::term(Monomial{}, ComplexRational(Rational(falling))) * potential[j]);
    }
    return out;
  }

  /// sum_k coeffs[k] x^k as an element of the algebra.
  Poly potential_poly(const SystemRef& sys, const std::vector<ScalarPoly>& coeffs) const {
    Poly out(sys);
    for (std::size_t k = 0; k < coeffs.size(); ++k)
      if (!coeffs[k].is_zero()) out += coeffs[k] * Poly::generator(sys, gen_a(pair), static_cast<unsigned>(k));
    return out;
  }

  Poly kinetic(const SystemRef& sys) const {
    return (ScalarPoly::ratio(1, 2) * mass.inverse()) * Poly::generator(sys, gen_b(pair), 2);
  }

  Poly to_poly(const SystemRef& sys) const {
    validate();
    return kinetic(sys) + potential_poly(sys, potential);
  }
};

/// Quantum canonical equation: {f, H} summed over all pairs.
inline Poly qce_rhs(const Poly& f, const Poly& H) { return poisson_bracket_total(f, H); }

namespace detail {

/// Lowest power of hbar among all coefficients (0 if hbar does not occur).
inline int min_hbar_exponent(const Poly& f) {
  int lo = 0;
  for (const auto& [w, c] : f.terms()) lo = std::min(lo, c.min_exponent(hbar_id()));
  return lo;
}

inline Poly divide_by_i_hbar(const Poly& numerator, int input_floor) {
  auto out = i_hbar().inverse() * numerator;
  if (min_hbar_exponent(out) < std::min(0, input_floor))
    throw std::domain_error("division by i*hbar is not exact (non-standard commutation relations)");
  return out;
}

}  // namespace detail

/// [f, H] / (i hbar). Throws std::domain_error if the division leaves hbar in a
/// denominator that the inputs did not already carry, which happens exactly
/// when the commutators are not i hbar.
inline Poly heisenberg_rhs(const Poly& f, const Poly& H) {
  return detail::divide_by_i_hbar(commutator(f, H), std::min(detail::min_hbar_exponent(f), detail::min_hbar_exponent(H)));
}

/// dA_i/dt = {A_i, H}, dB_i/dt = {B_i, H} for every pair.
inline std::vector<std::pair<Poly, Poly>> canonical_velocities(const Poly& H) {
  const auto& sys = H.system();
  std::vector<std::pair<Poly, Poly>> out;
  for (std::size_t i = 0; i < sys->size(); ++i)
    out.emplace_back(qce_rhs(Poly::generator(sys, gen_a(i)), H), qce_rhs(Poly::generator(sys, gen_b(i)), H));
  return out;
}

/// sum_i df/dA_i {dA_i/dt} + df/dB_i {dB_i/dt}.
inline Poly chain_rule_rhs(const Poly& f, const std::vector<std::pair<Poly, Poly>>& velocities) {
  if (velocities.size() != f.system()->size())
    throw std::invalid_argument("chain_rule_rhs: one velocity pair per canonical pair required");
  Poly out(f.system());
  for (std::size_t i = 0; i < velocities.size(); ++i) {
    out += partial_derivative(f, gen_a(i), velocities[i].first);
    out += partial_derivative(f, gen_b(i), velocities[i].second);
  }
  return out;
}

/// Chain-rule time derivative minus {f, H}.
inline Poly chain_rule_check(const Poly& f, const Poly& H) {
  return chain_rule_rhs(f, canonical_velocities(H)) - qce_rhs(f, H);
}

namespace detail {

inline void require_standard_pair(const Poly& f, const HamiltonianSpec& spec, const char* who) {
  const auto& sys = f.system();
  if (spec.pair >= sys->size()) throw std::out_of_range(std::string(who) + ": pair index out of range");
  if (!(sys->commutator(spec.pair) == i_hbar()))
    throw std::invalid_argument(std::string(who) + ": requires [x, p] = i*hbar");
}

inline ScalarPoly inverse_factorial(unsigned n) {
  BigInt f = 1;
  for (unsigned k = 2; k <= n; ++k) f *= k;
  return ScalarPoly(ComplexRational(Rational(BigInt(1), f)));
}

}  // namespace detail

/// (p/m) df/dx - V'(x) df/dp - (1/2m) delta_p df/dx
///   - sum_{k>=1} V^(k+1)(x)/(k+1)! (-delta_x)^k df/dp,
/// built from inner derivations and c-number derivatives only.
inline Poly delta_expansion_rhs(const Poly& f, const HamiltonianSpec& spec) {
  spec.validate();
  detail::require_standard_pair(f, spec, "delta_expansion_rhs");
  const auto& sys = f.system();
  const auto x = Poly::generator(sys, gen_a(spec.pair));
  const auto p = Poly::generator(sys, gen_b(spec.pair));
  const auto inv_m = spec.mass.inverse();
  const auto fx = partial_derivative(f, gen_a(spec.pair));
  const auto fp = partial_derivative(f, gen_b(spec.pair));

  Poly out = inv_m * (p * fx);
  out -= spec.potential_poly(sys, spec.potential_derivative(1)) * fp;
  out -= (ScalarPoly::ratio(1, 2) * inv_m) * delta(p, fx);
  Poly nested = fp;
  for (unsigned k = 1; k + 1 < spec.potential.size() && !nested.is_zero(); ++k) {
    nested = -delta(x, nested);
    out -= detail::inverse_factorial(k + 1) * (spec.potential_poly(sys, spec.potential_derivative(k + 1)) * nested);
  }
  return out;
}

/// (p/m) df/dx + (i hbar / 2m) d^2f/dx^2 - sum_{k>=0} V^(k+1)(x)/(k+1)! (-i hbar)^k d^(k+1)f/dp^(k+1).
inline Poly derivative_expansion_rhs(const Poly& f, const HamiltonianSpec& spec) {
  spec.validate();
  detail::require_standard_pair(f, spec, "derivative_expansion_rhs");
  const auto& sys = f.system();
  const auto px = gen_a(spec.pair);
  const auto pp = gen_b(spec.pair);
  const auto p = Poly::generator(sys, pp);
  const auto inv_m = spec.mass.inverse();

  Poly out = inv_m * (p * partial_derivative(f, px));
  out += (ScalarPoly::ratio(1, 2) * i_hbar() * inv_m) * higher_partial(f, px, 2);
  ScalarPoly weight(1);  // (-i hbar)^k
  for (unsigned k = 0; k + 1 < spec.potential.size(); ++k) {
    auto dk = higher_partial(f, pp, k + 1);
    if (dk.is_zero()) break;
    out -= (detail::inverse_factorial(k + 1) * weight) *
           (spec.potential_poly(sys, spec.potential_derivative(k + 1)) * dk);
    weight *= -i_hbar();
  }
  return out;
}

/// [ (p - delta_p)^2/2m + V(x - delta_x) - p^2/2m - V(x) ] f, divided by i hbar.
/// The hyper-operators are applied literally: (g - delta_g) acts as u -> g u - [g, u].
inline Poly compact_form_rhs(const Poly& f, const HamiltonianSpec& spec) {
  spec.validate();
  detail::require_standard_pair(f, spec, "compact_form_rhs");
  const auto& sys = f.system();
  const auto x = Poly::generator(sys, gen_a(spec.pair));
  const auto p = Poly::generator(sys, gen_b(spec.pair));
  auto shifted = [](const Poly& g, const Poly& u) { return g * u - delta(g, u); };

  auto p_twice = shifted(p, shifted(p, f));
  Poly acc = (ScalarPoly::ratio(1, 2) * spec.mass.inverse()) * p_twice;
  Poly power = f;  // (x - delta_x)^k f
  for (std::size_t k = 0; k < spec.potential.size(); ++k) {
    if (k > 0) power = shifted(x, power);
    acc += spec.potential[k] * power;
  }
  acc -= spec.to_poly(sys) * f;
  return detail::divide_by_i_hbar(acc, std::min(detail::min_hbar_exponent(f), detail::min_hbar_exponent(spec.to_poly(sys))));
}

// Diffusion quantization: D d^2 rho/dx^2 = -(D/hbar^2) delta_p^2 rho, compared
// with the Lindblad dissipator built from L = k p.

enum class JumpForm {
  Consistent,  // L = sqrt(2D) p / hbar, so L^2 = 2D p^2 / hbar^2
  Published,   // L = sqrt(2D/hbar) p, so L^2 = 2D p^2 / hbar
};

inline ScalarPoly jump_scale_squared(const ScalarPoly& D, JumpForm form) {
  return form == JumpForm::Consistent ? ScalarPoly(2) * D * hbar().inverse() * hbar().inverse()
                                      : ScalarPoly(2) * D * hbar().inverse();
}

/// D d^2 rho / dx^2 via operator derivatives with c-number argument.
inline Poly diffusion_rhs(const Poly& rho, const ScalarPoly& D, std::size_t pair = 0) {
  return D * higher_partial(rho, gen_a(pair), 2);
}

/// -(D / hbar^2) delta_p^2 rho.
inline Poly diffusion_rhs_by_delta(const Poly& rho, const ScalarPoly& D, std::size_t pair = 0) {
  auto p = Poly::generator(rho.system(), gen_b(pair));
  return -(D * hbar().inverse() * hbar().inverse()) * delta_power(p, rho, 2);
}

/// -1/2 (L^2 rho + rho L^2) + L rho L with L = k p.
inline Poly lindblad_dissipator(const Poly& rho, const ScalarPoly& D, JumpForm form, std::size_t pair = 0) {
  auto p = Poly::generator(rho.system(), gen_b(pair));
  auto k2 = jump_scale_squared(D, form);
  auto p2 = p * p;
  return k2 * (p * rho * p - ScalarPoly::ratio(1, 2) * (p2 * rho + rho * p2));
}

struct LindbladSymbolicResult {
  Poly derivative_vs_delta;  // D rho'' - (-(D/hbar^2) delta_p^2 rho)
  Poly delta_vs_lindblad;    // -(D/hbar^2) delta_p^2 rho - dissipator
  bool exact() const { return derivative_vs_delta.is_zero() && delta_vs_lindblad.is_zero(); }
};

inline LindbladSymbolicResult lindblad_check(const Poly& rho, const ScalarPoly& D, JumpForm form,
                                             std::size_t pair = 0) {
  auto by_delta = diffusion_rhs_by_delta(rho, D, pair);
  return {diffusion_rhs(rho, D, pair) - by_delta, by_delta - lindblad_dissipator(rho, D, form, pair)};
}

}  // namespace pbo
