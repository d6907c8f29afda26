#pragma once

// Poisson bracket operator on normal-ordered polynomials:
//   {f, g}_i = df/dA_i {dg/dB_i} - df/dB_i {dg/dA_i}
// and its correspondence with the commutator, [f, g] = sum_i c_i {f, g}_i.

#include <stdexcept>
#include <string>
#include <vector>

#include "pbo/opderiv.hpp"
#include "pbo/serialize.hpp"

namespace pbo {

template <Coefficient C>
NCPoly<C> poisson_bracket(const NCPoly<C>& f, const NCPoly<C>& g, std::size_t pair) {
  NCPoly<C>::require_same_system(f, g);
  if (pair >= f.system()->size())
    throw std::out_of_range("poisson_bracket: pair index " + std::to_string(pair) + " out of range");
  auto a = gen_a(pair);
  auto b = gen_b(pair);
  return partial_derivative(f, a, partial_derivative(g, b)) - partial_derivative(f, b, partial_derivative(g, a));
}

template <Coefficient C>
NCPoly<C> poisson_bracket_total(const NCPoly<C>& f, const NCPoly<C>& g) {
  NCPoly<C>::require_same_system(f, g);
  NCPoly<C> out(f.system());
  for (std::size_t i = 0; i < f.system()->size(); ++i) out += poisson_bracket(f, g, i);
  return out;
}

/// [f, g] - sum_i c_i {f, g}_i; zero whenever the correspondence holds.
template <Coefficient C>
NCPoly<C> correspondence_residual(const NCPoly<C>& f, const NCPoly<C>& g) {
  NCPoly<C>::require_same_system(f, g);
  const auto& sys = f.system();
  NCPoly<C> out = commutator(f, g);
  for (std::size_t i = 0; i < sys->size(); ++i) out -= sys->commutator(i) * poisson_bracket(f, g, i);
  return out;
}

struct LawResult {
  std::string law;  // "linearity", "linearity_right", "leibniz", "antisymmetry", "jacobi"
  Poly residual;
  bool asserted = true;  // false: exploratory, the law is not expected to hold
  std::string inputs_digest;

  bool residual_zero() const { return residual.is_zero(); }
  bool ok() const { return !asserted || residual_zero(); }
};

inline Json to_json(const LawResult& r) {
  return {{"law", r.law},
          {"inputs_digest", r.inputs_digest},
          {"residual_zero", r.residual_zero()},
          {"residual_terms", r.residual.size()},
          {"mode", r.asserted ? "asserted" : "exploratory"}};
}

/// True when every c_i equals one common nonzero value, which includes c_i = i hbar.
inline bool uniform_commutators(const System& sys) {
  if (sys.size() == 0 || sys.commutator(0).is_zero()) return false;
  return sys.all_commutators_equal(sys.commutator(0));
}

/// Residuals of the bracket laws on (f, g, h). Linearity uses the scalars alpha, beta.
/// Antisymmetry and Jacobi are asserted only for uniform nonzero commutators.
inline std::vector<LawResult> law_checks(const Poly& f, const Poly& g, const Poly& h,
                                         const ScalarPoly& alpha = ScalarPoly(2),
                                         const ScalarPoly& beta = ScalarPoly::ratio(-1, 3)) {
  Poly::require_same_system(f, g);
  Poly::require_same_system(f, h);
  const std::string tag =
      digest(to_json(f).dump() + "|" + to_json(g).dump() + "|" + to_json(h).dump() + "|" + to_json(alpha).dump() +
             "|" + to_json(beta).dump());
  auto pb = [](const Poly& u, const Poly& v) { return poisson_bracket_total(u, v); };
  const bool uniform = uniform_commutators(*f.system());

  std::vector<LawResult> out;
  out.push_back({"linearity", pb(alpha * f + beta * g, h) - (alpha * pb(f, h) + beta * pb(g, h)), true, tag});
  out.push_back({"linearity_right", pb(h, alpha * f + beta * g) - (alpha * pb(h, f) + beta * pb(h, g)), true, tag});
  out.push_back({"leibniz", pb(f * g, h) - (pb(f, h) * g + f * pb(g, h)), true, tag});
  out.push_back({"antisymmetry", pb(f, g) + pb(g, f), uniform, tag});
  out.push_back({"jacobi", pb(f, pb(g, h)) + pb(g, pb(h, f)) + pb(h, pb(f, g)), uniform, tag});
  return out;
}

}  // namespace pbo
