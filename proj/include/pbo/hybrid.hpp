#pragma once

// Two particles coupled by (alpha/2)(x - X)^2: (x, p) is a c-number pair and
// (X, P) obeys [X, P] = i hbar. Every dynamical variable stays linear in the
// initial variables (x0, p0, X0, P0, 1), so it is carried as a coefficient
// vector over that basis.

#include <array>
#include <cmath>
#include <complex>
#include <ostream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "pbo/dynamics.hpp"

namespace pbo {

struct HybridParams {
  double m = 1.0;
  double M = 2.0;
  double alpha = 1.0;
  double hbar = 1.0;

  double mu() const { return m * M / (m + M); }
  double omega() const { return std::sqrt(alpha / mu()); }

  void validate() const {
    if (!(m > 0.0) || !(M > 0.0)) throw std::invalid_argument("HybridParams: masses must be positive");
    if (!(hbar > 0.0)) throw std::invalid_argument("HybridParams: hbar must be positive");
    if (!(alpha >= 0.0)) throw std::invalid_argument("HybridParams: alpha must be non-negative");
  }
};

/// u_x x0 + u_p p0 + u_X X0 + u_P P0 + u_1.
template <class T>
struct LinearForm {
  enum Index { kx = 0, kp = 1, kX = 2, kP = 3, k1 = 4 };
  std::array<T, 5> u{};

  static LinearForm basis(Index i) {
    LinearForm o;
    o.u[i] = T(1);
    return o;
  }
  const T& operator[](Index i) const { return u[i]; }

  friend LinearForm operator+(LinearForm a, const LinearForm& b) {
    for (std::size_t i = 0; i < 5; ++i) a.u[i] += b.u[i];
    return a;
  }
  friend LinearForm operator-(LinearForm a, const LinearForm& b) {
    for (std::size_t i = 0; i < 5; ++i) a.u[i] -= b.u[i];
    return a;
  }
  friend LinearForm operator*(const T& k, LinearForm a) {
    for (auto& v : a.u) v *= k;
    return a;
  }
  friend bool operator==(const LinearForm&, const LinearForm&) = default;

  double max_abs_diff(const LinearForm& o) const
    requires std::is_floating_point_v<T>
  {
    double d = 0.0;
    for (std::size_t i = 0; i < 5; ++i) d = std::max(d, std::abs(u[i] - o.u[i]));
    return d;
  }
};

using LinearObservable = LinearForm<double>;

/// The eight tracked variables at one time.
template <class T>
struct BasicHybridState {
  LinearForm<T> x, p, X, P;
  LinearForm<T> XC, PC, q, pq;
};

using HybridState = BasicHybridState<double>;

namespace detail {

inline HybridState complete_from_particles(const LinearObservable& x, const LinearObservable& p,
                                           const LinearObservable& X, const LinearObservable& P,
                                           const HybridParams& prm) {
  const double s = prm.m + prm.M;
  return {x, p, X, P, (prm.m / s) * x + (prm.M / s) * X, p + P, x - X, (prm.M / s) * p - (prm.m / s) * P};
}

/// Centre-of-mass and relative solutions, then x = X_C + (M/s) q, X = X_C - (m/s) q,
/// p = p_q + (m/s) P_C, P = -p_q + (M/s) P_C with s = m + M.
/// cos_wt = cos(w t), sin_over_w = sin(w t)/w, sqrt_amu_sin = sqrt(alpha mu) sin(w t).
template <class T>
BasicHybridState<T> assemble_solution(const T& t, const T& m, const T& M, const T& cos_wt, const T& sin_over_w,
                                      const T& sqrt_amu_sin) {
  using F = LinearForm<T>;
  const T s = m + M;
  const T one(1);
  const auto x0 = F::basis(F::kx), p0 = F::basis(F::kp), X0 = F::basis(F::kX), P0 = F::basis(F::kP);
  BasicHybridState<T> st;
  st.XC = T(m / s) * x0 + T(M / s) * X0 + T(t / s) * (p0 + P0);
  st.PC = p0 + P0;
  st.q = cos_wt * (x0 - X0) + sin_over_w * (T(one / m) * p0 - T(one / M) * P0);
  st.pq = T(-sqrt_amu_sin) * (x0 - X0) + cos_wt * (T(M / s) * p0 - T(m / s) * P0);
  st.x = st.XC + T(M / s) * st.q;
  st.X = st.XC - T(m / s) * st.q;
  st.p = st.pq + T(m / s) * st.PC;
  st.P = T(M / s) * st.PC - st.pq;
  return st;
}

/// u_X v_P - u_P v_X; the commutator is i hbar times this.
template <class T>
T commutator_factor(const LinearForm<T>& u, const LinearForm<T>& v) {
  using F = LinearForm<T>;
  return T(u[F::kX] * v[F::kP] - u[F::kP] * v[F::kX]);
}

}  // namespace detail

/// Time derivative of an observable expressed over the current variables:
/// x' = p/m, p' = -alpha (x - X), X' = P/M, P' = alpha (x - X).
inline LinearObservable model_rhs(const LinearObservable& o, const HybridParams& prm) {
  using L = LinearObservable;
  LinearObservable d;
  const double force = o[L::kP] - o[L::kp];  // coefficient multiplying alpha (x - X)
  d.u[L::kx] = prm.alpha * force;
  d.u[L::kX] = -prm.alpha * force;
  d.u[L::kp] = o[L::kx] / prm.m;
  d.u[L::kP] = o[L::kX] / prm.M;
  d.u[L::k1] = 0.0;
  return d;
}

/// Closed-form solution; alpha = 0 uses the limits cos -> 1, sin(w t)/w -> t.
inline HybridState evolve_analytic(double t, const HybridParams& prm) {
  prm.validate();
  if (t < 0.0) throw std::invalid_argument("evolve_analytic: t must be non-negative");
  double c = 1.0, sin_over_w = t, sqrt_amu_sin = 0.0;
  if (prm.alpha > 0.0) {
    const double w = prm.omega();
    c = std::cos(w * t);
    sin_over_w = std::sin(w * t) / w;
    sqrt_amu_sin = std::sqrt(prm.alpha * prm.mu()) * std::sin(w * t);
  }
  return detail::assemble_solution(t, prm.m, prm.M, c, sin_over_w, sqrt_amu_sin);
}

struct Trajectory {
  std::vector<double> t;
  std::vector<HybridState> states;
};

/// Fixed-step RK4 on the coefficient vectors of x, p, X, P starting from the
/// identity at t = 0; the last step is shortened to land on t_end.
inline Trajectory integrate_numeric(double t_end, double dt, const HybridParams& prm, int sample_every = 1) {
  prm.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_numeric: dt must be positive");
  if (t_end < 0.0) throw std::invalid_argument("integrate_numeric: t_end must be non-negative");
  if (sample_every < 1) throw std::invalid_argument("integrate_numeric: sample_every must be positive");
  using L = LinearObservable;
  std::array<L, 4> y{L::basis(L::kx), L::basis(L::kp), L::basis(L::kX), L::basis(L::kP)};
  auto f = [&](const std::array<L, 4>& v) {
    std::array<L, 4> d;
    for (std::size_t i = 0; i < 4; ++i) d[i] = model_rhs(v[i], prm);
    return d;
  };
  auto axpy = [](const std::array<L, 4>& a, double h, const std::array<L, 4>& b) {
    std::array<L, 4> r;
    for (std::size_t i = 0; i < 4; ++i) r[i] = a[i] + h * b[i];
    return r;
  };

  Trajectory out;
  auto record = [&](double t) {
    out.t.push_back(t);
    out.states.push_back(detail::complete_from_particles(y[0], y[1], y[2], y[3], prm));
  };
  const auto n_steps = static_cast<long long>(std::ceil(t_end / dt - 1e-9));
  record(0.0);
  for (long long k = 0; k < n_steps; ++k) {
    const double t0 = static_cast<double>(k) * dt;
    const double h = std::min(dt, t_end - t0);
    auto k1 = f(y);
    auto k2 = f(axpy(y, h / 2, k1));
    auto k3 = f(axpy(y, h / 2, k2));
    auto k4 = f(axpy(y, h, k3));
    for (std::size_t i = 0; i < 4; ++i) y[i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if ((k + 1) % sample_every == 0 || k + 1 == n_steps) record(k + 1 == n_steps ? t_end : t0 + h);
  }
  return out;
}

/// [u, v] = i hbar (u_X v_P - u_P v_X).
inline std::complex<double> commutator_of(const LinearObservable& u, const LinearObservable& v,
                                          const HybridParams& prm) {
  return std::complex<double>(0.0, prm.hbar) * detail::commutator_factor(u, v);
}

/// The four commutators in closed form.
struct PairCommutators {
  std::complex<double> XC_PC, q_pq, q_XC, pq_PC;
};

inline PairCommutators closed_form_commutators(double t, const HybridParams& prm) {
  const std::complex<double> ih(0.0, prm.hbar);
  const double s = prm.m + prm.M;
  PairCommutators c{ih * (prm.M / s), ih * (prm.m / s), {}, {}};
  if (prm.alpha > 0.0) {
    const double w = prm.omega();
    c.q_XC = (-ih / s) * (t * std::cos(w * t) - std::sin(w * t) / w);
    c.pq_PC = ih * std::sqrt(prm.alpha * prm.mu()) * std::sin(w * t);
  }
  return c;
}

inline PairCommutators commutators_from(const HybridState& st, const HybridParams& prm) {
  return {commutator_of(st.XC, st.PC, prm), commutator_of(st.q, st.pq, prm), commutator_of(st.q, st.XC, prm),
          commutator_of(st.pq, st.PC, prm)};
}

struct GaussianInitialState {
  double x0 = 0.0, p0 = 0.0;
  double mean_X = 0.0, mean_P = 0.0;
  double sigma_XX = 0.5, sigma_PP = 0.5, sigma_XP = 0.0;

  void validate(double hbar) const {
    if (!(sigma_XX > 0.0) || !(sigma_PP > 0.0)) throw std::invalid_argument("GaussianInitialState: variances must be positive");
    if (sigma_XX * sigma_PP - sigma_XP * sigma_XP < hbar * hbar / 4.0 * (1.0 - 1e-12))
      throw std::invalid_argument("GaussianInitialState: covariance violates the uncertainty relation");
  }

  /// Symmetric moments plus the i hbar / 2 ordering term: <X0 P0> - <P0 X0> = i hbar.
  std::complex<double> second_moment(LinearObservable::Index a, LinearObservable::Index b, double hbar) const {
    using L = LinearObservable;
    if (a == L::k1) return first_moment(b);
    if (b == L::k1) return first_moment(a);
    const bool qa = a == L::kX || a == L::kP;
    const bool qb = b == L::kX || b == L::kP;
    if (!qa || !qb) return first_moment(a) * first_moment(b);
    if (a == L::kX && b == L::kX) return sigma_XX + mean_X * mean_X;
    if (a == L::kP && b == L::kP) return sigma_PP + mean_P * mean_P;
    const double sym = sigma_XP + mean_X * mean_P;
    return a == L::kX ? std::complex<double>(sym, hbar / 2.0) : std::complex<double>(sym, -hbar / 2.0);
  }

  double first_moment(LinearObservable::Index i) const {
    switch (i) {
      case LinearObservable::kx: return x0;
      case LinearObservable::kp: return p0;
      case LinearObservable::kX: return mean_X;
      case LinearObservable::kP: return mean_P;
      case LinearObservable::k1: return 1.0;
    }
    return 0.0;
  }
};

inline double expectation(const LinearObservable& o, const GaussianInitialState& s) {
  double v = 0.0;
  for (int i = 0; i < 5; ++i) v += o.u[static_cast<std::size_t>(i)] * s.first_moment(static_cast<LinearObservable::Index>(i));
  return v;
}

/// <u v> for two linear observables (in that operator order).
inline std::complex<double> expectation_product(const LinearObservable& u, const LinearObservable& v,
                                                const GaussianInitialState& s, double hbar) {
  std::complex<double> total{};
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      const double w = u.u[static_cast<std::size_t>(i)] * v.u[static_cast<std::size_t>(j)];
      if (w != 0.0)
        total += w * s.second_moment(static_cast<LinearObservable::Index>(i), static_cast<LinearObservable::Index>(j), hbar);
    }
  return total;
}

/// <p^2/2m + P^2/2M + (alpha/2)(x - X)^2> for the variables in `st`.
inline double energy(const HybridState& st, const HybridParams& prm, const GaussianInitialState& s) {
  auto rel = st.x - st.X;
  auto e = expectation_product(st.p, st.p, s, prm.hbar) / (2.0 * prm.m) +
           expectation_product(st.P, st.P, s, prm.hbar) / (2.0 * prm.M) +
           0.5 * prm.alpha * expectation_product(rel, rel, s, prm.hbar);
  return e.real();
}

/// The model's symbolic two-pair system at t = 0: pair 0 = (x, p) with c = 0,
/// pair 1 = (X, P) with c = i hbar.
inline SystemRef hybrid_system() {
  static const SystemRef sys = [] {
    std::vector<System::Pair> pairs{{"x", "p", ScalarPoly(0)}, {"X", "P", i_hbar()}};
    return System::create(std::move(pairs));
  }();
  return sys;
}

/// <f> for a polynomial of degree <= 2 in (x0, p0, X0, P0) on the hybrid system.
inline std::complex<double> expectation(const Poly& f, const GaussianInitialState& s, const Bindings& bindings) {
  if (f.system()->size() != 2 || !(*f.system() == *hybrid_system()))
    throw std::invalid_argument("expectation: polynomial must live on the hybrid system");
  if (f.degree() > 2) throw std::domain_error("expectation: only observables of degree <= 2 are supported");
  using L = LinearObservable;
  Bindings b = bindings;
  if (!b.contains("hbar")) throw std::invalid_argument("expectation: hbar must be bound");
  const double hbar = b.at("hbar").real();
  std::complex<double> total{};
  for (const auto& [w, c] : f.terms()) {
    std::vector<L::Index> letters;
    const L::Index order[4] = {L::kx, L::kp, L::kX, L::kP};
    for (std::size_t slot = 0; slot < 4; ++slot)
      for (unsigned k = 0; k < w[slot]; ++k) letters.push_back(order[slot]);
    std::complex<double> m = 1.0;
    if (letters.size() == 1) m = s.first_moment(letters[0]);
    if (letters.size() == 2) m = s.second_moment(letters[0], letters[1], hbar);
    total += c.evaluate(b) * m;
  }
  return total;
}

struct EnergyBracketReport {
  Poly hh_classical;       // {H, H}_(x, p)
  Poly hh_quantum;         // {H, H}_(X, P)
  Poly dHdx_of_dHdp;       // dH/dx {dH/dp}
  Poly dHdx_expected;      // (alpha / 2m)(p (x - X) + (x - X) p)
  std::array<Poly, 4> eom_residuals;  // {z, H} minus the model equations, z = x, p, X, P

  bool ok() const {
    bool all = hh_classical.is_zero() && hh_quantum.is_zero() && dHdx_of_dHdp == dHdx_expected;
    for (const auto& r : eom_residuals) all = all && r.is_zero();
    return all;
  }
};

/// Symbolic checks with m, M, alpha as formal symbols.
inline EnergyBracketReport energy_bracket_check() {
  const auto sys = hybrid_system();
  const auto m = ScalarPoly::symbol("m"), M = ScalarPoly::symbol("M"), alpha = ScalarPoly::symbol("alpha");
  const auto x = Poly::generator(sys, gen_a(0)), p = Poly::generator(sys, gen_b(0));
  const auto X = Poly::generator(sys, gen_a(1)), P = Poly::generator(sys, gen_b(1));
  const auto half = ScalarPoly::ratio(1, 2);
  const auto rel = x - X;
  const auto H = (half * m.inverse()) * (p * p) + (half * M.inverse()) * (P * P) + (half * alpha) * (rel * rel);

  EnergyBracketReport r{poisson_bracket(H, H, 0), poisson_bracket(H, H, 1),
                        partial_derivative(H, gen_a(0), partial_derivative(H, gen_b(0))),
                        (half * alpha * m.inverse()) * (p * rel + rel * p),
                        {Poly(sys), Poly(sys), Poly(sys), Poly(sys)}};
  r.eom_residuals[0] = qce_rhs(x, H) - m.inverse() * p;
  r.eom_residuals[1] = qce_rhs(p, H) + alpha * rel;
  r.eom_residuals[2] = qce_rhs(X, H) - M.inverse() * P;
  r.eom_residuals[3] = qce_rhs(P, H) - alpha * rel;
  return r;
}

struct EhrenfestReport {
  double max_residual = 0.0;         // over x, p, X, P equations
  double momentum_drift = 0.0;       // max |<P_C>(t) - <P_C>(0)|
};

/// Central differences of expectation values along the analytic solution,
/// compared with the classical equations evaluated on the expectations.
inline EhrenfestReport ehrenfest_check(const HybridParams& prm, const GaussianInitialState& s, double t_end,
                                       double dt, int samples = 50) {
  prm.validate();
  EhrenfestReport rep;
  const double pc0 = expectation(evolve_analytic(0.0, prm).PC, s);
  for (int k = 0; k <= samples; ++k) {
    const double t = dt + (t_end - dt) * k / samples;
    auto before = evolve_analytic(t - dt, prm), now = evolve_analytic(t, prm), after = evolve_analytic(t + dt, prm);
    auto rate = [&](auto member) {
      return (expectation(after.*member, s) - expectation(before.*member, s)) / (2.0 * dt);
    };
    const double ex = expectation(now.x, s), ep = expectation(now.p, s);
    const double eX = expectation(now.X, s), eP = expectation(now.P, s);
    const double r[4] = {rate(&HybridState::x) - ep / prm.m, rate(&HybridState::p) + prm.alpha * (ex - eX),
                         rate(&HybridState::X) - eP / prm.M, rate(&HybridState::P) - prm.alpha * (ex - eX)};
    for (double v : r) rep.max_residual = std::max(rep.max_residual, std::abs(v));
    rep.momentum_drift = std::max(rep.momentum_drift, std::abs(expectation(now.PC, s) - pc0));
  }
  return rep;
}

struct NonInteractingReport {
  bool free_motion_exact = true;   // alpha = 0 equals x0 + p0 t/m, p0, X0 + P0 t/M, P0
  bool commutators_exact = true;   // [x,p] = 0, [X,P] = i hbar, [x,X] = [p,P] = 0
  double continuity_error = 0.0;   // alpha = 1e-12 commutators versus the alpha = 0 values
  bool exact() const { return free_motion_exact && commutators_exact; }
};

/// The alpha = 0 branch is evaluated in exact rational arithmetic (masses and
/// sample times converted exactly from double), so "exact" means equality.
inline NonInteractingReport noninteracting_limit_check(HybridParams prm, double t_end = 10.0, int samples = 100) {
  prm.alpha = 0.0;
  prm.validate();
  using F = LinearForm<Rational>;
  const Rational m(prm.m), M(prm.M), zero(0), one(1);
  const auto x0 = F::basis(F::kx), p0 = F::basis(F::kp), X0 = F::basis(F::kX), P0 = F::basis(F::kP);
  HybridParams tiny = prm;
  tiny.alpha = 1e-12;
  NonInteractingReport rep;
  for (int k = 0; k <= samples; ++k) {
    const Rational t = Rational(t_end) * k / samples;
    auto st = detail::assemble_solution<Rational>(t, m, M, one, t, zero);
    rep.free_motion_exact = rep.free_motion_exact && st.x == x0 + Rational(t / m) * p0 && st.p == p0 &&
                            st.X == X0 + Rational(t / M) * P0 && st.P == P0;
    const Rational got[4] = {detail::commutator_factor(st.x, st.p), detail::commutator_factor(st.X, st.P),
                             detail::commutator_factor(st.x, st.X), detail::commutator_factor(st.p, st.P)};
    const Rational want[4] = {zero, one, zero, zero};
    for (int i = 0; i < 4; ++i) rep.commutators_exact = rep.commutators_exact && got[i] == want[i];

    auto near = evolve_analytic(t.convert_to<double>(), tiny);
    const double near_c[4] = {detail::commutator_factor(near.x, near.p), detail::commutator_factor(near.X, near.P),
                              detail::commutator_factor(near.x, near.X), detail::commutator_factor(near.p, near.P)};
    for (int i = 0; i < 4; ++i)
      rep.continuity_error =
          std::max(rep.continuity_error, prm.hbar * std::abs(near_c[i] - got[i].convert_to<double>()));
  }
  return rep;
}

/// CSV with header t,u_x,u_p,u_X,u_P,u_1 for one tracked variable.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr, LinearObservable HybridState::*member) {
  os << "t,u_x,u_p,u_X,u_P,u_1\n";
  os.precision(17);
  for (std::size_t i = 0; i < tr.t.size(); ++i) {
    os << tr.t[i];
    for (double v : (tr.states[i].*member).u) os << ',' << v;
    os << '\n';
  }
}

}  // namespace pbo
