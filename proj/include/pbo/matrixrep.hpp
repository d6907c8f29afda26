#pragma once

// Truncated harmonic-oscillator representation of one canonical pair, used to
// re-check symbolic identities with dense complex matrices. Truncation breaks
// [x, p] = i hbar only in the last basis state; products of degree d spread
// that defect at most d levels inward, so residuals are measured on the
// leading (dim - margin) block.

#include <cmath>
#include <complex>
#include <map>
#include <random>
#include <span>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "pbo/dynamics.hpp"

namespace pbo {

using Matrix = Eigen::MatrixXcd;

struct CanonicalRep {
  int dim = 0;
  double hbar = 1.0;
  double mass = 1.0;
  double frequency = 1.0;
  Matrix x;
  Matrix p;

  Matrix identity() const { return Matrix::Identity(dim, dim); }
};

namespace detail {

/// Ladder construction without the size check; small sizes expose the corner defect.
inline CanonicalRep ladder_rep(int dim, double hbar, double mass, double frequency) {
  Matrix a = Matrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  Matrix ad = a.adjoint();
  const double sx = std::sqrt(hbar / (2.0 * mass * frequency));
  const double sp = std::sqrt(hbar * mass * frequency / 2.0);
  CanonicalRep rep{dim, hbar, mass, frequency, sx * (a + ad), std::complex<double>(0.0, sp) * (ad - a)};
  return rep;
}

}  // namespace detail

inline CanonicalRep build_rep(int dim, double hbar = 1.0, double mass = 1.0, double frequency = 1.0) {
  if (dim < 4) throw std::invalid_argument("build_rep: dim must be at least 4");
  if (!(hbar > 0.0) || !(mass > 0.0) || !(frequency > 0.0))
    throw std::invalid_argument("build_rep: hbar, mass and frequency must be positive");
  return detail::ladder_rep(dim, hbar, mass, frequency);
}

/// Keeps the first dim - margin basis states.
class InteriorProjector {
 public:
  InteriorProjector(int dim, int margin) : dim_(dim), margin_(margin) {
    if (margin < 0 || margin >= dim) throw std::invalid_argument("InteriorProjector: need 0 <= margin < dim");
  }
  int dim() const { return dim_; }
  int margin() const { return margin_; }
  int interior() const { return dim_ - margin_; }
  Matrix apply(const Matrix& m) const {
    if (m.rows() != dim_ || m.cols() != dim_) throw std::invalid_argument("InteriorProjector: size mismatch");
    return m.topLeftCorner(interior(), interior());
  }

 private:
  int dim_;
  int margin_;
};

/// ||P (lhs - rhs) P||_F / max(1, ||P lhs P||_F).
inline double interior_residual(const Matrix& lhs, const Matrix& rhs, const InteriorProjector& proj) {
  const double scale = std::max(1.0, proj.apply(lhs).norm());
  return proj.apply(lhs - rhs).norm() / scale;
}

namespace detail {

inline Bindings rep_bindings(const CanonicalRep& rep, const Bindings& extra) {
  Bindings b = extra;
  b["hbar"] = rep.hbar;
  return b;
}

inline void require_single_standard_pair(const System& sys, const CanonicalRep& rep, const Bindings& b) {
  if (sys.size() != 1) throw std::invalid_argument("matrix evaluation supports single-pair systems only");
  const auto c = sys.commutator(0).evaluate(b);
  if (std::abs(c - std::complex<double>(0.0, rep.hbar)) > 1e-12 * std::max(1.0, rep.hbar))
    throw std::invalid_argument("matrix evaluation requires [A, B] = i*hbar");
}

class PowerCache {
 public:
  explicit PowerCache(const Matrix& base) { powers_.emplace(0u, Matrix::Identity(base.rows(), base.cols())); powers_.emplace(1u, base); }
  const Matrix& get(unsigned n) {
    auto it = powers_.find(n);
    if (it != powers_.end()) return it->second;
    Matrix m = get(n - 1) * powers_.at(1);
    return powers_.emplace(n, std::move(m)).first->second;
  }

 private:
  std::map<unsigned, Matrix> powers_;
};

}  // namespace detail

/// Substitutes the matrices for A = x and B = p in each normal-ordered word.
inline Matrix eval(const Poly& f, const CanonicalRep& rep, const Bindings& bindings = {}) {
  const auto b = detail::rep_bindings(rep, bindings);
  detail::require_single_standard_pair(*f.system(), rep, b);
  detail::PowerCache xs(rep.x), ps(rep.p);
  Matrix out = Matrix::Zero(rep.dim, rep.dim);
  for (const auto& [w, c] : f.terms()) out += c.evaluate(b) * (xs.get(w[0]) * ps.get(w[1]));
  return out;
}

/// Literal product of generator powers, in the order given (no reordering).
inline Matrix eval_factors(std::span<const Factor> word, const CanonicalRep& rep) {
  Matrix out = rep.identity();
  for (const auto& f : word) {
    if (f.gen.pair != 0) throw std::invalid_argument("eval_factors: single-pair systems only");
    const Matrix& g = f.gen.role == Role::A ? rep.x : rep.p;
    for (unsigned k = 0; k < f.power; ++k) out = out * g;
  }
  return out;
}

inline double identity_residual(const Poly& lhs, const Poly& rhs, const CanonicalRep& rep,
                                const InteriorProjector& proj, const Bindings& bindings = {}) {
  return interior_residual(eval(lhs, rep, bindings), eval(rhs, rep, bindings), proj);
}

/// Numeric diffusion/Lindblad comparison on an arbitrary density matrix:
/// -(D/hbar^2) (p^2 rho - 2 p rho p + rho p^2)  versus  -1/2 (L^2 rho + rho L^2) + L rho L.
inline double lindblad_matrix_residual(const Matrix& rho, const CanonicalRep& rep, double D, JumpForm form) {
  if (rho.rows() != rep.dim || rho.cols() != rep.dim) throw std::invalid_argument("lindblad_matrix_residual: size mismatch");
  const Matrix& p = rep.p;
  const Matrix p2 = p * p;
  const double h = rep.hbar;
  Matrix lhs = -(D / (h * h)) * (p2 * rho - 2.0 * (p * rho * p) + rho * p2);
  const double k = form == JumpForm::Consistent ? std::sqrt(2.0 * D) / h : std::sqrt(2.0 * D / h);
  const Matrix L = k * p;
  const Matrix L2 = L * L;
  Matrix rhs = -0.5 * (L2 * rho + rho * L2) + L * rho * L;
  return (lhs - rhs).norm() / std::max(1.0, lhs.norm());
}

/// Hermitian test matrix with entries drawn from a seeded generator.
template <class Rng>
Matrix random_hermitian(int dim, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = {n(rng), n(rng)};
  return 0.5 * (m + m.adjoint());
}

}  // namespace pbo
