#pragma once

// Wigner functions of grid wavefunctions, the Moyal evolution right-hand side
// for polynomial potentials, and a split-operator Schrodinger propagator that
// serves as the independent reference evolution.
//
// Grids are uniform and periodic for transforms. For an x grid of N points and
// spacing dx the Wigner p grid has N points and spacing pi hbar / (N dx), so the
// half-shifted autocorrelation lands on grid points and one FFT per row suffices.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

namespace pbo::wigner {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

/// origin + j * step for j = 0 .. n - 1.
struct Grid1D {
  int n = 0;
  double step = 0.0;
  double origin = 0.0;

  double at(int j) const { return origin + j * step; }
  double length() const { return n * step; }

  /// n points on [-half_width, half_width); n even puts 0 on the grid at j = n/2.
  static Grid1D centered(int n, double half_width) {
    if (n < 8 || (n & (n - 1)) != 0) throw std::invalid_argument("Grid1D: size must be a power of two >= 8");
    if (!(half_width > 0.0)) throw std::invalid_argument("Grid1D: half width must be positive");
    const double h = 2.0 * half_width / n;
    return {n, h, -half_width};
  }
};

/// V(x) = sum_k coeffs[k] x^k.
struct Potential {
  static constexpr std::size_t kMaxDegree = 8;
  std::vector<double> coeffs;

  void validate() const {
    if (coeffs.size() > kMaxDegree + 1)
      throw std::invalid_argument("Potential: degree exceeds " + std::to_string(kMaxDegree));
    for (double c : coeffs)
      if (!std::isfinite(c)) throw std::invalid_argument("Potential: coefficients must be finite");
  }

  double operator()(double x) const {
    double v = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * x + *it;
    return v;
  }

  Potential derivative(unsigned k = 1) const {
    Potential d;
    for (std::size_t j = k; j < coeffs.size(); ++j) {
      double falling = 1.0;
      for (std::size_t t = 0; t < k; ++t) falling *= static_cast<double>(j - t);
      d.coeffs.push_back(falling * coeffs[j]);
    }
    return d;
  }

  bool is_zero() const {
    return std::all_of(coeffs.begin(), coeffs.end(), [](double c) { return c == 0.0; });
  }

  static Potential harmonic(double mass, double omega) { return {{0.0, 0.0, 0.5 * mass * omega * omega}}; }
};

struct WavefunctionGrid {
  static constexpr double kNormTolerance = 1e-10;
  Grid1D grid;
  CVector psi;

  double norm_squared() const {
    double s = 0.0;
    for (const auto& a : psi) s += std::norm(a);
    return s * grid.step;
  }

  void normalize() {
    const double n = std::sqrt(norm_squared());
    if (!(n > 0.0)) throw std::invalid_argument("WavefunctionGrid: zero wavefunction");
    for (auto& a : psi) a /= n;
  }

  void validate() const {
    if (static_cast<int>(psi.size()) != grid.n) throw std::invalid_argument("WavefunctionGrid: size mismatch");
    if (std::abs(norm_squared() - 1.0) > kNormTolerance)
      throw std::invalid_argument("WavefunctionGrid: wavefunction is not normalized");
  }

  double density(int j) const { return std::norm(psi[j]); }
};

/// Rows index x, columns index p.
struct WignerGrid {
  Grid1D x;
  Grid1D p;
  double hbar = 1.0;
  Eigen::MatrixXd W;

  double integral() const { return W.sum() * x.step * p.step; }
  Eigen::VectorXd x_marginal() const { return W.rowwise().sum() * p.step; }
  Eigen::VectorXd p_marginal() const { return W.colwise().sum().transpose() * x.step; }
};

/// Momentum grid matching a Wigner transform on `x`.
inline Grid1D momentum_grid(const Grid1D& x, double hbar) {
  const double dp = std::numbers::pi * hbar / (x.n * x.step);
  return {x.n, dp, -0.5 * x.n * dp};
}

// ---------------------------------------------------------------- states

/// (2 pi sigma^2)^(-1/4) exp(-(x - x0)^2 / (4 sigma^2) + i p0 (x - x0) / hbar), renormalized on the grid.
inline WavefunctionGrid gaussian_state(const Grid1D& grid, double x0, double p0, double sigma, double hbar = 1.0) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_state: sigma must be positive");
  WavefunctionGrid w{grid, CVector(grid.n)};
  for (int j = 0; j < grid.n; ++j) {
    const double d = grid.at(j) - x0;
    w.psi[j] = std::exp(cplx(-d * d / (4.0 * sigma * sigma), p0 * d / hbar));
  }
  w.normalize();
  return w;
}

/// Coherent state of the oscillator (mass, omega): a gaussian of width sqrt(hbar / (2 m omega)).
inline WavefunctionGrid coherent_state(const Grid1D& grid, double x0, double p0, double mass, double omega,
                                       double hbar = 1.0) {
  return gaussian_state(grid, x0, p0, std::sqrt(hbar / (2.0 * mass * omega)), hbar);
}

/// n-th oscillator eigenstate via the normalized Hermite-function recursion.
inline WavefunctionGrid oscillator_eigenstate(const Grid1D& grid, int n, double mass, double omega, double hbar = 1.0) {
  if (n < 0) throw std::invalid_argument("oscillator_eigenstate: n must be non-negative");
  const double scale = std::sqrt(mass * omega / hbar);
  WavefunctionGrid w{grid, CVector(grid.n)};
  for (int j = 0; j < grid.n; ++j) {
    const double xi = scale * grid.at(j);
    double prev = 0.0;
    double cur = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * xi * xi);
    for (int k = 1; k <= n; ++k) {
      const double next = std::sqrt(2.0 / k) * xi * cur - std::sqrt((k - 1.0) / k) * prev;
      prev = cur;
      cur = next;
    }
    w.psi[j] = cur;
  }
  w.normalize();
  return w;
}

// ---------------------------------------------------------------- transform

/// W(x_j, p_k) = dx / (pi hbar) sum_n psi*(x_{j+n}) psi(x_{j-n}) exp(2 i p_k n dx / hbar),
/// with psi = 0 off the grid. The x marginal is exactly |psi|^2.
inline WignerGrid wigner_transform(const WavefunctionGrid& w, double hbar = 1.0) {
  w.validate();
  if (!(hbar > 0.0)) throw std::invalid_argument("wigner_transform: hbar must be positive");
  const int N = w.grid.n;
  const int half = N / 2;
  WignerGrid out{w.grid, momentum_grid(w.grid, hbar), hbar, Eigen::MatrixXd(N, N)};
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);
  CVector g(N), spec(N);
  const double pref = w.grid.step / (std::numbers::pi * hbar);
  for (int j = 0; j < N; ++j) {
    for (int n = -half; n < half; ++n) {
      const int a = j + n, b = j - n;
      const cplx v = (a >= 0 && a < N && b >= 0 && b < N) ? std::conj(w.psi[a]) * w.psi[b] : cplx{};
      g[(n + N) % N] = v;
    }
    fft.inv(spec, g);  // sum_n g_n exp(+2 pi i k n / N)
    for (int k = -half; k < half; ++k) {
      // p = k dp; the phase at p_k is exp(2 pi i k n / N)
      const cplx s = spec[(k + N) % N];
      out.W(j, k + half) = pref * s.real();
    }
  }
  return out;
}

// ---------------------------------------------------------------- derivatives

enum class DerivativeScheme { Spectral, FiniteDifference8 };
enum class Axis { X, P };

namespace detail {

/// order-th derivative of a periodic sequence with spacing h.
inline void spectral_derivative(CVector& v, double h, int order, Eigen::FFT<double>& fft) {
  const int N = static_cast<int>(v.size());
  CVector spec;
  fft.fwd(spec, v);
  const double k0 = 2.0 * std::numbers::pi / (N * h);
  for (int k = 0; k < N; ++k) {
    if (2 * k == N && order % 2 == 1) {
      spec[k] = 0.0;
      continue;
    }
    const double kappa = k0 * (2 * k <= N ? k : k - N);
    spec[k] *= std::pow(cplx(0.0, kappa), order);
  }
  fft.inv(v, spec);
}

/// 8th-order central first derivative, periodic, applied `order` times.
inline void fd8_derivative(CVector& v, double h, int order) {
  static constexpr double c[4] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
  const int N = static_cast<int>(v.size());
  CVector out(N);
  for (int r = 0; r < order; ++r) {
    for (int j = 0; j < N; ++j) {
      cplx s{};
      for (int m = 1; m <= 4; ++m) s += c[m - 1] * (v[(j + m) % N] - v[(j - m + N) % N]);
      out[j] = s / h;
    }
    v.swap(out);
  }
}

}  // namespace detail

/// order-th derivative of W along one axis.
inline Eigen::MatrixXd differentiate(const WignerGrid& g, Axis axis, int order,
                                     DerivativeScheme scheme = DerivativeScheme::Spectral) {
  if (order < 0) throw std::invalid_argument("differentiate: order must be non-negative");
  Eigen::MatrixXd out(g.W.rows(), g.W.cols());
  Eigen::FFT<double> fft;
  const bool along_p = axis == Axis::P;
  const int lines = static_cast<int>(along_p ? g.W.rows() : g.W.cols());
  const int len = static_cast<int>(along_p ? g.W.cols() : g.W.rows());
  const double h = along_p ? g.p.step : g.x.step;
  CVector v(len);
  for (int l = 0; l < lines; ++l) {
    for (int i = 0; i < len; ++i) v[i] = along_p ? g.W(l, i) : g.W(i, l);
    if (scheme == DerivativeScheme::Spectral)
      detail::spectral_derivative(v, h, order, fft);
    else
      detail::fd8_derivative(v, h, order);
    for (int i = 0; i < len; ++i) (along_p ? out(l, i) : out(i, l)) = v[i].real();
  }
  return out;
}

// ---------------------------------------------------------------- Moyal right-hand side

struct MoyalOptions {
  DerivativeScheme scheme = DerivativeScheme::Spectral;
};

/// dW/dt = drift + force + sum_l quantum[l - 1].
struct MoyalTerms {
  Eigen::MatrixXd drift;                 // -(p/m) dW/dx
  Eigen::MatrixXd force;                 // V'(x) dW/dp
  std::vector<Eigen::MatrixXd> quantum;  // V^(2l+1)/(2l+1)! (-hbar^2/4)^l d^(2l+1)W/dp^(2l+1), l = 1, 2, ...

  Eigen::MatrixXd total() const {
    Eigen::MatrixXd t = drift + force;
    for (const auto& q : quantum) t += q;
    return t;
  }
};

inline MoyalTerms moyal_terms(const WignerGrid& g, const Potential& V, double mass, const MoyalOptions& opt = {}) {
  V.validate();
  if (!(mass > 0.0)) throw std::invalid_argument("moyal_rhs: mass must be positive");
  const int nx = static_cast<int>(g.W.rows()), np = static_cast<int>(g.W.cols());
  MoyalTerms t;
  t.drift = differentiate(g, Axis::X, 1, opt.scheme);
  for (int k = 0; k < np; ++k) t.drift.col(k) *= -g.p.at(k) / mass;

  const auto v1 = V.derivative(1);
  t.force = differentiate(g, Axis::P, 1, opt.scheme);
  for (int j = 0; j < nx; ++j) t.force.row(j) *= v1(g.x.at(j));

  double factorial = 1.0;  // (2l+1)!
  double weight = 1.0;     // (-hbar^2/4)^l
  for (unsigned l = 1; 2 * l + 1 < V.coeffs.size(); ++l) {
    factorial *= (2.0 * l) * (2.0 * l + 1.0);
    weight *= -g.hbar * g.hbar / 4.0;
    const auto vk = V.derivative(2 * l + 1);
    if (vk.is_zero()) continue;
    Eigen::MatrixXd term = differentiate(g, Axis::P, static_cast<int>(2 * l + 1), opt.scheme);
    for (int j = 0; j < nx; ++j) term.row(j) *= vk(g.x.at(j)) / factorial * weight;
    t.quantum.push_back(std::move(term));
  }
  return t;
}

inline Eigen::MatrixXd moyal_rhs(const WignerGrid& g, const Potential& V, double mass, const MoyalOptions& opt = {}) {
  return moyal_terms(g, V, mass, opt).total();
}

// ---------------------------------------------------------------- Schrodinger reference

/// Strang splitting exp(-iV dt/2h) exp(-iT dt/h) exp(-iV dt/2h) on a periodic grid.
/// The kinetic phase at the highest wavenumber must stay below pi per step.
class SplitOperator {
 public:
  SplitOperator(const Grid1D& grid, const Potential& V, double mass, double hbar, double dt)
      : grid_(grid), half_potential_(grid.n), kinetic_(grid.n) {
    V.validate();
    if (!(mass > 0.0) || !(hbar > 0.0)) throw std::invalid_argument("SplitOperator: mass and hbar must be positive");
    if (!std::isfinite(dt)) throw std::invalid_argument("SplitOperator: dt must be finite");
    const double kmax = std::numbers::pi / grid.step;
    if (std::abs(dt) * hbar * kmax * kmax / (2.0 * mass) > std::numbers::pi)
      throw std::invalid_argument("SplitOperator: dt too large for the grid (kinetic phase exceeds pi)");
    for (int j = 0; j < grid.n; ++j) half_potential_[j] = std::exp(cplx(0.0, -0.5 * V(grid.at(j)) * dt / hbar));
    const double k0 = 2.0 * std::numbers::pi / grid.length();
    for (int k = 0; k < grid.n; ++k) {
      const double kappa = k0 * (2 * k <= grid.n ? k : k - grid.n);
      kinetic_[k] = std::exp(cplx(0.0, -hbar * kappa * kappa * dt / (2.0 * mass)));
    }
  }

  void step(WavefunctionGrid& w) {
    if (w.grid.n != grid_.n || w.grid.step != grid_.step) throw std::invalid_argument("SplitOperator: grid mismatch");
    for (int j = 0; j < grid_.n; ++j) w.psi[j] *= half_potential_[j];
    fft_.fwd(spec_, w.psi);
    for (int k = 0; k < grid_.n; ++k) spec_[k] *= kinetic_[k];
    fft_.inv(w.psi, spec_);
    for (int j = 0; j < grid_.n; ++j) w.psi[j] *= half_potential_[j];
  }

 private:
  Grid1D grid_;
  CVector half_potential_;
  CVector kinetic_;
  CVector spec_;
  Eigen::FFT<double> fft_;
};

inline WavefunctionGrid schrodinger_step(WavefunctionGrid w, const Potential& V, double mass, double hbar, double dt) {
  SplitOperator(w.grid, V, mass, hbar, dt).step(w);
  return w;
}

inline WavefunctionGrid schrodinger_evolve(WavefunctionGrid w, const Potential& V, double mass, double hbar, double dt,
                                           int steps) {
  if (steps < 0) throw std::invalid_argument("schrodinger_evolve: steps must be non-negative");
  SplitOperator op(w.grid, V, mass, hbar, dt);
  for (int s = 0; s < steps; ++s) op.step(w);
  return w;
}

inline double mean_position(const WavefunctionGrid& w) {
  double s = 0.0;
  for (int j = 0; j < w.grid.n; ++j) s += w.grid.at(j) * w.density(j);
  return s * w.grid.step;
}

// ---------------------------------------------------------------- consistency

struct ResolutionReport {
  double edge_amplitude = 0.0;       // max |psi| in the outer 1/16 of the x grid, relative to max |psi|
  double momentum_tail = 0.0;        // spectral weight beyond the Wigner p range, relative to total
  bool resolved(double tol = 1e-8) const { return edge_amplitude < tol && momentum_tail < tol; }
};

/// Whether `w` fits both the x grid and the Wigner p range (|p| < pi hbar / (2 dx)).
inline ResolutionReport resolution(const WavefunctionGrid& w) {
  const int N = w.grid.n, edge = std::max(1, N / 16);
  double peak = 0.0, border = 0.0;
  for (int j = 0; j < N; ++j) {
    const double a = std::abs(w.psi[j]);
    peak = std::max(peak, a);
    if (j < edge || j >= N - edge) border = std::max(border, a);
  }
  Eigen::FFT<double> fft;
  CVector spec;
  fft.fwd(spec, w.psi);
  double total = 0.0, tail = 0.0;
  for (int k = 0; k < N; ++k) {
    const int kk = 2 * k <= N ? k : k - N;
    const double e = std::norm(spec[k]);
    total += e;
    if (std::abs(kk) >= N / 4) tail += e;
  }
  return {peak > 0.0 ? border / peak : 1.0, total > 0.0 ? tail / total : 1.0};
}

struct ConsistencyReport {
  double residual = 0.0;           // ||dW/dt - rhs||_2 / ||rhs||_2
  double absolute_residual = 0.0;  // max |dW/dt - rhs|
  double rhs_norm = 0.0;           // ||rhs||_2 over the grid
  std::vector<double> quantum_term_norms;  // ||quantum[l-1]||_2
  bool resolved = false;
  ResolutionReport resolution;
};

/// Central difference of W along the Schrodinger evolution, (W(t+dt) - W(t-dt)) / 2dt,
/// against moyal_rhs(W(t)). Coarse grids are reported through `resolved`, not rejected.
inline ConsistencyReport consistency_check(const WavefunctionGrid& psi, const Potential& V, double mass, double hbar,
                                           double dt, const MoyalOptions& opt = {}) {
  if (!(dt > 0.0)) throw std::invalid_argument("consistency_check: dt must be positive");
  const auto fwd = schrodinger_step(psi, V, mass, hbar, dt);
  const auto bwd = schrodinger_step(psi, V, mass, hbar, -dt);
  const auto W0 = wigner_transform(psi, hbar);
  const Eigen::MatrixXd dWdt = (wigner_transform(fwd, hbar).W - wigner_transform(bwd, hbar).W) / (2.0 * dt);
  const auto terms = moyal_terms(W0, V, mass, opt);
  const Eigen::MatrixXd rhs = terms.total();
  const double cell = std::sqrt(W0.x.step * W0.p.step);

  ConsistencyReport r;
  r.rhs_norm = rhs.norm() * cell;
  r.absolute_residual = (dWdt - rhs).cwiseAbs().maxCoeff();
  r.residual = r.rhs_norm > 0.0 ? (dWdt - rhs).norm() * cell / r.rhs_norm : (dWdt - rhs).norm() * cell;
  for (const auto& q : terms.quantum) r.quantum_term_norms.push_back(q.norm() * cell);
  r.resolution = resolution(psi);
  r.resolved = r.resolution.resolved() && resolution(fwd).resolved() && resolution(bwd).resolved();
  return r;
}

/// Row-major CSV with header "x,p,W".
inline void write_wigner_csv(std::ostream& os, const WignerGrid& g) {
  os << "x,p,W\n";
  os.precision(17);
  for (int j = 0; j < g.x.n; ++j)
    for (int k = 0; k < g.p.n; ++k) os << g.x.at(j) << ',' << g.p.at(k) << ',' << g.W(j, k) << '\n';
}

}  // namespace pbo::wigner
