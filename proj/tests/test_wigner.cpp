#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "pbo/wigner.hpp"

namespace pbo::wigner {
namespace {

constexpr double kPi = std::numbers::pi;

// Closed forms used as oracles.

double gaussian_wigner(double x, double p, double x0, double p0, double sigma, double hbar) {
  const double u = x - x0, v = p - p0;
  return std::exp(-u * u / (2 * sigma * sigma) - 2 * sigma * sigma * v * v / (hbar * hbar)) / (kPi * hbar);
}

// Free spreading of (2 pi sigma^2)^(-1/4) exp(-(x-x0)^2/4sigma^2 + i p0 (x-x0)/hbar).
cplx free_gaussian(double x, double t, double x0, double p0, double sigma, double mass, double hbar) {
  const cplx s(1.0, hbar * t / (2 * mass * sigma * sigma));
  const double d = x - x0 - p0 * t / mass;
  return std::pow(2 * kPi * sigma * sigma, -0.25) / std::sqrt(s) *
         std::exp(-d * d / (4 * sigma * sigma * s) + cplx(0.0, p0 * (x - x0) / hbar - p0 * p0 * t / (2 * mass * hbar)));
}

// Momentum density by direct summation, no FFT.
double momentum_density(const WavefunctionGrid& w, double p, double hbar) {
  cplx s{};
  for (int j = 0; j < w.grid.n; ++j) s += w.psi[j] * std::exp(cplx(0.0, -p * w.grid.at(j) / hbar));
  return std::norm(s * w.grid.step) / (2 * kPi * hbar);
}

WavefunctionGrid random_superposition(const Grid1D& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(-3.0, 3.0), mom(-2.0, 2.0), wid(0.6, 1.2), amp(-1.0, 1.0);
  WavefunctionGrid w{g, CVector(g.n)};
  for (int c = 0; c < 3; ++c) {
    const auto part = gaussian_state(g, pos(rng), mom(rng), wid(rng));
    const cplx a(amp(rng), amp(rng));
    for (int j = 0; j < g.n; ++j) w.psi[j] += a * part.psi[j];
  }
  w.normalize();
  return w;
}

double sup_norm(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

TEST(Grid, Validation) {
  EXPECT_THROW(Grid1D::centered(100, 10.0), std::invalid_argument);
  EXPECT_THROW(Grid1D::centered(256, 0.0), std::invalid_argument);
  auto g = Grid1D::centered(256, 10.0);
  EXPECT_DOUBLE_EQ(g.at(128), 0.0);
  auto pg = momentum_grid(g, 1.0);
  EXPECT_DOUBLE_EQ(pg.at(128), 0.0);
  EXPECT_NEAR(pg.step, kPi / 20.0, 1e-15);
}

TEST(Potential, Derivatives) {
  Potential V{{1.0, 2.0, 3.0, 0.0, 0.25}};
  EXPECT_DOUBLE_EQ(V(2.0), 1 + 4 + 12 + 4);
  EXPECT_EQ(V.derivative(3).coeffs, (std::vector<double>{0.0, 6.0}));
  EXPECT_TRUE(V.derivative(5).is_zero());
  EXPECT_THROW(Potential{std::vector<double>(10, 1.0)}.validate(), std::invalid_argument);
}

TEST(Transform, GaussianMatchesClosedForm) {
  auto g = Grid1D::centered(256, 10.0);
  for (double hbar : {1.0, 0.5}) {
    const double x0 = 0.7, p0 = -0.4, sigma = 0.9;
    auto W = wigner_transform(gaussian_state(g, x0, p0, sigma, hbar), hbar);
    double err = 0.0;
    for (int j = 0; j < g.n; ++j)
      for (int k = 0; k < g.n; ++k)
        err = std::max(err, std::abs(W.W(j, k) - gaussian_wigner(g.at(j), W.p.at(k), x0, p0, sigma, hbar)));
    EXPECT_LT(err, 1e-10) << "hbar=" << hbar;
    EXPECT_GT(W.W.minCoeff(), -1e-12);  // FFT rounding on exponentially small tails
  }
}

TEST(Transform, MarginalsAndNormalization) {
  auto g = Grid1D::centered(256, 12.0);
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 5; ++trial) {
    auto psi = random_superposition(g, rng);
    auto W = wigner_transform(psi);
    EXPECT_NEAR(W.integral(), 1.0, 1e-8);
    auto mx = W.x_marginal();
    for (int j = 0; j < g.n; ++j) ASSERT_NEAR(mx[j], psi.density(j), 1e-8);
    auto mp = W.p_marginal();
    for (int k = 0; k < g.n; k += 3) ASSERT_NEAR(mp[k], momentum_density(psi, W.p.at(k), 1.0), 1e-8);
  }
}

TEST(Transform, TranslationShiftsRows) {
  auto g = Grid1D::centered(256, 10.0);
  const int shift = 13;
  auto W0 = wigner_transform(gaussian_state(g, 0.0, 0.5, 0.8));
  auto W1 = wigner_transform(gaussian_state(g, shift * g.step, 0.5, 0.8));
  double err = 0.0;
  for (int j = shift; j < g.n; ++j) err = std::max(err, (W1.W.row(j) - W0.W.row(j - shift)).cwiseAbs().maxCoeff());
  EXPECT_LT(err, 1e-12);
}

TEST(Transform, FirstExcitedStateIsNegativeAtOrigin) {
  auto g = Grid1D::centered(256, 10.0);
  auto W = wigner_transform(oscillator_eigenstate(g, 1, 1.0, 1.0));
  const double w00 = W.W(g.n / 2, g.n / 2);
  EXPECT_LT(w00, 0.0);
  EXPECT_NEAR(w00, -1.0 / kPi, 1e-10);
}

TEST(Transform, RejectsUnnormalizedInput) {
  auto g = Grid1D::centered(64, 8.0);
  auto psi = gaussian_state(g, 0.0, 0.0, 1.0);
  psi.psi[10] *= 1.01;
  EXPECT_THROW(wigner_transform(psi), std::invalid_argument);
}

TEST(Moyal, StationaryEigenstates) {
  auto g = Grid1D::centered(256, 10.0);
  const double mass = 1.3, omega = 0.8;
  auto V = Potential::harmonic(mass, omega);
  for (int n : {0, 1, 2}) {
    auto W = wigner_transform(oscillator_eigenstate(g, n, mass, omega));
    EXPECT_LT(sup_norm(moyal_rhs(W, V, mass)), 1e-6) << "n=" << n;
  }
}

TEST(Moyal, QuadraticPotentialIsClassicalLiouville) {
  auto g = Grid1D::centered(256, 10.0);
  const double mass = 2.0, x0 = 0.5, p0 = 1.0, sigma = 0.8;
  Potential V{{0.3, -0.2, 0.7}};
  auto W = wigner_transform(gaussian_state(g, x0, p0, sigma));
  auto t = moyal_terms(W, V, mass);
  EXPECT_TRUE(t.quantum.empty());
  const Eigen::MatrixXd rhs = t.total();
  double err = 0.0;
  for (int j = 0; j < g.n; ++j)
    for (int k = 0; k < g.n; ++k) {
      const double x = g.at(j), p = W.p.at(k), w = gaussian_wigner(x, p, x0, p0, sigma, 1.0);
      const double dx = -(x - x0) / (sigma * sigma) * w, dp = -4 * sigma * sigma * (p - p0) * w;
      err = std::max(err, std::abs(rhs(j, k) - (-(p / mass) * dx + V.derivative()(x) * dp)));
    }
  EXPECT_LT(err, 1e-9);
}

// For V = x^4/4 the l = 1 term is (6x/3!)(-hbar^2/4) d^3W/dp^3 = -(hbar^2 x / 4) d^3W/dp^3.
TEST(Moyal, QuarticFirstQuantumTerm) {
  auto g = Grid1D::centered(256, 10.0);
  const double hbar = 0.7, x0 = 0.4, p0 = 0.2, sigma = 0.9;
  Potential V{{0.0, 0.0, 0.0, 0.0, 0.25}};
  auto W = wigner_transform(gaussian_state(g, x0, p0, sigma, hbar), hbar);
  auto t = moyal_terms(W, V, 1.0);
  ASSERT_EQ(t.quantum.size(), 1u);
  const double a = 2 * sigma * sigma / (hbar * hbar);
  double err = 0.0, scale = 0.0;
  for (int j = 0; j < g.n; ++j)
    for (int k = 0; k < g.n; ++k) {
      const double x = g.at(j), u = W.p.at(k) - p0, w = gaussian_wigner(x, W.p.at(k), x0, p0, sigma, hbar);
      const double d3 = (-8 * a * a * a * u * u * u + 12 * a * a * u) * w;
      const double expected = -(hbar * hbar * x / 4) * d3;
      err = std::max(err, std::abs(t.quantum[0](j, k) - expected));
      scale = std::max(scale, std::abs(expected));
    }
  EXPECT_LT(err / scale, 1e-9);
}

TEST(Moyal, HigherQuantumTermsAppearForHigherDegree) {
  auto g = Grid1D::centered(128, 8.0);
  auto W = wigner_transform(gaussian_state(g, 0.0, 0.0, 1.0));
  EXPECT_EQ(moyal_terms(W, Potential{{0, 0, 0, 1, 0, 1}}, 1.0).quantum.size(), 2u);
  EXPECT_EQ(moyal_terms(W, Potential{{0, 0, 0, 0, 1, 0}}, 1.0).quantum.size(), 1u);
}

TEST(Moyal, PhaseSpaceIntegralVanishes) {
  auto g = Grid1D::centered(256, 12.0);
  std::mt19937_64 rng(103);
  Potential V{{0.0, 0.3, -0.5, 0.1, 0.05}};
  for (int trial = 0; trial < 5; ++trial) {
    auto W = wigner_transform(random_superposition(g, rng));
    for (auto scheme : {DerivativeScheme::Spectral, DerivativeScheme::FiniteDifference8})
      ASSERT_LT(std::abs(moyal_rhs(W, V, 1.5, {scheme}).sum() * W.x.step * W.p.step), 1e-8);
  }
}

TEST(Moyal, FiniteDifferenceFallbackAgrees) {
  auto g = Grid1D::centered(256, 10.0);
  Potential V{{0.0, 0.0, 0.5, 0.0, 0.25}};
  auto W = wigner_transform(gaussian_state(g, 0.5, 0.3, 1.0));
  auto spectral = moyal_rhs(W, V, 1.0);
  auto fd = moyal_rhs(W, V, 1.0, {DerivativeScheme::FiniteDifference8});
  EXPECT_LT(sup_norm(spectral - fd) / sup_norm(spectral), 1e-3);
}

TEST(Schrodinger, NormPreservedPerStep) {
  auto g = Grid1D::centered(256, 10.0);
  Potential V{{0.0, 0.0, 0.5, 0.0, 0.25}};
  auto psi = gaussian_state(g, 1.0, 0.5, 0.8);
  SplitOperator op(g, V, 1.0, 1.0, 1e-3);
  for (int s = 0; s < 50; ++s) {
    op.step(psi);
    ASSERT_NEAR(psi.norm_squared(), 1.0, 1e-10);
  }
}

TEST(Schrodinger, FreeGaussianSpreading) {
  auto g = Grid1D::centered(256, 20.0);
  const double x0 = -1.0, p0 = 1.0, sigma = 1.0, mass = 1.0, hbar = 1.0, dt = 0.01;
  auto psi = schrodinger_evolve(gaussian_state(g, x0, p0, sigma, hbar), Potential{}, mass, hbar, dt, 100);
  double err = 0.0;
  for (int j = 0; j < g.n; ++j) err += std::norm(psi.psi[j] - free_gaussian(g.at(j), 1.0, x0, p0, sigma, mass, hbar));
  EXPECT_LT(std::sqrt(err * g.step), 1e-6);
}

TEST(Schrodinger, CoherentStateFollowsClassicalTrajectory) {
  auto g = Grid1D::centered(256, 10.0);
  const double mass = 1.0, omega = 1.0, x0 = 1.5, p0 = 0.5, dt = 1e-3;
  auto psi = coherent_state(g, x0, p0, mass, omega);
  SplitOperator op(g, Potential::harmonic(mass, omega), mass, 1.0, dt);
  double err = 0.0;
  for (int s = 1; s <= 2000; ++s) {
    op.step(psi);
    if (s % 100 == 0) {
      const double t = s * dt;
      err = std::max(err, std::abs(mean_position(psi) - (x0 * std::cos(omega * t) + p0 / (mass * omega) * std::sin(omega * t))));
    }
  }
  EXPECT_LT(err, 1e-6);
}

TEST(Schrodinger, EigenstateOnlyRotatesPhase) {
  auto g = Grid1D::centered(256, 10.0);
  const double dt = 1e-3;
  auto psi0 = oscillator_eigenstate(g, 2, 1.0, 1.0);
  auto psi = schrodinger_evolve(psi0, Potential::harmonic(1.0, 1.0), 1.0, 1.0, dt, 500);
  const cplx phase = std::exp(cplx(0.0, -2.5 * 500 * dt));
  double err = 0.0;
  for (int j = 0; j < g.n; ++j) err = std::max(err, std::abs(psi.psi[j] - phase * psi0.psi[j]));
  EXPECT_LT(err, 1e-6);
}

TEST(Schrodinger, TimeStepGuard) {
  auto g = Grid1D::centered(256, 10.0);
  auto psi = gaussian_state(g, 0.0, 0.0, 1.0);
  EXPECT_THROW(schrodinger_step(psi, Potential{}, 1.0, 1.0, 0.1), std::invalid_argument);
  EXPECT_NO_THROW(schrodinger_step(psi, Potential{}, 1.0, 1.0, -1e-3));
}

TEST(Consistency, HarmonicCoherentState) {
  auto g = Grid1D::centered(256, 10.0);
  auto r = consistency_check(coherent_state(g, 1.0, 0.5, 1.0, 1.0), Potential::harmonic(1.0, 1.0), 1.0, 1.0, 1e-3);
  EXPECT_TRUE(r.resolved);
  EXPECT_LT(r.residual, 1e-3);
  EXPECT_TRUE(r.quantum_term_norms.empty());
}

TEST(Consistency, QuarticGaussian) {
  auto g = Grid1D::centered(256, 10.0);
  Potential V{{0.0, 0.0, 0.0, 0.0, 0.25}};
  auto r = consistency_check(gaussian_state(g, 1.0, 0.0, 0.7), V, 1.0, 1.0, 1e-3);
  EXPECT_TRUE(r.resolved);
  EXPECT_LT(r.residual, 5e-3);
  ASSERT_EQ(r.quantum_term_norms.size(), 1u);
  EXPECT_GT(r.quantum_term_norms[0], 0.0);
}

TEST(Consistency, FreeGaussian) {
  auto g = Grid1D::centered(256, 10.0);
  auto r = consistency_check(gaussian_state(g, 0.0, 1.0, 1.0), Potential{}, 1.0, 1.0, 1e-3);
  EXPECT_TRUE(r.resolved);
  EXPECT_LT(r.residual, 1e-4);
}

// The quantum term is what closes the gap: dropping it leaves a visible residual.
TEST(Consistency, QuarticNeedsQuantumTerm) {
  auto g = Grid1D::centered(256, 10.0);
  Potential V{{0.0, 0.0, 0.0, 0.0, 0.25}};
  auto psi = gaussian_state(g, 1.0, 0.0, 0.5);
  const double dt = 1e-3;
  const Eigen::MatrixXd dW = (wigner_transform(schrodinger_step(psi, V, 1.0, 1.0, dt)).W -
             wigner_transform(schrodinger_step(psi, V, 1.0, 1.0, -dt)).W) /
            (2 * dt);
  auto t = moyal_terms(wigner_transform(psi), V, 1.0);
  const Eigen::MatrixXd classical = t.drift + t.force;
  EXPECT_GT((dW - classical).norm() / classical.norm(), 1e-2);
  EXPECT_LT((dW - t.total()).norm() / t.total().norm(), 5e-3);
}

TEST(Consistency, CoarseGridIsReported) {
  auto g = Grid1D::centered(32, 10.0);
  auto r = consistency_check(gaussian_state(g, 8.0, 0.0, 0.4), Potential{}, 1.0, 1.0, 1e-3);
  EXPECT_FALSE(r.resolved);
}

TEST(Csv, Layout) {
  auto g = Grid1D::centered(8, 2.0);
  auto W = wigner_transform(gaussian_state(g, 0.0, 0.0, 0.5));
  std::ostringstream os;
  write_wigner_csv(os, W);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "x,p,W");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 64);
}

}  // namespace
}  // namespace pbo::wigner
