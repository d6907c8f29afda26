#pragma once

// Seeded random polynomials for property sweeps.

#include <random>
#include <string>
#include <vector>

#include "pbo/ncpoly.hpp"

namespace pbo {

struct RandomPolyOptions {
  unsigned max_degree = 4;
  unsigned max_terms = 4;
  int numerator_range = 3;     // numerators drawn from [-range, range] \ {0}
  int max_denominator = 3;
  bool complex_coefficients = false;
  std::vector<std::string> coefficient_symbols;  // each term may pick up one of these
};

inline ScalarPoly random_coefficient(std::mt19937_64& rng, const RandomPolyOptions& opt) {
  std::uniform_int_distribution<int> num(-opt.numerator_range, opt.numerator_range);
  std::uniform_int_distribution<int> den(1, opt.max_denominator);
  auto draw = [&] {
    int n = 0;
    while (n == 0) n = num(rng);
    return Rational(n, den(rng));
  };
  ComplexRational z(draw());
  if (opt.complex_coefficients && std::bernoulli_distribution(0.5)(rng)) z = ComplexRational(z.real(), draw());
  ScalarPoly c(z);
  if (!opt.coefficient_symbols.empty()) {
    std::uniform_int_distribution<std::size_t> pick(0, opt.coefficient_symbols.size());
    auto idx = pick(rng);
    if (idx < opt.coefficient_symbols.size()) c *= ScalarPoly::symbol(opt.coefficient_symbols[idx]);
  }
  return c;
}

/// Random word of total degree exactly `degree` over 2N slots.
inline Word random_word(std::mt19937_64& rng, std::size_t n_pairs, unsigned degree) {
  Word w(2 * n_pairs, 0);
  std::uniform_int_distribution<std::size_t> slot(0, w.size() - 1);
  for (unsigned i = 0; i < degree; ++i) ++w[slot(rng)];
  return w;
}

inline Poly random_poly(const SystemRef& sys, std::mt19937_64& rng, const RandomPolyOptions& opt = {}) {
  std::uniform_int_distribution<unsigned> n_terms(1, std::max(1u, opt.max_terms));
  std::uniform_int_distribution<unsigned> deg(0, opt.max_degree);
  Poly f(sys);
  const unsigned count = n_terms(rng);
  for (unsigned t = 0; t < count; ++t) f.add_term(random_word(rng, sys->size(), deg(rng)), random_coefficient(rng, opt));
  return f;
}

}  // namespace pbo
