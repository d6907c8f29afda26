#pragma once

// Canonical JSON form of exact polynomials:
//   [{"word": [a1,b1,...], "coeff": {"<monomial>": [re_num, re_den, im_num, im_den]}}, ...]
// sorted lexicographically by word. Integers that do not fit in 64 bits are
// written as decimal strings.

#include <cstdint>
#include <limits>
#include <string>

#include <json.hpp>

#include "pbo/ncpoly.hpp"

namespace pbo {

using Json = nlohmann::json;

namespace detail {

inline Json bigint_to_json(const BigInt& v) {
  if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max())
    return Json(v.convert_to<std::int64_t>());
  return Json(v.str());
}

inline BigInt bigint_from_json(const Json& j) {
  if (j.is_string()) return BigInt(j.get<std::string>());
  if (j.is_number_integer()) return BigInt(j.get<std::int64_t>());
  throw std::invalid_argument("expected integer or decimal string in polynomial JSON");
}

}  // namespace detail

inline Json to_json(const ComplexRational& z) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  return Json::array({detail::bigint_to_json(numerator(z.real())), detail::bigint_to_json(denominator(z.real())),
                      detail::bigint_to_json(numerator(z.imag())), detail::bigint_to_json(denominator(z.imag()))});
}

inline ComplexRational complex_rational_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 4) throw std::invalid_argument("complex rational must be [re_num, re_den, im_num, im_den]");
  Rational re(detail::bigint_from_json(j[0]), detail::bigint_from_json(j[1]));
  Rational im(detail::bigint_from_json(j[2]), detail::bigint_from_json(j[3]));
  return {re, im};
}

inline Json to_json(const ScalarPoly& p) {
  Json obj = Json::object();
  for (const auto& [m, c] : p.terms()) obj[m.to_string()] = to_json(c);
  return obj;
}

inline ScalarPoly scalar_poly_from_json(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("scalar coefficient must be a JSON object");
  ScalarPoly out;
  for (const auto& [key, value] : j.items())
    out += ScalarPoly::term(Monomial::parse(key), complex_rational_from_json(value));
  return out;
}

inline Json to_json(const Poly& f) {
  Json arr = Json::array();
  for (const auto& [w, c] : f.terms()) arr.push_back({{"word", w}, {"coeff", to_json(c)}});
  return arr;
}

inline Poly poly_from_json(const SystemRef& sys, const Json& j) {
  if (!j.is_array()) throw std::invalid_argument("polynomial must be a JSON array of terms");
  Poly out(sys);
  for (const auto& term : j) {
    auto w = term.at("word").get<Word>();
    if (w.size() != 2 * sys->size()) throw std::invalid_argument("polynomial word length does not match system");
    out.add_term(std::move(w), scalar_poly_from_json(term.at("coeff")));
  }
  return out;
}

/// 64-bit FNV-1a digest rendered as 16 hex digits; stable across runs.
inline std::string digest(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = hex[h & 0xf];
  return out;
}

}  // namespace pbo
