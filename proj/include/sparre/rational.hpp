#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace sparre {

// Exact arithmetic used by the combinatorial tables and the enumeration
// oracles. Floats are forbidden on these paths: ties at zero are meaningful.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt rational_num(const Rational& r) { return boost::multiprecision::numerator(r); }
inline BigInt rational_den(const Rational& r) { return boost::multiprecision::denominator(r); }

inline std::string rational_str(const Rational& r) {
    return rational_num(r).str() + "/" + rational_den(r).str();
}

// Parses "a/b" or "a"; throws std::runtime_error on garbage.
Rational rational_parse(const std::string& text);

}  // namespace sparre
