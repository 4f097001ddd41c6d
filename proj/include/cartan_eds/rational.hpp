#pragma once

#include <gmpxx.h>

#include <string>

#include "errors.hpp"

namespace cartan {

using Rational = mpq_class;
using Integer = mpz_class;

inline Rational make_rational(long num, long den = 1) {
    if (den == 0) throw PoleError("zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

// Accepts "3", "-3", "3/4".
inline Rational parse_rational(const std::string& text) {
    Rational q;
    if (q.set_str(text, 10) != 0) throw UsageError("not a rational number: " + text);
    if (q.get_den() == 0) throw PoleError("zero denominator: " + text);
    q.canonicalize();
    return q;
}

inline std::string to_string(const Rational& q) { return q.get_str(10); }

inline int sign(const Rational& q) { return sgn(q); }

inline Integer gcd(const Integer& a, const Integer& b) {
    Integer g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g;
}

inline Integer lcm(const Integer& a, const Integer& b) {
    Integer l;
    mpz_lcm(l.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return l;
}

}  // namespace cartan
