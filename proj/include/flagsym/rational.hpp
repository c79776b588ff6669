#pragma once

#include <gmpxx.h>

#include <string>

#include "flagsym/error.hpp"

namespace flagsym {

using Rational = mpq_class;

inline Rational rat(long num, long den = 1) {
    if (den == 0) throw Error("Validation", "zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

// Canonical string: "p" for integers, "p/q" otherwise (GMP's own format).
inline std::string rat_str(const Rational& q) { return q.get_str(); }

// Accepts "p" or "p/q" with optional sign.
inline Rational rat_parse(const std::string& s) {
    mpq_class q;
    if (s.empty() || q.set_str(s, 10) != 0)
        throw Error("ParseError", "bad rational '" + s + "'");
    if (q.get_den() == 0) throw Error("ParseError", "zero denominator in '" + s + "'");
    q.canonicalize();
    return q;
}

inline int rat_sign(const Rational& q) { return sgn(q); }

} // namespace flagsym
