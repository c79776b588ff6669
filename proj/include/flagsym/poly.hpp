#pragma once

#include <string>
#include <vector>

#include "flagsym/matrix.hpp"

namespace flagsym {

// Univariate polynomial over Rational; coefficients lowest-degree first,
// trimmed (no trailing zeros), so the zero polynomial has an empty vector.
struct Poly {
    std::vector<Rational> c;

    Poly() = default;
    Poly(int v) { // NOLINT(google-explicit-constructor) — ring constant
        if (v != 0) c.assign(1, Rational(v));
    }
    explicit Poly(const Rational& v) {
        if (!(v == 0)) c.assign(1, v);
    }
    static Poly t() { return Poly::from({Rational(0), Rational(1)}); }
    static Poly from(std::vector<Rational> coeffs) {
        Poly p;
        p.c = std::move(coeffs);
        p.trim();
        return p;
    }

    void trim() {
        while (!c.empty() && c.back() == 0) c.pop_back();
    }
    int degree() const { return static_cast<int>(c.size()) - 1; } // -1 for zero
    bool is_zero() const { return c.empty(); }
    const Rational& leading() const {
        FS_CHECK(!c.empty(), "leading coefficient of zero polynomial");
        return c.back();
    }
    Rational coeff(int k) const {
        return (k >= 0 && k < static_cast<int>(c.size())) ? c[k] : Rational(0);
    }

    bool operator==(const Poly& o) const { return c == o.c; }
    bool operator==(int v) const { return *this == Poly(v); }

    Rational eval(const Rational& x) const {
        Rational r(0);
        for (size_t i = c.size(); i-- > 0;) r = r * x + c[i];
        return r;
    }
    Poly derivative() const {
        Poly d;
        for (size_t i = 1; i < c.size(); ++i) d.c.push_back(Rational(static_cast<long>(i)) * c[i]);
        d.trim();
        return d;
    }
};

Poly operator+(const Poly& a, const Poly& b);
Poly operator-(const Poly& a, const Poly& b);
Poly operator*(const Poly& a, const Poly& b);
Poly operator*(const Rational& s, const Poly& a);

// Division with remainder over the coefficient field: a = q*b + r, deg r < deg b.
std::pair<Poly, Poly> poly_divmod(const Poly& a, const Poly& b);
// Exact division; checked (remainder must vanish).
Poly poly_divexact(const Poly& a, const Poly& b);
inline Poly exact_div(const Poly& a, const Poly& b) { return poly_divexact(a, b); }
// Monic gcd.
Poly poly_gcd(Poly a, Poly b);

std::string poly_str(const Poly& p, const std::string& var = "t");

// Reduced fraction of polynomials; denominator monic and nonzero.
struct RatFunc {
    Poly num, den = Poly(1);

    RatFunc() = default;
    RatFunc(int v) : num(v) {} // NOLINT(google-explicit-constructor)
    RatFunc(Poly n) : num(std::move(n)) {} // NOLINT(google-explicit-constructor)
    RatFunc(Poly n, Poly d);

    bool operator==(const RatFunc& o) const { return num == o.num && den == o.den; }
    bool operator==(int v) const { return *this == RatFunc(v); }
};

RatFunc operator+(const RatFunc& a, const RatFunc& b);
RatFunc operator-(const RatFunc& a, const RatFunc& b);
RatFunc operator*(const RatFunc& a, const RatFunc& b);
RatFunc operator/(const RatFunc& a, const RatFunc& b);

using PolyMat = MatT<Poly>;
using RatFuncMat = MatT<RatFunc>;

PolyMat to_poly(const Mat& m);
RatFuncMat to_ratfunc(const PolyMat& m);
Mat eval_at(const PolyMat& m, const Rational& t0);
PolyMat derivative(const PolyMat& m);

struct GenericRank {
    int rank = 0;
    Poly pivot = Poly(1); // product of elimination pivots; roots flag rank drops
};

// Rank over the rational-function field, fraction-free elimination.
GenericRank poly_generic_rank(const PolyMat& m);

// Kernel over the rational-function field, each column cleared of denominators,
// made primitive, and normalized so its first nonzero entry is monic.
PolyMat poly_kernel_basis(const PolyMat& m);

// Is every column of v in the column span of basis, over the function field?
bool poly_in_span(const PolyMat& basis, const PolyMat& v);

} // namespace flagsym
