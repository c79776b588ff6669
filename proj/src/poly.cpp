#include "flagsym/poly.hpp"

namespace flagsym {

Poly operator+(const Poly& a, const Poly& b) {
    Poly r;
    r.c.resize(std::max(a.c.size(), b.c.size()), Rational(0));
    for (size_t i = 0; i < a.c.size(); ++i) r.c[i] = r.c[i] + a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) r.c[i] = r.c[i] + b.c[i];
    r.trim();
    return r;
}

Poly operator-(const Poly& a, const Poly& b) {
    Poly r;
    r.c.resize(std::max(a.c.size(), b.c.size()), Rational(0));
    for (size_t i = 0; i < a.c.size(); ++i) r.c[i] = r.c[i] + a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) r.c[i] = r.c[i] - b.c[i];
    r.trim();
    return r;
}

Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return Poly();
    Poly r;
    r.c.assign(a.c.size() + b.c.size() - 1, Rational(0));
    for (size_t i = 0; i < a.c.size(); ++i) {
        if (a.c[i] == 0) continue;
        for (size_t j = 0; j < b.c.size(); ++j) r.c[i + j] = r.c[i + j] + a.c[i] * b.c[j];
    }
    r.trim();
    return r;
}

Poly operator*(const Rational& s, const Poly& a) {
    Poly r;
    for (const Rational& x : a.c) r.c.push_back(s * x);
    r.trim();
    return r;
}

std::pair<Poly, Poly> poly_divmod(const Poly& a, const Poly& b) {
    FS_CHECK(!b.is_zero(), "polynomial division by zero");
    Poly q, r = a;
    if (r.degree() >= b.degree()) q.c.assign(r.degree() - b.degree() + 1, Rational(0));
    while (!r.is_zero() && r.degree() >= b.degree()) {
        int k = r.degree() - b.degree();
        Rational f = r.leading() / b.leading();
        q.c[k] = f;
        for (size_t i = 0; i < b.c.size(); ++i) r.c[k + i] = r.c[k + i] - f * b.c[i];
        r.trim();
    }
    q.trim();
    return {q, r};
}

Poly poly_divexact(const Poly& a, const Poly& b) {
    auto [q, r] = poly_divmod(a, b);
    FS_CHECK(r.is_zero(), "inexact polynomial division");
    return q;
}

Poly poly_gcd(Poly a, Poly b) {
    while (!b.is_zero()) {
        Poly r = poly_divmod(a, b).second;
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.is_zero() && !(a.leading() == 1)) a = (Rational(1) / a.leading()) * a;
    return a;
}

std::string poly_str(const Poly& p, const std::string& var) {
    if (p.is_zero()) return "0";
    std::string out;
    for (int k = p.degree(); k >= 0; --k) {
        Rational c = p.coeff(k);
        if (c == 0) continue;
        bool neg = rat_sign(c) < 0;
        Rational ac = neg ? Rational(-c) : c;
        if (out.empty())
            out += neg ? "-" : "";
        else
            out += neg ? " - " : " + ";
        bool unit = (ac == 1);
        if (k == 0)
            out += rat_str(ac);
        else {
            if (!unit) out += rat_str(ac) + "*";
            out += var;
            if (k > 1) out += "^" + std::to_string(k);
        }
    }
    return out;
}

RatFunc::RatFunc(Poly n, Poly d) : num(std::move(n)), den(std::move(d)) {
    FS_CHECK(!den.is_zero(), "rational function with zero denominator");
    if (num.is_zero()) {
        den = Poly(1);
        return;
    }
    Poly g = poly_gcd(num, den);
    if (g.degree() > 0) {
        num = poly_divexact(num, g);
        den = poly_divexact(den, g);
    }
    Rational lead = den.leading();
    if (!(lead == 1)) {
        Rational inv = Rational(1) / lead;
        num = inv * num;
        den = inv * den;
    }
}

RatFunc operator+(const RatFunc& a, const RatFunc& b) {
    return RatFunc(a.num * b.den + b.num * a.den, a.den * b.den);
}
RatFunc operator-(const RatFunc& a, const RatFunc& b) {
    return RatFunc(a.num * b.den - b.num * a.den, a.den * b.den);
}
RatFunc operator*(const RatFunc& a, const RatFunc& b) {
    return RatFunc(a.num * b.num, a.den * b.den);
}
RatFunc operator/(const RatFunc& a, const RatFunc& b) {
    FS_CHECK(!b.num.is_zero(), "division by zero rational function");
    return RatFunc(a.num * b.den, a.den * b.num);
}

PolyMat to_poly(const Mat& m) {
    PolyMat p(m.rows, m.cols);
    for (size_t i = 0; i < m.a.size(); ++i) p.a[i] = Poly(m.a[i]);
    return p;
}

RatFuncMat to_ratfunc(const PolyMat& m) {
    RatFuncMat r(m.rows, m.cols);
    for (size_t i = 0; i < m.a.size(); ++i) r.a[i] = RatFunc(m.a[i]);
    return r;
}

Mat eval_at(const PolyMat& m, const Rational& t0) {
    Mat r(m.rows, m.cols);
    for (size_t i = 0; i < m.a.size(); ++i) r.a[i] = m.a[i].eval(t0);
    return r;
}

PolyMat derivative(const PolyMat& m) {
    PolyMat r(m.rows, m.cols);
    for (size_t i = 0; i < m.a.size(); ++i) r.a[i] = m.a[i].derivative();
    return r;
}

GenericRank poly_generic_rank(const PolyMat& m) {
    BareissResult<Poly> b = bareiss(m);
    GenericRank out;
    out.rank = b.rank;
    for (const Poly& p : b.pivots) out.pivot = out.pivot * p;
    // normalize sign/scale of the flagged polynomial: monic
    if (!out.pivot.is_zero() && !(out.pivot.leading() == 1))
        out.pivot = (Rational(1) / out.pivot.leading()) * out.pivot;
    return out;
}

PolyMat poly_kernel_basis(const PolyMat& m) {
    RatFuncMat k = kernel_basis(to_ratfunc(m));
    PolyMat out(k.rows, k.cols);
    for (int j = 0; j < k.cols; ++j) {
        Poly common(1); // lcm of denominators, built by repeated gcd
        for (int i = 0; i < k.rows; ++i) {
            const Poly& d = k.at(i, j).den;
            common = poly_divexact(common * d, poly_gcd(common, d));
        }
        std::vector<Poly> col(k.rows);
        Poly content;
        for (int i = 0; i < k.rows; ++i) {
            col[i] = k.at(i, j).num * poly_divexact(common, k.at(i, j).den);
            content = poly_gcd(content, col[i]);
        }
        if (content.degree() > 0)
            for (Poly& p : col) p = poly_divexact(p, content);
        for (int i = 0; i < k.rows; ++i) {
            if (!col[i].is_zero()) {
                Rational inv = Rational(1) / col[i].leading();
                for (Poly& p : col) p = inv * p;
                break;
            }
        }
        for (int i = 0; i < k.rows; ++i) out.at(i, j) = col[i];
    }
    return out;
}

bool poly_in_span(const PolyMat& basis, const PolyMat& v) {
    return in_span(to_ratfunc(basis), to_ratfunc(v));
}

} // namespace flagsym
