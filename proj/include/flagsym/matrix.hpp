#pragma once

#include <initializer_list>
#include <utility>
#include <vector>

#include "flagsym/error.hpp"
#include "flagsym/rational.hpp"

namespace flagsym {

// Dense matrix over an exact coefficient type (Rational, Poly, RatFunc).
template <class R>
struct MatT {
    int rows = 0, cols = 0;
    std::vector<R> a; // row-major, size rows*cols

    MatT() = default;
    MatT(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, R(0)) {}
    MatT(int r, int c, std::initializer_list<R> init) : rows(r), cols(c), a(init) {
        FS_CHECK(static_cast<int>(a.size()) == r * c, "matrix initializer size mismatch");
    }

    R& at(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    const R& at(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

    static MatT identity(int n) {
        MatT m(n, n);
        for (int i = 0; i < n; ++i) m.at(i, i) = R(1);
        return m;
    }

    bool operator==(const MatT& o) const {
        return rows == o.rows && cols == o.cols && a == o.a;
    }

    bool is_zero() const {
        for (const R& x : a)
            if (!(x == R(0))) return false;
        return true;
    }

    MatT col(int j) const {
        MatT v(rows, 1);
        for (int i = 0; i < rows; ++i) v.at(i, 0) = at(i, j);
        return v;
    }
};

using Mat = MatT<Rational>;

template <class R>
MatT<R> operator+(const MatT<R>& x, const MatT<R>& y) {
    FS_CHECK(x.rows == y.rows && x.cols == y.cols, "shape mismatch in +");
    MatT<R> z(x.rows, x.cols);
    for (size_t i = 0; i < x.a.size(); ++i) z.a[i] = x.a[i] + y.a[i];
    return z;
}

template <class R>
MatT<R> operator-(const MatT<R>& x, const MatT<R>& y) {
    FS_CHECK(x.rows == y.rows && x.cols == y.cols, "shape mismatch in -");
    MatT<R> z(x.rows, x.cols);
    for (size_t i = 0; i < x.a.size(); ++i) z.a[i] = x.a[i] - y.a[i];
    return z;
}

template <class R>
MatT<R> operator-(const MatT<R>& x) {
    const R zero(0);
    MatT<R> z(x.rows, x.cols);
    for (size_t i = 0; i < x.a.size(); ++i) z.a[i] = zero - x.a[i];
    return z;
}

template <class R>
MatT<R> operator*(const MatT<R>& x, const MatT<R>& y) {
    FS_CHECK(x.cols == y.rows, "shape mismatch in *");
    const R zero(0);
    MatT<R> z(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int k = 0; k < x.cols; ++k) {
            const R& xik = x.at(i, k);
            if (xik == zero) continue;
            for (int j = 0; j < y.cols; ++j) {
                const R& ykj = y.at(k, j);
                if (ykj == zero) continue;
                z.at(i, j) = z.at(i, j) + xik * ykj;
            }
        }
    return z;
}

template <class R>
MatT<R> operator*(const R& c, const MatT<R>& x) {
    MatT<R> z(x.rows, x.cols);
    for (size_t i = 0; i < x.a.size(); ++i) z.a[i] = c * x.a[i];
    return z;
}

template <class R>
MatT<R> transpose(const MatT<R>& x) {
    MatT<R> z(x.cols, x.rows);
    for (int i = 0; i < x.rows; ++i)
        for (int j = 0; j < x.cols; ++j) z.at(j, i) = x.at(i, j);
    return z;
}

template <class R>
MatT<R> hcat(const MatT<R>& x, const MatT<R>& y) {
    if (x.cols == 0 && x.rows == 0) return y;
    if (y.cols == 0 && y.rows == 0) return x;
    FS_CHECK(x.rows == y.rows, "row mismatch in hcat");
    MatT<R> z(x.rows, x.cols + y.cols);
    for (int i = 0; i < x.rows; ++i) {
        for (int j = 0; j < x.cols; ++j) z.at(i, j) = x.at(i, j);
        for (int j = 0; j < y.cols; ++j) z.at(i, x.cols + j) = y.at(i, j);
    }
    return z;
}

template <class R>
MatT<R> select_cols(const MatT<R>& x, const std::vector<int>& js) {
    MatT<R> z(x.rows, static_cast<int>(js.size()));
    for (int i = 0; i < x.rows; ++i)
        for (size_t j = 0; j < js.size(); ++j) z.at(i, static_cast<int>(j)) = x.at(i, js[j]);
    return z;
}

template <class R>
MatT<R> bracket(const MatT<R>& x, const MatT<R>& y) {
    return x * y - y * x;
}

// --- exact Gauss-Jordan over a field -----------------------------------------

template <class F>
struct RrefResult {
    MatT<F> r;
    std::vector<int> pivot_cols;
    int rank = 0;
};

// Deterministic: scans columns left to right, picks the topmost usable row.
template <class F>
RrefResult<F> rref(MatT<F> m) {
    RrefResult<F> out;
    const F zero(0), one(1);
    int r = 0;
    for (int c = 0; c < m.cols && r < m.rows; ++c) {
        int piv = -1;
        for (int i = r; i < m.rows; ++i)
            if (!(m.at(i, c) == zero)) {
                piv = i;
                break;
            }
        if (piv < 0) continue;
        if (piv != r)
            for (int j = 0; j < m.cols; ++j) std::swap(m.at(piv, j), m.at(r, j));
        if (!(m.at(r, c) == one)) {
            F inv = one / m.at(r, c);
            for (int j = c; j < m.cols; ++j) m.at(r, j) = m.at(r, j) * inv;
        }
        for (int i = 0; i < m.rows; ++i) {
            if (i == r) continue;
            F f = m.at(i, c);
            if (f == zero) continue;
            for (int j = c; j < m.cols; ++j) m.at(i, j) = m.at(i, j) - f * m.at(r, j);
        }
        out.pivot_cols.push_back(c);
        ++r;
    }
    out.r = std::move(m);
    out.rank = r;
    return out;
}

template <class F>
int rank_of(const MatT<F>& m) {
    return rref(m).rank;
}

// Kernel basis as columns; each column's first nonzero entry is scaled to 1 so
// results are comparable across runs. Ordered by ascending free column.
template <class F>
MatT<F> kernel_basis(const MatT<F>& m) {
    RrefResult<F> e = rref(m);
    std::vector<bool> is_pivot(m.cols, false);
    for (int c : e.pivot_cols) is_pivot[c] = true;
    std::vector<int> free_cols;
    for (int c = 0; c < m.cols; ++c)
        if (!is_pivot[c]) free_cols.push_back(c);

    MatT<F> k(m.cols, static_cast<int>(free_cols.size()));
    for (size_t fj = 0; fj < free_cols.size(); ++fj) {
        int f = free_cols[fj];
        k.at(f, static_cast<int>(fj)) = F(1);
        for (size_t pi = 0; pi < e.pivot_cols.size(); ++pi)
            k.at(e.pivot_cols[pi], static_cast<int>(fj)) =
                F(0) - e.r.at(static_cast<int>(pi), f);
        // normalize: first nonzero entry = 1
        for (int i = 0; i < m.cols; ++i) {
            const F& v = k.at(i, static_cast<int>(fj));
            if (!(v == F(0))) {
                if (!(v == F(1))) {
                    F inv = F(1) / v;
                    for (int t = i; t < m.cols; ++t)
                        k.at(t, static_cast<int>(fj)) = k.at(t, static_cast<int>(fj)) * inv;
                }
                break;
            }
        }
    }
    return k;
}

// Overload for rational matrices: runs the elimination fraction-free on
// machine integers when entries permit (falling back to the generic routine
// otherwise). Pivot choices match rref, so the output is identical.
Mat kernel_basis(const Mat& m);

// Solves A x = b; returns (solvable, x).
template <class F>
std::pair<bool, MatT<F>> solve(const MatT<F>& a, const MatT<F>& b) {
    FS_CHECK(a.rows == b.rows, "shape mismatch in solve");
    RrefResult<F> e = rref(hcat(a, b));
    MatT<F> x(a.cols, b.cols);
    for (size_t pi = 0; pi < e.pivot_cols.size(); ++pi) {
        int c = e.pivot_cols[pi];
        if (c >= a.cols) return {false, MatT<F>()}; // pivot in the b-part: inconsistent
        for (int j = 0; j < b.cols; ++j) x.at(c, j) = e.r.at(static_cast<int>(pi), a.cols + j);
    }
    return {true, x};
}

// Is every column of v in the column span of basis?
template <class F>
bool in_span(const MatT<F>& basis, const MatT<F>& v) {
    return solve(basis, v).first;
}

// Incremental span of column vectors kept fully reduced, so that membership
// queries cost one elimination pass instead of a fresh rref per call.
template <class F>
class SpanReducer {
public:
    // eliminates the stored directions from v in place
    void reduce(MatT<F>& v) const {
        for (size_t s = 0; s < cols_.size(); ++s) {
            const F lead = v.at(pivots_[s], 0);
            if (lead == F(0)) continue;
            const MatT<F>& c = cols_[s];
            for (int i = 0; i < v.rows; ++i)
                if (!(c.at(i, 0) == F(0))) v.at(i, 0) = v.at(i, 0) - lead * c.at(i, 0);
        }
    }

    // true if v added a new direction
    bool add(MatT<F> v) {
        FS_CHECK(v.cols == 1, "SpanReducer stores single columns");
        reduce(v);
        int p = -1;
        for (int i = 0; i < v.rows; ++i)
            if (!(v.at(i, 0) == F(0))) {
                p = i;
                break;
            }
        if (p < 0) return false;
        F inv = F(1) / v.at(p, 0);
        for (int i = 0; i < v.rows; ++i) v.at(i, 0) = v.at(i, 0) * inv;
        for (size_t s = 0; s < cols_.size(); ++s) {
            const F lead = cols_[s].at(p, 0);
            if (lead == F(0)) continue;
            for (int i = 0; i < v.rows; ++i)
                cols_[s].at(i, 0) = cols_[s].at(i, 0) - lead * v.at(i, 0);
        }
        pivots_.push_back(p);
        cols_.push_back(std::move(v));
        return true;
    }

    bool contains(MatT<F> v) const {
        reduce(v);
        return v.is_zero();
    }

    int rank() const { return static_cast<int>(cols_.size()); }

private:
    std::vector<MatT<F>> cols_;
    std::vector<int> pivots_;
};

template <class F>
MatT<F> inverse(const MatT<F>& m) {
    FS_CHECK(m.rows == m.cols, "inverse of non-square matrix");
    auto [ok, x] = solve(m, MatT<F>::identity(m.rows));
    FS_CHECK(ok && rank_of(m) == m.rows, "inverse of singular matrix");
    return x;
}

// --- fraction-free (Bareiss) elimination over an exact-division ring ---------

inline Rational exact_div(const Rational& a, const Rational& b) { return a / b; }

template <class R>
struct BareissResult {
    int rank = 0;
    std::vector<R> pivots; // echelon pivots, in elimination order
};

// One-step Bareiss; divisions are exact over an integral domain. Pivot choice
// is the topmost nonzero entry in the leftmost unfinished column.
template <class R>
BareissResult<R> bareiss(MatT<R> m) {
    BareissResult<R> out;
    R prev = R(1);
    int r = 0;
    for (int c = 0; c < m.cols && r < m.rows; ++c) {
        int piv = -1;
        for (int i = r; i < m.rows; ++i)
            if (!(m.at(i, c) == R(0))) {
                piv = i;
                break;
            }
        if (piv < 0) continue;
        if (piv != r)
            for (int j = 0; j < m.cols; ++j) std::swap(m.at(piv, j), m.at(r, j));
        for (int i = r + 1; i < m.rows; ++i) {
            for (int j = c + 1; j < m.cols; ++j)
                m.at(i, j) = exact_div(m.at(r, c) * m.at(i, j) - m.at(i, c) * m.at(r, j), prev);
            m.at(i, c) = R(0);
        }
        out.pivots.push_back(m.at(r, c));
        prev = m.at(r, c);
        ++r;
    }
    out.rank = r;
    return out;
}

} // namespace flagsym
