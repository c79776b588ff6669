#include "flagsym/linalg.hpp"

#include "intops.hpp"

namespace flagsym {

std::pair<int, int> inertia(const Mat& s) {
    FS_CHECK(s.rows == s.cols, "inertia of non-square matrix");
    Mat m = s;
    const int n = m.rows;
    int pos = 0, neg = 0;
    auto sym_swap = [&](int a, int b) {
        for (int j = 0; j < n; ++j) std::swap(m.at(a, j), m.at(b, j));
        for (int i = 0; i < n; ++i) std::swap(m.at(i, a), m.at(i, b));
    };
    auto sym_add = [&](int a, int b) { // row/col a += row/col b
        for (int j = 0; j < n; ++j) m.at(a, j) = m.at(a, j) + m.at(b, j);
        for (int i = 0; i < n; ++i) m.at(i, a) = m.at(i, a) + m.at(i, b);
    };
    for (int k = 0; k < n; ++k) {
        if (m.at(k, k) == 0) {
            int jd = -1, jo = -1;
            for (int j = k + 1; j < n; ++j) {
                if (jd < 0 && !(m.at(j, j) == 0)) jd = j;
                if (jo < 0 && !(m.at(k, j) == 0)) jo = j;
            }
            if (jd >= 0)
                sym_swap(k, jd);
            else if (jo >= 0)
                sym_add(k, jo); // both diagonals zero: new (k,k) entry is 2*m(k,jo)
            else
                continue;
        }
        Rational d = m.at(k, k);
        (rat_sign(d) > 0 ? pos : neg)++;
        for (int i = k + 1; i < n; ++i) {
            if (m.at(i, k) == 0) continue;
            Rational f = m.at(i, k) / d;
            for (int j = 0; j < n; ++j) m.at(i, j) = m.at(i, j) - f * m.at(k, j);
            for (int j = 0; j < n; ++j) m.at(j, i) = m.at(j, i) - f * m.at(j, k);
        }
    }
    return {pos, neg};
}

RankSignature rank_and_signature(const Mat& m, RankMode mode) {
    RankSignature out;
    if (mode == RankMode::Plain) {
        out.rank = rank_of(m);
        return out;
    }
    if (m.rows != m.cols) throw Error("NonSymmetric", "matrix is not square");
    if (!(transpose(m) == m)) throw Error("NonSymmetric", "matrix differs from its transpose");
    auto [p, q] = inertia(m);
    out.rank = p + q;
    out.signature = {p, q};
    return out;
}

std::vector<int> extend_basis(Mat& basis, const Mat& candidates) {
    std::vector<int> picked;
    if (basis.rows == 0 && basis.cols == 0) basis = Mat(candidates.rows, 0);
    FS_CHECK(basis.rows == candidates.rows, "row mismatch in extend_basis");
    int r = rank_of(basis);
    for (int j = 0; j < candidates.cols; ++j) {
        Mat trial = hcat(basis, candidates.col(j));
        int tr = rank_of(trial);
        if (tr > r) {
            basis = std::move(trial);
            r = tr;
            picked.push_back(j);
        }
    }
    return picked;
}

Mat column_space_basis(const Mat& m) {
    Mat b(m.rows, 0);
    extend_basis(b, m);
    return b;
}

Mat kernel_basis(const Mat& m) {
    std::vector<long long> w, scale;
    std::vector<int> pc;
    if (!intops::to_scaled_ints(m, w, scale) || !intops::jordan(w, m.rows, m.cols, pc))
        return kernel_basis<Rational>(m);

    std::vector<bool> is_pivot(m.cols, false);
    for (int c : pc) is_pivot[c] = true;
    std::vector<int> free_cols;
    for (int c = 0; c < m.cols; ++c)
        if (!is_pivot[c]) free_cols.push_back(c);

    auto at = [&](int i, int j) -> long long { return w[static_cast<size_t>(i) * m.cols + j]; };
    Mat k(m.cols, static_cast<int>(free_cols.size()));
    std::vector<Rational> v(m.cols);
    for (size_t fj = 0; fj < free_cols.size(); ++fj) {
        int f = free_cols[fj];
        for (auto& x : v) x = 0;
        v[f] = Rational(static_cast<long>(scale[f]));
        for (size_t pi = 0; pi < pc.size(); ++pi) {
            int c = pc[pi];
            if (at(static_cast<int>(pi), f) == 0) continue;
            mpz_class num = mpz_class(static_cast<long>(-at(static_cast<int>(pi), f))) *
                            mpz_class(static_cast<long>(scale[c]));
            mpz_class den(static_cast<long>(at(static_cast<int>(pi), c)));
            v[c] = Rational(Rational(num) / Rational(den));
        }
        for (int i = 0; i < m.cols; ++i) {
            if (v[i] == 0) continue;
            if (!(v[i] == 1)) {
                Rational inv = Rational(Rational(1) / v[i]);
                for (int t = i; t < m.cols; ++t)
                    if (!(v[t] == 0)) v[t] = Rational(v[t] * inv);
            }
            break;
        }
        for (int i = 0; i < m.cols; ++i) k.at(i, static_cast<int>(fj)) = v[i];
    }
    return k;
}

} // namespace flagsym
