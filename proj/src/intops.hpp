#pragma once

#include <vector>

#include "flagsym/matrix.hpp"

// Machine-integer fraction-free elimination used by the fast paths in
// matrix.cpp and prolong.cpp. All routines report failure instead of
// overflowing so callers can fall back to exact arithmetic.

namespace flagsym::intops {

// Entry bound: keeps every p*a - f*b product inside __int128.
constexpr long long kLimit = 1LL << 61;

// Clears denominators column by column; scale[j] is what column j was
// multiplied by.
inline bool to_scaled_ints(const Mat& m, std::vector<long long>& w,
                           std::vector<long long>& scale) {
    w.assign(static_cast<size_t>(m.rows) * m.cols, 0);
    scale.assign(static_cast<size_t>(m.cols), 1);
    for (int j = 0; j < m.cols; ++j) {
        mpz_class l(1);
        for (int i = 0; i < m.rows; ++i) {
            mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m.at(i, j).get_den().get_mpz_t());
            if (!l.fits_slong_p() || l.get_si() > (1L << 20)) return false;
        }
        scale[static_cast<size_t>(j)] = l.get_si();
        for (int i = 0; i < m.rows; ++i) {
            mpz_class v = m.at(i, j).get_num() * (l / m.at(i, j).get_den());
            if (!v.fits_slong_p()) return false;
            long long x = v.get_si();
            if (x >= kLimit || x <= -kLimit) return false;
            w[static_cast<size_t>(i) * m.cols + j] = x;
        }
    }
    return true;
}

// Fraction-free complete elimination (pivot rule as in rref: leftmost column,
// topmost row). Divisions by the previous pivot are exact on paper; the
// remainder test doubles as an overflow guard.
inline bool jordan(std::vector<long long>& w, int rows, int cols,
                   std::vector<int>& pivot_cols) {
    auto at = [&](int i, int j) -> long long& {
        return w[static_cast<size_t>(i) * cols + j];
    };
    long long prev = 1;
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int piv = -1;
        for (int i = r; i < rows; ++i)
            if (at(i, c) != 0) {
                piv = i;
                break;
            }
        if (piv < 0) continue;
        if (piv != r)
            for (int j = 0; j < cols; ++j) std::swap(at(piv, j), at(r, j));
        const long long p = at(r, c);
        for (int i = 0; i < rows; ++i) {
            if (i == r) continue;
            const long long f = at(i, c);
            if (f == 0 && p == prev) continue; // update would be the identity
            for (int j = 0; j < cols; ++j) {
                __int128 v = static_cast<__int128>(p) * at(i, j) -
                             static_cast<__int128>(f) * at(r, j);
                if (prev != 1) {
                    if (v % prev != 0) return false;
                    v /= prev;
                }
                if (v >= kLimit || v <= -kLimit) return false;
                at(i, j) = static_cast<long long>(v);
            }
        }
        prev = p;
        pivot_cols.push_back(c);
        ++r;
    }
    return true;
}

} // namespace flagsym::intops
