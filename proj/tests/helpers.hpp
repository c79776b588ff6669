#pragma once

// Shared generators for randomized tests: graded automorphisms, structure
// algebra bases, and random normal forms covering every block kind.

#include "flagsym/symbols.hpp"

#include <random>

namespace flagsym::testing {

inline Rational rnd_rat(std::mt19937& rng, int lo = -4, int hi = 4) {
    std::uniform_int_distribution<int> num(lo, hi);
    std::uniform_int_distribution<int> den(1, 3);
    Rational q(num(rng), den(rng));
    q.canonicalize();
    return q;
}

// basis of the degree-k matrices inside gl(space), as index pairs
inline std::vector<std::pair<int, int>> degree_positions(const GradedSpace& space, int deg_tw_val) {
    std::vector<std::pair<int, int>> out;
    const int n = space.total_dim();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (space.degree_of_index(i).tw - space.degree_of_index(j).tw == deg_tw_val)
                out.emplace_back(i, j);
    return out;
}

// random invertible degree-0 map (block diagonal across components)
inline Mat random_graded_invertible(const GradedSpace& space, std::mt19937& rng) {
    const int n = space.total_dim();
    while (true) {
        Mat g(n, n);
        for (auto [i, j] : degree_positions(space, 0)) g.at(i, j) = rnd_rat(rng);
        if (rank_of(g) == n) return g;
    }
}

// basis of {X degree 0 : Xᵀ·form + form·X = 0}
inline std::vector<Mat> degree0_structure_algebra(const GradedSpace& space) {
    const int n = space.total_dim();
    auto pos = degree_positions(space, 0);
    Mat constraints(n * n, static_cast<int>(pos.size()));
    for (size_t c = 0; c < pos.size(); ++c) {
        Mat x(n, n);
        x.at(pos[c].first, pos[c].second) = Rational(1);
        Mat eq = transpose(x) * space.form + space.form * x;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                constraints.at(i * n + j, static_cast<int>(c)) = eq.at(i, j);
    }
    Mat k = kernel_basis(constraints);
    std::vector<Mat> out;
    for (int c = 0; c < k.cols; ++c) {
        Mat x(n, n);
        for (size_t p = 0; p < pos.size(); ++p)
            x.at(pos[p].first, pos[p].second) = k.at(static_cast<int>(p), c);
        out.push_back(std::move(x));
    }
    return out;
}

// random form-preserving degree-0 map via the Cayley transform of a random
// degree-0 element of the structure algebra
inline Mat random_graded_isometry(const GradedSpace& space, std::mt19937& rng) {
    const int n = space.total_dim();
    auto basis = degree0_structure_algebra(space);
    while (true) {
        Mat x(n, n);
        for (const Mat& b : basis) x = x + rnd_rat(rng, -2, 2) * b;
        Mat id = Mat::identity(n);
        if (rank_of(id - x) < n || rank_of(id + x) < n) continue;
        return inverse(id - x) * (id + x);
    }
}

inline Mat conjugate(const Mat& delta, const Mat& g) { return g * delta * inverse(g); }

// random valid normal form: one family, one parity, total dim <= budget
inline SymbolNormalForm random_normal_form(std::mt19937& rng, Family fam, int budget) {
    std::uniform_int_distribution<int> coin(0, 1);
    int parity = fam == Family::GL ? 0 : coin(rng);
    SymbolNormalForm nf;
    int used = 0;
    auto rnd = [&](int lo, int hi) {
        std::uniform_int_distribution<int> d(lo, hi);
        return d(rng);
    };
    while (true) {
        int room = budget - used;
        if (room <= 0) break;
        if (!nf.blocks.empty() && rnd(0, 2) == 0) break;
        Block b;
        bool made = false;
        if (fam == Family::GL) {
            if (room >= 1) {
                int len = rnd(1, std::min(room, 5));
                int s = -rnd(1, 3);
                b = Block::gl(deg_int(s - len + 1), deg_int(s));
                made = true;
            }
        } else if (fam == Family::Sp) {
            bool tau = parity == 1 && coin(rng);
            if (tau) {
                int max_m_tw = room - 1; // dim = m.tw + 1
                if (max_m_tw >= 1) {
                    int mtw = 2 * rnd(0, (max_m_tw - 1) / 2) + 1;
                    b = Block::sp_tau(deg_tw(mtw), coin(rng) ? +1 : -1);
                    made = true;
                }
            } else {
                int lmax_room = room / 2 - 1; // dim = 2(l+1)
                if (lmax_room >= 0) {
                    int stw = parity == 0 ? 2 * rnd(0, 2) : 2 * rnd(0, 2) + 1;
                    int lcap = std::min(lmax_room, parity == 0 ? stw : stw - 1);
                    if (lcap >= 0) {
                        b = Block::sp_delta(deg_tw(stw), rnd(0, lcap));
                        made = true;
                    }
                }
            }
        } else {
            bool tau = parity == 0 && coin(rng);
            if (tau) {
                int max_m_tw = room - 1;
                if (max_m_tw >= 0) {
                    int mtw = 2 * rnd(0, max_m_tw / 2);
                    b = Block::so_tau(deg_tw(mtw), coin(rng) ? +1 : -1);
                    made = true;
                }
            } else {
                int lmax_room = room / 2 - 1;
                if (lmax_room >= 0) {
                    int stw = parity == 0 ? 2 * rnd(1, 2) : 2 * rnd(0, 2) + 1;
                    int lcap = std::min(lmax_room, parity == 0 ? stw - 1 : stw);
                    if (lcap >= 0) {
                        b = Block::so_delta(deg_tw(stw), rnd(0, lcap));
                        made = true;
                    }
                }
            }
        }
        if (!made) break;
        used += b.dim();
        if (used > budget) break;
        nf.blocks.push_back(b);
    }
    if (nf.blocks.empty()) {
        if (fam == Family::GL)
            nf.blocks.push_back(Block::gl(deg_int(-1), deg_int(-1)));
        else if (fam == Family::Sp)
            nf.blocks.push_back(parity == 1 ? Block::sp_tau(deg_tw(1), +1)
                                            : Block::sp_delta(deg_int(0), 0));
        else
            nf.blocks.push_back(parity == 0 ? Block::so_tau(deg_tw(0), +1)
                                            : Block::so_delta(deg_tw(1), 0));
    }
    nf.canonicalize();
    nf.validate();
    return nf;
}

} // namespace flagsym::testing
