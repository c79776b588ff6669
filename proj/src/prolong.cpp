#include "flagsym/prolong.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "intops.hpp"

namespace flagsym {

namespace {

int int_degree_between(const GradedSpace& sp, int row, int col) {
    Degree d = sp.degree_of_index(row) - sp.degree_of_index(col);
    FS_CHECK(d.tw % 2 == 0, "entry degree is not an integer");
    return d.tw / 2;
}

// matrix entry positions (row-major) realizing algebra degree k
std::vector<int> positions_at(const GradedSpace& sp, int k) {
    int n = sp.total_dim();
    std::vector<int> out;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (int_degree_between(sp, a, b) == k) out.push_back(a * n + b);
    return out;
}

Mat vec_of(const Mat& m) {
    Mat v(m.rows * m.cols, 1);
    for (int i = 0; i < m.rows * m.cols; ++i) v.at(i, 0) = m.a[static_cast<size_t>(i)];
    return v;
}

// constraint rows for X^T S + S X = 0 restricted to entry positions `pos`
Mat structure_constraint(const GradedSpace& sp, const std::vector<int>& pos) {
    int n = sp.total_dim();
    const Mat& S = sp.form;
    // collect only rows that some column touches
    std::vector<int> row_id(static_cast<size_t>(n) * n, -1);
    std::vector<std::vector<std::pair<int, Rational>>> cols(pos.size());
    int nrows = 0;
    for (size_t c = 0; c < pos.size(); ++c) {
        int p = pos[c] / n, q = pos[c] % n;
        // (X^T S)(q, j) picks up S(p, j); (S X)(i, q) picks up S(i, p)
        for (int j = 0; j < n; ++j) {
            if (S.at(p, j) == Rational(0)) continue;
            int r = q * n + j;
            if (row_id[static_cast<size_t>(r)] < 0) row_id[static_cast<size_t>(r)] = nrows++;
            cols[c].emplace_back(row_id[static_cast<size_t>(r)], S.at(p, j));
        }
        for (int i = 0; i < n; ++i) {
            if (S.at(i, p) == Rational(0)) continue;
            int r = i * n + q;
            if (row_id[static_cast<size_t>(r)] < 0) row_id[static_cast<size_t>(r)] = nrows++;
            cols[c].emplace_back(row_id[static_cast<size_t>(r)], S.at(i, p));
        }
    }
    Mat out(nrows, static_cast<int>(pos.size()));
    for (size_t c = 0; c < pos.size(); ++c)
        for (const auto& [r, v] : cols[c])
            out.at(r, static_cast<int>(c)) = out.at(r, static_cast<int>(c)) + v;
    return out;
}

void append_from_kernel(const GradedSpace& sp, int k, const std::vector<int>& pos,
                        const Mat& ker, GradedAlgebra& alg) {
    int n = sp.total_dim();
    std::vector<GradedMap>& out = alg.bases[k];
    std::vector<std::pair<int, Rational>>& piv = alg.pivots[k];
    for (int j = 0; j < ker.cols; ++j) {
        Mat m(n, n);
        for (size_t s = 0; s < pos.size(); ++s)
            m.a[static_cast<size_t>(pos[s])] = ker.at(static_cast<int>(s), j);
        out.push_back({deg_int(k), std::move(m)});
    }
    // free positions: rows of `ker` where exactly one column is nonzero and
    // that column's other such row count matches — kernel_basis guarantees a
    // unit row per column (its free coordinate), located where every other
    // column vanishes; find it per column.
    for (int j = 0; j < ker.cols; ++j) {
        int found = -1;
        for (int s = 0; s < ker.rows; ++s) {
            if (ker.at(s, j) == Rational(0)) continue;
            bool exclusive = true;
            for (int j2 = 0; j2 < ker.cols && exclusive; ++j2)
                if (j2 != j && !(ker.at(s, j2) == Rational(0))) exclusive = false;
            if (exclusive) {
                found = s;
                break;
            }
        }
        FS_CHECK(found >= 0, "no exclusive coordinate for a kernel basis column");
        piv.emplace_back(pos[static_cast<size_t>(found)], ker.at(found, j));
    }
}

AlgebraKind nonconformal(AlgebraKind k) {
    if (k == AlgebraKind::CSp) return AlgebraKind::Sp;
    if (k == AlgebraKind::CSo) return AlgebraKind::So;
    return k;
}

} // namespace

int GradedAlgebra::dim() const {
    int d = 0;
    for (const auto& [k, b] : bases) d += static_cast<int>(b.size());
    return d;
}

int GradedAlgebra::max_degree() const {
    const auto ds = space.degrees();
    if (ds.empty()) return 0;
    return (ds.back().tw - ds.front().tw) / 2;
}

const std::vector<GradedMap>& GradedAlgebra::basis_at(int k) const {
    static const std::vector<GradedMap> none;
    auto it = bases.find(k);
    return it == bases.end() ? none : it->second;
}

int GradedAlgebra::dim_at(int k) const { return static_cast<int>(basis_at(k).size()); }

Mat GradedAlgebra::coords(int k, const Mat& m) const {
    const auto& bas = basis_at(k);
    int p = static_cast<int>(bas.size());
    if (p == 0) {
        FS_CHECK(m.is_zero(), "nonzero matrix in an empty algebra degree");
        return Mat(0, 1);
    }
    auto itP = pivots.find(k);
    if (itP != pivots.end() && static_cast<int>(itP->second.size()) == p) {
        Mat c(p, 1);
        for (int s = 0; s < p; ++s) {
            const auto& [posn, scale] = itP->second[static_cast<size_t>(s)];
            const Rational& v = m.a[static_cast<size_t>(posn)];
            c.at(s, 0) = scale == Rational(1) ? v : Rational(v / scale);
        }
        return c;
    }
    Mat a(m.rows * m.cols, p);
    for (int s = 0; s < p; ++s)
        for (int i = 0; i < m.rows * m.cols; ++i)
            a.at(i, s) = bas[static_cast<size_t>(s)].matrix.a[static_cast<size_t>(i)];
    auto [ok, x] = solve(a, vec_of(m));
    FS_CHECK(ok, "matrix not in the algebra degree span");
    return x;
}

Mat GradedAlgebra::combine(int k, const Mat& c, int col) const {
    const auto& bas = basis_at(k);
    int n = space.total_dim();
    Mat x(n, n);
    for (size_t s = 0; s < bas.size(); ++s) {
        const Rational& w = c.at(static_cast<int>(s), col);
        if (w == Rational(0)) continue;
        const Mat& b = bas[s].matrix;
        for (size_t i = 0; i < b.a.size(); ++i)
            if (!(b.a[i] == Rational(0))) x.a[i] = x.a[i] + w * b.a[i];
    }
    return x;
}

GradedAlgebra algebra_basis(const GradedSpace& space, AlgebraKind kind) {
    space.validate();
    Family fam = family_of(kind);
    if (fam == Family::Sp && space.structure != StructureKind::Symplectic)
        throw Error("StructureMissing", "kind " + algebra_str(kind) +
                                            " needs a symplectic form on the space");
    if (fam == Family::So && space.structure != StructureKind::Symmetric)
        throw Error("StructureMissing",
                    "kind " + algebra_str(kind) + " needs a symmetric form on the space");

    GradedAlgebra alg;
    alg.space = space;
    alg.kind = kind;
    int n = space.total_dim();
    int kmax = alg.max_degree();
    for (int k = -kmax; k <= kmax; ++k) {
        std::vector<int> pos = positions_at(space, k);
        if (pos.empty()) continue;
        if (fam == Family::GL) {
            if (kind == AlgebraKind::SL && k == 0) {
                Mat tr(1, static_cast<int>(pos.size()));
                for (size_t s = 0; s < pos.size(); ++s)
                    if (pos[s] / n == pos[s] % n) tr.at(0, static_cast<int>(s)) = Rational(1);
                append_from_kernel(space, k, pos, kernel_basis(tr), alg);
            } else {
                auto& out = alg.bases[k];
                auto& piv = alg.pivots[k];
                for (int p : pos) {
                    Mat m(n, n);
                    m.a[static_cast<size_t>(p)] = Rational(1);
                    out.push_back({deg_int(k), std::move(m)});
                    piv.emplace_back(p, Rational(1));
                }
            }
        } else {
            append_from_kernel(space, k, pos, kernel_basis(structure_constraint(space, pos)),
                               alg);
            if ((kind == AlgebraKind::CSp || kind == AlgebraKind::CSo) && k == 0) {
                alg.bases[k].push_back({deg_int(0), Mat::identity(n)});
                alg.pivots.erase(k); // identity shares entries; coords fall back to solve
            }
        }
        if (alg.bases.count(k) && alg.bases[k].empty()) {
            alg.bases.erase(k);
            alg.pivots.erase(k);
        }
    }

    int expect = 0;
    switch (kind) {
        case AlgebraKind::GL: expect = n * n; break;
        case AlgebraKind::SL: expect = n * n - 1; break;
        case AlgebraKind::Sp: expect = n * (n + 1) / 2; break;
        case AlgebraKind::CSp: expect = n * (n + 1) / 2 + 1; break;
        case AlgebraKind::So: expect = n * (n - 1) / 2; break;
        case AlgebraKind::CSo: expect = n * (n - 1) / 2 + 1; break;
    }
    FS_CHECK(alg.dim() == expect, "graded algebra dimension count is off");
    return alg;
}

std::map<int, int> ProlongationResult::dims() const {
    std::map<int, int> d;
    for (const auto& [k, b] : u)
        if (!b.empty()) d[k] = static_cast<int>(b.size());
    return d;
}

int ProlongationResult::total_dim() const {
    int t = 0;
    for (const auto& [k, b] : u) t += static_cast<int>(b.size());
    return t;
}

int ProlongationResult::dim_at(int k) const {
    auto it = u.find(k);
    return it == u.end() ? 0 : static_cast<int>(it->second.size());
}

namespace {

// Core of Eq.-style iteration: returns per-degree coordinate matrices of u_k
// in the algebra bases; optionally materializes matrices into `out`.
void prolong_core(const GradedAlgebra& alg, const Mat& delta, ProlongMode mode,
                  std::map<int, Mat>* coord_out, ProlongationResult* out) {
    bool has_delta = !delta.is_zero();
    if (out && has_delta) out->u[-1] = {GradedMap{deg_int(-1), delta}};

    Mat ucoords = has_delta ? alg.coords(-1, delta) : Mat(alg.dim_at(-1), 0);
    if (coord_out && has_delta) (*coord_out)[-1] = ucoords;

    int kmax = alg.max_degree();
    for (int k = 0; k <= kmax; ++k) {
        const auto& bas = alg.basis_at(k);
        int p = static_cast<int>(bas.size());
        if (p == 0) {
            ucoords = Mat(alg.dim_at(k), 0);
            continue;
        }
        int qprev = alg.dim_at(k - 1);
        Mat m(qprev, p);
        for (int j = 0; j < p; ++j) {
            Mat br = bracket(bas[static_cast<size_t>(j)].matrix, delta);
            Mat c = alg.coords(k - 1, br);
            for (int i = 0; i < qprev; ++i) m.at(i, j) = c.at(i, 0);
        }
        Mat sys = (mode == ProlongMode::Parametrized && k == 0) ? m : hcat(m, -ucoords);
        Mat ker = kernel_basis(sys);
        Mat xc(p, ker.cols);
        for (int j = 0; j < ker.cols; ++j)
            for (int i = 0; i < p; ++i) xc.at(i, j) = ker.at(i, j);
        if (out && xc.cols > 0) {
            std::vector<GradedMap> uk;
            uk.reserve(static_cast<size_t>(xc.cols));
            for (int j = 0; j < xc.cols; ++j)
                uk.push_back({deg_int(k), alg.combine(k, xc, j)});
            out->u[k] = std::move(uk);
        }
        if (coord_out && xc.cols > 0) (*coord_out)[k] = xc;
        ucoords = std::move(xc);
    }
}

// --- machine-integer engine behind prolongation_dims -------------------------
//
// Sweeps only need dimensions, so the recursion can run in raw pivot
// coordinates: row i of every linear system is the value at basis element i's
// exclusive entry, i.e. the true coordinate scaled by that element's pivot
// value. Row scalings leave kernels untouched, so the counted dimensions are
// exact. Everything stays in (overflow-guarded) machine integers; any failed
// conversion or guard reports false and the caller reruns the generic engine.

constexpr long long kValLimit = 1LL << 20;

struct IntElt {
    std::vector<std::pair<int, long long>> ent; // (row-major position, value)
    int pivot = -1;
    long long scale = 1;
};

bool int_value_of(const Rational& v, const mpz_class& l, long long& out) {
    mpz_class z = v.get_num() * (l / v.get_den());
    if (!z.fits_slong_p()) return false;
    long long x = z.get_si();
    if (x >= kValLimit || x <= -kValLimit) return false;
    out = x;
    return true;
}

bool int_elts_of(const GradedSpace& sp, AlgebraKind kind,
                 std::map<int, std::vector<IntElt>>& elts) {
    const int n = sp.total_dim();
    if (kind == AlgebraKind::GL) {
        int lo = sp.components.begin()->first.tw, hi = lo;
        for (const auto& [d, m] : sp.components) lo = std::min(lo, d.tw), hi = std::max(hi, d.tw);
        for (int k = -1; k <= (hi - lo) / 2; ++k) {
            std::vector<int> pos = positions_at(sp, k);
            if (pos.empty()) continue;
            auto& dst = elts[k];
            dst.reserve(pos.size());
            for (int p : pos) dst.push_back({{{p, 1}}, p, 1});
        }
        return true;
    }
    if (kind != AlgebraKind::SL && kind != AlgebraKind::Sp && kind != AlgebraKind::So)
        return false;
    GradedAlgebra alg = algebra_basis(sp, kind);
    for (const auto& [k, bas] : alg.bases) {
        if (k < -1 || bas.empty()) continue;
        auto itP = alg.pivots.find(k);
        if (itP == alg.pivots.end() || itP->second.size() != bas.size()) return false;
        auto& dst = elts[k];
        for (size_t i = 0; i < bas.size(); ++i) {
            const Mat& m = bas[i].matrix;
            mpz_class l(1);
            for (const auto& v : m.a) {
                mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), v.get_den().get_mpz_t());
                if (!l.fits_slong_p() || l.get_si() > kValLimit) return false;
            }
            IntElt e;
            for (int pos = 0; pos < n * n; ++pos) {
                const Rational& v = m.a[static_cast<size_t>(pos)];
                if (v == 0) continue;
                long long x;
                if (!int_value_of(v, l, x)) return false;
                e.ent.emplace_back(pos, x);
                if (pos == itP->second[i].first) {
                    e.pivot = pos;
                    e.scale = x;
                }
            }
            if (e.pivot < 0) return false;
            dst.push_back(std::move(e));
        }
    }
    return true;
}

bool dims_fast(const Symbol& sym, ProlongMode mode, std::map<int, int>& out) {
    const GradedSpace& sp = sym.space;
    const int n = sp.total_dim();
    if (n == 0 || n > 64) return false;

    std::map<int, std::vector<IntElt>> elts;
    if (!int_elts_of(sp, sym.algebra, elts)) return false;

    // delta as scaled integers (rescaling delta changes no u_k: the
    // recursion is linear in it and u_{-1} is its span)
    const bool has_delta = !sym.delta.is_zero();
    std::vector<std::vector<std::pair<int, long long>>> drow(static_cast<size_t>(n)),
        dcol(static_cast<size_t>(n));
    std::vector<long long> dflat(static_cast<size_t>(n) * n, 0);
    {
        mpz_class l(1);
        for (const auto& v : sym.delta.a) {
            mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), v.get_den().get_mpz_t());
            if (!l.fits_slong_p() || l.get_si() > kValLimit) return false;
        }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const Rational& v = sym.delta.at(i, j);
                if (v == 0) continue;
                long long x;
                if (!int_value_of(v, l, x)) return false;
                drow[static_cast<size_t>(i)].emplace_back(j, x);
                dcol[static_cast<size_t>(j)].emplace_back(i, x);
                dflat[static_cast<size_t>(i) * n + j] = x;
            }
    }

    out.clear();
    if (has_delta) out[-1] = 1;

    const int kmax = elts.empty() ? -1 : elts.rbegin()->first;

    // raw coordinates of the current u-level basis, rows following elts[k-1]
    std::vector<long long> U;
    int ucols = 0;
    if (has_delta) {
        auto it = elts.find(-1);
        if (it == elts.end()) return false;
        U.resize(it->second.size());
        ucols = 1;
        for (size_t i = 0; i < it->second.size(); ++i)
            U[i] = dflat[static_cast<size_t>(it->second[i].pivot)];
    }

    std::vector<long long> scratch(static_cast<size_t>(n) * n, 0);
    std::vector<int> touched;

    for (int k = 0; k <= kmax; ++k) {
        auto itK = elts.find(k);
        const int p = itK == elts.end() ? 0 : static_cast<int>(itK->second.size());
        if (p == 0) {
            U.clear();
            ucols = 0;
            continue;
        }
        auto itPrev = elts.find(k - 1);
        const int q = itPrev == elts.end() ? 0 : static_cast<int>(itPrev->second.size());
        const bool with_u = !(mode == ProlongMode::Parametrized && k == 0);
        const int cols = p + (with_u ? ucols : 0);
        std::vector<long long> sys(static_cast<size_t>(q) * cols, 0);
        for (int j = 0; j < p; ++j) {
            for (auto [pos, v] : itK->second[static_cast<size_t>(j)].ent) {
                int ai = pos / n, aj = pos % n;
                for (auto [t, dv] : drow[static_cast<size_t>(aj)]) {
                    int tp = ai * n + t;
                    if (!scratch[static_cast<size_t>(tp)]) touched.push_back(tp);
                    scratch[static_cast<size_t>(tp)] += v * dv;
                }
                for (auto [s, dv] : dcol[static_cast<size_t>(ai)]) {
                    int tp = s * n + aj;
                    if (!scratch[static_cast<size_t>(tp)]) touched.push_back(tp);
                    scratch[static_cast<size_t>(tp)] -= dv * v;
                }
            }
            for (int i = 0; i < q; ++i) {
                long long x = scratch[static_cast<size_t>(itPrev->second[static_cast<size_t>(i)].pivot)];
                if (x >= intops::kLimit || x <= -intops::kLimit) return false;
                sys[static_cast<size_t>(i) * cols + j] = x;
            }
            for (int tp : touched) scratch[static_cast<size_t>(tp)] = 0;
            touched.clear();
        }
        if (with_u)
            for (int i = 0; i < q; ++i)
                for (int l = 0; l < ucols; ++l)
                    sys[static_cast<size_t>(i) * cols + p + l] = -U[static_cast<size_t>(i) * ucols + l];

        std::vector<int> pc;
        if (!intops::jordan(sys, q, cols, pc)) return false;
        const int udim = cols - static_cast<int>(pc.size());
        if (udim > 0) out[k] = udim;

        // integer kernel x-parts; pivot values differ per row after the
        // one-sweep elimination, so clear them with an lcm per free column
        std::vector<bool> is_pivot(static_cast<size_t>(cols), false);
        for (int c : pc) is_pivot[static_cast<size_t>(c)] = true;
        std::vector<long long> U2(static_cast<size_t>(p) * udim, 0);
        std::vector<long long> x(static_cast<size_t>(p));
        int col = 0;
        for (int fc = 0; fc < cols; ++fc) {
            if (is_pivot[static_cast<size_t>(fc)]) continue;
            long long lcm = 1;
            for (size_t pi = 0; pi < pc.size(); ++pi) {
                if (pc[pi] >= p || sys[pi * static_cast<size_t>(cols) + fc] == 0) continue;
                long long pv = sys[pi * static_cast<size_t>(cols) + static_cast<size_t>(pc[pi])];
                if (pv < 0) pv = -pv;
                lcm = lcm / std::gcd(lcm, pv) * pv;
                if (lcm >= intops::kLimit) return false;
            }
            std::fill(x.begin(), x.end(), 0);
            if (fc < p) x[static_cast<size_t>(fc)] = lcm;
            for (size_t pi = 0; pi < pc.size(); ++pi) {
                if (pc[pi] >= p) continue;
                long long w = sys[pi * static_cast<size_t>(cols) + fc];
                if (w == 0) continue;
                long long pv = sys[pi * static_cast<size_t>(cols) + static_cast<size_t>(pc[pi])];
                __int128 v = -static_cast<__int128>(w) * (lcm / pv);
                if (v >= intops::kLimit || v <= -intops::kLimit) return false;
                x[static_cast<size_t>(pc[pi])] = static_cast<long long>(v);
            }
            long long g = 0;
            for (long long v : x) g = std::gcd(g, v < 0 ? -v : v);
            if (g > 1)
                for (auto& v : x) v /= g;
            for (int i = 0; i < p; ++i) {
                __int128 raw = static_cast<__int128>(x[static_cast<size_t>(i)]) *
                               itK->second[static_cast<size_t>(i)].scale;
                if (raw >= intops::kLimit || raw <= -intops::kLimit) return false;
                U2[static_cast<size_t>(i) * udim + col] = static_cast<long long>(raw);
            }
            ++col;
        }
        U = std::move(U2);
        ucols = udim;
    }
    return true;
}

} // namespace

ProlongationResult universal_prolongation(const Symbol& sym, ProlongMode mode) {
    sym.validate();
    GradedAlgebra alg = algebra_basis(sym.space, sym.algebra);
    ProlongationResult res;
    res.mode = mode;
    res.kind = sym.algebra;
    prolong_core(alg, sym.delta, mode, nullptr, &res);
    return res;
}

std::map<int, int> prolongation_dims(const Symbol& sym, ProlongMode mode) {
    sym.validate();
    std::map<int, int> dims;
    if (dims_fast(sym, mode, dims)) return dims;
    dims.clear();
    GradedAlgebra alg = algebra_basis(sym.space, sym.algebra);
    std::map<int, Mat> coords;
    prolong_core(alg, sym.delta, mode, &coords, nullptr);
    for (const auto& [k, c] : coords)
        if (c.cols > 0) dims[k] = c.cols;
    return dims;
}

Sl2Triple sl2_complete(const Symbol& sym) {
    sym.validate();
    if (sym.delta.is_zero()) throw Error("NoTriple", "delta is zero");
    GradedAlgebra alg = algebra_basis(sym.space, nonconformal(sym.algebra));
    const Mat& d = sym.delta;
    const auto& b1 = alg.basis_at(1);
    int p1 = static_cast<int>(b1.size());
    if (p1 == 0) throw Error("NoTriple", "the algebra has no degree-one part");

    // [[d, y], d] = 2d
    int q = alg.dim_at(-1);
    Mat t1(q, p1);
    for (int j = 0; j < p1; ++j) {
        Mat br = bracket(bracket(d, b1[static_cast<size_t>(j)].matrix), d);
        Mat c = alg.coords(-1, br);
        for (int i = 0; i < q; ++i) t1.at(i, j) = c.at(i, 0);
    }
    auto [ok1, x1] = solve(t1, alg.coords(-1, Rational(2) * d));
    if (!ok1) throw Error("NoTriple", "no degree-one element with [[d,y],d] = 2d");
    Mat y0 = alg.combine(1, x1, 0);
    Mat h = bracket(d, y0);

    // correct y0 by z in ker(ad d) ∩ g_1 with (ad h + 2) z = [h, y0] + 2 y0
    int q0 = alg.dim_at(0);
    Mat addelta(q0, p1);
    for (int j = 0; j < p1; ++j) {
        Mat c = alg.coords(0, bracket(d, b1[static_cast<size_t>(j)].matrix));
        for (int i = 0; i < q0; ++i) addelta.at(i, j) = c.at(i, 0);
    }
    Mat kerc = kernel_basis(addelta);
    Mat z(sym.space.total_dim(), sym.space.total_dim());
    Mat rhs = bracket(h, y0) + Rational(2) * y0;
    if (!rhs.is_zero()) {
        Mat t2(p1, kerc.cols);
        for (int j = 0; j < kerc.cols; ++j) {
            Mat zj = alg.combine(1, kerc, j);
            Mat c = alg.coords(1, bracket(h, zj) + Rational(2) * zj);
            for (int i = 0; i < p1; ++i) t2.at(i, j) = c.at(i, 0);
        }
        auto [ok2, w] = solve(t2, alg.coords(1, rhs));
        if (!ok2) throw Error("NoTriple", "sl2 completion solve is inconsistent");
        Mat zc = kerc * w;
        z = alg.combine(1, zc, 0);
    }
    Mat y = y0 - z;
    FS_CHECK(bracket(h, d) == Rational(2) * d, "sl2 relation [H,delta] = 2 delta");
    FS_CHECK(bracket(h, y) == Rational(-2) * y, "sl2 relation [H,Y] = -2Y");
    FS_CHECK(bracket(d, y) == h, "sl2 relation [delta,Y] = H");
    return {h, y};
}

std::vector<GradedMap> noneffectiveness_ideal(const ProlongationResult& pr,
                                              const Symbol& sym) {
    if (pr.mode != ProlongMode::Unparametrized)
        throw Error("Validation", "the ideal is defined on the unparametrized prolongation");
    if (sym.delta.is_zero())
        throw Error("Validation",
                    "noneffectiveness ideal needs a nonzero delta (the negative part "
                    "must be a line)");

    const Mat& d = sym.delta;
    std::vector<GradedMap> ideal;
    std::map<int, std::vector<GradedMap>> by_deg;
    for (const auto& [k, bas] : pr.u) {
        if (k < 0 || bas.empty()) continue;
        // kernel of (ad d)^{k+1} on u_k
        int n = d.rows;
        Mat cols(n * n, static_cast<int>(bas.size()));
        for (size_t s = 0; s < bas.size(); ++s) {
            Mat it = bas[s].matrix;
            for (int t = 0; t <= k; ++t) it = bracket(d, it);
            for (int i = 0; i < n * n; ++i) cols.at(i, static_cast<int>(s)) = it.a[static_cast<size_t>(i)];
        }
        Mat ker = kernel_basis(cols);
        for (int j = 0; j < ker.cols; ++j) {
            Mat x(n, n);
            for (size_t s = 0; s < bas.size(); ++s) {
                const Rational& w = ker.at(static_cast<int>(s), j);
                if (w == Rational(0)) continue;
                const Mat& b = bas[s].matrix;
                for (size_t i = 0; i < b.a.size(); ++i)
                    if (!(b.a[i] == Rational(0))) x.a[i] = x.a[i] + w * b.a[i];
            }
            by_deg[k].push_back({deg_int(k), x});
            ideal.push_back(by_deg[k].back());
        }
    }

    int udim = pr.total_dim();
    int ndim = static_cast<int>(ideal.size());
    if (udim - ndim != 3)
        throw InternalError("DimensionMismatch: dim u - dim ideal = " +
                            std::to_string(udim - ndim) + ", expected 3");

    // ideal property: brackets of u with the ideal stay in the ideal
    std::map<int, SpanReducer<Rational>> spans;
    for (const auto& [k, bas] : by_deg)
        for (const auto& gm : bas) spans[k].add(vec_of(gm.matrix));
    for (const auto& [i, ub] : pr.u)
        for (const auto& a : ub)
            for (const auto& [j, nb] : by_deg)
                for (const auto& x : nb) {
                    Mat br = bracket(a.matrix, x.matrix);
                    if (br.is_zero()) continue;
                    auto it = spans.find(i + j);
                    bool inside = it != spans.end() && it->second.contains(vec_of(br));
                    if (!inside)
                        throw InternalError(
                            "DimensionMismatch: [u, n] escapes the ideal at degree " +
                            std::to_string(i + j));
                }
    return ideal;
}

namespace {

struct NormalizationContext {
    GradedAlgebra alg;
    ProlongationResult pr;
    std::map<int, Mat> ucoords;
};

NormalizationContext normalization_context(const Symbol& sym) {
    NormalizationContext ctx;
    ctx.alg = algebra_basis(sym.space, sym.algebra);
    ctx.pr.mode = ProlongMode::Unparametrized;
    ctx.pr.kind = sym.algebra;
    prolong_core(ctx.alg, sym.delta, ProlongMode::Unparametrized, &ctx.ucoords, &ctx.pr);
    return ctx;
}

NormalizationComplement complement_at(const NormalizationContext& ctx, const Symbol& sym,
                                      int k) {
    if (k < 1) throw Error("Validation", "normalization degree must be >= 1");
    const GradedAlgebra& alg = ctx.alg;
    int q1 = alg.dim_at(k - 1);
    NormalizationComplement out;
    out.dim_hom_u = ctx.pr.dim_at(k - 1);
    if (q1 == 0) return out;

    const auto& bk = alg.basis_at(k);
    int p = static_cast<int>(bk.size());
    Mat bound(q1, p);
    for (int j = 0; j < p; ++j) {
        Mat c = alg.coords(k - 1, bracket(sym.delta, bk[static_cast<size_t>(j)].matrix));
        for (int i = 0; i < q1; ++i) bound.at(i, j) = c.at(i, 0);
    }
    Mat uc(q1, out.dim_hom_u);
    auto itU = ctx.ucoords.find(k - 1);
    if (itU != ctx.ucoords.end()) uc = itU->second;
    Mat s = hcat(bound, uc);
    int ranks = rank_of(s);
    out.dim_image = ranks - out.dim_hom_u;
    FS_CHECK(out.dim_image == alg.dim_at(k) - ctx.pr.dim_at(k),
             "coboundary image dimension disagrees with the kernel computation");

    Mat span = s;
    std::vector<int> chosen = extend_basis(span, Mat::identity(q1));
    const auto& b1 = alg.basis_at(k - 1);
    for (int idx : chosen)
        out.basis.push_back({deg_int(k - 1), b1[static_cast<size_t>(idx)].matrix});
    FS_CHECK(static_cast<int>(out.basis.size()) == q1 - out.dim_hom_u - out.dim_image,
             "complement dimension identity failed");
    return out;
}

} // namespace

NormalizationComplement normalization_complement(const Symbol& sym, int k) {
    sym.validate();
    NormalizationContext ctx = normalization_context(sym);
    return complement_at(ctx, sym, k);
}

bool normalization_invariant(const Symbol& sym) {
    sym.validate();
    NormalizationContext ctx = normalization_context(sym);
    int kmax = ctx.alg.max_degree();
    std::map<int, NormalizationComplement> comp;
    std::map<int, SpanReducer<Rational>> spans;
    for (int k = 1; k <= kmax + 1; ++k) {
        comp[k] = complement_at(ctx, sym, k);
        for (const auto& gm : comp[k].basis) spans[k].add(vec_of(gm.matrix));
    }
    for (const auto& [j, ub] : ctx.pr.u) {
        if (j < 1) continue;
        for (const auto& a : ub)
            for (int k = 1; k <= kmax + 1; ++k)
                for (const auto& c : comp[k].basis) {
                    Mat br = bracket(a.matrix, c.matrix);
                    if (br.is_zero()) continue;
                    auto it = spans.find(k + j);
                    if (it == spans.end() || !it->second.contains(vec_of(br))) return false;
                }
    }
    return true;
}

} // namespace flagsym
