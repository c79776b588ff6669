#include "flagsym/graded.hpp"

#include <algorithm>

#include "flagsym/poly.hpp"

namespace flagsym {

std::string deg_str(Degree d) {
    if (d.tw % 2 == 0) return std::to_string(d.tw / 2);
    return std::to_string(d.tw) + "/2";
}

Degree deg_parse(const std::string& s) {
    try {
        size_t slash = s.find('/');
        if (slash == std::string::npos) {
            size_t used = 0;
            int v = std::stoi(s, &used);
            if (used != s.size()) throw Error("ParseError", "bad degree '" + s + "'");
            return deg_int(v);
        }
        size_t used = 0;
        int num = std::stoi(s.substr(0, slash), &used);
        if (used != slash) throw Error("ParseError", "bad degree '" + s + "'");
        int den = std::stoi(s.substr(slash + 1), &used);
        if (used != s.size() - slash - 1 || den != 2 || num % 2 == 0)
            throw Error("ParseError", "bad degree '" + s + "'");
        return deg_tw(num);
    } catch (const std::invalid_argument&) {
        throw Error("ParseError", "bad degree '" + s + "'");
    } catch (const std::out_of_range&) {
        throw Error("ParseError", "bad degree '" + s + "'");
    }
}

int GradedSpace::total_dim() const {
    int n = 0;
    for (auto& [d, m] : components) n += m;
    return n;
}

std::vector<Degree> GradedSpace::degrees() const {
    std::vector<Degree> out;
    for (auto& [d, m] : components) out.push_back(d);
    return out;
}

int GradedSpace::dim_at(Degree d) const {
    auto it = components.find(d);
    return it == components.end() ? 0 : it->second;
}

int GradedSpace::offset_of(Degree d) const {
    int off = 0;
    for (auto& [dd, m] : components) {
        if (dd == d) return off;
        off += m;
    }
    throw InternalError("offset_of: degree not present");
}

Degree GradedSpace::degree_of_index(int i) const {
    int off = 0;
    for (auto& [dd, m] : components) {
        if (i < off + m) return dd;
        off += m;
    }
    throw InternalError("degree_of_index: out of range");
}

void GradedSpace::validate() const {
    if (components.empty()) throw Error("Validation", "graded space has no components");
    int parity = components.begin()->first.tw & 1;
    for (auto& [d, m] : components) {
        if (m <= 0) throw Error("Validation", "component of nonpositive dimension");
        if ((d.tw & 1) != parity)
            throw Error("Validation", "grading mixes integer and half-odd degrees");
    }
    if (structure == StructureKind::None) return;
    int n = total_dim();
    if (form.rows != n || form.cols != n)
        throw Error("Validation", "structure form has wrong shape");
    if (structure == StructureKind::Symplectic) {
        if (!(transpose(form) == -form))
            throw Error("Validation", "symplectic form is not skew-symmetric");
    } else if (!(transpose(form) == form)) {
        throw Error("Validation", "symmetric form is not symmetric");
    }
    if (rank_of(form) != n) throw Error("DegenerateForm", "structure form is degenerate");
    if (convention == Convention::Centered) {
        for (auto& [d1, m1] : components)
            for (auto& [d2, m2] : components) {
                Mat block(m1, m2);
                for (int i = 0; i < m1; ++i)
                    for (int j = 0; j < m2; ++j)
                        block.at(i, j) = form.at(offset_of(d1) + i, offset_of(d2) + j);
                if (d1 + d2 == Degree{0}) {
                    if (m1 != m2 || rank_of(block) != m1)
                        throw Error("DegenerateForm", "pairing of opposite degrees is degenerate");
                } else if (!block.is_zero()) {
                    throw Error("Validation", "form pairs degrees not summing to zero");
                }
            }
    }
}

Mat Flag::frame_at(int j) const {
    if (j >= 0) return Mat(ambient_dim, 0);
    int mu = depth();
    if (j < -mu) j = -mu;
    for (auto& [idx, f] : subspaces)
        if (idx == j) return f;
    throw InternalError("frame_at: missing flag index");
}

void Flag::validate() const {
    if (subspaces.empty()) throw Error("Validation", "flag has no subspaces");
    int mu = depth();
    for (int i = 0; i < mu; ++i) {
        if (subspaces[i].first != -mu + i)
            throw Error("Validation", "flag indices must be contiguous -depth..-1");
        const Mat& f = subspaces[i].second;
        if (f.rows != ambient_dim) throw Error("Validation", "frame row count mismatch");
        if (rank_of(f) != f.cols) throw Error("Validation", "frame columns are dependent");
    }
    if (subspaces.front().second.cols != ambient_dim)
        throw Error("Validation", "lowest flag subspace must span everything");
    for (int i = 0; i + 1 < mu; ++i)
        if (!in_span(subspaces[i].second, subspaces[i + 1].second))
            throw Error("Validation", "flag subspaces are not nested");
}

Mat homogeneous_part(const GradedSpace& space, Degree degree, const Mat& m) {
    int n = space.total_dim();
    FS_CHECK(m.rows == n && m.cols == n, "homogeneous_part: shape mismatch");
    Mat out(n, n);
    for (auto& [d, dim] : space.components) {
        Degree t = d + degree;
        int td = space.dim_at(t);
        if (td == 0) continue;
        int so = space.offset_of(d), to = space.offset_of(t);
        for (int i = 0; i < td; ++i)
            for (int j = 0; j < dim; ++j) out.at(to + i, so + j) = m.at(to + i, so + j);
    }
    return out;
}

bool is_homogeneous(const GradedSpace& space, Degree degree, const Mat& matrix) {
    return homogeneous_part(space, degree, matrix) == matrix;
}

namespace {

Mat vec_of(const Mat& m) {
    Mat v(m.rows * m.cols, 1);
    for (size_t i = 0; i < m.a.size(); ++i) v.a[i] = m.a[i];
    return v;
}

// rows annihilating the column span of f (standard dot product)
Mat left_null_rows(const Mat& f) { return transpose(kernel_basis(transpose(f))); }

} // namespace

bool is_lie_closed(const std::vector<Mat>& basis) {
    if (basis.empty()) return true;
    Mat cols(basis[0].rows * basis[0].cols, 0);
    for (const Mat& b : basis) cols = hcat(cols, vec_of(b));
    Mat brackets(cols.rows, 0);
    for (size_t i = 0; i < basis.size(); ++i)
        for (size_t j = i + 1; j < basis.size(); ++j)
            brackets = hcat(brackets, vec_of(bracket(basis[i], basis[j])));
    if (brackets.cols == 0) return true;
    return in_span(cols, brackets);
}

int killing_rank(const std::vector<Mat>& basis) {
    const int m = static_cast<int>(basis.size());
    if (m == 0) return 0;
    Mat cols(basis[0].rows * basis[0].cols, 0);
    for (const Mat& b : basis) cols = hcat(cols, vec_of(b));
    FS_CHECK(rank_of(cols) == m, "killing_rank expects an independent basis");
    std::vector<Mat> ad(m, Mat(m, m));
    for (int i = 0; i < m; ++i) {
        Mat rhs(cols.rows, 0);
        for (int j = 0; j < m; ++j) rhs = hcat(rhs, vec_of(bracket(basis[i], basis[j])));
        auto [ok, x] = solve(cols, rhs);
        FS_CHECK(ok, "killing_rank expects a bracket-closed basis");
        ad[i] = x;
    }
    Mat k(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
            Mat prod = ad[i] * ad[j];
            Rational tr(0);
            for (int s = 0; s < m; ++s) tr = tr + prod.at(s, s);
            k.at(i, j) = tr;
            k.at(j, i) = tr;
        }
    return rank_of(k);
}

AssociatedGraded associated_graded(const Flag& flag, const std::vector<Mat>& algebra_basis) {
    flag.validate();
    const int n = flag.ambient_dim;
    const int mu = flag.depth();

    // independent spanning subset of the algebra
    Mat cols(n * n, 0);
    std::vector<Mat> alg;
    for (const Mat& b : algebra_basis) {
        FS_CHECK(b.rows == n && b.cols == n, "algebra element shape mismatch");
        Mat v = vec_of(b);
        Mat trial = hcat(cols, v);
        if (rank_of(trial) > cols.cols) {
            cols = std::move(trial);
            alg.push_back(b);
        }
    }
    const int m = static_cast<int>(alg.size());
    {
        Mat brackets(n * n, 0);
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j)
                brackets = hcat(brackets, vec_of(bracket(alg[i], alg[j])));
        if (brackets.cols > 0 && !in_span(cols, brackets))
            throw Error("NotClosedUnderBracket", "basis does not span a Lie subalgebra");
    }

    // level representatives, picked from the small end of the filtration
    AssociatedGraded out;
    std::vector<std::pair<int, Mat>> levels; // (index j, reps), collected j = -1 down
    Mat acc(n, 0);
    for (int j = -1; j >= -mu; --j) {
        std::vector<int> picked = extend_basis(acc, flag.frame_at(j));
        Mat reps = select_cols(flag.frame_at(j), picked);
        if (reps.cols > 0) levels.emplace_back(j, reps);
    }
    std::reverse(levels.begin(), levels.end());
    Mat p(n, 0);
    for (auto& [j, reps] : levels) {
        out.space.components[deg_int(j)] = reps.cols;
        p = hcat(p, reps);
    }
    FS_CHECK(p.cols == n, "flag levels do not fill the ambient space");
    Mat pinv = inverse(p);
    out.level_basis = p;

    // per-layer annihilator rows of the filtration subspaces
    std::vector<Mat> null_rows(mu + 1); // position i holds rows for index j = -mu + i; j >= 0 handled separately
    for (int i = 0; i < mu; ++i) null_rows[i] = left_null_rows(flag.frame_at(-mu + i));

    auto constraint_kernel = [&](int k) {
        // coefficient vectors c with (Σ c_s A_s) · span(j) ⊆ span(j+k) for all j
        int total_rows = 0;
        std::vector<Mat> frames;
        std::vector<Mat> restr;
        for (int j = -mu; j <= -1; ++j) {
            int tj = j + k;
            if (tj <= -mu) continue; // target contains everything
            Mat nr = tj >= 0 ? Mat::identity(n) : null_rows[tj + mu];
            if (nr.rows == 0) continue;
            const Mat& f = flag.frame_at(j);
            if (f.cols == 0) continue;
            frames.push_back(f);
            restr.push_back(nr);
            total_rows += nr.rows * f.cols;
        }
        Mat sys(total_rows, m);
        for (int s = 0; s < m; ++s) {
            int r0 = 0;
            for (size_t b = 0; b < frames.size(); ++b) {
                Mat block = restr[b] * (alg[s] * frames[b]); // rows × frame-cols
                for (int i = 0; i < block.rows; ++i)
                    for (int j = 0; j < block.cols; ++j)
                        sys.at(r0 + j * block.rows + i, s) = block.at(i, j);
                r0 += block.rows * block.cols;
            }
        }
        return kernel_basis(sys);
    };

    Mat coeff_acc(m, 0);
    std::vector<GradedMap> maps;
    for (int k = mu - 1; k >= -(mu - 1); --k) {
        Mat kk = constraint_kernel(k);
        std::vector<int> picked = extend_basis(coeff_acc, kk);
        for (int idx : picked) {
            Mat a(n, n);
            for (int s = 0; s < m; ++s) {
                if (kk.at(s, idx) == 0) continue;
                a = a + kk.at(s, idx) * alg[s];
            }
            Mat full = pinv * a * p;
            Mat graded = homogeneous_part(out.space, deg_int(k), full);
            // sanity: layers map levels no lower than degree + k
            for (auto& [d, dim] : out.space.components)
                for (auto& [d2, dim2] : out.space.components) {
                    if (d2.tw >= d.tw + 2 * k) continue;
                    for (int i = 0; i < dim2; ++i)
                        for (int j = 0; j < dim; ++j)
                            FS_CHECK(full.at(out.space.offset_of(d2) + i,
                                             out.space.offset_of(d) + j) == 0,
                                     "filtration layer leaks below its degree");
                }
            maps.push_back({deg_int(k), graded});
        }
    }
    FS_CHECK(coeff_acc.cols == m, "graded algebra dimension mismatch");
    std::stable_sort(maps.begin(), maps.end(),
                     [](const GradedMap& x, const GradedMap& y) { return x.degree < y.degree; });
    out.maps = std::move(maps);
    return out;
}

namespace {

std::vector<mpz_class> positive_divisors(mpz_class a) {
    a = abs(a);
    std::vector<mpz_class> out;
    for (mpz_class i = 1; i * i <= a; ++i)
        if (a % i == 0) {
            out.push_back(i);
            out.push_back(a / i);
        }
    return out;
}

std::vector<Rational> rational_roots(Poly m) {
    std::vector<Rational> roots;
    const Poly t = Poly::t();
    while (m.degree() > 0) {
        if (m.coeff(0) == 0) {
            roots.emplace_back(0);
            m = poly_divexact(m, t);
            continue;
        }
        if (m.degree() == 1) {
            roots.push_back(Rational(-m.coeff(0)) / m.coeff(1));
            break;
        }
        mpz_class scale(1);
        for (const Rational& c : m.c) scale = lcm(scale, c.get_den());
        mpz_class a0 = m.coeff(0).get_num() * (scale / m.coeff(0).get_den());
        mpz_class an = m.leading().get_num() * (scale / m.leading().get_den());
        bool found = false;
        for (const mpz_class& p : positive_divisors(a0)) {
            for (const mpz_class& q : positive_divisors(an)) {
                for (int sign : {1, -1}) {
                    Rational cand(sign * p, q);
                    cand.canonicalize();
                    if (m.eval(cand) == 0) {
                        roots.push_back(cand);
                        Poly lin = Poly::from({Rational(-cand), Rational(1)});
                        m = poly_divexact(m, lin);
                        found = true;
                        break;
                    }
                }
                if (found) break;
            }
            if (found) break;
        }
        if (!found)
            throw Error("NonRationalSpectrum", "eigenvalue is not rational");
    }
    return roots;
}

} // namespace

Flag flag_from_grading_element(const Mat& e) {
    FS_CHECK(e.rows == e.cols && e.rows > 0, "grading element must be square");
    const int n = e.rows;

    // minimal polynomial by first linear dependence among powers
    Mat powers(n * n, 0);
    Mat cur = Mat::identity(n);
    Poly minpoly;
    for (int k = 0;; ++k) {
        Mat v = vec_of(cur);
        auto [ok, x] = solve(powers, v);
        if (ok) {
            std::vector<Rational> cs(k + 1, Rational(0));
            for (int i = 0; i < k; ++i) cs[i] = -x.at(i, 0);
            cs[k] = 1;
            minpoly = Poly::from(std::move(cs));
            break;
        }
        FS_CHECK(k < n, "minimal polynomial search exceeded dimension");
        powers = hcat(powers, v);
        cur = cur * e;
    }

    if (poly_gcd(minpoly, minpoly.derivative()).degree() > 0)
        throw Error("NonSemisimple", "grading element has a repeated eigenvalue factor");

    std::vector<Rational> roots = rational_roots(minpoly);
    FS_CHECK(static_cast<int>(roots.size()) == minpoly.degree(),
             "root count mismatch after deflation");
    std::sort(roots.begin(), roots.end(), [](const Rational& a, const Rational& b) { return a > b; });
    for (size_t i = 0; i + 1 < roots.size(); ++i)
        if (!(roots[i] - roots[i + 1] == 1))
            throw Error("NonConsecutiveSpectrum", "eigenvalues are not consecutive");

    const int mu = static_cast<int>(roots.size());
    Flag f;
    f.ambient_dim = n;
    Mat acc(n, 0);
    std::vector<std::pair<int, Mat>> entries;
    for (int i = 0; i < mu; ++i) {
        Mat shifted = e;
        for (int d = 0; d < n; ++d) shifted.at(d, d) = shifted.at(d, d) - roots[i];
        Mat eig = kernel_basis(shifted);
        FS_CHECK(eig.cols > 0, "empty eigenspace for a minimal-polynomial root");
        acc = hcat(acc, eig);
        entries.emplace_back(-(i + 1), acc);
    }
    FS_CHECK(acc.cols == n, "eigenspaces do not fill the space");
    std::reverse(entries.begin(), entries.end());
    f.subspaces = std::move(entries);
    f.validate();
    return f;
}

Mat annihilator(const Mat& frame, const Mat& form) {
    return kernel_basis(transpose(frame) * form);
}

CompatResult is_compatible_flag(const Flag& flag, StructureKind structure, const Mat& form) {
    flag.validate();
    if (structure == StructureKind::None) return {true, 0};
    const int n = flag.ambient_dim;
    if (form.rows != n || form.cols != n)
        throw Error("Validation", "structure form has wrong shape");
    if (structure == StructureKind::Symplectic && !(transpose(form) == -form))
        throw Error("Validation", "symplectic form is not skew-symmetric");
    if (structure == StructureKind::Symmetric && !(transpose(form) == form))
        throw Error("Validation", "symmetric form is not symmetric");
    if (rank_of(form) != n) throw Error("DegenerateForm", "structure form is degenerate");
    const int mu = flag.depth();
    for (int i = 1; i <= mu - 1; ++i) {
        Mat comp = annihilator(flag.frame_at(-i), form);
        const Mat& target = flag.frame_at(i - mu);
        if (comp.cols != target.cols || !in_span(comp, target) || !in_span(target, comp))
            return {false, i};
    }
    return {true, 0};
}

GradedSpace regrade(const GradedSpace& space, Convention to) {
    FS_CHECK(!space.components.empty(), "regrade of empty space");
    GradedSpace out = space;
    out.components.clear();
    Degree top = space.components.rbegin()->first;
    Degree bottom = space.components.begin()->first;
    int shift_tw = 0;
    if (to == Convention::Negative) {
        shift_tw = -2 - top.tw;
    } else {
        if (space.structure == StructureKind::None)
            throw Error("NotCentrable", "centered convention requires a symplectic or symmetric structure");
        shift_tw = -(top.tw + bottom.tw) / 2;
        for (auto& [d, m] : space.components) {
            Degree nd = deg_tw(d.tw + shift_tw);
            auto it = space.components.find(deg_tw(-nd.tw - shift_tw));
            if (it == space.components.end() || it->second != m)
                throw Error("NotCentrable", "dimension vector is not symmetric about a center");
        }
    }
    for (auto& [d, m] : space.components) out.components[deg_tw(d.tw + shift_tw)] = m;
    out.convention = to;
    return out;
}

} // namespace flagsym
