#include "flagsym/curves.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "flagsym/error.hpp"
#include "flagsym/linalg.hpp"

namespace flagsym {

// --- frames over the function field -----------------------------------------

PolyMat poly_column_basis(const PolyMat& m) {
    SpanReducer<RatFunc> red;
    std::vector<int> keep;
    for (int j = 0; j < m.cols; ++j) {
        RatFuncMat v(m.rows, 1);
        for (int i = 0; i < m.rows; ++i) v.at(i, 0) = RatFunc(m.at(i, j));
        if (red.add(v)) keep.push_back(j);
    }
    return select_cols(m, keep);
}

namespace {

// {x : form(c, x) = 0 for every column c}, over the function field
PolyMat poly_annihilator(const PolyMat& frame, const Mat& form) {
    return poly_kernel_basis(transpose(frame) * to_poly(form));
}

bool strictly_between(const PolyMat& small, const PolyMat& mid, const PolyMat& big) {
    return mid.cols > small.cols && mid.cols < big.cols && poly_in_span(big, mid) &&
           poly_in_span(mid, small);
}

} // namespace

// --- PolyFlagCurve -----------------------------------------------------------

PolyMat PolyFlagCurve::frame_at(int j) const {
    if (j >= 0) return PolyMat(ambient_dim, 0);
    int mu = depth();
    if (j < -mu) j = -mu;
    for (auto& [idx, f] : subspaces)
        if (idx == j) return f;
    throw InternalError("frame_at: missing flag index");
}

Flag PolyFlagCurve::at(const Rational& t0) const {
    Flag f;
    f.ambient_dim = ambient_dim;
    for (auto& [j, fr] : subspaces) f.subspaces.emplace_back(j, eval_at(fr, t0));
    return f;
}

void PolyFlagCurve::validate() const {
    if (ambient_dim <= 0) throw Error("Validation", "curve needs a positive ambient dimension");
    if (subspaces.empty()) throw Error("Validation", "curve has no subspaces");
    int mu = depth();
    for (int i = 0; i < mu; ++i) {
        if (subspaces[i].first != -mu + i)
            throw Error("Validation", "flag indices must be contiguous -depth..-1");
        const PolyMat& f = subspaces[i].second;
        if (f.rows != ambient_dim) throw Error("Validation", "frame row count mismatch");
        if (f.cols == 0) throw Error("Validation", "flag members must be nonzero");
        if (poly_generic_rank(f).rank != f.cols)
            throw Error("Validation", "frame columns are generically dependent");
    }
    if (subspaces.front().second.cols != ambient_dim)
        throw Error("Validation", "lowest flag subspace must span everything");
    for (int i = 0; i + 1 < mu; ++i)
        if (!poly_in_span(subspaces[i].second, subspaces[i + 1].second))
            throw Error("Validation", "flag subspaces are not nested");
    if (structure == StructureKind::None) return;
    if (form.rows != ambient_dim || form.cols != ambient_dim)
        throw Error("Validation", "structure form has the wrong shape");
    if (rank_of(form) != ambient_dim) throw Error("Validation", "structure form is degenerate");
    if (structure == StructureKind::Symplectic && !(transpose(form) == -form))
        throw Error("Validation", "symplectic structure needs an antisymmetric form");
    if (structure == StructureKind::Symmetric && !(transpose(form) == form))
        throw Error("Validation", "symmetric structure needs a symmetric form");
    for (int i = 1; i < mu; ++i) {
        PolyMat ann = poly_annihilator(frame_at(-i), form);
        const PolyMat mirror = frame_at(i - mu);
        if (ann.cols != mirror.cols || !poly_in_span(ann, mirror))
            throw Error("Validation", "flag is not self-dual for the structure form");
    }
}

// --- osculation ---------------------------------------------------------------

PolyMat osculate(const PolyMat& frame, int direction) {
    if (direction != 1 && direction != -1)
        throw Error("Validation", "osculation direction must be +1 or -1");
    if (poly_generic_rank(frame).rank != frame.cols)
        throw Error("RankDrop", "osculating a generically degenerate frame");
    if (direction == 1) return poly_column_basis(hcat(frame, derivative(frame)));
    PolyMat ann = poly_kernel_basis(transpose(frame));
    PolyMat grown = poly_column_basis(hcat(ann, derivative(ann)));
    return poly_kernel_basis(transpose(grown));
}

CompatResult check_compatibility(const PolyFlagCurve& curve) {
    int mu = curve.depth();
    for (int i = -mu + 1; i <= -1; ++i)
        if (!poly_in_span(curve.frame_at(i - 1), derivative(curve.frame_at(i))))
            return {false, i};
    return {true, 0};
}

// --- refinement ----------------------------------------------------------------

std::string refine_step_str(const RefineStep& s) {
    static const char* names[] = {"B1", "B2", "C1", "C2", "C3"};
    return std::string(names[static_cast<int>(s.kind)]) + "(" + std::to_string(s.index) + ")";
}

namespace {

// gap key -> new frames for that gap, larger spans first; the key is the label
// of the larger neighbor
struct MovePlan {
    std::string failed; // empty when the move is admissible
    std::map<int, std::vector<PolyMat>> inserts;
    int count = 0;
};

MovePlan fail(std::string why) { return {std::move(why), {}, 0}; }

MovePlan plan_move(const PolyFlagCurve& c, RefineStep step) {
    const int mu = c.depth();
    const int i = step.index;
    const bool wants_structure = step.kind == RefineKind::C1 || step.kind == RefineKind::C2 ||
                                 step.kind == RefineKind::C3;
    if (wants_structure && c.structure == StructureKind::None)
        throw Error("Validation", refine_step_str(step) + " needs a structure form");
    if (!wants_structure && c.structure != StructureKind::None)
        throw Error("Validation", "a self-dual flag refines through the C moves");

    switch (step.kind) {
    case RefineKind::B1:
    case RefineKind::C1: {
        if (i < -mu + 1 || i > -1)
            throw Error("Validation", refine_step_str(step) + ": index out of range");
        const PolyMat cur = c.frame_at(i);
        const PolyMat big = c.frame_at(i - 1);
        PolyMat osc = osculate(cur, +1);
        if (osc.cols == cur.cols) return fail("the osculating space does not grow");
        if (osc.cols >= big.cols || !poly_in_span(big, osc))
            return fail("the osculating space is not strictly inside the next member");
        if (!poly_in_span(big, osculate(osc, +1)))
            return fail("the second osculation leaves the next member");
        if (step.kind == RefineKind::B1) {
            MovePlan p{"", {}, 1};
            p.inserts[i - 1] = {std::move(osc)};
            return p;
        }
        if (!poly_in_span(cur, poly_annihilator(cur, c.form)))
            return fail("the pivot member is not coisotropic");
        PolyMat mirror = poly_annihilator(osc, c.form);
        if (!strictly_between(c.frame_at(-i - mu + 1), mirror, c.frame_at(-i - mu)))
            return fail("the mirror complement is not strictly between its neighbors");
        MovePlan p{"", {}, 2};
        p.inserts[i - 1] = {std::move(osc)};
        p.inserts[-i - mu] = {std::move(mirror)};
        return p;
    }
    case RefineKind::B2:
    case RefineKind::C2: {
        if (i < -mu || i > -1)
            throw Error("Validation", refine_step_str(step) + ": index out of range");
        const PolyMat cur = c.frame_at(i);
        const PolyMat small = c.frame_at(i + 1);
        PolyMat osc = osculate(cur, -1);
        if (osc.cols == cur.cols) return fail("the co-osculating space does not shrink");
        if (osc.cols <= small.cols || !poly_in_span(osc, small))
            return fail("the co-osculating space is not strictly above the previous member");
        if (!poly_in_span(osculate(osc, -1), small))
            return fail("the second co-osculation loses the previous member");
        if (step.kind == RefineKind::B2) {
            MovePlan p{"", {}, 1};
            p.inserts[i] = {std::move(osc)};
            return p;
        }
        if (small.cols == 0 || !poly_in_span(small, poly_annihilator(small, c.form)))
            return fail("the previous member is not coisotropic");
        PolyMat mirror = poly_annihilator(osc, c.form);
        if (!strictly_between(c.frame_at(-i - mu), mirror, c.frame_at(-i - mu - 1)))
            return fail("the mirror complement is not strictly between its neighbors");
        MovePlan p{"", {}, 2};
        p.inserts[i] = {std::move(osc)};
        p.inserts[-i - mu - 1] = {std::move(mirror)};
        return p;
    }
    case RefineKind::C3: {
        if (i < -mu + 1 || i > -1)
            throw Error("Validation", refine_step_str(step) + ": index out of range");
        const PolyMat cur = c.frame_at(i);
        const PolyMat big = c.frame_at(i - 1);
        PolyMat ann_cur = poly_annihilator(cur, c.form);
        if (!poly_in_span(ann_cur, cur)) return fail("the pivot member is not isotropic");
        if (ann_cur.cols != big.cols || !poly_in_span(ann_cur, big))
            return fail("the next member is not the pivot's complement");
        PolyMat osc = osculate(cur, +1);
        if (osc.cols == cur.cols) return fail("the osculating space does not grow");
        if (osc.cols >= big.cols) return fail("the osculating space fills the next member");
        PolyMat mirror = poly_annihilator(osc, c.form);
        if (!poly_in_span(mirror, osc)) return fail("the osculating space is not isotropic");
        if (!poly_in_span(osculate(big, -1), osculate(osc, +1)))
            return fail("the second osculation leaves the co-osculation of the next member");
        if (mirror.cols == osc.cols) {
            MovePlan p{"", {}, 1};
            p.inserts[i - 1] = {std::move(osc)};
            return p;
        }
        MovePlan p{"", {}, 2};
        p.inserts[i - 1] = {std::move(mirror)};
        p.inserts[i - 1].push_back(std::move(osc));
        return p;
    }
    }
    throw InternalError("plan_move: unknown refinement kind");
}

PolyFlagCurve build_refined(const PolyFlagCurve& c, MovePlan&& plan) {
    PolyFlagCurve out;
    out.ambient_dim = c.ambient_dim;
    out.structure = c.structure;
    out.form = c.form;
    std::vector<PolyMat> frames;
    for (auto& [j, f] : c.subspaces) {
        frames.push_back(f);
        auto it = plan.inserts.find(j);
        if (it != plan.inserts.end())
            for (PolyMat& nf : it->second) frames.push_back(std::move(nf));
    }
    const int nd = static_cast<int>(frames.size());
    for (int k = 0; k < nd; ++k) out.subspaces.emplace_back(k - nd, std::move(frames[k]));
    return out;
}

} // namespace

namespace {

void require_compatible(const PolyFlagCurve& curve) {
    CompatResult comp = check_compatibility(curve);
    if (!comp.ok)
        throw Error("NotCompatible", "derivatives of flag member " +
                                         std::to_string(comp.failing_index) +
                                         " leave the next member");
}

} // namespace

RefineResult refine(const PolyFlagCurve& curve, RefineStep step) {
    require_compatible(curve);
    MovePlan plan = plan_move(curve, step);
    if (!plan.failed.empty())
        throw Error("HypothesisFailed", refine_step_str(step) + ": " + plan.failed);
    int count = plan.count;
    PolyFlagCurve out = build_refined(curve, std::move(plan));
    FS_CHECK(check_compatibility(out).ok, "refinement broke compatibility");
    return {std::move(out), count};
}

PolyFlagCurve refine_maximal(const PolyFlagCurve& curve, std::vector<RefineStep>* log) {
    require_compatible(curve);
    const bool structured = curve.structure != StructureKind::None;
    PolyFlagCurve cur = curve;
    for (bool fired = true; fired;) {
        fired = false;
        const int mu = cur.depth();
        for (int i = -mu; i <= -1 && !fired; ++i) {
            std::vector<RefineKind> kinds;
            if (structured) {
                if (i > -mu) kinds.push_back(RefineKind::C1);
                kinds.push_back(RefineKind::C2);
                if (i > -mu) kinds.push_back(RefineKind::C3);
            } else {
                if (i > -mu) kinds.push_back(RefineKind::B1);
                kinds.push_back(RefineKind::B2);
            }
            for (RefineKind k : kinds) {
                MovePlan plan = plan_move(cur, {k, i});
                if (!plan.failed.empty()) continue;
                cur = build_refined(cur, std::move(plan));
                FS_CHECK(check_compatibility(cur).ok, "refinement broke compatibility");
                if (log) log->push_back({k, i});
                fired = true;
                break;
            }
        }
    }
    return cur;
}

// --- the symbol at a parameter -------------------------------------------------

SymbolAtPoint symbol_at(const PolyFlagCurve& curve, const Rational& t0, Family fam,
                        ProlongMode mode, FieldMode field) {
    curve.validate();
    if (fam == Family::Sp && curve.structure != StructureKind::Symplectic)
        throw Error("AlgebraMismatch", "symplectic reading needs an antisymmetric structure form");
    if (fam == Family::So && curve.structure != StructureKind::Symmetric)
        throw Error("AlgebraMismatch", "orthogonal reading needs a symmetric structure form");
    CompatResult comp = check_compatibility(curve);
    if (!comp.ok)
        throw Error("NotCompatible", "derivatives of flag member " +
                                         std::to_string(comp.failing_index) +
                                         " leave the next member");
    const int mu = curve.depth();
    const int n = curve.ambient_dim;

    // level representatives at t0, built upward from the smallest member; the
    // count checks also certify that the nesting survives the evaluation
    Mat basis(n, 0);
    std::vector<int> level_of;
    std::vector<PolyMat> section_of;
    for (int j = -1; j >= -mu; --j) {
        const PolyMat fr = curve.frame_at(j);
        Mat ev = eval_at(fr, t0);
        if (rank_of(ev) != fr.cols)
            throw Error("SingularParameter", "a frame loses rank at the sample point");
        std::vector<int> added = extend_basis(basis, ev);
        if (static_cast<int>(added.size()) != fr.cols - curve.frame_at(j + 1).cols)
            throw Error("SingularParameter", "the nesting degenerates at the sample point");
        for (int k : added) {
            level_of.push_back(j);
            section_of.push_back(fr.col(k));
        }
    }
    FS_CHECK(basis.cols == n, "level representatives do not fill the space");

    // ascending-degree column order; ties keep the greedy order inside a level
    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return level_of[a] < level_of[b]; });

    Mat reps(n, n), der(n, n);
    for (int c = 0; c < n; ++c) {
        Mat col = eval_at(section_of[order[c]], t0);
        Mat dcol = eval_at(derivative(section_of[order[c]]), t0);
        for (int r = 0; r < n; ++r) {
            reps.at(r, c) = col.at(r, 0);
            der.at(r, c) = dcol.at(r, 0);
        }
    }
    auto [solved, xi] = solve(reps, der);
    FS_CHECK(solved, "representative basis is singular");

    // the velocity class keeps exactly the coordinates one level down
    Mat delta(n, n);
    for (int c = 0; c < n; ++c) {
        const int lv = level_of[order[c]];
        for (int r = 0; r < n; ++r) {
            const int lr = level_of[order[r]];
            if (lr == lv - 1)
                delta.at(r, c) = xi.at(r, c);
            else if (lr < lv - 1)
                FS_CHECK(xi.at(r, c) == Rational(0), "velocity drops more than one level");
        }
    }

    GradedSpace space;
    space.convention = Convention::Negative;
    for (int j = -mu; j <= -1; ++j) {
        int d = curve.frame_at(j).cols - curve.frame_at(j + 1).cols;
        if (d > 0) space.components[deg_int(j)] = d;
    }

    Symbol sym;
    if (fam == Family::GL) {
        sym = Symbol{space, delta, AlgebraKind::GL};
    } else {
        // levels i and -depth-1-i pair under the structure form
        Mat paired = transpose(reps) * curve.form * reps;
        Mat f(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                if (level_of[order[r]] + level_of[order[c]] == -mu - 1)
                    f.at(r, c) = paired.at(r, c);
        space.structure = curve.structure;
        space.form = f;
        sym = Symbol{regrade(space, Convention::Centered), delta,
                     fam == Family::Sp ? AlgebraKind::Sp : AlgebraKind::So};
    }
    sym.validate();

    SymbolNormalForm nf = classify_symbol(sym, field).nf;
    if (mode == ProlongMode::Unparametrized && fam != Family::GL && field == FieldMode::Real) {
        Symbol neg = sym;
        neg.delta = -sym.delta;
        SymbolNormalForm alt = classify_symbol(neg, field).nf;
        if (nf_str(alt) < nf_str(nf)) nf = alt;
    }
    return {t0, sym.space, GradedMap{deg_int(-1), delta}, nf};
}

// --- flat curves ----------------------------------------------------------------

PolyFlagCurve flat_curve(const Symbol& sym) {
    sym.validate();
    const GradedSpace& sp = sym.space;
    const int n = sp.total_dim();

    // exp(t·delta) is polynomial: a degree -1 map is nilpotent
    std::vector<Mat> pows{Mat::identity(n)};
    for (int k = 1; !pows.back().is_zero(); ++k) {
        FS_CHECK(k <= n, "degree -1 map is not nilpotent");
        Mat next = pows.back() * sym.delta;
        for (Rational& x : next.a) x = x / Rational(k);
        pows.push_back(std::move(next));
    }
    PolyMat flow(n, n);
    std::vector<Rational> coef;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            coef.clear();
            for (const Mat& m : pows) coef.push_back(m.at(r, c));
            flow.at(r, c) = Poly::from(coef);
        }

    const std::vector<Degree> degs = sp.degrees(); // ascending
    const int mu = static_cast<int>(degs.size());
    PolyFlagCurve out;
    out.ambient_dim = n;
    out.structure = sp.structure;
    out.form = sp.form;
    for (int j = -mu; j <= -1; ++j) {
        std::vector<int> colsel; // the -j highest degree blocks
        for (int b = mu + j; b < mu; ++b) {
            const int off = sp.offset_of(degs[b]);
            for (int c = 0; c < sp.dim_at(degs[b]); ++c) colsel.push_back(off + c);
        }
        out.subspaces.emplace_back(j, select_cols(flow, colsel));
    }
    return out;
}

} // namespace flagsym
