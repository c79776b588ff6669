#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "flagsym/closedform.hpp"
#include "flagsym/curves.hpp"
#include "flagsym/error.hpp"
#include "helpers.hpp"

using namespace flagsym;
using namespace flagsym::testing;

namespace {

Poly poly(std::initializer_list<int> coeffs) {
    std::vector<Rational> c;
    for (int x : coeffs) c.emplace_back(x);
    return Poly::from(c);
}

// column (1, t, t^2, ..., t^{n-1})
PolyMat moment_line(int n) {
    PolyMat l(n, 1);
    for (int i = 0; i < n; ++i) {
        std::vector<Rational> c(static_cast<size_t>(i) + 1, Rational(0));
        c.back() = Rational(1);
        l.at(i, 0) = Poly::from(c);
    }
    return l;
}

PolyFlagCurve osculating_flag(int n) {
    std::vector<PolyMat> fr{moment_line(n)};
    while (static_cast<int>(fr.size()) < n) fr.push_back(osculate(fr.back(), +1));
    PolyFlagCurve c;
    c.ambient_dim = n;
    for (int k = n; k >= 1; --k) c.subspaces.emplace_back(-k, fr[static_cast<size_t>(k) - 1]);
    return c;
}

PolyMat rnd_frame(std::mt19937& rng, int rows, int cols, int deg) {
    while (true) {
        PolyMat m(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) {
                std::vector<Rational> c;
                for (int k = 0; k <= deg; ++k) c.push_back(rnd_rat(rng, -2, 2));
                m.at(i, j) = Poly::from(c);
            }
        if (poly_generic_rank(m).rank == cols) return m;
    }
}

bool spans_equal(const PolyMat& a, const PolyMat& b) {
    return poly_generic_rank(a).rank == poly_generic_rank(b).rank && poly_in_span(a, b);
}

// the flag at a sample point only sees occupied levels: the expected round-trip
// form squeezes the model's degrees onto consecutive ones
SymbolNormalForm collapse_degrees(const SymbolNormalForm& nf) {
    Symbol m = build_model(nf);
    std::vector<Degree> degs = m.space.degrees();
    const int mu = static_cast<int>(degs.size());
    std::map<int, int> to;
    for (int k = 0; k < mu; ++k)
        to[degs[k].tw] = nf.family() == Family::GL ? 2 * (k - mu) : 2 * k - (mu - 1);
    SymbolNormalForm out = nf;
    for (Block& b : out.blocks) switch (b.kind) {
        case BlockKind::GL: b = Block::gl(deg_tw(to.at(b.r.tw)), deg_tw(to.at(b.s.tw))); break;
        case BlockKind::SpDelta: b = Block::sp_delta(deg_tw(to.at(b.s.tw)), b.l); break;
        case BlockKind::SoDelta: b = Block::so_delta(deg_tw(to.at(b.s.tw)), b.l); break;
        case BlockKind::SpTau: b = Block::sp_tau(deg_tw(to.at(b.m.tw)), b.sign); break;
        case BlockKind::SoTau: b = Block::so_tau(deg_tw(to.at(b.m.tw)), b.sign); break;
    }
    out.canonicalize();
    out.validate();
    return out;
}

// polynomial matrix exponential of a nilpotent map, evaluated at s
Mat mat_exp(const Mat& x, const Rational& s) {
    const int n = x.rows;
    Mat sum = Mat::identity(n), term = Mat::identity(n);
    for (int k = 1; !term.is_zero(); ++k) {
        REQUIRE(k <= n);
        term = term * x;
        for (Rational& v : term.a) v = v * s / Rational(k);
        sum = sum + term;
    }
    return sum;
}

PolyFlagCurve transformed(const PolyFlagCurve& c, const Mat& a) {
    PolyFlagCurve out = c;
    for (auto& [j, f] : out.subspaces) f = to_poly(a) * f;
    return out;
}

} // namespace

TEST_CASE("leftmost independent columns over the function field") {
    PolyMat m(3, 4);
    m.at(0, 0) = poly({1});
    m.at(1, 1) = poly({0, 1});          // t * e1
    m.at(0, 2) = poly({0, 2});          // dependent on column 0
    m.at(2, 3) = poly({1, 1});
    PolyMat b = poly_column_basis(m);
    CHECK(b.cols == 3);
    CHECK(b.at(0, 0) == poly({1}));     // original columns survive verbatim
    CHECK(b.at(1, 1) == poly({0, 1}));
    CHECK(b.at(2, 2) == poly({1, 1}));
    CHECK(poly_in_span(b, m));
}

TEST_CASE("osculation adds derivative directions") {
    PolyMat l = moment_line(4);
    PolyMat l1 = osculate(l, +1);
    CHECK(l1.cols == 2);
    CHECK(poly_in_span(l1, l));
    CHECK(poly_in_span(l1, derivative(l)));
    CHECK(osculate(l1, +1).cols == 3);
    CHECK(osculate(osculate(l1, +1), +1).cols == 4);

    // constant span stays put
    PolyMat c(3, 1);
    c.at(0, 0) = poly({1});
    c.at(2, 0) = poly({-2});
    CHECK(spans_equal(osculate(c, +1), c));

    // generically dependent columns are rejected
    PolyMat bad(3, 2);
    bad.at(0, 0) = poly({0, 1});
    bad.at(0, 1) = poly({0, 3});
    CHECK_THROWS_WITH_AS(osculate(bad, +1), doctest::Contains("RankDrop"), Error);
}

TEST_CASE("co-osculation is dual to osculation") {
    std::mt19937 rng(901);
    for (int trial = 0; trial < 12; ++trial) {
        int n = 3 + trial % 3;
        int k = 1 + trial % (n - 1);
        PolyMat f = rnd_frame(rng, n, k, 2);
        PolyMat up = osculate(f, +1);
        PolyMat down = osculate(f, -1);

        CHECK(poly_in_span(f, down));           // L^(-1) sits inside L
        CHECK(poly_in_span(osculate(up, -1), f)); // and (L^(1))^(-1) recovers at least L

        // the dual construction gives the same space through any constant
        // invertible symmetric pairing
        Mat g(n, n);
        do {
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j) g.at(i, j) = g.at(j, i) = rnd_rat(rng, -3, 3);
        } while (rank_of(g) != n);
        auto ann_g = [&](const PolyMat& m) {
            return poly_kernel_basis(transpose(m) * to_poly(g));
        };
        CHECK(spans_equal(ann_g(osculate(ann_g(f), +1)), down));
    }

    // a constant frame is its own co-osculation
    PolyMat c(4, 2);
    c.at(0, 0) = poly({1});
    c.at(1, 1) = poly({1});
    CHECK(spans_equal(osculate(c, -1), c));
}

TEST_CASE("compatibility of flag curves") {
    for (int n = 3; n <= 5; ++n) {
        PolyFlagCurve c = osculating_flag(n);
        c.validate();
        CHECK(check_compatibility(c).ok);
    }

    // replacing the middle member by a constant complement that misses the
    // velocity breaks the condition at the top index
    PolyFlagCurve bad;
    bad.ambient_dim = 3;
    PolyMat w(3, 3);
    for (int i = 0; i < 3; ++i) w.at(i, i) = poly({1});
    PolyMat mid(3, 2);
    mid.at(0, 0) = poly({1});
    mid.at(1, 0) = poly({0, 1});
    mid.at(2, 0) = poly({0, 0, 1});
    mid.at(2, 1) = poly({1});
    bad.subspaces.emplace_back(-3, w);
    bad.subspaces.emplace_back(-2, mid);
    bad.subspaces.emplace_back(-1, moment_line(3));
    bad.validate();
    CompatResult r = check_compatibility(bad);
    CHECK_FALSE(r.ok);
    CHECK(r.failing_index == -1);

    // constant flags are always compatible
    PolyFlagCurve cst;
    cst.ambient_dim = 3;
    PolyMat one(3, 1);
    one.at(1, 0) = poly({1});
    cst.subspaces.emplace_back(-2, w);
    cst.subspaces.emplace_back(-1, one);
    CHECK(check_compatibility(cst).ok);
}

TEST_CASE("plain refinement by osculating spaces") {
    // a moving line completes to the full osculating flag
    for (int n = 3; n <= 5; ++n) {
        PolyFlagCurve start;
        start.ambient_dim = n;
        PolyMat w(n, n);
        for (int i = 0; i < n; ++i) w.at(i, i) = poly({1});
        start.subspaces.emplace_back(-2, w);
        start.subspaces.emplace_back(-1, moment_line(n));

        std::vector<RefineStep> log;
        PolyFlagCurve full = refine_maximal(start, &log);
        full.validate();
        CHECK(full.depth() == n);
        CHECK(check_compatibility(full).ok);
        for (const RefineStep& s : log) CHECK(s.kind == RefineKind::B1);
        PolyFlagCurve reference = osculating_flag(n);
        for (int j = -n; j <= -1; ++j)
            CHECK(spans_equal(full.frame_at(j), reference.frame_at(j)));
    }

    // one explicit step: the inserted member is the osculating space
    PolyFlagCurve start;
    start.ambient_dim = 4;
    PolyMat w(4, 4);
    for (int i = 0; i < 4; ++i) w.at(i, i) = poly({1});
    start.subspaces.emplace_back(-2, w);
    start.subspaces.emplace_back(-1, moment_line(4));
    RefineResult step = refine(start, {RefineKind::B1, -1});
    CHECK(step.inserted == 1);
    CHECK(step.curve.depth() == 3);
    CHECK(spans_equal(step.curve.frame_at(-2), osculate(moment_line(4), +1)));
    CHECK(step.curve.subspaces.front().first == -3); // relabeled contiguously

    // nothing fits strictly between consecutive osculating members
    PolyFlagCurve full = osculating_flag(4);
    CHECK_THROWS_WITH_AS(refine(full, {RefineKind::B1, -1}),
                         doctest::Contains("not strictly inside"), Error);

    // a co-osculating move fills a gap reachable only from above
    Symbol tau5 = build_model(nf_parse("sp: tau(5/2,+)"));
    PolyFlagCurve flat6 = flat_curve(tau5);
    PolyFlagCurve gappy;
    gappy.ambient_dim = 6;
    gappy.subspaces.emplace_back(-4, flat6.frame_at(-6));
    gappy.subspaces.emplace_back(-3, flat6.frame_at(-5));
    gappy.subspaces.emplace_back(-2, flat6.frame_at(-3));
    gappy.subspaces.emplace_back(-1, flat6.frame_at(-1));
    std::vector<RefineStep> log;
    PolyFlagCurve completed = refine_maximal(gappy, &log);
    CHECK(completed.depth() == 6);
    REQUIRE(log.size() == 2);
    CHECK(log[0].kind == RefineKind::B2);
    CHECK(log[0].index == -3);
    CHECK(log[1].kind == RefineKind::B2);
    CHECK(log[1].index == -2);
    for (int j = -6; j <= -1; ++j)
        CHECK(spans_equal(completed.frame_at(j), flat6.frame_at(j)));
}

TEST_CASE("self-dual refinement inserts mirror complements") {
    // a moving Lagrangian plane: one C1 completes the flag
    Symbol tau3 = build_model(nf_parse("sp: tau(3/2,+)"));
    PolyFlagCurve flat4 = flat_curve(tau3);
    PolyFlagCurve lag;
    lag.ambient_dim = 4;
    lag.structure = flat4.structure;
    lag.form = flat4.form;
    lag.subspaces.emplace_back(-2, flat4.frame_at(-4));
    lag.subspaces.emplace_back(-1, flat4.frame_at(-2));
    lag.validate();

    RefineResult c1 = refine(lag, {RefineKind::C1, -1});
    CHECK(c1.inserted == 2);
    CHECK(c1.curve.depth() == 4);
    c1.curve.validate();
    PolyMat osc = osculate(lag.frame_at(-1), +1);
    CHECK(spans_equal(c1.curve.frame_at(-3), osc));
    CHECK(spans_equal(c1.curve.frame_at(-1),
                      poly_kernel_basis(transpose(osc) * to_poly(lag.form))));
    for (int j = -4; j <= -1; ++j)
        CHECK(spans_equal(c1.curve.frame_at(j), flat4.frame_at(j)));

    // the dual move: a gap entered from above, with its mirror
    Symbol tau5 = build_model(nf_parse("sp: tau(5/2,+)"));
    PolyFlagCurve flat6 = flat_curve(tau5);
    PolyFlagCurve gappy;
    gappy.ambient_dim = 6;
    gappy.structure = flat6.structure;
    gappy.form = flat6.form;
    gappy.subspaces.emplace_back(-4, flat6.frame_at(-6));
    gappy.subspaces.emplace_back(-3, flat6.frame_at(-5));
    gappy.subspaces.emplace_back(-2, flat6.frame_at(-3));
    gappy.subspaces.emplace_back(-1, flat6.frame_at(-1));
    gappy.validate();
    RefineResult c2 = refine(gappy, {RefineKind::C2, -3});
    CHECK(c2.inserted == 2);
    CHECK(c2.curve.depth() == 6);
    std::vector<RefineStep> log;
    PolyFlagCurve completed = refine_maximal(gappy, &log);
    REQUIRE(log.size() == 1);
    CHECK(log[0].kind == RefineKind::C2);
    CHECK(log[0].index == -3);
    for (int j = -6; j <= -1; ++j)
        CHECK(spans_equal(completed.frame_at(j), flat6.frame_at(j)));

    // central-gap move, coincident pair: one new member
    PolyFlagCurve iso4 = flat_curve(build_model(nf_parse("so: D(1;1)")));
    iso4.validate();
    RefineResult c3a = refine(iso4, {RefineKind::C3, -1});
    CHECK(c3a.inserted == 1);
    CHECK(c3a.curve.depth() == 4);
    c3a.curve.validate();

    // central-gap move, distinct pair: two new members
    PolyFlagCurve iso5 = flat_curve(build_model(nf_parse("so: D(1;1) + tau(0,+)")));
    std::vector<RefineStep> log5;
    PolyFlagCurve full5 = refine_maximal(iso5, &log5);
    REQUIRE(!log5.empty());
    CHECK(log5[0].kind == RefineKind::C3);
    CHECK(log5[0].index == -1);
    RefineResult c3b = refine(iso5, {RefineKind::C3, -1});
    CHECK(c3b.inserted == 2);
    CHECK(c3b.curve.depth() == 5);
    c3b.curve.validate();

    // move/structure mismatches are rejected outright
    CHECK_THROWS_WITH_AS(refine(iso4, {RefineKind::B1, -1}),
                         doctest::Contains("C move"), Error);
    PolyFlagCurve plain = osculating_flag(3);
    CHECK_THROWS_WITH_AS(refine(plain, {RefineKind::C1, -1}),
                         doctest::Contains("structure form"), Error);

    // C1 without a coisotropic pivot names the failed clause
    CHECK_THROWS_WITH_AS(refine(iso4, {RefineKind::C1, -1}),
                         doctest::Contains("coisotropic"), Error);
}

TEST_CASE("symbols at points of a curve") {
    // flat curves return their own normal form, anywhere
    Symbol two = build_model(nf_parse("gl: d(-3,-1)"));
    SymbolAtPoint at0 = symbol_at(flat_curve(two), Rational(0), Family::GL);
    CHECK(nf_str(at0.normal_form) == "gl: d(-3,-1)");
    CHECK(at0.delta.degree == deg_int(-1));

    Symbol mixed = build_model(nf_parse("gl: d(-2,-1) + d(-3,-1)"));
    PolyFlagCurve fm = flat_curve(mixed);
    std::string first;
    for (const Rational& t : {Rational(0), Rational(1), Rational(-1), Rational(1, 2), Rational(7, 3)}) {
        std::string got = nf_str(symbol_at(fm, t, Family::GL).normal_form);
        if (first.empty()) first = got;
        CHECK(got == first);
    }
    CHECK(first == "gl: d(-2,-1) + d(-3,-1)");

    // the full osculating flag of a moment curve carries a single chain
    for (int n = 3; n <= 5; ++n) {
        PolyFlagCurve c = osculating_flag(n);
        for (const Rational& t : {Rational(0), Rational(2), Rational(-1, 3)}) {
            SymbolAtPoint s = symbol_at(c, t, Family::GL);
            CHECK(nf_str(s.normal_form) ==
                  "gl: d(" + std::to_string(-n) + ",-1)");
        }
    }

    // a parameter where a frame drops rank is refused
    PolyFlagCurve sing;
    sing.ambient_dim = 2;
    PolyMat w2(2, 2);
    w2.at(0, 0) = poly({0, 1});
    w2.at(1, 0) = poly({0, 0, 1});
    w2.at(1, 1) = poly({1});
    PolyMat l2(2, 1);
    l2.at(0, 0) = poly({0, 1});
    l2.at(1, 0) = poly({0, 0, 1});
    sing.subspaces.emplace_back(-2, w2);
    sing.subspaces.emplace_back(-1, l2);
    CHECK_THROWS_WITH_AS(symbol_at(sing, Rational(0), Family::GL),
                         doctest::Contains("SingularParameter"), Error);
    CHECK(nf_str(symbol_at(sing, Rational(1), Family::GL).normal_form) == "gl: d(-2,-1)");

    // an incompatible curve is refused
    PolyFlagCurve bad;
    bad.ambient_dim = 3;
    PolyMat w3(3, 3);
    for (int i = 0; i < 3; ++i) w3.at(i, i) = poly({1});
    PolyMat mid(3, 2);
    mid.at(0, 0) = poly({1});
    mid.at(1, 0) = poly({0, 1});
    mid.at(2, 0) = poly({0, 0, 1});
    mid.at(2, 1) = poly({1});
    bad.subspaces.emplace_back(-3, w3);
    bad.subspaces.emplace_back(-2, mid);
    bad.subspaces.emplace_back(-1, moment_line(3));
    CHECK_THROWS_WITH_AS(symbol_at(bad, Rational(5), Family::GL),
                         doctest::Contains("NotCompatible"), Error);

    // structured readings need the matching form
    CHECK_THROWS_WITH_AS(symbol_at(osculating_flag(4), Rational(1), Family::Sp),
                         doctest::Contains("AlgebraMismatch"), Error);

    // parametrized mode keeps the velocity's sign; unparametrized reports the line
    Symbol minus = build_model(nf_parse("sp: tau(1/2,-)"));
    PolyFlagCurve fc = flat_curve(minus);
    CHECK(nf_str(symbol_at(fc, Rational(1), Family::Sp, ProlongMode::Parametrized).normal_form) ==
          "sp: tau(1/2,-)");
    CHECK(nf_str(symbol_at(fc, Rational(1), Family::Sp, ProlongMode::Unparametrized).normal_form) ==
          "sp: tau(1/2,+)");

    // rescaling the velocity never changes the reported forms
    Symbol scaled = build_model(nf_parse("sp: tau(3/2,+) + tau(1/2,-)"));
    scaled.delta = Rational(3) * scaled.delta;
    PolyFlagCurve fs = flat_curve(scaled);
    for (ProlongMode m : {ProlongMode::Parametrized, ProlongMode::Unparametrized})
        CHECK(nf_str(symbol_at(fs, Rational(2), Family::Sp, m).normal_form) ==
              nf_str(symbol_at(flat_curve(build_model(nf_parse("sp: tau(3/2,+) + tau(1/2,-)"))),
                               Rational(2), Family::Sp, m)
                         .normal_form));
}

TEST_CASE("flat curves are compatible self-dual flags") {
    // two-step chain: explicit frames
    PolyFlagCurve c2 = flat_curve(build_model(nf_parse("gl: d(-2,-1)")));
    CHECK(c2.depth() == 2);
    PolyMat expect(2, 1);
    expect.at(0, 0) = poly({0, 1});
    expect.at(1, 0) = poly({1});
    CHECK(spans_equal(c2.frame_at(-1), expect));
    CHECK(c2.frame_at(-2).cols == 2);

    for (const char* dsl : {"sp: D(3/2;2) + tau(1/2,+)", "sp: D(1;1) + D(2;1)",
                            "so: D(2;1) + tau(1,-)", "so: D(1/2;1)"}) {
        PolyFlagCurve fc = flat_curve(build_model(nf_parse(dsl)));
        fc.validate();
        CHECK(check_compatibility(fc).ok);
        for (const Rational& t : {Rational(0), Rational(1), Rational(-2), Rational(1, 2)})
            CHECK(is_compatible_flag(fc.at(t), fc.structure, fc.form).ok);
    }
}

TEST_CASE("flat-curve round trips recover the normal form") {
    std::mt19937 rng(4021);
    auto pick_t = [&] {
        return Rational(std::uniform_int_distribution<int>(-6, 6)(rng),
                        std::uniform_int_distribution<int>(1, 4)(rng));
    };

    // full-support forms come back verbatim
    for (Family fam : {Family::GL, Family::Sp, Family::So}) {
        std::vector<SymbolNormalForm> all = enumerate_normal_forms(fam, 7);
        std::uniform_int_distribution<size_t> pick(0, all.size() - 1);
        for (int trial = 0; trial < 10; ++trial) {
            const SymbolNormalForm& nf = all[pick(rng)];
            CAPTURE(nf_str(nf));
            PolyFlagCurve fc = flat_curve(build_model(nf));
            SymbolAtPoint s = symbol_at(fc, pick_t(), fam, ProlongMode::Parametrized);
            CHECK(nf_str(s.normal_form) == nf_str(nf));
        }
    }

    // arbitrary forms come back with their unoccupied degrees squeezed out
    for (Family fam : {Family::GL, Family::Sp, Family::So}) {
        for (int trial = 0; trial < 10; ++trial) {
            SymbolNormalForm nf = random_normal_form(rng, fam, 8);
            CAPTURE(nf_str(nf));
            SymbolNormalForm want = collapse_degrees(nf);
            PolyFlagCurve fc = flat_curve(build_model(nf));
            Rational t = pick_t();
            SymbolAtPoint s = symbol_at(fc, t, fam, ProlongMode::Parametrized);
            CHECK(nf_str(s.normal_form) == nf_str(want));

            if (fam == Family::GL) continue;
            Symbol squeezed = build_model(want);
            Symbol neg = squeezed;
            neg.delta = -squeezed.delta;
            std::string lo = std::min(nf_str(want),
                                      nf_str(classify_symbol(neg, FieldMode::Real).nf));
            SymbolAtPoint u = symbol_at(fc, t, fam, ProlongMode::Unparametrized);
            CHECK(nf_str(u.normal_form) == lo);
        }
    }
}

TEST_CASE("constant ambient changes do not move the symbol") {
    std::mt19937 rng(7311);

    PolyFlagCurve base = osculating_flag(4);
    std::string want = nf_str(symbol_at(base, Rational(1), Family::GL).normal_form);
    for (int trial = 0; trial < 5; ++trial) {
        Mat a(4, 4);
        do {
            for (Rational& x : a.a) x = rnd_rat(rng, -3, 3);
        } while (rank_of(a) != 4);
        PolyFlagCurve moved = transformed(base, a);
        CHECK(nf_str(symbol_at(moved, Rational(1), Family::GL).normal_form) == want);
    }

    // structure-preserving change on a self-dual curve, built from the
    // symbol's own nilpotent symmetries
    Symbol sym = build_model(nf_parse("sp: D(3/2;1) + tau(1/2,+)"));
    Sl2Triple triple = sl2_complete(sym);
    Mat a = mat_exp(sym.delta, Rational(1)) * mat_exp(triple.y, Rational(1, 2));
    CHECK((transpose(a) * sym.space.form * a) == sym.space.form);
    PolyFlagCurve fc = flat_curve(sym);
    PolyFlagCurve moved = transformed(fc, a);
    moved.validate();
    for (const Rational& t : {Rational(0), Rational(3, 2)})
        CHECK(nf_str(symbol_at(moved, t, Family::Sp).normal_form) ==
              nf_str(symbol_at(fc, t, Family::Sp).normal_form));

    // refinements commute with the change as well
    PolyFlagCurve lag;
    lag.ambient_dim = 4;
    Symbol tau3 = build_model(nf_parse("sp: tau(3/2,+)"));
    PolyFlagCurve flat4 = flat_curve(tau3);
    lag.structure = flat4.structure;
    lag.form = flat4.form;
    lag.subspaces.emplace_back(-2, flat4.frame_at(-4));
    lag.subspaces.emplace_back(-1, flat4.frame_at(-2));
    Mat b = mat_exp(tau3.delta, Rational(-2));
    PolyFlagCurve lag_moved = transformed(lag, b);
    std::vector<RefineStep> log1, log2;
    PolyFlagCurve r1 = refine_maximal(lag, &log1);
    PolyFlagCurve r2 = refine_maximal(lag_moved, &log2);
    CHECK(log1.size() == log2.size());
    CHECK(r1.depth() == r2.depth());
    for (int j = -r1.depth(); j <= -1; ++j)
        CHECK(spans_equal(to_poly(b) * r1.frame_at(j), r2.frame_at(j)));
}

TEST_CASE("symmetries of the flat curve stay on the velocity line") {
    for (const char* dsl : {"gl: d(-3,-1) + d(-2,-1)", "sp: D(3/2;2) + tau(1/2,+)",
                            "so: D(2;1) + tau(1,+)"}) {
        Symbol sym = build_model(nf_parse(dsl));
        ProlongationResult pr = universal_prolongation(sym, ProlongMode::Unparametrized);
        const int n = sym.space.total_dim();
        Mat dvec(n * n, 1);
        for (int i = 0; i < n * n; ++i) dvec.at(i, 0) = sym.delta.a[static_cast<size_t>(i)];
        for (const auto& [k, basis] : pr.u) {
            if (k < 0) continue;
            for (const GradedMap& gm : basis) {
                Mat x = gm.matrix;
                for (int step = 0; step <= k; ++step) x = bracket(sym.delta, x);
                // after k+1 bracketings a degree-k symmetry lands on the line
                Mat xvec(n * n, 1);
                for (int i = 0; i < n * n; ++i) xvec.at(i, 0) = x.a[static_cast<size_t>(i)];
                CHECK(in_span(dvec, xvec));
                CHECK(bracket(sym.delta, x).is_zero());
            }
        }
    }
}
