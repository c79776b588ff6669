#pragma once

#include <utility>
#include <vector>

#include "flagsym/graded.hpp"
#include "flagsym/poly.hpp"
#include "flagsym/prolong.hpp"
#include "flagsym/symbols.hpp"

namespace flagsym {

// Moving flag with polynomial frames: entries (index j, frame) with j running
// -depth .. -1, each frame of full column rank over the function field, the
// first one spanning the ambient space, and span(j) ⊇ span(j+1) generically.
// With a structure form attached the flag is generically self-dual: the
// form-complement of span(-i) is span(i - depth).
struct PolyFlagCurve {
    int ambient_dim = 0;
    std::vector<std::pair<int, PolyMat>> subspaces;
    StructureKind structure = StructureKind::None;
    Mat form; // constant, ambient-sized, only read when structure != None

    int depth() const { return static_cast<int>(subspaces.size()); }
    PolyMat frame_at(int j) const; // zero columns for j >= 0, ambient for j <= -depth
    Flag at(const Rational& t0) const; // evaluated frames; ranks may drop
    void validate() const;
};

// Leftmost generically independent columns of m, kept verbatim.
PolyMat poly_column_basis(const PolyMat& m);

// direction +1: span of the columns and their first derivatives. direction
// -1: the dual construction — annihilate, osculate, annihilate back — giving
// the largest subspace whose osculation stays inside the span. RankDrop when
// `frame` is generically column-degenerate.
PolyMat osculate(const PolyMat& frame, int direction);

// Velocity condition: derivatives of sections of span(i) stay in span(i-1)
// for every i > -depth. failing_index is the smallest bad i.
CompatResult check_compatibility(const PolyFlagCurve& curve);

// One refinement move at flag index i, enlarging the flag by an osculating
// or co-osculating space. B moves act on plain flags; C moves keep a
// structured flag self-dual by inserting the mirror complement as well
// (C3 works inside the central gap, where mirror and original may coincide).
// The input must be compatible (NotCompatible otherwise) and the result is
// again compatible; HypothesisFailed names the clause that broke.
enum class RefineKind { B1, B2, C1, C2, C3 };

struct RefineStep {
    RefineKind kind = RefineKind::B1;
    int index = 0;
};

std::string refine_step_str(const RefineStep& s); // "B1(-2)"

struct RefineResult {
    PolyFlagCurve curve; // indices relabeled to -(old depth + inserted) .. -1
    int inserted = 0;    // 1, or 2 when a C move adds a distinct mirror space
};

RefineResult refine(const PolyFlagCurve& curve, RefineStep step);

// Applies admissible moves until none is left: indices are scanned in
// ascending order and at each index the kinds are tried in enum order
// (B1, B2 on plain flags; C1, C2, C3 on structured ones); the first
// admissible move fires and the scan restarts. Accepted steps, labeled in
// the flag they fired on, are appended to `log` when given.
PolyFlagCurve refine_maximal(const PolyFlagCurve& curve,
                             std::vector<RefineStep>* log = nullptr);

struct SymbolAtPoint {
    Rational t0;
    GradedSpace space; // levels of the flag at t0; centered for structured flags
    GradedMap delta;   // velocity class on the levels, degree -1
    SymbolNormalForm normal_form;
};

// Grades the flag at t0 and classifies the velocity class there.
// SingularParameter when a frame rank or a nesting degenerates at t0;
// NotCompatible when the velocity condition fails generically. Unparametrized
// mode classifies the velocity line, reporting the smaller of the two sign
// representatives; parametrized mode classifies the velocity itself.
SymbolAtPoint symbol_at(const PolyFlagCurve& curve, const Rational& t0, Family fam,
                        ProlongMode mode = ProlongMode::Unparametrized,
                        FieldMode field = FieldMode::Real);

// The orbit of the standard filtration of the symbol's graded space under
// exp(t·delta): a compatible curve whose symbol at every parameter is the
// one given (with its degrees re-anchored by the grading convention).
PolyFlagCurve flat_curve(const Symbol& sym);

} // namespace flagsym
