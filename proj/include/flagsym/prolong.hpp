#pragma once

#include <map>
#include <optional>
#include <vector>

#include "flagsym/symbols.hpp"

namespace flagsym {

// Ambient graded algebra g = ⊕ g_k inside gl(V), with a basis per degree.
// When every basis element owns a matrix entry that no other element of its
// degree touches, `pivots` records (entry index, entry value) per element and
// coordinate extraction is a few reads; otherwise coords() solves a system.
struct GradedAlgebra {
    GradedSpace space;
    AlgebraKind kind = AlgebraKind::GL;
    std::map<int, std::vector<GradedMap>> bases;
    std::map<int, std::vector<std::pair<int, Rational>>> pivots;

    int dim() const;
    int max_degree() const;
    const std::vector<GradedMap>& basis_at(int k) const; // empty if absent
    int dim_at(int k) const;
    // coordinate column of a degree-k matrix in the stored basis
    Mat coords(int k, const Mat& m) const;
    // the matrix Σ c_s · basis[k][s]
    Mat combine(int k, const Mat& c, int col) const;
};

// Per-degree basis of the chosen matrix algebra on `space`. Conformal kinds
// append the identity in degree 0. StructureMissing when sp/so kinds are
// requested on a space without the matching form.
GradedAlgebra algebra_basis(const GradedSpace& space, AlgebraKind kind);

enum class ProlongMode { Unparametrized, Parametrized };

struct Sl2Triple {
    Mat h; // degree 0
    Mat y; // degree +1
};

struct ProlongationResult {
    ProlongMode mode = ProlongMode::Unparametrized;
    AlgebraKind kind = AlgebraKind::GL;
    // k -> basis of u_k; key -1 present (spanning the delta line) iff delta != 0
    std::map<int, std::vector<GradedMap>> u;
    std::optional<Sl2Triple> sl2;
    std::vector<GradedMap> n_ideal;

    std::map<int, int> dims() const; // nonzero entries only
    int total_dim() const;
    int dim_at(int k) const;
};

// Largest graded subalgebra of g whose negative part is the delta line:
// u_{-1} = K·delta, u_k = {X in g_k : [X, delta] in u_{k-1}}. In parametrized
// mode u_0 is the centralizer of delta instead. sl2/n_ideal are left empty.
ProlongationResult universal_prolongation(const Symbol& sym, ProlongMode mode);

// Per-degree dimensions of u only, skipping basis materialization; used by
// sweeps where thousands of symbols are compared against predictions.
std::map<int, int> prolongation_dims(const Symbol& sym, ProlongMode mode);

// Completes delta to (delta, H, Y) with [H,delta] = 2delta, [H,Y] = -2Y,
// [delta,Y] = H, solved inside the non-conformal part of the declared
// algebra. NoTriple when delta = 0 or a solve is inconsistent.
Sl2Triple sl2_complete(const Symbol& sym);

// Basis of the largest ideal of u acting trivially on the flat curve:
// per degree k >= 0 the kernel of (ad delta)^{k+1} on u_k. Requires an
// unparametrized result and delta != 0; checks [u, n] ⊆ n and
// dim u - dim n = 3, raising InternalError("DimensionMismatch ...") if not.
std::vector<GradedMap> noneffectiveness_ideal(const ProlongationResult& pr,
                                              const Symbol& sym);

struct NormalizationComplement {
    int dim_image = 0; // dim of the coboundary image modulo u_{k-1}
    int dim_hom_u = 0; // dim u_{k-1}
    // cochain values on delta: a subset of the degree-(k-1) standard basis
    std::vector<GradedMap> basis;
};

// Deterministic complement N_k to Hom(m, u_{k-1}) + Im ∂_k inside the
// degree-k cochains, extended greedily by standard basis elements.
NormalizationComplement normalization_complement(const Symbol& sym, int k);

// Lie-algebra level check that the complements N_k are stable under the
// positive part of u acting on cochains: [a, c(delta)] ∈ N_{k+j} for every
// a in u_j (j >= 1) and c in N_k.
bool normalization_invariant(const Symbol& sym);

} // namespace flagsym
