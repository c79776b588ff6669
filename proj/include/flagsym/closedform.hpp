#pragma once

#include "flagsym/symbols.hpp"

namespace flagsym {

// One irreducible summand: highest weight j (dimension j + 1), meeting the
// algebra grading in every integer degree lo..hi. Always hi - lo == j.
struct Sl2Module {
    int j = 0;
    int lo = 0;
    int hi = 0;
    friend auto operator<=>(const Sl2Module&, const Sl2Module&) = default;
};

// Multiset of irreducible summands, kept sorted.
struct Sl2ModuleSum {
    std::vector<Sl2Module> parts;

    void add(Sl2Module m);
    void add(const Sl2ModuleSum& o);
    int total_dim() const;           // sum of j + 1 over the parts
    std::map<int, int> dims() const; // each part adds 1 to every degree lo..hi
    bool contains(const Sl2ModuleSum& sub) const; // sub-multiset test
    friend bool operator==(const Sl2ModuleSum&, const Sl2ModuleSum&) = default;
};

std::string sl2_sum_str(const Sl2ModuleSum& s); // "P2[-1..1] + P0[0]", "0"

// Graded Hom between a chain spanning degrees r1..s1 and one spanning r2..s2,
// decomposed into irreducibles: P_{l1+l2-2i} over degrees r2-s1+i .. s2-r1-i
// for i = 0..min(l1, l2), where l_j = s_j - r_j. Total dim (l1+1)(l2+1).
// The two chains must have the same degree parity.
Sl2ModuleSum hom_decomposition(Degree r1, Degree s1, Degree r2, Degree s2);

// The summands of hom_decomposition whose degree range stays nonnegative —
// the cross part of the symmetry algebra between the two chains. Empty
// exactly when s2 < s1 or r2 < r1.
Sl2ModuleSum n_hat(Degree r1, Degree s1, Degree r2, Degree s2);

inline Sl2ModuleSum hom_decomposition(int r1, int s1, int r2, int s2) {
    return hom_decomposition(deg_int(r1), deg_int(s1), deg_int(r2), deg_int(s2));
}
inline Sl2ModuleSum n_hat(int r1, int s1, int r2, int s2) {
    return n_hat(deg_int(r1), deg_int(s1), deg_int(r2), deg_int(s2));
}

// Per-degree dims of the line-preserving symmetry algebra of build_model(nf),
// assembled from closed formulas instead of the recursive engine. Matches
// prolongation_dims(build_model(nf), ProlongMode::Unparametrized) with the
// model taken inside the chosen ambient algebra. `kind` selects the full
// matrix algebra (GL, default) or its traceless variant (SL), which is one
// dimension smaller in degree 0. Rejects forms whose degree -1 map is zero.
std::map<int, int> predicted_prolongation_gl(const SymbolNormalForm& nf,
                                             AlgebraKind kind = AlgebraKind::GL);

// Same for symplectic / orthogonal normal forms; the family is read off nf.
std::map<int, int> predicted_prolongation_spso(const SymbolNormalForm& nf);

} // namespace flagsym
