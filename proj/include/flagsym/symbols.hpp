#pragma once

#include "flagsym/graded.hpp"

namespace flagsym {

enum class AlgebraKind { GL, SL, Sp, So, CSp, CSo };
std::string algebra_str(AlgebraKind a);
AlgebraKind algebra_parse(const std::string& s);

// GL / Sp / So — the structural family an algebra kind belongs to
enum class Family { GL, Sp, So };
Family family_of(AlgebraKind a);

enum class BlockKind { GL, SpDelta, SpTau, SoDelta, SoTau };

// One indecomposable building block of a degree -1 normal form.
//   GL(r, s): single chain spanning degrees r..s, r <= s < 0.
//   SpDelta/SoDelta(s, l): paired chains e_{s-l}..e_s and f_{-s}..f_{l-s}.
//   SpTau/SoTau(m, sign): self-paired chain e_{-m}..e_m.
struct Block {
    BlockKind kind = BlockKind::GL;
    Degree r, s, m;
    int l = 0;
    int sign = +1;

    static Block gl(Degree r, Degree s);
    static Block sp_delta(Degree s, int l);
    static Block sp_tau(Degree m, int sign);
    static Block so_delta(Degree s, int l);
    static Block so_tau(Degree m, int sign);

    void validate() const;
    Family family() const;
    int dim() const;
    int parity() const; // 0: integer degrees, 1: half-odd
    bool operator==(const Block& o) const;
};

// canonical order: delta blocks before tau; then by descending parameters
bool block_less(const Block& a, const Block& b);
std::string block_str(const Block& b);

enum class FieldMode { Real, Complex };

struct SymbolNormalForm {
    std::vector<Block> blocks; // canonical order, one entry per instance
    FieldMode field_mode = FieldMode::Real;

    void canonicalize(); // sort; in complex mode collapse tau signs to +
    void validate() const;
    Family family() const; // AlgebraMismatch if blocks mix families
    bool operator==(const SymbolNormalForm& o) const;
};

std::string nf_str(const SymbolNormalForm& nf);
// "gl: d(-3,-1) + 2*d(-2,-2)" / "sp: D(3/2;2) + tau(1/2,+)" / "so: D(2;1)"
SymbolNormalForm nf_parse(const std::string& text);

// Every canonical normal form of the family with model dimension <= max_dim,
// nonzero degree -1 map, and no unoccupied degree between the lowest and
// highest occupied ones. Chain forms are pinned so the top occupied degree is
// -1; the structured families are symmetric around 0 and come in both degree
// parities. All pairing signs are +. Sorted by dimension, then block lists.
std::vector<SymbolNormalForm> enumerate_normal_forms(Family fam, int max_dim);

struct Symbol {
    GradedSpace space;
    Mat delta; // degree -1 in the ascending block basis
    AlgebraKind algebra = AlgebraKind::GL;

    void validate() const; // NotInAlgebra on structure-equation failure
};

// Standard direct-sum model of a normal form. MixedParity if the blocks mix
// integer and half-odd gradings.
Symbol build_model(const SymbolNormalForm& nf);

// The model's structure form with each block's pairing constants multiplied by
// the matching scale (certificates from classify_symbol).
Mat scaled_model_form(const SymbolNormalForm& nf, const std::vector<Rational>& scales);

struct Classified {
    SymbolNormalForm nf;
    // transform · delta · transform⁻¹ = model delta exactly; in the sp/so case
    // transform carries the input form to the model form up to the per-block
    // positive rational scales (exactly 1 on delta blocks)
    Mat transform;
    std::vector<Rational> scales; // parallel to nf.blocks
};

Classified classify_symbol(const Symbol& sym, FieldMode mode);

Symbol direct_sum(const Symbol& a, const Symbol& b); // AlgebraMismatch, MixedParity

} // namespace flagsym
