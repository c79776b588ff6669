#include "flagsym/closedform.hpp"

#include <algorithm>

#include "flagsym/error.hpp"

namespace flagsym {

void Sl2ModuleSum::add(Sl2Module m) {
    parts.insert(std::upper_bound(parts.begin(), parts.end(), m), m);
}

void Sl2ModuleSum::add(const Sl2ModuleSum& o) {
    for (const Sl2Module& m : o.parts) add(m);
}

int Sl2ModuleSum::total_dim() const {
    int t = 0;
    for (const Sl2Module& m : parts) t += m.j + 1;
    return t;
}

std::map<int, int> Sl2ModuleSum::dims() const {
    std::map<int, int> d;
    for (const Sl2Module& m : parts)
        for (int k = m.lo; k <= m.hi; ++k) ++d[k];
    return d;
}

bool Sl2ModuleSum::contains(const Sl2ModuleSum& sub) const {
    return std::includes(parts.begin(), parts.end(), sub.parts.begin(), sub.parts.end());
}

std::string sl2_sum_str(const Sl2ModuleSum& s) {
    if (s.parts.empty()) return "0";
    std::string out;
    for (const Sl2Module& m : s.parts) {
        if (!out.empty()) out += " + ";
        out += "P" + std::to_string(m.j) + "[" + std::to_string(m.lo);
        if (m.hi != m.lo) out += ".." + std::to_string(m.hi);
        out += "]";
    }
    return out;
}

namespace {

// Shared core of hom_decomposition / n_hat, endpoints in twice-degrees.
// Emits P_{l1+l2-2i} over degrees (rtw2-stw1)/2+i .. (stw2-rtw1)/2-i for i in
// [ilo, ihi]; nonneg restricts to the summands whose degrees stay >= 0.
Sl2ModuleSum chain_sum(int rtw1, int stw1, int rtw2, int stw2, bool nonneg) {
    if (stw1 < rtw1 || stw2 < rtw2) throw Error("Validation", "chain needs r <= s");
    if ((stw1 - rtw1) % 2 != 0 || (stw2 - rtw2) % 2 != 0)
        throw Error("MixedParity", "chain endpoints differ in parity");
    if ((rtw2 - rtw1) % 2 != 0)
        throw Error("MixedParity", "chains differ in degree parity");
    const int l1 = (stw1 - rtw1) / 2, l2 = (stw2 - rtw2) / 2;
    int ilo = 0, ihi = std::min(l1, l2);
    if (nonneg) {
        ilo = std::max(ilo, (stw1 - rtw2) / 2);
        ihi = std::min(ihi, (stw2 - rtw1) / 2);
    }
    Sl2ModuleSum out;
    for (int i = ilo; i <= ihi; ++i)
        out.add({l1 + l2 - 2 * i, (rtw2 - stw1) / 2 + i, (stw2 - rtw1) / 2 - i});
    return out;
}

// Endpoint twice-degrees of the chains a block is built from.
std::vector<std::pair<int, int>> chains_of(const Block& b) {
    switch (b.kind) {
    case BlockKind::GL:
        return {{b.r.tw, b.s.tw}};
    case BlockKind::SpDelta:
    case BlockKind::SoDelta:
        return {{b.s.tw - 2 * b.l, b.s.tw}, {-b.s.tw, 2 * b.l - b.s.tw}};
    case BlockKind::SpTau:
    case BlockKind::SoTau:
        return {{-b.m.tw, b.m.tw}};
    }
    throw InternalError("unknown block kind");
}

// Cross part of the symmetry algebra between two block instances: the
// nonnegative summands of Hom over every pair of constituent chains. In the
// structured families each unordered instance pair is counted once.
Sl2ModuleSum cross_term(const Block& a, const Block& b) {
    Sl2ModuleSum out;
    for (const auto& [r1, s1] : chains_of(a))
        for (const auto& [r2, s2] : chains_of(b))
            out.add(chain_sum(r1, s1, r2, s2, true));
    return out;
}

// Symmetry algebra of a single structured block. Self-paired chains carry
// none; a paired block carries the pairing line P0[0], the structure-
// compatible part of the square of its top chain (symmetric square for the
// symplectic family, alternating for the orthogonal one) restricted to
// nonnegative degrees, and one extra line in degree 0 exactly when the two
// chains span the same degree window.
Sl2ModuleSum block_l(const Block& b) {
    Sl2ModuleSum out;
    if (b.kind == BlockKind::SpTau || b.kind == BlockKind::SoTau) return out;
    const int stw = b.s.tw, l = b.l;
    out.add({0, 0, 0});
    if (b.kind == BlockKind::SpDelta) {
        int ilo = std::max(0, 2 * l - stw >= 0 ? (2 * l - stw + 1) / 2 : (2 * l - stw) / 2);
        for (int i = ilo; 2 * i <= l; ++i)
            out.add({2 * l - 4 * i, stw - 2 * l + 2 * i, stw - 2 * i});
        if (l % 2 == 0 && stw == l) out.add({0, 0, 0});
    } else {
        int ilo = std::max(0, l - (stw + 1) / 2);
        for (int i = ilo; 2 * i <= l - 1; ++i)
            out.add({2 * l - 2 - 4 * i, stw - 2 * l + 1 + 2 * i, stw - 1 - 2 * i});
        if (l % 2 == 1 && stw == l) out.add({0, 0, 0});
    }
    return out;
}

bool has_nonzero_delta(const SymbolNormalForm& nf) {
    for (const Block& b : nf.blocks) {
        switch (b.kind) {
        case BlockKind::GL:
            if (b.r < b.s) return true;
            break;
        case BlockKind::SpDelta:
        case BlockKind::SoDelta:
            if (b.l >= 1) return true;
            break;
        case BlockKind::SpTau:
            return true; // m >= 1/2 always
        case BlockKind::SoTau:
            if (b.m.tw >= 1) return true;
            break;
        }
    }
    return false;
}

} // namespace

Sl2ModuleSum hom_decomposition(Degree r1, Degree s1, Degree r2, Degree s2) {
    return chain_sum(r1.tw, s1.tw, r2.tw, s2.tw, false);
}

Sl2ModuleSum n_hat(Degree r1, Degree s1, Degree r2, Degree s2) {
    return chain_sum(r1.tw, s1.tw, r2.tw, s2.tw, true);
}

std::map<int, int> predicted_prolongation_gl(const SymbolNormalForm& nf, AlgebraKind kind) {
    nf.validate();
    if (nf.family() != Family::GL)
        throw Error("AlgebraMismatch", "expected a chain normal form");
    if (kind != AlgebraKind::GL && kind != AlgebraKind::SL)
        throw Error("AlgebraMismatch", "closed forms cover gl and sl here");
    if (!has_nonzero_delta(nf))
        throw Error("Validation", "normal form has zero degree -1 map");
    Sl2ModuleSum l;
    for (const Block& a : nf.blocks)
        for (const Block& b : nf.blocks) // ordered pairs, diagonal included
            l.add(cross_term(a, b));
    std::map<int, int> d = l.dims();
    ++d[-1], ++d[0], ++d[1];       // the embedded three-dimensional algebra
    if (kind == AlgebraKind::SL) --d[0]; // remove the trace line
    return d;
}

std::map<int, int> predicted_prolongation_spso(const SymbolNormalForm& nf) {
    nf.validate();
    if (nf.family() == Family::GL)
        throw Error("AlgebraMismatch", "expected a symplectic or orthogonal normal form");
    if (!has_nonzero_delta(nf))
        throw Error("Validation", "normal form has zero degree -1 map");
    Sl2ModuleSum l;
    for (size_t i = 0; i < nf.blocks.size(); ++i) {
        l.add(block_l(nf.blocks[i]));
        for (size_t k = i + 1; k < nf.blocks.size(); ++k)
            l.add(cross_term(nf.blocks[i], nf.blocks[k]));
    }
    std::map<int, int> d = l.dims();
    ++d[-1], ++d[0], ++d[1];
    return d;
}

} // namespace flagsym
