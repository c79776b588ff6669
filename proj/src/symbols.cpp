#include "flagsym/symbols.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace flagsym {

std::string algebra_str(AlgebraKind a) {
    switch (a) {
    case AlgebraKind::GL: return "gl";
    case AlgebraKind::SL: return "sl";
    case AlgebraKind::Sp: return "sp";
    case AlgebraKind::So: return "so";
    case AlgebraKind::CSp: return "csp";
    case AlgebraKind::CSo: return "cso";
    }
    throw InternalError("unknown algebra kind");
}

AlgebraKind algebra_parse(const std::string& s) {
    if (s == "gl") return AlgebraKind::GL;
    if (s == "sl") return AlgebraKind::SL;
    if (s == "sp") return AlgebraKind::Sp;
    if (s == "so") return AlgebraKind::So;
    if (s == "csp") return AlgebraKind::CSp;
    if (s == "cso") return AlgebraKind::CSo;
    throw Error("ParseError", "unknown algebra '" + s + "'");
}

Family family_of(AlgebraKind a) {
    switch (a) {
    case AlgebraKind::GL:
    case AlgebraKind::SL: return Family::GL;
    case AlgebraKind::Sp:
    case AlgebraKind::CSp: return Family::Sp;
    case AlgebraKind::So:
    case AlgebraKind::CSo: return Family::So;
    }
    throw InternalError("unknown algebra kind");
}

Block Block::gl(Degree r, Degree s) {
    Block b;
    b.kind = BlockKind::GL;
    b.r = r;
    b.s = s;
    b.validate();
    return b;
}

Block Block::sp_delta(Degree s, int l) {
    Block b;
    b.kind = BlockKind::SpDelta;
    b.s = s;
    b.l = l;
    b.validate();
    return b;
}

Block Block::sp_tau(Degree m, int sign) {
    Block b;
    b.kind = BlockKind::SpTau;
    b.m = m;
    b.sign = sign;
    b.validate();
    return b;
}

Block Block::so_delta(Degree s, int l) {
    Block b;
    b.kind = BlockKind::SoDelta;
    b.s = s;
    b.l = l;
    b.validate();
    return b;
}

Block Block::so_tau(Degree m, int sign) {
    Block b;
    b.kind = BlockKind::SoTau;
    b.m = m;
    b.sign = sign;
    b.validate();
    return b;
}

void Block::validate() const {
    switch (kind) {
    case BlockKind::GL:
        if (r.tw % 2 != 0 || s.tw % 2 != 0)
            throw Error("Validation", "chain block needs integer degrees");
        if (!(r <= s) || s.tw >= 0)
            throw Error("Validation", "chain block needs r <= s < 0");
        return;
    case BlockKind::SpDelta:
        if (l < 0 || l > (s.tw % 2 == 0 ? s.tw : s.tw - 1))
            throw Error("Validation", "paired symplectic block length out of range");
        return;
    case BlockKind::SoDelta:
        if (l < 0 || l > (s.tw % 2 == 0 ? s.tw - 1 : s.tw))
            throw Error("Validation", "paired orthogonal block length out of range");
        return;
    case BlockKind::SpTau:
        if (m.tw % 2 == 0 || m.tw <= 0)
            throw Error("Validation", "self-paired symplectic block needs positive half-odd m");
        if (sign != 1 && sign != -1) throw Error("Validation", "bad sign");
        return;
    case BlockKind::SoTau:
        if (m.tw % 2 != 0 || m.tw < 0)
            throw Error("Validation", "self-paired orthogonal block needs nonnegative integer m");
        if (sign != 1 && sign != -1) throw Error("Validation", "bad sign");
        return;
    }
    throw InternalError("unknown block kind");
}

Family Block::family() const {
    switch (kind) {
    case BlockKind::GL: return Family::GL;
    case BlockKind::SpDelta:
    case BlockKind::SpTau: return Family::Sp;
    case BlockKind::SoDelta:
    case BlockKind::SoTau: return Family::So;
    }
    throw InternalError("unknown block kind");
}

int Block::dim() const {
    switch (kind) {
    case BlockKind::GL: return (s.tw - r.tw) / 2 + 1;
    case BlockKind::SpDelta:
    case BlockKind::SoDelta: return 2 * (l + 1);
    case BlockKind::SpTau:
    case BlockKind::SoTau: return m.tw + 1;
    }
    throw InternalError("unknown block kind");
}

int Block::parity() const {
    switch (kind) {
    case BlockKind::GL: return 0;
    case BlockKind::SpDelta:
    case BlockKind::SoDelta: return s.tw & 1;
    case BlockKind::SpTau:
    case BlockKind::SoTau: return m.tw & 1;
    }
    throw InternalError("unknown block kind");
}

bool Block::operator==(const Block& o) const {
    if (kind != o.kind) return false;
    switch (kind) {
    case BlockKind::GL: return r == o.r && s == o.s;
    case BlockKind::SpDelta:
    case BlockKind::SoDelta: return s == o.s && l == o.l;
    case BlockKind::SpTau:
    case BlockKind::SoTau: return m == o.m && sign == o.sign;
    }
    return false;
}

bool block_less(const Block& a, const Block& b) {
    auto kind_rank = [](BlockKind k) {
        switch (k) {
        case BlockKind::GL: return 0;
        case BlockKind::SpDelta: return 1;
        case BlockKind::SpTau: return 2;
        case BlockKind::SoDelta: return 3;
        case BlockKind::SoTau: return 4;
        }
        return 5;
    };
    if (kind_rank(a.kind) != kind_rank(b.kind)) return kind_rank(a.kind) < kind_rank(b.kind);
    switch (a.kind) {
    case BlockKind::GL:
        if (a.s != b.s) return b.s < a.s;
        return b.r < a.r;
    case BlockKind::SpDelta:
    case BlockKind::SoDelta:
        if (a.s != b.s) return b.s < a.s;
        return a.l > b.l;
    case BlockKind::SpTau:
    case BlockKind::SoTau:
        if (a.m != b.m) return b.m < a.m;
        return a.sign > b.sign; // + before -
    }
    return false;
}

std::string block_str(const Block& b) {
    switch (b.kind) {
    case BlockKind::GL: return "d(" + deg_str(b.r) + "," + deg_str(b.s) + ")";
    case BlockKind::SpDelta:
    case BlockKind::SoDelta: return "D(" + deg_str(b.s) + ";" + std::to_string(b.l) + ")";
    case BlockKind::SpTau:
    case BlockKind::SoTau:
        return "tau(" + deg_str(b.m) + (b.sign > 0 ? ",+)" : ",-)");
    }
    throw InternalError("unknown block kind");
}

void SymbolNormalForm::canonicalize() {
    if (field_mode == FieldMode::Complex)
        for (Block& b : blocks)
            if (b.kind == BlockKind::SpTau || b.kind == BlockKind::SoTau) b.sign = +1;
    std::stable_sort(blocks.begin(), blocks.end(), block_less);
}

Family SymbolNormalForm::family() const {
    if (blocks.empty()) throw Error("Validation", "empty normal form");
    Family f = blocks.front().family();
    for (const Block& b : blocks)
        if (b.family() != f)
            throw Error("AlgebraMismatch", "blocks from different algebra families");
    return f;
}

void SymbolNormalForm::validate() const {
    family();
    int p = blocks.front().parity();
    for (const Block& b : blocks) {
        b.validate();
        if (b.parity() != p)
            throw Error("MixedParity", "blocks mix integer and half-odd gradings");
        if (field_mode == FieldMode::Complex &&
            (b.kind == BlockKind::SpTau || b.kind == BlockKind::SoTau) && b.sign < 0)
            throw Error("Validation", "sign carries no meaning in complex mode");
    }
}

bool SymbolNormalForm::operator==(const SymbolNormalForm& o) const {
    return blocks == o.blocks && field_mode == o.field_mode;
}

std::string nf_str(const SymbolNormalForm& nf) {
    std::string fam = nf.family() == Family::GL ? "gl" : nf.family() == Family::Sp ? "sp" : "so";
    std::string out = fam + ": ";
    for (size_t i = 0; i < nf.blocks.size();) {
        size_t j = i;
        while (j < nf.blocks.size() && nf.blocks[j] == nf.blocks[i]) ++j;
        if (i > 0) out += " + ";
        if (j - i > 1) out += std::to_string(j - i) + "*";
        out += block_str(nf.blocks[i]);
        i = j;
    }
    return out;
}

namespace {

std::string strip(const std::string& s) {
    size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_top(const std::string& s, char sep) {
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (char c : s) {
        if (c == '(') depth++;
        if (c == ')') depth--;
        if (c == sep && depth == 0) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

} // namespace

SymbolNormalForm nf_parse(const std::string& text) {
    size_t colon = text.find(':');
    if (colon == std::string::npos) throw Error("ParseError", "expected 'family: blocks'");
    std::string fam = strip(text.substr(0, colon));
    if (fam != "gl" && fam != "sp" && fam != "so")
        throw Error("ParseError", "unknown family '" + fam + "'");
    SymbolNormalForm nf;
    for (std::string term : split_top(text.substr(colon + 1), '+')) {
        term = strip(term);
        if (term.empty()) throw Error("ParseError", "empty term");
        int mult = 1;
        size_t star = term.find('*');
        if (star != std::string::npos && term.find('(') > star) {
            std::string ms = strip(term.substr(0, star));
            try {
                size_t used = 0;
                mult = std::stoi(ms, &used);
                if (used != ms.size() || mult <= 0) throw Error("ParseError", "bad multiplicity");
            } catch (const std::logic_error&) {
                throw Error("ParseError", "bad multiplicity in '" + term + "'");
            }
            term = strip(term.substr(star + 1));
        }
        size_t open = term.find('(');
        if (open == std::string::npos || term.back() != ')')
            throw Error("ParseError", "malformed block '" + term + "'");
        std::string name = strip(term.substr(0, open));
        std::string args = term.substr(open + 1, term.size() - open - 2);
        Block b;
        if (name == "d" && fam == "gl") {
            auto parts = split_top(args, ',');
            if (parts.size() != 2) throw Error("ParseError", "d(r,s) needs two degrees");
            b = Block::gl(deg_parse(strip(parts[0])), deg_parse(strip(parts[1])));
        } else if (name == "D" && fam != "gl") {
            auto parts = split_top(args, ';');
            if (parts.size() != 2) throw Error("ParseError", "D(s;l) needs a degree and a length");
            Degree s = deg_parse(strip(parts[0]));
            int l = 0;
            try {
                size_t used = 0;
                std::string ls = strip(parts[1]);
                l = std::stoi(ls, &used);
                if (used != ls.size()) throw Error("ParseError", "bad length");
            } catch (const std::logic_error&) {
                throw Error("ParseError", "bad length in '" + term + "'");
            }
            b = fam == "sp" ? Block::sp_delta(s, l) : Block::so_delta(s, l);
        } else if (name == "tau" && fam != "gl") {
            auto parts = split_top(args, ',');
            if (parts.size() != 2) throw Error("ParseError", "tau(m,sign) needs two arguments");
            Degree m = deg_parse(strip(parts[0]));
            std::string sg = strip(parts[1]);
            if (sg != "+" && sg != "-") throw Error("ParseError", "sign must be + or -");
            int sign = sg == "+" ? 1 : -1;
            b = fam == "sp" ? Block::sp_tau(m, sign) : Block::so_tau(m, sign);
        } else {
            throw Error("ParseError", "block '" + name + "' not valid for family " + fam);
        }
        for (int k = 0; k < mult; ++k) nf.blocks.push_back(b);
    }
    nf.canonicalize();
    nf.validate();
    return nf;
}

// --- enumeration ----------------------------------------------------------

namespace {

// occupied twice-degrees of a block
std::vector<int> support_tw(const Block& b) {
    std::vector<int> tws;
    auto chain = [&](int lo, int hi) {
        for (int t = lo; t <= hi; t += 2) tws.push_back(t);
    };
    switch (b.kind) {
    case BlockKind::GL:
        chain(b.r.tw, b.s.tw);
        break;
    case BlockKind::SpDelta:
    case BlockKind::SoDelta:
        chain(b.s.tw - 2 * b.l, b.s.tw);
        chain(-b.s.tw, 2 * b.l - b.s.tw);
        break;
    case BlockKind::SpTau:
    case BlockKind::SoTau:
        chain(-b.m.tw, b.m.tw);
        break;
    }
    std::sort(tws.begin(), tws.end());
    tws.erase(std::unique(tws.begin(), tws.end()), tws.end());
    return tws;
}

bool block_moves(const Block& b) { // nonzero restriction of the degree -1 map
    switch (b.kind) {
    case BlockKind::GL: return b.r < b.s;
    case BlockKind::SpDelta:
    case BlockKind::SoDelta: return b.l >= 1;
    case BlockKind::SpTau:
    case BlockKind::SoTau: return b.m.tw >= 1;
    }
    return false;
}

// multisets over `types` within the dimension budget, leaf-filtered by the
// caller; cover[] counts occupancy per twice-degree slot
void enum_multisets(const std::vector<Block>& types, int max_dim,
                    const std::function<void(const std::vector<Block>&)>& emit) {
    std::vector<Block> cur;
    std::map<int, int> cover;
    std::function<void(size_t, int)> dfs = [&](size_t i, int budget) {
        if (i == types.size()) {
            if (cur.empty()) return;
            bool moves = false;
            for (const Block& b : cur) moves = moves || block_moves(b);
            if (!moves) return;
            for (auto it = cover.begin(); std::next(it) != cover.end(); ++it)
                if (std::next(it)->first != it->first + 2) return; // gap
            emit(cur);
            return;
        }
        dfs(i + 1, budget);
        const int sz = types[i].dim();
        int used = 0;
        while (budget - used >= sz) {
            used += sz;
            cur.push_back(types[i]);
            for (int t : support_tw(types[i])) ++cover[t];
            dfs(i + 1, budget - used);
        }
        for (; used > 0; used -= sz) {
            for (int t : support_tw(cur.back()))
                if (--cover[t] == 0) cover.erase(t);
            cur.pop_back();
        }
    };
    dfs(0, max_dim);
}

} // namespace

std::vector<SymbolNormalForm> enumerate_normal_forms(Family fam, int max_dim) {
    std::vector<Block> types;
    if (fam == Family::GL) {
        for (int s = -1; s >= -max_dim; --s)
            for (int r = s; r > s - max_dim && r >= -max_dim; --r)
                types.push_back(Block::gl(deg_int(r), deg_int(s)));
    } else {
        // both parities; the parity mix is rejected at validate, and the gap
        // filter already separates them, so one candidate list serves
        for (int stw = 0; stw <= max_dim - 1; ++stw) {
            int lmax = fam == Family::Sp ? (stw % 2 == 0 ? stw : stw - 1)
                                         : (stw % 2 == 0 ? stw - 1 : stw);
            for (int l = 0; l <= lmax && 2 * (l + 1) <= max_dim; ++l)
                types.push_back(fam == Family::Sp ? Block::sp_delta(deg_tw(stw), l)
                                                  : Block::so_delta(deg_tw(stw), l));
        }
        for (int mtw = fam == Family::Sp ? 1 : 0; mtw + 1 <= max_dim; mtw += 2)
            types.push_back(fam == Family::Sp ? Block::sp_tau(deg_tw(mtw), +1)
                                              : Block::so_tau(deg_tw(mtw), +1));
    }
    std::vector<SymbolNormalForm> out;
    enum_multisets(types, max_dim, [&](const std::vector<Block>& blocks) {
        if (fam == Family::GL) {
            Degree top = blocks.front().s;
            for (const Block& b : blocks) top = std::max(top, b.s);
            if (top != deg_int(-1)) return; // pin the shift freedom
        } else {
            int par = blocks.front().parity();
            for (const Block& b : blocks)
                if (b.parity() != par) return;
        }
        SymbolNormalForm nf;
        nf.blocks = blocks;
        nf.canonicalize();
        out.push_back(nf);
    });
    auto key = [](const SymbolNormalForm& nf) {
        int d = 0;
        for (const Block& b : nf.blocks) d += b.dim();
        return d;
    };
    std::stable_sort(out.begin(), out.end(),
                     [&](const SymbolNormalForm& a, const SymbolNormalForm& b) {
                         if (key(a) != key(b)) return key(a) < key(b);
                         return std::lexicographical_compare(
                             a.blocks.begin(), a.blocks.end(), b.blocks.begin(),
                             b.blocks.end(), block_less);
                     });
    return out;
}

// --- model layout -------------------------------------------------------------

namespace {

struct ModelVector {
    int block;
    int chain; // 0 = e, 1 = f
    Degree degree;
};

// top degree of a chain within a block
Degree chain_top(const Block& b, int chain) {
    switch (b.kind) {
    case BlockKind::GL: return b.s;
    case BlockKind::SpDelta:
    case BlockKind::SoDelta: return chain == 0 ? b.s : deg_tw(2 * b.l - b.s.tw);
    case BlockKind::SpTau:
    case BlockKind::SoTau: return b.m;
    }
    throw InternalError("unknown block kind");
}

int chain_length(const Block& b) { // number of vectors per chain
    switch (b.kind) {
    case BlockKind::GL: return (b.s.tw - b.r.tw) / 2 + 1;
    case BlockKind::SpDelta:
    case BlockKind::SoDelta: return b.l + 1;
    case BlockKind::SpTau:
    case BlockKind::SoTau: return b.m.tw + 1;
    }
    throw InternalError("unknown block kind");
}

int chains_of(const Block& b) {
    return (b.kind == BlockKind::SpDelta || b.kind == BlockKind::SoDelta) ? 2 : 1;
}

std::vector<ModelVector> model_layout(const std::vector<Block>& blocks) {
    std::vector<ModelVector> out;
    for (size_t bi = 0; bi < blocks.size(); ++bi)
        for (int c = 0; c < chains_of(blocks[bi]); ++c) {
            Degree top = chain_top(blocks[bi], c);
            for (int k = 0; k < chain_length(blocks[bi]); ++k)
                out.push_back({static_cast<int>(bi), c, deg_tw(top.tw - 2 * k)});
        }
    std::stable_sort(out.begin(), out.end(), [](const ModelVector& x, const ModelVector& y) {
        if (x.degree != y.degree) return x.degree < y.degree;
        if (x.block != y.block) return x.block < y.block;
        return x.chain < y.chain;
    });
    return out;
}

int sign_pow(int exponent) { return (exponent % 2 == 0) ? 1 : -1; }

Mat model_form(const std::vector<Block>& blocks, const std::vector<Rational>& scales,
               Family fam) {
    auto layout = model_layout(blocks);
    const int n = static_cast<int>(layout.size());
    Mat form(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const ModelVector &x = layout[i], &y = layout[j];
            if (x.block != y.block || !(x.degree + y.degree == Degree{0})) continue;
            const Block& b = blocks[x.block];
            const Rational& sc = scales.empty() ? Rational(1) : scales[x.block];
            if (b.kind == BlockKind::SpDelta || b.kind == BlockKind::SoDelta) {
                // pairing e_i with f_{-i}: value (-1)^{s-i}
                if (x.chain == 0 && y.chain == 1) {
                    int v = sign_pow((b.s.tw - x.degree.tw) / 2);
                    form.at(i, j) = Rational(v) * sc;
                    form.at(j, i) = (fam == Family::Sp ? Rational(-v) : Rational(v)) * sc;
                }
            } else if (b.kind == BlockKind::SpTau) {
                int v = b.sign * sign_pow((x.degree.tw + 1) / 2);
                form.at(i, j) = Rational(v) * sc;
            } else if (b.kind == BlockKind::SoTau) {
                int v = b.sign * sign_pow(x.degree.tw / 2);
                form.at(i, j) = Rational(v) * sc;
            }
        }
    return form;
}

} // namespace

Mat scaled_model_form(const SymbolNormalForm& nf, const std::vector<Rational>& scales) {
    FS_CHECK(scales.empty() || scales.size() == nf.blocks.size(),
             "scale certificate count mismatch");
    Family fam = nf.family();
    if (fam == Family::GL) return Mat();
    return model_form(nf.blocks, scales, fam);
}

Symbol build_model(const SymbolNormalForm& nf) {
    nf.validate(); // throws MixedParity / AlgebraMismatch
    Family fam = nf.family();
    auto layout = model_layout(nf.blocks);
    const int n = static_cast<int>(layout.size());

    Symbol sym;
    for (const auto& mv : layout) sym.space.components[mv.degree]++;
    sym.space.convention = fam == Family::GL ? Convention::Negative : Convention::Centered;

    // delta: step each chain one degree down
    sym.delta = Mat(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            if (layout[i].block == layout[j].block && layout[i].chain == layout[j].chain &&
                layout[i].degree.tw == layout[j].degree.tw - 2)
                sym.delta.at(i, j) = Rational(1);

    if (fam == Family::GL) {
        sym.algebra = AlgebraKind::GL;
    } else {
        sym.algebra = fam == Family::Sp ? AlgebraKind::Sp : AlgebraKind::So;
        sym.space.structure =
            fam == Family::Sp ? StructureKind::Symplectic : StructureKind::Symmetric;
        sym.space.form = model_form(nf.blocks, {}, fam);
    }
    sym.validate();
    return sym;
}

void Symbol::validate() const {
    space.validate();
    const int n = space.total_dim();
    if (delta.rows != n || delta.cols != n)
        throw Error("Validation", "delta has wrong shape");
    if (!is_homogeneous(space, deg_int(-1), delta))
        throw Error("Validation", "delta is not homogeneous of degree -1");
    int par = space.components.begin()->first.tw & 1;
    for (const auto& [d, m] : space.components)
        if ((d.tw & 1) != par)
            throw Error("MixedParity", "space mixes integer and half-odd degrees");
    Family fam = family_of(algebra);
    if (fam == Family::Sp) {
        if (space.structure != StructureKind::Symplectic)
            throw Error("Validation", "symplectic symbol needs a symplectic structure");
        if (!(transpose(delta) * space.form + space.form * delta == Mat(n, n)))
            throw Error("NotInAlgebra", "delta violates the symplectic structure equation");
    } else if (fam == Family::So) {
        if (space.structure != StructureKind::Symmetric)
            throw Error("Validation", "orthogonal symbol needs a symmetric structure");
        if (!(transpose(delta) * space.form + space.form * delta == Mat(n, n)))
            throw Error("NotInAlgebra", "delta violates the orthogonal structure equation");
    }
}

Symbol direct_sum(const Symbol& a, const Symbol& b) {
    if (family_of(a.algebra) != family_of(b.algebra))
        throw Error("AlgebraMismatch", "direct sum across algebra families");
    a.validate();
    b.validate();
    int pa = a.space.components.begin()->first.tw & 1;
    int pb = b.space.components.begin()->first.tw & 1;
    if (pa != pb) throw Error("MixedParity", "summands mix integer and half-odd gradings");
    if (a.space.convention != b.space.convention)
        throw Error("Validation", "summands use different grading conventions");

    Symbol out;
    out.algebra = a.algebra == b.algebra ? a.algebra
                  : family_of(a.algebra) == Family::GL ? AlgebraKind::GL
                  : family_of(a.algebra) == Family::Sp ? AlgebraKind::Sp
                                                       : AlgebraKind::So;
    out.space.convention = a.space.convention;
    out.space.structure = a.space.structure;
    for (auto& [d, m] : a.space.components) out.space.components[d] += m;
    for (auto& [d, m] : b.space.components) out.space.components[d] += m;

    const int na = a.space.total_dim(), nb = b.space.total_dim(), n = na + nb;
    std::vector<int> pos_a(na), pos_b(nb);
    {
        int cur = 0;
        for (auto& [d, m] : out.space.components) {
            int da = a.space.dim_at(d), db = b.space.dim_at(d);
            for (int i = 0; i < da; ++i) pos_a[a.space.offset_of(d) + i] = cur + i;
            for (int i = 0; i < db; ++i) pos_b[b.space.offset_of(d) + i] = cur + da + i;
            cur += m;
        }
    }
    out.delta = Mat(n, n);
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < na; ++j) out.delta.at(pos_a[i], pos_a[j]) = a.delta.at(i, j);
    for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j) out.delta.at(pos_b[i], pos_b[j]) = b.delta.at(i, j);
    if (out.space.structure != StructureKind::None) {
        out.space.form = Mat(n, n);
        for (int i = 0; i < na; ++i)
            for (int j = 0; j < na; ++j)
                out.space.form.at(pos_a[i], pos_a[j]) = a.space.form.at(i, j);
        for (int i = 0; i < nb; ++i)
            for (int j = 0; j < nb; ++j)
                out.space.form.at(pos_b[i], pos_b[j]) = b.space.form.at(i, j);
    }
    out.validate();
    return out;
}

// --- classification -----------------------------------------------------------

namespace {

Mat mat_pow(const Mat& m, int k) {
    Mat r = Mat::identity(m.rows);
    for (int i = 0; i < k; ++i) r = r * m;
    return r;
}

int nilpotency(const Mat& d) {
    Mat p = Mat::identity(d.rows);
    for (int k = 0;; ++k) {
        if (p.is_zero()) return k;
        FS_CHECK(k <= d.rows, "matrix is not nilpotent");
        p = p * d;
    }
}

// working view of a subspace, in its own coordinates
struct SubSpace {
    Mat basis; // columns in original coordinates, each homogeneous
    Mat d;     // restricted delta
    Mat s;     // restricted form (sp/so)
    std::vector<Degree> degs;
};

Degree column_degree(const std::vector<Degree>& degs, const Mat& u, int col) {
    Degree found{};
    bool seen = false;
    for (int i = 0; i < u.rows; ++i) {
        if (u.at(i, col) == 0) continue;
        if (!seen) {
            found = degs[i];
            seen = true;
        } else {
            FS_CHECK(degs[i] == found, "column mixes degrees");
        }
    }
    FS_CHECK(seen, "zero column has no degree");
    return found;
}

SubSpace restrict_to(const SubSpace& sub, const Mat& u) {
    SubSpace out;
    out.basis = sub.basis * u;
    auto [ok, dd] = solve(u, sub.d * u);
    FS_CHECK(ok, "subspace is not delta-invariant");
    out.d = dd;
    if (sub.s.rows > 0) out.s = transpose(u) * sub.s * u;
    out.degs.resize(u.cols);
    for (int j = 0; j < u.cols; ++j) out.degs[j] = column_degree(sub.degs, u, j);
    return out;
}

// homogeneous unit columns extending the span of `fixed` to everything
Mat graded_complement(const Mat& fixed, int dim) {
    Mat acc = fixed;
    std::vector<int> picked = extend_basis(acc, Mat::identity(dim));
    Mat out(dim, static_cast<int>(picked.size()));
    for (size_t j = 0; j < picked.size(); ++j) out.at(picked[j], static_cast<int>(j)) = Rational(1);
    return out;
}

// homogeneous basis of {v : colsᵀ S v = 0} inside the subspace
Mat graded_form_complement(const SubSpace& sub, const Mat& cols) {
    const int d = static_cast<int>(sub.degs.size());
    Mat r = transpose(cols) * sub.s; // constraints × d
    Mat out(d, 0);
    std::vector<Degree> seen;
    for (int j = 0; j < d; ++j)
        if (std::find(seen.begin(), seen.end(), sub.degs[j]) == seen.end())
            seen.push_back(sub.degs[j]);
    std::sort(seen.begin(), seen.end());
    for (Degree g : seen) {
        std::vector<int> idx;
        for (int j = 0; j < d; ++j)
            if (sub.degs[j] == g) idx.push_back(j);
        Mat m(r.rows, static_cast<int>(idx.size()));
        for (int i = 0; i < r.rows; ++i)
            for (size_t j = 0; j < idx.size(); ++j) m.at(i, static_cast<int>(j)) = r.at(i, idx[j]);
        Mat k = kernel_basis(m);
        Mat emb(d, k.cols);
        for (size_t j = 0; j < idx.size(); ++j)
            for (int c = 0; c < k.cols; ++c) emb.at(idx[j], c) = k.at(static_cast<int>(j), c);
        out = hcat(out, emb);
    }
    return out;
}

struct Piece {
    Block block;
    std::vector<Mat> e, f; // chain vectors in original coordinates, top first
    Rational scale = Rational(1);
};

std::vector<Mat> chain_from(const SubSpace& sub, const Mat& top, int length) {
    std::vector<Mat> out;
    Mat v = top;
    for (int k = 0; k < length; ++k) {
        out.push_back(sub.basis * v);
        v = sub.d * v;
    }
    FS_CHECK(v.is_zero(), "chain does not terminate at its expected length");
    return out;
}

// symplectic Gram-Schmidt for a skew nondegenerate form: returns column pairs
// (u_1, v_1, u_2, v_2, ...) with b(u_a, v_a) = 1 and all other pairings zero
Mat darboux_pairs(const Mat& b) {
    const int n = b.rows;
    FS_CHECK(n % 2 == 0, "odd-dimensional skew nondegenerate space");
    std::vector<Mat> rest;
    for (int j = 0; j < n; ++j) {
        Mat e(n, 1);
        e.at(j, 0) = Rational(1);
        rest.push_back(e);
    }
    auto pair_val = [&](const Mat& x, const Mat& y) { return (transpose(x) * b * y).at(0, 0); };
    Mat out(n, 0);
    while (!rest.empty()) {
        Mat u = rest.front();
        rest.erase(rest.begin());
        int vi = -1;
        for (size_t i = 0; i < rest.size(); ++i)
            if (!(pair_val(u, rest[i]) == 0)) {
                vi = static_cast<int>(i);
                break;
            }
        FS_CHECK(vi >= 0, "skew form is degenerate on the remaining space");
        Rational inv = Rational(Rational(1) / pair_val(u, rest[vi]));
        Mat v = inv * rest[vi];
        rest.erase(rest.begin() + vi);
        for (Mat& x : rest) x = x - pair_val(x, v) * u + pair_val(x, u) * v;
        out = hcat(hcat(out, u), v);
    }
    return out;
}

// congruence diagonalization of a symmetric nondegenerate form: returns basis
// columns u_j and the diagonal values b(u_j, u_j)
std::pair<Mat, std::vector<Rational>> diagonalize_symmetric(const Mat& b) {
    const int n = b.rows;
    Mat u = Mat::identity(n);
    Mat m = b;
    auto col_add = [&](int dst, int src, const Rational& c) {
        for (int i = 0; i < n; ++i) {
            m.at(i, dst) = m.at(i, dst) + c * m.at(i, src);
            u.at(i, dst) = u.at(i, dst) + c * u.at(i, src);
        }
        for (int j = 0; j < n; ++j) m.at(dst, j) = m.at(dst, j) + c * m.at(src, j);
    };
    auto col_swap = [&](int x, int y) {
        for (int i = 0; i < n; ++i) {
            std::swap(m.at(i, x), m.at(i, y));
            std::swap(u.at(i, x), u.at(i, y));
        }
        for (int j = 0; j < n; ++j) std::swap(m.at(x, j), m.at(y, j));
    };
    for (int k = 0; k < n; ++k) {
        if (m.at(k, k) == 0) {
            int jd = -1, jo = -1;
            for (int j = k + 1; j < n; ++j) {
                if (jd < 0 && !(m.at(j, j) == 0)) jd = j;
                if (jo < 0 && !(m.at(k, j) == 0)) jo = j;
            }
            if (jd >= 0)
                col_swap(k, jd);
            else if (jo >= 0)
                col_add(k, jo, Rational(1));
            else
                throw InternalError("symmetric form is degenerate");
        }
        for (int j = k + 1; j < n; ++j) {
            if (m.at(k, j) == 0) continue;
            col_add(j, k, -m.at(k, j) / m.at(k, k));
        }
    }
    std::vector<Rational> diag;
    for (int k = 0; k < n; ++k) {
        FS_CHECK(!(m.at(k, k) == 0), "diagonalization lost rank");
        diag.push_back(m.at(k, k));
    }
    return {u, diag};
}

void classify_structured(const SubSpace& sub, Family fam, FieldMode mode,
                         std::vector<Piece>& out) {
    const int dim = static_cast<int>(sub.degs.size());
    if (dim == 0) return;
    const int l = nilpotency(sub.d) - 1;

    Mat dl = mat_pow(sub.d, l);
    Mat ker = kernel_basis(dl);
    Mat c = graded_complement(ker, dim);
    Mat y(dim, 0);
    {
        Mat cur = c;
        for (int k = 0; k <= l; ++k) {
            y = hcat(y, cur);
            cur = sub.d * cur;
        }
    }
    FS_CHECK(rank_of(y) == y.cols, "chain span degenerated");

    if (y.cols < dim) {
        SubSpace suby = restrict_to(sub, y);
        FS_CHECK(rank_of(suby.s) == y.cols, "form is degenerate on the top chain span");
        Mat z = graded_form_complement(sub, y);
        FS_CHECK(y.cols + z.cols == dim, "orthogonal split dimension mismatch");
        classify_structured(suby, fam, mode, out);
        classify_structured(restrict_to(sub, z), fam, mode, out);
        return;
    }

    // pure case: every chain has length l+1
    Degree s = *std::max_element(sub.degs.begin(), sub.degs.end());
    std::vector<int> top_idx, partner_idx;
    std::vector<Degree> cdeg(c.cols);
    for (int j = 0; j < c.cols; ++j) cdeg[j] = column_degree(sub.degs, c, j);
    Degree s1 = deg_tw(2 * l - s.tw); // l - s
    for (int j = 0; j < c.cols; ++j) {
        if (cdeg[j] == s) top_idx.push_back(j);
        else if (cdeg[j] == s1) partner_idx.push_back(j);
    }
    FS_CHECK(!top_idx.empty(), "pure component lost its top chains");
    Mat z = select_cols(c, top_idx);
    const int ntop = z.cols;

    if (l == s.tw) { // l == 2s: the top level pairs with itself
        FS_CHECK(static_cast<int>(top_idx.size()) == c.cols,
                 "self-paired component has stray lower chains");
        Mat bform = transpose(z) * sub.s * (dl * z);
        FS_CHECK(rank_of(bform) == ntop, "top pairing form is degenerate");
        bool skew = (fam == Family::Sp) ? (l % 2 == 0) : (l % 2 == 1);
        if (skew) {
            Mat pairs = darboux_pairs(bform);
            for (int a = 0; a + 1 < pairs.cols; a += 2) {
                Piece p;
                p.block = fam == Family::Sp ? Block::sp_delta(s, l) : Block::so_delta(s, l);
                p.e = chain_from(sub, z * pairs.col(a), l + 1);
                p.f = chain_from(sub, z * pairs.col(a + 1), l + 1);
                out.push_back(std::move(p));
            }
        } else {
            auto [u, diag] = diagonalize_symmetric(bform);
            int rho = fam == Family::Sp ? sign_pow((s.tw + 1) / 2) : sign_pow(s.tw / 2);
            for (int a = 0; a < u.cols; ++a) {
                Rational cval = Rational(rho) * diag[a];
                Piece p;
                int sgn = +1;
                Rational scale = cval;
                if (mode == FieldMode::Real) {
                    sgn = rat_sign(cval) > 0 ? +1 : -1;
                    scale = rat_sign(cval) > 0 ? cval : Rational(-cval);
                }
                p.block = fam == Family::Sp ? Block::sp_tau(s, sgn) : Block::so_tau(s, sgn);
                p.scale = scale;
                p.e = chain_from(sub, z * u.col(a), l + 1);
                out.push_back(std::move(p));
            }
        }
        return;
    }

    // l < 2s: top chains pair with chains whose tops sit at degree s1 = l - s
    FS_CHECK(static_cast<int>(partner_idx.size()) == ntop,
             "partner chain count differs from top chain count");
    Mat w = select_cols(c, partner_idx);
    Mat g = transpose(z) * sub.s * (dl * w);
    FS_CHECK(rank_of(g) == ntop, "top-partner pairing is degenerate");
    w = w * inverse(g);
    if (s1.tw >= 0) {
        Mat h = transpose(w) * sub.s * (mat_pow(sub.d, s1.tw) * w);
        if (!h.is_zero()) {
            int alpha = sign_pow(s.tw - l);
            Mat a = (Rational(-alpha, 2)) * h;
            w = w + mat_pow(sub.d, s.tw - l) * z * transpose(a);
            Mat h2 = transpose(w) * sub.s * (mat_pow(sub.d, s1.tw) * w);
            FS_CHECK(h2.is_zero(), "partner chains still pair among themselves");
            Mat g2 = transpose(z) * sub.s * (dl * w);
            FS_CHECK(g2 == Mat::identity(ntop), "pairing normalization drifted");
        }
    }
    Mat extracted(dim, 0);
    for (int j = 0; j < ntop; ++j) {
        Piece p;
        p.block = fam == Family::Sp ? Block::sp_delta(s, l) : Block::so_delta(s, l);
        p.e = chain_from(sub, z.col(j), l + 1);
        p.f = chain_from(sub, w.col(j), l + 1);
        out.push_back(std::move(p));
        Mat cur = z.col(j);
        for (int k = 0; k <= l; ++k) {
            extracted = hcat(extracted, cur);
            cur = sub.d * cur;
        }
        cur = w.col(j);
        for (int k = 0; k <= l; ++k) {
            extracted = hcat(extracted, cur);
            cur = sub.d * cur;
        }
    }
    FS_CHECK(rank_of(extracted) == extracted.cols, "extracted chains are dependent");
    Mat remainder = graded_form_complement(sub, extracted);
    FS_CHECK(extracted.cols + remainder.cols == dim, "extraction split dimension mismatch");
    classify_structured(restrict_to(sub, remainder), fam, mode, out);
}

void classify_gl(const SubSpace& sub, std::vector<Piece>& out) {
    const int dim = static_cast<int>(sub.degs.size());
    if (dim == 0) return;
    const int bigl = nilpotency(sub.d);
    Mat pushed(dim, 0);
    int covered = 0;
    for (int j = bigl; j >= 1; --j) {
        Mat base = hcat(kernel_basis(mat_pow(sub.d, j - 1)), pushed);
        Mat cands = kernel_basis(mat_pow(sub.d, j));
        Mat acc = base;
        std::vector<int> picked = extend_basis(acc, cands);
        Mat tops = select_cols(cands, picked);
        for (int t = 0; t < tops.cols; ++t) {
            Degree top = column_degree(sub.degs, tops, t);
            Piece p;
            p.block = Block::gl(deg_tw(top.tw - 2 * (j - 1)), top);
            p.e = chain_from(sub, tops.col(t), j);
            out.push_back(std::move(p));
            covered += j;
        }
        pushed = sub.d * hcat(pushed, tops);
    }
    FS_CHECK(covered == dim, "chain lengths do not add up to the dimension");
}

} // namespace

Classified classify_symbol(const Symbol& sym, FieldMode mode) {
    sym.validate();
    Family fam = family_of(sym.algebra);
    const int n = sym.space.total_dim();
    if (fam == Family::GL) {
        if (sym.space.components.rbegin()->first.tw >= 0)
            throw Error("Validation", "chain classification expects all degrees negative");
    } else if (sym.space.convention != Convention::Centered) {
        throw Error("Validation", "structured classification expects the centered convention");
    }

    SubSpace whole;
    whole.basis = Mat::identity(n);
    whole.d = sym.delta;
    whole.s = fam == Family::GL ? Mat() : sym.space.form;
    for (int i = 0; i < n; ++i) whole.degs.push_back(sym.space.degree_of_index(i));

    std::vector<Piece> pieces;
    if (fam == Family::GL)
        classify_gl(whole, pieces);
    else
        classify_structured(whole, fam, mode, pieces);

    std::stable_sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) {
        if (block_less(a.block, b.block)) return true;
        if (block_less(b.block, a.block)) return false;
        return a.scale < b.scale;
    });

    Classified res;
    res.nf.field_mode = mode;
    for (const Piece& p : pieces) {
        res.nf.blocks.push_back(p.block);
        res.scales.push_back(p.scale);
    }
    res.nf.validate();

    auto layout = model_layout(res.nf.blocks);
    FS_CHECK(static_cast<int>(layout.size()) == n, "model layout size mismatch");
    Mat p(n, n);
    for (int col = 0; col < n; ++col) {
        const ModelVector& mv = layout[col];
        const Piece& piece = pieces[mv.block];
        Degree top = chain_top(piece.block, mv.chain);
        int k = (top.tw - mv.degree.tw) / 2;
        const Mat& v = mv.chain == 0 ? piece.e[k] : piece.f[k];
        for (int i = 0; i < n; ++i) p.at(i, col) = v.at(i, 0);
    }
    Symbol model = build_model(res.nf);
    FS_CHECK(sym.delta * p == p * model.delta, "transform does not carry delta to its model");
    if (fam != Family::GL) {
        Mat expected = scaled_model_form(res.nf, res.scales);
        FS_CHECK(transpose(p) * sym.space.form * p == expected,
                 "transform does not carry the form to its scaled model");
    }
    res.transform = inverse(p);
    return res;
}

} // namespace flagsym
