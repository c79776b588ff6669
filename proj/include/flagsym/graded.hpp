#pragma once

#include <compare>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "flagsym/linalg.hpp"

namespace flagsym {

// Degree stores twice the mathematical value so integer and half-odd grading
// indices are both exact; a single space never mixes the two parities.
struct Degree {
    int tw = 0;
    friend auto operator<=>(const Degree&, const Degree&) = default;
};

inline Degree deg_int(int v) { return {2 * v}; }
inline Degree deg_tw(int tw) { return {tw}; }
inline Degree operator+(Degree a, Degree b) { return {a.tw + b.tw}; }
inline Degree operator-(Degree a, Degree b) { return {a.tw - b.tw}; }
inline Degree operator-(Degree a) { return {-a.tw}; }
std::string deg_str(Degree d); // "2", "-3/2"
Degree deg_parse(const std::string& s);

enum class StructureKind { None, Symplectic, Symmetric };
enum class Convention { Negative, Centered };

struct GradedSpace {
    std::map<Degree, int> components; // degree -> dimension (> 0)
    StructureKind structure = StructureKind::None;
    Mat form; // on the total space, basis blocks ordered by ascending degree
    Convention convention = Convention::Negative;

    int total_dim() const;
    std::vector<Degree> degrees() const;
    int dim_at(Degree d) const;    // 0 if absent
    int offset_of(Degree d) const; // block offset in the ascending basis
    Degree degree_of_index(int i) const;
    void validate() const;
};

// Decreasing filtration of the ambient space: entries (index j, frame) with
// ascending j and span(j) ⊇ span(j+1); indices run -depth .. -1 and the first
// entry spans everything. Repeated subspaces are allowed.
struct Flag {
    int ambient_dim = 0;
    std::vector<std::pair<int, Mat>> subspaces;

    int depth() const { return static_cast<int>(subspaces.size()); }
    Mat frame_at(int j) const; // zero-column matrix for j >= 0, full space for j <= -depth
    void validate() const;
};

// Homogeneous endomorphism in the ascending block basis of a GradedSpace:
// the only nonzero blocks map degree d to degree d + `degree`.
struct GradedMap {
    Degree degree;
    Mat matrix;
};

bool is_homogeneous(const GradedSpace& space, Degree degree, const Mat& matrix);
// Zeroes every block of m except those mapping degree d to d + degree.
Mat homogeneous_part(const GradedSpace& space, Degree degree, const Mat& m);

struct AssociatedGraded {
    GradedSpace space;               // levels of the flag, no structure attached
    Mat level_basis;                 // columns: chosen level representatives, ascending degree
    std::vector<GradedMap> maps;     // basis of the graded algebra, ascending degree
};

// Degeneration of a Lie subalgebra of gl(W) along a filtration: each basis
// element of the k-th filtration layer induces a degree-k map on the levels.
AssociatedGraded associated_graded(const Flag& flag, const std::vector<Mat>& algebra_basis);

// The filtration whose levels are the eigenspaces of e, top eigenvalue first.
Flag flag_from_grading_element(const Mat& e);

struct CompatResult {
    bool ok = true;
    int failing_index = 0; // i with complement(span at -i) != span at i - depth
};

CompatResult is_compatible_flag(const Flag& flag, StructureKind structure, const Mat& form);

GradedSpace regrade(const GradedSpace& space, Convention to);

// {x : form(f, x) = 0 for all columns f of frame}
Mat annihilator(const Mat& frame, const Mat& form);

bool is_lie_closed(const std::vector<Mat>& basis);
int killing_rank(const std::vector<Mat>& basis);

} // namespace flagsym
