#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "flagsym/matrix.hpp"

namespace flagsym {

enum class RankMode { Plain, Symmetric };

struct RankSignature {
    int rank = 0;
    // present only in symmetric mode: (#positive, #negative) eigenvalue counts
    std::optional<std::pair<int, int>> signature;
};

// Plain mode: rank by exact elimination. Symmetric mode: additionally the
// inertia, computed by congruence diagonalization; throws Error("NonSymmetric")
// if the input is not symmetric.
RankSignature rank_and_signature(const Mat& m, RankMode mode);

// Inertia (p, n) of a symmetric matrix; rank == p + n.
std::pair<int, int> inertia(const Mat& s);

// Indices of candidate columns that extend the column span of `basis`,
// scanned left to right; `basis` grows as columns are accepted.
std::vector<int> extend_basis(Mat& basis, const Mat& candidates);

// Column-space basis of m (greedy from its own columns).
Mat column_space_basis(const Mat& m);

} // namespace flagsym
