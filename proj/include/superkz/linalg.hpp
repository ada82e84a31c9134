#pragma once

#include "superkz/rational.hpp"

#include <optional>
#include <vector>

namespace superkz {

// Reduced row echelon form in place; returns pivot columns.
std::vector<int> rref(MatQ& a);

int rank(const MatQ& a);

// Columns form a basis of {x : a x = 0}.
MatQ nullspace(const MatQ& a);

// Columns form a basis of the column span of a.
MatQ column_basis(const MatQ& a);

std::optional<VecQ> solve(const MatQ& a, const VecQ& b);

// Reduction modulo a subspace: given the subspace as columns of `sub` inside an
// ambient space of dimension `dim`, the complement coordinates are the
// non-pivot rows of the echelon form of sub^T.
struct Reduction {
    int dim = 0;
    std::vector<int> pivots;      // ambient coordinates eliminated
    std::vector<int> keep;        // ambient coordinates kept (quotient basis)
    MatQ rows;                    // rref of sub^T, one row per pivot
    MatQ project;                 // keep.size() x dim, u -> coordinates of u mod sub
    MatQ include;                 // dim x keep.size(), quotient basis as ambient vectors
};
Reduction reduction(const MatQ& sub, int dim);

bool in_span(const MatQ& sub, const VecQ& v);
bool same_span(const MatQ& a, const MatQ& b);

MatQ hstack(const MatQ& a, const MatQ& b);
MatQ vstack(const MatQ& a, const MatQ& b);

}  // namespace superkz
