#pragma once

#include <vector>

#include "signsep/core.hpp"

namespace signsep {

/// Singular values of an m x n matrix (m >= n), sorted descending.
///
/// One-sided (Hestenes) Jacobi: plane rotations are applied to column pairs
/// until all columns are mutually orthogonal; the column norms are then the
/// singular values. Works directly on the matrix rather than on the Gram
/// product, so small singular values keep full relative accuracy.
///
/// Throws NonFiniteError on NaN/inf input and DimensionError when m < n.
std::vector<double> singular_values(const Matrix& m);

}  // namespace signsep
