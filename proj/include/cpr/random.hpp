#pragma once

// Seeded random matrices. All generators draw from a caller-owned engine so
// that every randomized operation is reproducible from a 64-bit seed.

#include <cstdint>
#include <random>

#include "cpr/matfun.hpp"

namespace cpr {

using Rng = std::mt19937_64;

/// Matrix with i.i.d. standard complex gaussian entries.
Matrix random_gaussian(int rows, int cols, Rng& rng);

/// Haar-distributed unitary (QR of a gaussian matrix with phase correction).
Matrix random_unitary(int n, Rng& rng);

/// Hermitian matrix with operator norm exactly `scale` (n >= 1).
Matrix random_hermitian(int n, Rng& rng, double scale = 1.0);

/// exp(i H) for hermitian H.
Matrix exp_i_hermitian(const Matrix& h);

/// center * exp(i H) with ||H|| = t uniformly in [0, radius); the result lies
/// within operator-norm distance `radius` of `center`.
Matrix unitary_near(const Matrix& center, double radius, Rng& rng);

/// Random positive semidefinite matrix with the given eigenvalues.
Matrix random_psd(const RealVector& eigenvalues, Rng& rng);

/// Random element of an algebra with ||a|| <= 1.
Element random_contraction(const Algebra& algebra, Rng& rng);

/// Random hermitian element with ||a|| <= 1.
Element random_hermitian_contraction(const Algebra& algebra, Rng& rng);

}  // namespace cpr
