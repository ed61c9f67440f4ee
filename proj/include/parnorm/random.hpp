#pragma once

#include <cstdint>
#include <random>

#include "parnorm/types.hpp"

namespace parnorm {

using Rng = std::mt19937_64;

// splitmix64 mix of (seed, stream); gives independent per-index generators.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

Matrix random_gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng);
CMatrix random_complex_gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng);

// Haar-distributed n x n orthogonal matrix.
Matrix random_orthogonal(Eigen::Index n, Rng& rng);

// Columns drawn from the flat Dirichlet distribution. With zero_prob > 0
// each entry is zeroed with that probability before normalization (a column
// never ends up empty).
Matrix random_stochastic(Eigen::Index n, Rng& rng, double zero_prob = 0.0);

// Random probability vector.
Vector random_probability(Eigen::Index n, Rng& rng);

// Random permutation matrix.
Matrix random_permutation_matrix(Eigen::Index n, Rng& rng);

}  // namespace parnorm
