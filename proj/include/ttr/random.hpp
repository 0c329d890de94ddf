#pragma once

#include <random>

#include "ttr/matrixkit.hpp"

namespace ttr {

using Rng = std::mt19937_64;

CMatrix ginibre(Index rows, Index cols, Rng& rng);
HermMatrix random_hermitian(Index d, Rng& rng);
// Haar measure via QR of a Ginibre matrix with the phase correction.
CMatrix random_unitary(Index d, Rng& rng);
// Hilbert-Schmidt measure.
HermMatrix random_density(Index d, Rng& rng);
// Convex mixture w * 1/d + (1 - w) * random_density; keeps the spectrum away from zero.
HermMatrix random_density_mixed(Index d, double w, Rng& rng);

}  // namespace ttr
