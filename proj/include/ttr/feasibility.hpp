#pragma once

#include "ttr/matrixkit.hpp"

namespace ttr {

// Real linear system over a Hermitian d x d unknown X (coordinates in
// hermitian_basis(d)) plus `extra` free real scalars appended after them.
// The solver adds the constraint Tr X = 1 itself.
struct AffinePsdProblem {
  Index dim = 0;
  Index extra = 0;
  RMatrix a;  // equations x (dim*dim + extra)
  RVector b;
};

struct AffinePsdSolution {
  CMatrix x;
  RVector extra;
  double residual = 0.0;   // least-squares residual of the full system
  Index nullity = 0;       // dimension of the affine solution set
  double min_eig = 0.0;    // smallest eigenvalue of x at the returned point
  int iterations = 0;
};

// Least-squares solution, then maximization of the smallest eigenvalue of X
// over the affine solution set by subgradient ascent with step 1/k.
AffinePsdSolution solve_affine_psd(const AffinePsdProblem& p, int max_iter = 5000);

// Real coordinates of the complex entries of m: real parts then imaginary parts.
RVector realify(const CMatrix& m);

}  // namespace ttr
