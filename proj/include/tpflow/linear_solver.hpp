#pragma once

#include <vector>

#include "tpflow/common.hpp"

namespace tpflow {

struct Triplet {
    int row;
    int col;
    double value;
};

enum class LinearSolverKind { direct_sparse, bicgstab };

struct LinearSolverOptions {
    LinearSolverKind kind = LinearSolverKind::direct_sparse;
    double tol = 1e-12;      // iterative solver only
    int max_iters = 10000;   // iterative solver only
};

/// Solve the n-by-n sparse system assembled from triplets (duplicates are
/// summed). Deterministic for a fixed triplet list. Throws SolverError on a
/// singular factorization or non-converged iteration.
std::vector<double> solve_sparse(int n, const std::vector<Triplet>& triplets,
                                 const std::vector<double>& rhs,
                                 const LinearSolverOptions& opts = {});

}  // namespace tpflow
