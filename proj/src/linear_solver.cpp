#include "tpflow/linear_solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

namespace tpflow {

std::vector<double> solve_sparse(int n, const std::vector<Triplet>& triplets,
                                 const std::vector<double>& rhs, const LinearSolverOptions& opts) {
    if (static_cast<int>(rhs.size()) != n) throw std::invalid_argument("rhs size mismatch");
    Eigen::SparseMatrix<double> a(n, n);
    {
        std::vector<Eigen::Triplet<double>> ts;
        ts.reserve(triplets.size());
        for (const Triplet& t : triplets) ts.emplace_back(t.row, t.col, t.value);
        a.setFromTriplets(ts.begin(), ts.end());
    }
    Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(rhs.data(), n);
    Eigen::VectorXd x;
    if (opts.kind == LinearSolverKind::direct_sparse) {
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.analyzePattern(a);
        lu.factorize(a);
        if (lu.info() != Eigen::Success)
            throw SolverError("sparse LU factorization failed (singular system?)");
        x = lu.solve(b);
        if (lu.info() != Eigen::Success) throw SolverError("sparse LU solve failed");
    } else {
        Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> it;
        it.setTolerance(opts.tol);
        it.setMaxIterations(opts.max_iters);
        it.compute(a);
        if (it.info() != Eigen::Success) throw SolverError("iterative solver setup failed");
        x = it.solve(b);
        if (it.info() != Eigen::Success)
            throw SolverError("iterative solver did not converge");
    }
    return std::vector<double>(x.data(), x.data() + n);
}

}  // namespace tpflow
