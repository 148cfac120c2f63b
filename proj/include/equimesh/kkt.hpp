#pragma once
#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cstddef>

namespace equimesh {

// Solver for saddle-point systems
//
//   [ H  A^T ] [x]   [b1]
//   [ A   0  ] [y] = [b2]
//
// with H symmetric (possibly indefinite) and A of full row rank. Systems in
// the mesh-size range are factored directly with sparse LU; beyond
// `iterative_threshold` rows a diagonally preconditioned MINRES takes over.
// The sparsity pattern of H must not change across factorize() calls on one
// instance (values may).
class KktSolver {
   public:
    KktSolver(Eigen::SparseMatrix<double> A, std::size_t iterative_threshold = 200000);

    void factorize(const Eigen::SparseMatrix<double>& H);

    struct Solution {
        Eigen::VectorXd x;
        Eigen::VectorXd y;
        bool ok = false;
    };
    Solution solve(const Eigen::VectorXd& b1, const Eigen::VectorXd& b2) const;

    bool uses_iterative() const { return iterative_; }

   private:
    Eigen::SparseMatrix<double> A_;
    Eigen::SparseMatrix<double> K_;
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
    bool analyzed_ = false;
    bool factor_ok_ = false;
    bool iterative_ = false;
    int n_ = 0, m_ = 0;
};

// Diagonally preconditioned MINRES for a symmetric, possibly indefinite
// sparse system. Returns false if the relative residual did not reach `tol`
// within `max_iters`.
bool minres_solve(const Eigen::SparseMatrix<double>& K, const Eigen::VectorXd& b,
                  Eigen::VectorXd& x, double tol = 1e-12, int max_iters = -1);

}  // namespace equimesh
