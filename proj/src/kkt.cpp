#include "equimesh/kkt.hpp"

#include <cmath>
#include <vector>

namespace equimesh {

KktSolver::KktSolver(Eigen::SparseMatrix<double> A, std::size_t iterative_threshold)
    : A_(std::move(A)), n_(int(A_.cols())), m_(int(A_.rows())) {
    iterative_ = std::size_t(n_ + m_) > iterative_threshold;
}

void KktSolver::factorize(const Eigen::SparseMatrix<double>& H) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(size_t(H.nonZeros()) + 2 * size_t(A_.nonZeros()));
    for (int k = 0; k < H.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(H, k); it; ++it)
            trip.emplace_back(int(it.row()), int(it.col()), it.value());
    for (int k = 0; k < A_.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(A_, k); it; ++it) {
            trip.emplace_back(n_ + int(it.row()), int(it.col()), it.value());
            trip.emplace_back(int(it.col()), n_ + int(it.row()), it.value());
        }
    K_.resize(n_ + m_, n_ + m_);
    K_.setFromTriplets(trip.begin(), trip.end());
    K_.makeCompressed();

    if (iterative_) {
        factor_ok_ = true;
        return;
    }
    if (!analyzed_) {
        lu_.analyzePattern(K_);
        analyzed_ = true;
    }
    lu_.factorize(K_);
    factor_ok_ = lu_.info() == Eigen::Success;
}

KktSolver::Solution KktSolver::solve(const Eigen::VectorXd& b1, const Eigen::VectorXd& b2) const {
    Solution sol;
    Eigen::VectorXd rhs(n_ + m_);
    rhs.head(n_) = b1;
    rhs.tail(m_) = b2;
    Eigen::VectorXd z;
    if (iterative_) {
        if (!minres_solve(K_, rhs, z)) return sol;
    } else {
        if (!factor_ok_) return sol;
        z = lu_.solve(rhs);
        if (lu_.info() != Eigen::Success) return sol;
    }
    sol.x = z.head(n_);
    sol.y = z.tail(m_);
    sol.ok = z.allFinite();
    return sol;
}

bool minres_solve(const Eigen::SparseMatrix<double>& K, const Eigen::VectorXd& b,
                  Eigen::VectorXd& x, double tol, int max_iters) {
    const int n = int(K.rows());
    if (max_iters < 0) max_iters = 10 * n;

    // Jacobi preconditioner on |diag|; zero diagonal entries (the constraint
    // block) fall back to the overall scale.
    Eigen::VectorXd dinv(n);
    double dmax = 0.0;
    for (int i = 0; i < n; ++i) dmax = std::max(dmax, std::abs(K.coeff(i, i)));
    if (dmax == 0.0) dmax = 1.0;
    for (int i = 0; i < n; ++i) {
        const double d = std::abs(K.coeff(i, i));
        dinv[i] = 1.0 / (d > 1e-12 * dmax ? d : dmax);
    }

    x = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd r1 = b;
    Eigen::VectorXd y = dinv.cwiseProduct(r1);
    double beta1 = r1.dot(y);
    if (beta1 < 0.0) return false;
    if (beta1 == 0.0) return true;  // b == 0
    beta1 = std::sqrt(beta1);

    Eigen::VectorXd r2 = r1;
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd w2 = Eigen::VectorXd::Zero(n);
    double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0, phibar = beta1;
    double cs = -1.0, sn = 0.0;

    for (int iter = 1; iter <= max_iters; ++iter) {
        const Eigen::VectorXd v = y / beta;
        y = K * v;
        if (iter >= 2) y -= (beta / oldb) * r1;
        const double alfa = v.dot(y);
        y -= (alfa / beta) * r2;
        r1 = r2;
        r2 = y;
        y = dinv.cwiseProduct(r2);
        oldb = beta;
        const double betasq = r2.dot(y);
        if (betasq < 0.0) return false;
        beta = std::sqrt(betasq);

        const double oldeps = epsln;
        const double delta = cs * dbar + sn * alfa;
        const double gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;
        double gamma = std::hypot(gbar, beta);
        gamma = std::max(gamma, 1e-300);
        cs = gbar / gamma;
        sn = beta / gamma;
        const double phi = cs * phibar;
        phibar = sn * phibar;

        const Eigen::VectorXd w1 = w2;
        w2 = w;
        w = (v - oldeps * w1 - delta * w2) / gamma;
        x += phi * w;

        if (phibar <= tol * beta1) return true;
        if (beta <= 1e-300) break;  // exact solution reached
    }
    return phibar <= tol * beta1 * 10.0;
}

}  // namespace equimesh
