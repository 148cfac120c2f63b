#include "equimesh/energy.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "equimesh/errors.hpp"
#include "equimesh/kernels.hpp"

namespace equimesh {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kAngleMargin = 1e-12;

void check_interior(const AngleStructure& A) {
    for (size_t i = 0; i < A.angles.size(); ++i) {
        const double a = A.angles[i];
        if (!(a > kAngleMargin && a < kPi - kAngleMargin))
            throw SingularityError("angle " + std::to_string(i) + " = " + std::to_string(a) +
                                   " is at the domain boundary");
    }
}

}  // namespace

EnergyEvaluation energy_E(const AngleStructure& A) {
    check_interior(A);
    const int n = A.size();
    EnergyEvaluation ev;
    ev.value = kernels::sum_lob(A.angles);
    ev.gradient.resize(n);
    kernels::neg_log_2sin(A.angles, {ev.gradient.data(), size_t(n)});

    std::vector<double> ct(n);
    kernels::cot(A.angles, ct);
    ev.hessian.resize(n, n);
    ev.hessian.reserve(Eigen::VectorXi::Constant(n, 1));
    for (int i = 0; i < n; ++i) ev.hessian.insert(i, i) = -ct[i];
    ev.hessian.makeCompressed();
    return ev;
}

Eigen::VectorXd holonomy_residuals(const AngleStructure& A, const ConstraintSpec& spec,
                                   const MeshTopology& topo) {
    const int n = A.size();
    std::vector<double> ls(n);
    kernels::log_sin(A.angles, ls);

    Eigen::VectorXd r(topo.vertex_count);
    for (int v = 0; v < topo.vertex_count; ++v) {
        double h = 0.0;
        for (const auto& [f, c] : topo.vertex_corners[v])
            h += ls[3 * f + (c + 2) % 3] - ls[3 * f + (c + 1) % 3];
        r[v] = h - spec.holonomy_target[v];
    }
    return r;
}

Eigen::SparseMatrix<double> holonomy_jacobian(const AngleStructure& A, const MeshTopology& topo) {
    const int n = A.size();
    std::vector<double> ct(n);
    kernels::cot(A.angles, ct);

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(2 * n);
    for (int f = 0; f < topo.face_count(); ++f) {
        const auto& t = topo.faces[f];
        for (int c = 0; c < 3; ++c) {
            const double d = ct[3 * f + c];
            // angle (f, c) appears +cot in H at the vertex one corner ahead
            // and -cot at the vertex two corners ahead
            trip.emplace_back(t[(c + 1) % 3], 3 * f + c, d);
            trip.emplace_back(t[(c + 2) % 3], 3 * f + c, -d);
        }
    }
    Eigen::SparseMatrix<double> J(topo.vertex_count, n);
    J.setFromTriplets(trip.begin(), trip.end());
    return J;
}

EnergyEvaluation energy_D(const AngleStructure& A, const ConstraintSpec& spec,
                          const MeshTopology& topo) {
    check_interior(A);
    const Eigen::VectorXd r = holonomy_residuals(A, spec, topo);
    const Eigen::SparseMatrix<double> J = holonomy_jacobian(A, topo);

    EnergyEvaluation ev;
    ev.value = r.squaredNorm();
    ev.gradient = 2.0 * (J.transpose() * r);
    ev.hessian = 2.0 * Eigen::SparseMatrix<double>(J.transpose() * J);
    ev.hessian.makeCompressed();
    return ev;
}

LinearConstraints build_linear_constraints(const MeshTopology& topo, const ConstraintSpec& spec) {
    const int nf = topo.face_count();
    const int nv = topo.vertex_count;
    const int n = topo.angle_count();

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(size_t(2) * n);
    LinearConstraints lc;
    lc.rhs.resize(nf + nv);
    for (int f = 0; f < nf; ++f) {
        for (int c = 0; c < 3; ++c) trip.emplace_back(f, 3 * f + c, 1.0);
        lc.rhs[f] = kPi;
    }
    int nonempty_vertex_rows = 0;
    for (int v = 0; v < nv; ++v) {
        for (const auto& [f, c] : topo.vertex_corners[v]) trip.emplace_back(nf + v, 3 * f + c, 1.0);
        if (!topo.vertex_corners[v].empty()) ++nonempty_vertex_rows;
        lc.rhs[nf + v] = spec.theta[v];
    }
    lc.matrix.resize(nf + nv, n);
    lc.matrix.setFromTriplets(trip.begin(), trip.end());
    lc.matrix.makeCompressed();
    lc.rank = nf + nonempty_vertex_rows - 1;

    // The face rows and the vertex rows both sum to the all-ones vector, so
    // the last non-empty vertex row is implied by the rest.
    for (int v = nv - 1; v >= 0; --v) {
        if (!topo.vertex_corners[v].empty()) {
            lc.redundant_row = nf + v;
            break;
        }
    }
    return lc;
}

LinearConstraints face_sum_constraints(int face_count) {
    LinearConstraints lc;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(size_t(3) * face_count);
    lc.rhs.resize(face_count);
    for (int f = 0; f < face_count; ++f) {
        for (int c = 0; c < 3; ++c) trip.emplace_back(f, 3 * f + c, 1.0);
        lc.rhs[f] = kPi;
    }
    lc.matrix.resize(face_count, 3 * face_count);
    lc.matrix.setFromTriplets(trip.begin(), trip.end());
    lc.matrix.makeCompressed();
    lc.rank = face_count;
    lc.redundant_row = -1;
    return lc;
}

}  // namespace equimesh
