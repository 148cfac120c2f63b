#pragma once
#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "equimesh/angles.hpp"
#include "equimesh/mesh.hpp"

namespace equimesh {

// Value, gradient and Hessian of an energy over the 3|F| angle variables.
// For the volume energy the Hessian is diagonal; for the holonomy defect it
// is the Gauss-Newton approximation 2 J^T J (positive semidefinite).
struct EnergyEvaluation {
    double value = 0.0;
    Eigen::VectorXd gradient;
    Eigen::SparseMatrix<double> hessian;
};

// The linear equality system over angle variables: one row per face
// (coefficients 1 on its three corners, rhs pi) followed by one row per
// vertex (coefficients 1 on its incident corners, rhs theta_i). The face rows
// sum to the same vector as the vertex rows, so exactly one row is redundant.
struct LinearConstraints {
    Eigen::SparseMatrix<double> matrix;  // (|F| + |V|) x 3|F|
    Eigen::VectorXd rhs;
    int rank = 0;            // |F| + (non-empty vertex rows) - 1
    int redundant_row = -1;  // a row implied by the others, -1 if none
};

// Volume energy: sum of lob over all corner angles. Gradient entries are
// -ln(2 sin a), Hessian diagonal entries -cot a. Angles must lie in
// (1e-12, pi - 1e-12); outside that the call throws SingularityError rather
// than clamping.
EnergyEvaluation energy_E(const AngleStructure& A);

// Holonomy defect: sum over vertices of (H(i, A) - H_i)^2, with the
// Gauss-Newton Hessian.
EnergyEvaluation energy_D(const AngleStructure& A, const ConstraintSpec& spec,
                          const MeshTopology& topo);

// Per-vertex holonomy residuals H(i, A) - H_i, assembled with the batched
// kernels (the solver hot path).
Eigen::VectorXd holonomy_residuals(const AngleStructure& A, const ConstraintSpec& spec,
                                   const MeshTopology& topo);

// Jacobian of the residual vector: row i holds +cot / -cot entries over the
// angles of faces incident to vertex i.
Eigen::SparseMatrix<double> holonomy_jacobian(const AngleStructure& A, const MeshTopology& topo);

LinearConstraints build_linear_constraints(const MeshTopology& topo, const ConstraintSpec& spec);

// Face-sum rows only (every row rhs pi, full rank). Under these constraints
// alone the energy maximizer is the all-equilateral structure, which the
// tests pin down.
LinearConstraints face_sum_constraints(int face_count);

}  // namespace equimesh
