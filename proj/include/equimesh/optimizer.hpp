#pragma once
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "equimesh/angles.hpp"
#include "equimesh/energy.hpp"
#include "equimesh/mesh.hpp"

namespace equimesh {

struct SolverConfig {
    int max_iterations = 500;             // per phase
    double kkt_tolerance = 1e-9;          // norm of the projected gradient
    double constraint_tolerance = 1e-10;  // max linear residual
    double holonomy_tolerance = 1e-6;     // max per-vertex |H(i,A) - H_i|
    double barrier_initial = 1e-2;
    double barrier_shrink = 0.2;
    double fraction_to_boundary = 0.995;
    double lm_damping_initial = 1e-4;
    std::size_t iterative_kkt_threshold = 200000;  // KKT rows before MINRES takes over

    void validate() const;  // throws std::invalid_argument on bad values
};

struct IterationRecord {
    int phase;      // 1 = energy ascent, 2 = defect reduction
    double energy;  // E at the accepted iterate
    double defect;  // D at the accepted iterate (0 when no holonomy targets)
    double barrier;  // barrier mu in phase 1, LM damping in phase 2
    double step_norm;
    double max_linear_residual;
};

struct SolveTrace {
    std::vector<IterationRecord> iterations;
    bool converged = false;
    std::string message;
    double initial_energy = 0.0;
    double final_energy = 0.0;
    double final_defect = 0.0;
    double max_holonomy_residual = 0.0;
    int phase1_iterations = 0;
    int phase2_iterations = 0;
    std::vector<double> delta_schedule;  // outer delta per relaxation round
};

using SolveResult = std::pair<AngleStructure, SolveTrace>;

// Phase 1: maximize the volume energy over the linear angle-sum system,
// staying strictly inside (0, pi) via a logarithmic barrier with Newton
// steps on the equality-constrained barrier problem. The result is the
// unique constrained maximizer (the energy is strictly concave there).
SolveResult maximize_E(const MeshTopology& topo, const AngleStructure& A0,
                       const ConstraintSpec& spec, const SolverConfig& cfg);

// Same, over caller-supplied constraint rows (used e.g. with face-sum rows
// only, where the maximizer is all-equilateral).
SolveResult maximize_E(const MeshTopology& topo, const AngleStructure& A0,
                       const LinearConstraints& constraints, const SolverConfig& cfg);

// Phase 2: drive the holonomy residuals to the targets by damped
// Gauss-Newton (Levenberg-Marquardt) steps confined to the linear system.
SolveResult minimize_D(const MeshTopology& topo, const AngleStructure& A1,
                       const ConstraintSpec& spec, const SolverConfig& cfg);

// Phase 1 followed by phase 2.
SolveResult argmax(const MeshTopology& topo, const AngleStructure& A0, const ConstraintSpec& spec,
                   const SolverConfig& cfg);

// Relaxation schedule: maximize energy inside the defect ball {D < delta},
// push the defect down to delta/4 along its negative gradient, halve delta;
// stop once delta drops below holonomy_tolerance^2.
SolveResult argmax_relaxed(const MeshTopology& topo, const AngleStructure& A0,
                           const ConstraintSpec& spec, const SolverConfig& cfg, double delta0);

}  // namespace equimesh
