#pragma once
#include <vector>

#include "equimesh/mesh.hpp"

namespace equimesh {

// Corner angles indexed by (face, corner): angle (f, c) sits at the c-th
// vertex of face f's triple. The optimization variable. Valid structures have
// every angle in (0, pi) and per-face sums of pi.
struct AngleStructure {
    std::vector<double> angles;  // size 3|F|

    double at(int face, int corner) const { return angles[3 * face + corner]; }
    double& at(int face, int corner) { return angles[3 * face + corner]; }
    int size() const { return static_cast<int>(angles.size()); }
};

// Per-vertex targets: theta is the angle sum, holonomy_target the log edge
// ratio, both derived from the input embedding. For interior vertices they
// come out as 2*pi and 0.
struct ConstraintSpec {
    std::vector<double> theta;
    std::vector<double> holonomy_target;
};

// Corner angles of the embedding, computed with atan2(2*area, dot) per
// corner, which stays accurate for needle triangles. Throws DegeneracyError
// on faces with area below 1e-14 times the squared bbox diagonal.
AngleStructure induce_angles(const EmbeddedMesh& mesh);

// Sum of the corner angles incident to a vertex.
double angle_sum(int vertex, const AngleStructure& A, const MeshTopology& topo);

// Signed sum of log-sines of the two non-incident corners over the faces at
// a vertex: for a CCW face (i, j, k) seen from its corner at i, the corner at
// k counts positive and the corner at j negative. At boundary vertices of an
// embedded mesh this equals the log ratio of the outgoing to the incoming
// boundary edge length; at interior vertices of a flat embedding it is 0.
double holonomy(int vertex, const AngleStructure& A, const MeshTopology& topo);

// Log ratio ln(outgoing / incoming) of the boundary edge lengths at a
// boundary vertex, straight from coordinates (loop order: interior on the
// left). The reference against which the holonomy sign convention is tested.
double boundary_edge_log_ratio(const EmbeddedMesh& mesh, int vertex);

// Targets induced by the embedding itself: theta_i = angle_sum(i),
// holonomy_target_i = holonomy(i) over the induced angles.
ConstraintSpec derive_targets(const EmbeddedMesh& mesh);

}  // namespace equimesh
