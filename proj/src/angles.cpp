#include "equimesh/angles.hpp"

#include <cmath>
#include <numbers>

#include "equimesh/errors.hpp"

namespace equimesh {

namespace {
constexpr double kPi = std::numbers::pi;
}

AngleStructure induce_angles(const EmbeddedMesh& mesh) {
    const double bbox = mesh.bbox_diagonal();
    const double area_floor = 1e-14 * bbox * bbox;

    AngleStructure A;
    A.angles.resize(mesh.topo.angle_count());
    for (int f = 0; f < mesh.topo.face_count(); ++f) {
        const auto& t = mesh.topo.faces[f];
        const double area = mesh.face_signed_area(f);
        if (!(area > area_floor))
            throw DegeneracyError("face " + std::to_string(f) + " is degenerate (area " +
                                  std::to_string(area) + ")");
        for (int c = 0; c < 3; ++c) {
            const auto& p = mesh.coords[t[c]];
            const auto& q = mesh.coords[t[(c + 1) % 3]];
            const auto& r = mesh.coords[t[(c + 2) % 3]];
            const double ux = q[0] - p[0], uy = q[1] - p[1];
            const double vx = r[0] - p[0], vy = r[1] - p[1];
            A.at(f, c) = std::atan2(ux * vy - uy * vx, ux * vx + uy * vy);
        }
    }
    return A;
}

double angle_sum(int vertex, const AngleStructure& A, const MeshTopology& topo) {
    double sum = 0.0;
    for (const auto& [f, c] : topo.vertex_corners[vertex]) sum += A.at(f, c);
    return sum;
}

double holonomy(int vertex, const AngleStructure& A, const MeshTopology& topo) {
    double sum = 0.0;
    for (const auto& [f, c] : topo.vertex_corners[vertex]) {
        const double plus = A.at(f, (c + 2) % 3);
        const double minus = A.at(f, (c + 1) % 3);
        if (!(plus > 0.0 && plus < kPi) || !(minus > 0.0 && minus < kPi))
            throw SingularityError("holonomy: corner angle outside (0, pi) in face " +
                                   std::to_string(f));
        sum += std::log(std::sin(plus)) - std::log(std::sin(minus));
    }
    return sum;
}

double boundary_edge_log_ratio(const EmbeddedMesh& mesh, int vertex) {
    for (const auto& loop : mesh.topo.boundary_loops) {
        for (size_t i = 0; i < loop.size(); ++i) {
            if (loop[i] != vertex) continue;
            const int prev = loop[(i + loop.size() - 1) % loop.size()];
            const int next = loop[(i + 1) % loop.size()];
            return std::log(mesh.edge_length(vertex, next) / mesh.edge_length(vertex, prev));
        }
    }
    throw TopologyError("vertex " + std::to_string(vertex) + " is not on the boundary");
}

ConstraintSpec derive_targets(const EmbeddedMesh& mesh) {
    const AngleStructure A = induce_angles(mesh);
    ConstraintSpec spec;
    spec.theta.resize(mesh.topo.vertex_count);
    spec.holonomy_target.resize(mesh.topo.vertex_count);
    for (int v = 0; v < mesh.topo.vertex_count; ++v) {
        spec.theta[v] = angle_sum(v, A, mesh.topo);
        spec.holonomy_target[v] = holonomy(v, A, mesh.topo);
    }
    return spec;
}

}  // namespace equimesh
