#pragma once
#include <array>
#include <string>
#include <vector>

namespace equimesh {

// Combinatorial mesh structure. Everything beyond `faces` and `vertex_count`
// is derived by build_topology. Instances are treated as immutable once
// built.
struct MeshTopology {
    int vertex_count = 0;
    std::vector<std::array<int, 3>> faces;  // vertex triples, CCW once normalized

    // Derived. edges hold vertex pairs in first-seen order; edge_faces lists
    // the one or two incident faces (-1 for the missing side);
    // face_edges[f][c] is the edge between corners c and c+1 of face f.
    std::vector<std::array<int, 2>> edges;
    std::vector<std::array<int, 2>> edge_faces;
    std::vector<std::array<int, 3>> face_edges;

    // Boundary loops as cyclic vertex sequences. With consistent CCW faces
    // each loop is walked with the interior on its left. Each loop starts at
    // its smallest vertex index; loops are sorted by that start index.
    std::vector<std::vector<int>> boundary_loops;

    std::vector<char> interior;  // per vertex: not on any boundary edge

    // Per vertex: incident (face, corner) pairs, face index ascending.
    std::vector<std::vector<std::array<int, 2>>> vertex_corners;

    std::vector<std::string> warnings;  // isolated vertices and similar

    int face_count() const { return static_cast<int>(faces.size()); }
    int edge_count() const { return static_cast<int>(edges.size()); }
    int angle_count() const { return 3 * face_count(); }
    bool is_boundary_edge(int e) const { return edge_faces[e][1] < 0; }
};

// Topology plus planar coordinates. Invariant after normalize_orientation:
// every face has strictly positive signed area.
struct EmbeddedMesh {
    MeshTopology topo;
    std::vector<std::array<double, 2>> coords;

    double face_signed_area(int f) const;
    double edge_length(int v0, int v1) const;
    // Diagonal of the axis-aligned bounding box; the mesh-scale unit used by
    // tolerances.
    double bbox_diagonal() const;
};

// Maps cut-mesh vertices back to the vertex they were split from.
struct CutMap {
    std::vector<int> origin;

    // Compose: `second` applied after `*this` (origin of second's entries are
    // indices into *this).
    CutMap then(const CutMap& second) const;
};

// Derive edges, boundary loops, interior flags and corner incidence.
// Rejects edges shared by three or more faces and vertices whose incident
// faces do not form a single fan. Tolerates mixed face orientation (boundary
// loops are then walked in an arbitrary direction). Isolated vertices are
// retained and recorded as warnings.
MeshTopology build_topology(const std::vector<std::array<int, 3>>& faces, int vertex_count);

// Flip every face with negative signed area to CCW and re-derive the
// topology. Throws DegeneracyError on zero-area faces.
EmbeddedMesh normalize_orientation(EmbeddedMesh mesh);

// |V| - |E| + |F|.
int euler_characteristic(const MeshTopology& topo);

double triangle_signed_area(const std::array<double, 2>& a, const std::array<double, 2>& b,
                            const std::array<double, 2>& c);

}  // namespace equimesh
