#include "equimesh/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>

#include "equimesh/errors.hpp"

namespace equimesh {

double triangle_signed_area(const std::array<double, 2>& a, const std::array<double, 2>& b,
                            const std::array<double, 2>& c) {
    return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]));
}

double EmbeddedMesh::face_signed_area(int f) const {
    const auto& t = topo.faces[f];
    return triangle_signed_area(coords[t[0]], coords[t[1]], coords[t[2]]);
}

double EmbeddedMesh::edge_length(int v0, int v1) const {
    const double dx = coords[v0][0] - coords[v1][0];
    const double dy = coords[v0][1] - coords[v1][1];
    return std::hypot(dx, dy);
}

double EmbeddedMesh::bbox_diagonal() const {
    if (coords.empty()) return 0.0;
    double xmin = coords[0][0], xmax = coords[0][0];
    double ymin = coords[0][1], ymax = coords[0][1];
    for (const auto& p : coords) {
        xmin = std::min(xmin, p[0]);
        xmax = std::max(xmax, p[0]);
        ymin = std::min(ymin, p[1]);
        ymax = std::max(ymax, p[1]);
    }
    return std::hypot(xmax - xmin, ymax - ymin);
}

CutMap CutMap::then(const CutMap& second) const {
    CutMap out;
    out.origin.reserve(second.origin.size());
    for (int v : second.origin) out.origin.push_back(origin.at(v));
    return out;
}

namespace {

uint64_t edge_key(int a, int b) {
    const int lo = std::min(a, b), hi = std::max(a, b);
    return (uint64_t(uint32_t(lo)) << 32) | uint32_t(hi);
}

// Faces around `v` must form one fan: connected through shared edges at v,
// with 0 (interior) or 2 (boundary) boundary edges at v.
void check_umbrella(const MeshTopology& topo, int v) {
    const auto& corners = topo.vertex_corners[v];
    if (corners.empty()) return;

    // Edges at v and the faces on them.
    std::unordered_map<int, std::array<int, 2>> faces_at_edge;
    int boundary_edges = 0;
    for (const auto& [f, c] : corners) {
        for (int side = 0; side < 3; ++side) {
            const int e = topo.face_edges[f][side];
            const auto& ev = topo.edges[e];
            if (ev[0] != v && ev[1] != v) continue;
            auto [it, inserted] = faces_at_edge.try_emplace(e, std::array<int, 2>{f, -1});
            if (!inserted) it->second[1] = f;
        }
    }
    for (const auto& [e, ff] : faces_at_edge)
        if (topo.is_boundary_edge(e)) ++boundary_edges;
    if (boundary_edges != 0 && boundary_edges != 2)
        throw TopologyError("non-manifold vertex " + std::to_string(v) + ": " +
                            std::to_string(boundary_edges) + " boundary edges");

    // Flood over faces through shared edges at v.
    std::unordered_map<int, int> face_slot;
    for (size_t i = 0; i < corners.size(); ++i) face_slot[corners[i][0]] = int(i);
    std::vector<char> seen(corners.size(), 0);
    std::vector<int> stack{corners[0][0]};
    seen[0] = 1;
    size_t reached = 1;
    while (!stack.empty()) {
        const int f = stack.back();
        stack.pop_back();
        for (int side = 0; side < 3; ++side) {
            const int e = topo.face_edges[f][side];
            const auto& ev = topo.edges[e];
            if (ev[0] != v && ev[1] != v) continue;
            for (int nb : topo.edge_faces[e]) {
                if (nb < 0 || nb == f) continue;
                const int slot = face_slot.at(nb);
                if (!seen[slot]) {
                    seen[slot] = 1;
                    ++reached;
                    stack.push_back(nb);
                }
            }
        }
    }
    if (reached != corners.size())
        throw TopologyError("non-manifold vertex " + std::to_string(v) +
                            ": incident faces form more than one fan");
}

void extract_boundary_loops(MeshTopology& topo) {
    // Directed boundary edges (u -> v) taken from the CCW order of the face
    // owning each boundary edge. With consistent orientation every boundary
    // vertex has exactly one outgoing directed edge, so loops follow the
    // interior-on-the-left convention. With mixed orientation we fall back to
    // an undirected walk.
    std::unordered_map<int, int> next;  // u -> v over directed boundary edges
    bool directed_ok = true;
    std::vector<std::vector<int>> boundary_vertex_edges(topo.vertex_count);
    std::vector<int> boundary_edge_ids;
    for (int e = 0; e < topo.edge_count(); ++e) {
        if (!topo.is_boundary_edge(e)) continue;
        boundary_edge_ids.push_back(e);
        boundary_vertex_edges[topo.edges[e][0]].push_back(e);
        boundary_vertex_edges[topo.edges[e][1]].push_back(e);
        const int f = topo.edge_faces[e][0];
        const auto& t = topo.faces[f];
        for (int c = 0; c < 3; ++c) {
            const int u = t[c], v = t[(c + 1) % 3];
            if (edge_key(u, v) == edge_key(topo.edges[e][0], topo.edges[e][1])) {
                if (!next.emplace(u, v).second) directed_ok = false;
                break;
            }
        }
    }

    std::vector<char> used_edge(topo.edge_count(), 0);
    auto mark_used = [&](int u, int v) {
        for (int e : boundary_vertex_edges[u]) {
            const auto& ev = topo.edges[e];
            if ((ev[0] == u && ev[1] == v) || (ev[0] == v && ev[1] == u)) {
                used_edge[e] = 1;
                return;
            }
        }
    };

    for (int e0 : boundary_edge_ids) {
        if (used_edge[e0]) continue;
        std::vector<int> loop;
        int start = std::min(topo.edges[e0][0], topo.edges[e0][1]);
        int cur = start, prev = -1;
        do {
            loop.push_back(cur);
            int nxt = -1;
            if (directed_ok) {
                nxt = next.at(cur);
            } else {
                for (int e : boundary_vertex_edges[cur]) {
                    const int other = topo.edges[e][0] == cur ? topo.edges[e][1] : topo.edges[e][0];
                    if (other != prev) {
                        nxt = other;
                        break;
                    }
                }
                if (nxt < 0) nxt = prev;  // two-vertex loop cannot happen on valid input
            }
            mark_used(cur, nxt);
            prev = cur;
            cur = nxt;
            if (loop.size() > size_t(topo.vertex_count))
                throw TopologyError("boundary walk does not close");
        } while (cur != start);
        // canonical start at the smallest vertex of the loop
        auto smallest = std::min_element(loop.begin(), loop.end());
        std::rotate(loop.begin(), smallest, loop.end());
        topo.boundary_loops.push_back(std::move(loop));
    }
    std::sort(topo.boundary_loops.begin(), topo.boundary_loops.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
}

}  // namespace

MeshTopology build_topology(const std::vector<std::array<int, 3>>& faces, int vertex_count) {
    MeshTopology topo;
    topo.vertex_count = vertex_count;
    topo.faces = faces;
    topo.face_edges.assign(faces.size(), {-1, -1, -1});
    topo.vertex_corners.assign(vertex_count, {});

    std::unordered_map<uint64_t, int> edge_index;
    edge_index.reserve(faces.size() * 2);
    for (int f = 0; f < int(faces.size()); ++f) {
        const auto& t = faces[f];
        for (int c = 0; c < 3; ++c) {
            if (t[c] < 0 || t[c] >= vertex_count)
                throw TopologyError("face " + std::to_string(f) + " references vertex " +
                                    std::to_string(t[c]) + " outside [0, " +
                                    std::to_string(vertex_count) + ")");
        }
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
            throw TopologyError("face " + std::to_string(f) + " repeats a vertex");
        for (int c = 0; c < 3; ++c) {
            const int u = t[c], v = t[(c + 1) % 3];
            auto [it, inserted] = edge_index.try_emplace(edge_key(u, v), topo.edge_count());
            if (inserted) {
                topo.edges.push_back({std::min(u, v), std::max(u, v)});
                topo.edge_faces.push_back({f, -1});
            } else {
                auto& ef = topo.edge_faces[it->second];
                if (ef[1] >= 0)
                    throw TopologyError("non-manifold edge (" + std::to_string(u) + ", " +
                                        std::to_string(v) + ") shared by three or more faces");
                ef[1] = f;
            }
            topo.face_edges[f][c] = it->second;
            topo.vertex_corners[t[c]].push_back({f, c});
        }
    }

    topo.interior.assign(vertex_count, 1);
    for (int e = 0; e < topo.edge_count(); ++e) {
        if (topo.is_boundary_edge(e)) {
            topo.interior[topo.edges[e][0]] = 0;
            topo.interior[topo.edges[e][1]] = 0;
        }
    }
    for (int v = 0; v < vertex_count; ++v) {
        if (topo.vertex_corners[v].empty()) {
            topo.interior[v] = 0;
            topo.warnings.push_back("isolated vertex " + std::to_string(v));
        }
    }

    for (int v = 0; v < vertex_count; ++v) check_umbrella(topo, v);
    extract_boundary_loops(topo);
    return topo;
}

EmbeddedMesh normalize_orientation(EmbeddedMesh mesh) {
    bool changed = false;
    for (int f = 0; f < int(mesh.topo.faces.size()); ++f) {
        const double area = mesh.face_signed_area(f);
        if (area == 0.0)
            throw DegeneracyError("face " + std::to_string(f) + " has zero area");
        if (area < 0.0) {
            std::swap(mesh.topo.faces[f][1], mesh.topo.faces[f][2]);
            changed = true;
        }
    }
    if (changed || mesh.topo.edges.empty())
        mesh.topo = build_topology(mesh.topo.faces, mesh.topo.vertex_count);
    return mesh;
}

int euler_characteristic(const MeshTopology& topo) {
    return topo.vertex_count - topo.edge_count() + topo.face_count();
}

}  // namespace equimesh
