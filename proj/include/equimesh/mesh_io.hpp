#pragma once
#include <string>

#include "equimesh/mesh.hpp"

namespace equimesh {

// Extra information recovered while parsing, used to write outputs that
// mirror the input encoding.
struct ParseInfo {
    int index_base = 1;  // 0- or 1-based vertex numbering, auto-detected
    // Face triples exactly as listed in the input, before orientation
    // normalization.
    std::vector<std::array<int, 3>> faces_as_listed;
};

// Shewchuk-style .node/.ele pair. The header of the .node file is
// "<#points> <dim> <#attrs> <#markers>" with dim 2; point lines are
// "<index> <x> <y> [attrs...] [marker]". The .ele header is
// "<#triangles> <nodes-per-tri> <#attrs>" with 3 nodes per triangle.
// '#' starts a comment. Indexing base is detected from the first node index.
// The returned mesh is orientation-normalized with topology derived.
EmbeddedMesh parse_node_ele(const std::string& node_text, const std::string& ele_text,
                            ParseInfo* info = nullptr);

// ASCII OFF, triangles only, z (when present) must be zero within 1e-12.
EmbeddedMesh parse_off(const std::string& text, ParseInfo* info = nullptr);

std::string serialize_node(const EmbeddedMesh& mesh, int index_base = 1);
std::string serialize_ele(const EmbeddedMesh& mesh, int index_base = 1);
std::string serialize_off(const EmbeddedMesh& mesh);

}  // namespace equimesh
