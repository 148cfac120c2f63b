#include "equimesh/mesh_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <string_view>
#include <vector>

#include "equimesh/errors.hpp"

namespace equimesh {
namespace {

struct Row {
    long line;
    std::vector<std::string_view> tokens;
};

// Split into rows of whitespace-separated tokens; '#' comments stripped,
// blank lines dropped, line numbers kept for diagnostics.
std::vector<Row> tokenize(const std::string& text) {
    std::vector<Row> rows;
    long line = 1;
    size_t pos = 0;
    while (pos < text.size()) {
        size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        std::string_view body(text.data() + pos, eol - pos);
        if (const size_t hash = body.find('#'); hash != std::string_view::npos)
            body = body.substr(0, hash);
        Row row{line, {}};
        size_t i = 0;
        while (i < body.size()) {
            while (i < body.size() && (body[i] == ' ' || body[i] == '\t' || body[i] == '\r')) ++i;
            const size_t start = i;
            while (i < body.size() && body[i] != ' ' && body[i] != '\t' && body[i] != '\r') ++i;
            if (i > start) row.tokens.push_back(body.substr(start, i - start));
        }
        if (!row.tokens.empty()) rows.push_back(std::move(row));
        pos = eol + 1;
        ++line;
    }
    return rows;
}

long to_long(std::string_view tok, long line, const char* what) {
    long value = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || p != tok.data() + tok.size())
        throw ParseError(std::string("expected integer for ") + what + ", got '" +
                             std::string(tok) + "'",
                         line);
    return value;
}

double to_double(std::string_view tok, long line, const char* what) {
    double value = 0.0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || p != tok.data() + tok.size())
        throw ParseError(std::string("expected number for ") + what + ", got '" +
                             std::string(tok) + "'",
                         line);
    return value;
}

const Row& need_row(const std::vector<Row>& rows, size_t idx, const char* what) {
    if (idx >= rows.size())
        throw ParseError(std::string("unexpected end of file reading ") + what,
                         rows.empty() ? 1 : rows.back().line);
    return rows[idx];
}

EmbeddedMesh finish_mesh(std::vector<std::array<double, 2>> coords,
                         std::vector<std::array<int, 3>> faces, ParseInfo* info, int base) {
    if (info) {
        info->index_base = base;
        info->faces_as_listed = faces;
    }
    EmbeddedMesh mesh;
    mesh.coords = std::move(coords);
    mesh.topo.vertex_count = static_cast<int>(mesh.coords.size());
    mesh.topo.faces = std::move(faces);
    return normalize_orientation(std::move(mesh));
}

}  // namespace

EmbeddedMesh parse_node_ele(const std::string& node_text, const std::string& ele_text,
                            ParseInfo* info) {
    const auto node_rows = tokenize(node_text);
    const Row& nh = need_row(node_rows, 0, ".node header");
    if (nh.tokens.size() < 4) throw ParseError("bad .node header", nh.line);
    const long n_points = to_long(nh.tokens[0], nh.line, "point count");
    const long dim = to_long(nh.tokens[1], nh.line, "dimension");
    const long n_attrs = to_long(nh.tokens[2], nh.line, "attribute count");
    const long n_markers = to_long(nh.tokens[3], nh.line, "marker count");
    if (n_points < 0) throw ParseError("negative point count", nh.line);
    if (dim != 2) throw ParseError("dimension must be 2, got " + std::to_string(dim), nh.line);
    if (n_attrs < 0 || n_markers < 0 || n_markers > 1)
        throw ParseError("bad attribute/marker counts", nh.line);

    std::vector<std::array<double, 2>> coords;
    coords.reserve(n_points);
    int base = 0;
    for (long i = 0; i < n_points; ++i) {
        const Row& row = need_row(node_rows, 1 + i, "point line");
        if (row.tokens.size() < 3) throw ParseError("point line needs index, x, y", row.line);
        const long idx = to_long(row.tokens[0], row.line, "point index");
        if (i == 0) {
            if (idx != 0 && idx != 1)
                throw ParseError("first point index must be 0 or 1, got " + std::to_string(idx),
                                 row.line);
            base = static_cast<int>(idx);
        } else if (idx != base + i) {
            throw ParseError("point indices must be consecutive: expected " +
                                 std::to_string(base + i) + ", got " + std::to_string(idx),
                             row.line);
        }
        coords.push_back({to_double(row.tokens[1], row.line, "x coordinate"),
                          to_double(row.tokens[2], row.line, "y coordinate")});
    }

    const auto ele_rows = tokenize(ele_text);
    const Row& eh = need_row(ele_rows, 0, ".ele header");
    if (eh.tokens.size() < 3) throw ParseError("bad .ele header", eh.line);
    const long n_tris = to_long(eh.tokens[0], eh.line, "triangle count");
    const long nodes_per = to_long(eh.tokens[1], eh.line, "nodes per triangle");
    if (n_tris < 0) throw ParseError("negative triangle count", eh.line);
    if (nodes_per != 3)
        throw ParseError("only 3-node triangles supported, got " + std::to_string(nodes_per) +
                             " nodes per element",
                         eh.line);

    std::vector<std::array<int, 3>> faces;
    faces.reserve(n_tris);
    for (long i = 0; i < n_tris; ++i) {
        const Row& row = need_row(ele_rows, 1 + i, "triangle line");
        if (row.tokens.size() < 4)
            throw ParseError("triangle line needs index and three vertices", row.line);
        std::array<int, 3> tri{};
        for (int c = 0; c < 3; ++c) {
            const long v = to_long(row.tokens[1 + c], row.line, "vertex index") - base;
            if (v < 0 || v >= n_points)
                throw ParseError("vertex index " + std::to_string(v + base) + " out of range",
                                 row.line);
            tri[c] = static_cast<int>(v);
        }
        faces.push_back(tri);
    }
    return finish_mesh(std::move(coords), std::move(faces), info, base);
}

EmbeddedMesh parse_off(const std::string& text, ParseInfo* info) {
    const auto rows = tokenize(text);
    size_t cursor = 0;
    const Row& header = need_row(rows, cursor++, "OFF header");
    if (header.tokens[0] != "OFF") throw ParseError("missing OFF header", header.line);

    // Counts may share the header line or follow on their own.
    long nv = 0, nf = 0;
    if (header.tokens.size() >= 3) {
        nv = to_long(header.tokens[1], header.line, "vertex count");
        nf = to_long(header.tokens[2], header.line, "face count");
    } else {
        const Row& counts = need_row(rows, cursor++, "OFF counts");
        if (counts.tokens.size() < 3) throw ParseError("OFF counts need nv nf ne", counts.line);
        nv = to_long(counts.tokens[0], counts.line, "vertex count");
        nf = to_long(counts.tokens[1], counts.line, "face count");
    }
    if (nv < 0 || nf < 0) throw ParseError("negative counts in OFF header", header.line);

    std::vector<std::array<double, 2>> coords;
    coords.reserve(nv);
    for (long i = 0; i < nv; ++i) {
        const Row& row = need_row(rows, cursor++, "vertex line");
        if (row.tokens.size() != 2 && row.tokens.size() != 3)
            throw ParseError("vertex line needs x y or x y z", row.line);
        const double x = to_double(row.tokens[0], row.line, "x coordinate");
        const double y = to_double(row.tokens[1], row.line, "y coordinate");
        if (row.tokens.size() == 3) {
            const double z = to_double(row.tokens[2], row.line, "z coordinate");
            if (std::abs(z) > 1e-12)
                throw ParseError("nonzero z coordinate in planar OFF", row.line);
        }
        coords.push_back({x, y});
    }

    std::vector<std::array<int, 3>> faces;
    faces.reserve(nf);
    for (long i = 0; i < nf; ++i) {
        const Row& row = need_row(rows, cursor++, "face line");
        const long k = to_long(row.tokens[0], row.line, "face size");
        if (k != 3)
            throw ParseError("only triangle faces supported, got " + std::to_string(k) + "-gon",
                             row.line);
        if (row.tokens.size() < 4) throw ParseError("face line needs three vertices", row.line);
        std::array<int, 3> tri{};
        for (int c = 0; c < 3; ++c) {
            const long v = to_long(row.tokens[1 + c], row.line, "vertex index");
            if (v < 0 || v >= nv)
                throw ParseError("vertex index " + std::to_string(v) + " out of range", row.line);
            tri[c] = static_cast<int>(v);
        }
        faces.push_back(tri);
    }
    return finish_mesh(std::move(coords), std::move(faces), info, 0);
}

namespace {

void append_double(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
}

}  // namespace

std::string serialize_node(const EmbeddedMesh& mesh, int index_base) {
    std::string out;
    out += std::to_string(mesh.topo.vertex_count) + " 2 0 1\n";
    for (int v = 0; v < mesh.topo.vertex_count; ++v) {
        out += std::to_string(v + index_base);
        out += ' ';
        append_double(out, mesh.coords[v][0]);
        out += ' ';
        append_double(out, mesh.coords[v][1]);
        out += ' ';
        out += mesh.topo.interior[v] ? '0' : '1';
        out += '\n';
    }
    return out;
}

std::string serialize_ele(const EmbeddedMesh& mesh, int index_base) {
    std::string out;
    out += std::to_string(mesh.topo.face_count()) + " 3 0\n";
    for (int f = 0; f < mesh.topo.face_count(); ++f) {
        const auto& t = mesh.topo.faces[f];
        out += std::to_string(f + index_base);
        for (int c = 0; c < 3; ++c) {
            out += ' ';
            out += std::to_string(t[c] + index_base);
        }
        out += '\n';
    }
    return out;
}

std::string serialize_off(const EmbeddedMesh& mesh) {
    std::string out = "OFF\n";
    out += std::to_string(mesh.topo.vertex_count) + " " + std::to_string(mesh.topo.face_count()) +
           " " + std::to_string(mesh.topo.edge_count()) + "\n";
    for (int v = 0; v < mesh.topo.vertex_count; ++v) {
        append_double(out, mesh.coords[v][0]);
        out += ' ';
        append_double(out, mesh.coords[v][1]);
        out += " 0\n";
    }
    for (const auto& t : mesh.topo.faces) {
        out += "3 " + std::to_string(t[0]) + " " + std::to_string(t[1]) + " " +
               std::to_string(t[2]) + "\n";
    }
    return out;
}

}  // namespace equimesh
