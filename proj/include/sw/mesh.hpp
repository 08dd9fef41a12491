#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace sw {

// Indexed triangle mesh. Coordinates are centimetres by convention,
// faces are counterclockwise vertex-index triples.
struct TriangleMesh {
    std::vector<Eigen::Vector3d> vertices;
    std::vector<std::array<int, 3>> faces;

    int vertex_count() const { return static_cast<int>(vertices.size()); }
    int face_count() const { return static_cast<int>(faces.size()); }
};

struct MeshReport {
    int vertex_count = 0;
    int face_count = 0;
    bool is_watertight = false;
    int component_count = 0;
    int degenerate_face_count = 0;

    // A mesh is usable downstream when it is a single connected component
    // with no degenerate faces.
    bool ok() const { return component_count == 1 && degenerate_face_count == 0; }

    std::string to_json() const;
};

struct VolumeResult {
    double value = 0.0;  // cm^3
    // When false the value is an orientation-dependent approximation.
    bool watertight = false;
};

// Wavefront OBJ reader (ASCII). Keeps `v` positions and fan-triangulated
// `f` faces, ignores normals/texcoords/materials. OBJ 1-based indices are
// converted to 0-based; negative (relative) indices are resolved.
TriangleMesh load_obj(std::istream& in);
TriangleMesh load_obj_file(const std::string& path);

void save_obj(const TriangleMesh& mesh, std::ostream& out);
void save_obj_file(const TriangleMesh& mesh, const std::string& path);

// Reporting only; never throws on mesh defects (out-of-range face indices
// are the one exception since no meaningful report exists for them).
MeshReport validate(const TriangleMesh& mesh);

// Absolute value of the signed tetrahedron-sum volume. Exact for closed
// meshes; flagged as approximate otherwise.
VolumeResult volume(const TriangleMesh& mesh);

// Graph-geodesic diameter: Dijkstra over the edge graph with Euclidean
// edge lengths, iterated farthest-point sweeps (at least two). Throws
// StructuralError on a disconnected mesh.
double geodesic_diameter(const TriangleMesh& mesh);

// FNV-1a over vertex coordinates and face indices; cache key for derived
// per-mesh artifacts.
std::uint64_t content_hash(const TriangleMesh& mesh);

// Axis-aligned bounding box diagonal length.
double bbox_diagonal(const TriangleMesh& mesh);

}  // namespace sw
