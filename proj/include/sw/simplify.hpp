#pragma once

#include "sw/mesh.hpp"

namespace sw {

struct SimplifyResult {
    TriangleMesh mesh;
    // False when edge collapses ran out before the target was reached
    // (the mesh returned is the best achieved).
    bool reached_target = true;
};

// Quadric-error-metric edge collapse down to `target_vertices`. Collapses
// that flip face orientation, break the link condition, or move the new
// vertex outside the input bounding box are rejected.
SimplifyResult simplify(const TriangleMesh& mesh, int target_vertices);

}  // namespace sw
