#pragma once

#include "sw/mesh.hpp"

namespace sw {

// Unit icosphere: icosahedron subdivided `subdivisions` times with vertices
// re-projected to the sphere. 0 -> 12 vertices, 3 -> 642, 5 -> 10242.
TriangleMesh make_icosphere(int subdivisions, double radius = 1.0);

}  // namespace sw
