#include "sw/primitives.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <utility>

namespace sw {

TriangleMesh make_icosphere(int subdivisions, double radius) {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    TriangleMesh mesh;
    auto add = [&mesh](double x, double y, double z) {
        Eigen::Vector3d v(x, y, z);
        mesh.vertices.push_back(v.normalized());
    };
    add(-1, phi, 0); add(1, phi, 0); add(-1, -phi, 0); add(1, -phi, 0);
    add(0, -1, phi); add(0, 1, phi); add(0, -1, -phi); add(0, 1, -phi);
    add(phi, 0, -1); add(phi, 0, 1); add(-phi, 0, -1); add(-phi, 0, 1);
    mesh.faces = {{0, 11, 5},  {0, 5, 1},   {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                  {1, 5, 9},   {5, 11, 4},  {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                  {3, 9, 4},   {3, 4, 2},   {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                  {4, 9, 5},   {2, 4, 11},  {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

    for (int s = 0; s < subdivisions; ++s) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            Eigen::Vector3d m = (mesh.vertices[a] + mesh.vertices[b]).normalized();
            mesh.vertices.push_back(m);
            int idx = mesh.vertex_count() - 1;
            midpoint.emplace(key, idx);
            return idx;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(mesh.faces.size() * 4);
        for (const auto& f : mesh.faces) {
            int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        mesh.faces = std::move(next);
    }
    if (radius != 1.0) {
        for (auto& v : mesh.vertices) v *= radius;
    }
    return mesh;
}

}  // namespace sw
