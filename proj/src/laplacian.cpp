#include "sw/laplacian.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "sw/errors.hpp"

namespace sw {

CotanLaplacian build_laplacian(const TriangleMesh& mesh) {
    const int m = mesh.vertex_count();
    CotanLaplacian lap;
    lap.mass = Eigen::VectorXd::Zero(m);

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(mesh.faces.size() * 12);

    for (size_t fi = 0; fi < mesh.faces.size(); ++fi) {
        const auto& f = mesh.faces[fi];
        const Eigen::Vector3d& p0 = mesh.vertices[f[0]];
        const Eigen::Vector3d& p1 = mesh.vertices[f[1]];
        const Eigen::Vector3d& p2 = mesh.vertices[f[2]];

        const double double_area = (p1 - p0).cross(p2 - p0).norm();
        if (!(double_area > 0.0) || !std::isfinite(double_area)) {
            throw NumericalError("degenerate face " + std::to_string(fi) +
                                 " in Laplacian assembly");
        }

        // cot of the angle at corner k = dot of the adjacent edges / 2*area
        double cot[3];
        bool obtuse[3];
        for (int k = 0; k < 3; ++k) {
            const Eigen::Vector3d& a = mesh.vertices[f[k]];
            const Eigen::Vector3d& b = mesh.vertices[f[(k + 1) % 3]];
            const Eigen::Vector3d& c = mesh.vertices[f[(k + 2) % 3]];
            double d = (b - a).dot(c - a);
            cot[k] = d / double_area;
            obtuse[k] = d < 0.0;
            if (!std::isfinite(cot[k])) {
                throw NumericalError("cotangent overflow on face " + std::to_string(fi));
            }
        }

        // Stiffness: edge opposite corner k gets cot[k]/2.
        for (int k = 0; k < 3; ++k) {
            int i = f[(k + 1) % 3], j = f[(k + 2) % 3];
            double w = 0.5 * cot[k];
            trips.emplace_back(i, j, -w);
            trips.emplace_back(j, i, -w);
            trips.emplace_back(i, i, w);
            trips.emplace_back(j, j, w);
        }

        // Mixed Voronoi areas (Meyer et al.).
        const double area = 0.5 * double_area;
        bool any_obtuse = obtuse[0] || obtuse[1] || obtuse[2];
        if (!any_obtuse) {
            for (int k = 0; k < 3; ++k) {
                int i = f[k];
                double e_ij = (mesh.vertices[f[(k + 1) % 3]] - mesh.vertices[i]).squaredNorm();
                double e_ik = (mesh.vertices[f[(k + 2) % 3]] - mesh.vertices[i]).squaredNorm();
                // Opposite-edge cotangents: edge (i, k+1) is opposite corner k+2.
                lap.mass[i] += (e_ij * cot[(k + 2) % 3] + e_ik * cot[(k + 1) % 3]) / 8.0;
            }
        } else {
            for (int k = 0; k < 3; ++k) {
                lap.mass[f[k]] += obtuse[k] ? area / 2.0 : area / 4.0;
            }
        }
    }

    for (int i = 0; i < m; ++i) {
        if (!(lap.mass[i] > 0.0)) {
            throw NumericalError("nonpositive mixed area at vertex " + std::to_string(i));
        }
    }

    lap.stiffness.resize(m, m);
    lap.stiffness.setFromTriplets(trips.begin(), trips.end());
    lap.stiffness.makeCompressed();
    return lap;
}

}  // namespace sw
