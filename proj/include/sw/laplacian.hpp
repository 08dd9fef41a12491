#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "sw/mesh.hpp"

namespace sw {

// Discrete Laplace-Beltrami operator pieces for the generalized
// eigenproblem C xi = lambda A xi.
struct CotanLaplacian {
    Eigen::SparseMatrix<double> stiffness;  // C = D - W, symmetric PSD
    Eigen::VectorXd mass;                   // diagonal of A, mixed Voronoi areas (cm^2)

    int size() const { return static_cast<int>(mass.size()); }
};

// Cotangent weights w_ij = (cot alpha + cot beta)/2 (one term on boundary
// edges) with Meyer mixed-area lumped mass: obtuse triangles contribute
// area/2 at the obtuse corner and area/4 at the others, non-obtuse
// triangles their circumcentric Voronoi pieces.
CotanLaplacian build_laplacian(const TriangleMesh& mesh);

}  // namespace sw
