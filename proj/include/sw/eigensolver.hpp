#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>

#include "sw/laplacian.hpp"

namespace sw {

// Truncated spectrum of the generalized problem C xi = lambda A xi.
// Eigenvalues ascend, eigenvectors are columns of `eigenvectors` and are
// A-orthonormal with the sign fixed so each column's largest-magnitude
// entry is positive.
struct EigenSystem {
    Eigen::VectorXd eigenvalues;   // cm^-2
    Eigen::MatrixXd eigenvectors;  // m x count
    Eigen::VectorXd mass;          // the A diagonal used

    int count() const { return static_cast<int>(eigenvalues.size()); }
    int dimension() const { return static_cast<int>(mass.size()); }
};

// Smallest `count` eigenpairs via shift-invert Lanczos (shift -1e-8, sparse
// LDLT factorization, full reorthogonalization). Residuals are verified
// against ||C xi - lambda A xi|| <= 1e-8 ||C||_inf per pair.
EigenSystem solve_eigs(const CotanLaplacian& lap, int count);

// Binary cache: magic "SWEIG1", little-endian uint64 dims, float64 arrays.
void save_eigensystem(const EigenSystem& eigs, std::ostream& out);
EigenSystem load_eigensystem(std::istream& in);
void save_eigensystem_file(const EigenSystem& eigs, const std::string& path);
EigenSystem load_eigensystem_file(const std::string& path);

}  // namespace sw
