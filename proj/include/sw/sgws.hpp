#pragma once

#include <Eigen/Core>
#include <cmath>
#include <iosfwd>
#include <string>
#include <vector>

#include "sw/eigensolver.hpp"

namespace sw {

// Multiresolution wavelet filter bank. Level L carries L band-pass scales,
// log-spaced and decreasing from t_max = 2/lambda_min to t_min =
// 2/lambda_max, plus one shared low-pass (scaling) kernel.
struct WaveletFilterBank {
    int resolution = 0;       // R
    double lambda_max = 0.0;
    double lambda_min = 0.0;  // design floor lambda_max / 20
    double scaling_width = 0.0;
    double scaling_gain = 0.0;
    std::vector<std::vector<double>> level_scales;  // level_scales[L-1].size() == L

    // Band-pass generating kernel g(x) = x e^-x and low-pass h(x).
    static double wavelet_kernel(double x) { return x * std::exp(-x); }
    double scaling_kernel(double x) const {
        double r = x / scaling_width;
        double r2 = r * r;
        return scaling_gain * std::exp(-(r2 * r2));
    }

    // Signature rows: sum over levels of (L + 1).
    int signature_rows() const { return resolution * (resolution + 3) / 2; }
};

WaveletFilterBank design_filter_bank(double lambda_max, int resolution);

// Per-vertex spectral sums over the truncated eigensystem:
//   wavelet:  sum_l g(t * lambda_l) xi_l(j)^2
//   scaling:  sum_l h(lambda_l) xi_l(j)^2
double wavelet_coefficient(const EigenSystem& eigs, double t, int vertex);
double scaling_coefficient(const EigenSystem& eigs, const WaveletFilterBank& bank, int vertex);

// p x m signature matrix; row layout per level L = 1..R is the L wavelet
// scales (coarse to fine) followed by the scaling row. The bank must have
// been designed from this eigensystem's largest eigenvalue.
Eigen::MatrixXd compute_signature(const EigenSystem& eigs, const WaveletFilterBank& bank);

// Binary cache, magic "SWSIG1", little-endian float64 row-major payload.
void save_signature(const Eigen::MatrixXd& sig, std::ostream& out);
Eigen::MatrixXd load_signature(std::istream& in);
void save_signature_file(const Eigen::MatrixXd& sig, const std::string& path);
Eigen::MatrixXd load_signature_file(const std::string& path);

}  // namespace sw
