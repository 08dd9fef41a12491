#include "sw/sgws.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>

#include "sw/errors.hpp"

namespace sw {

WaveletFilterBank design_filter_bank(double lambda_max, int resolution) {
    if (!(lambda_max > 0.0)) {
        throw ArgumentError("design_filter_bank: lambda_max must be positive");
    }
    if (resolution < 1) {
        throw ArgumentError("design_filter_bank: resolution must be at least 1");
    }
    WaveletFilterBank bank;
    bank.resolution = resolution;
    bank.lambda_max = lambda_max;
    bank.lambda_min = lambda_max / 20.0;
    bank.scaling_width = 0.6 * bank.lambda_min;
    bank.scaling_gain = std::exp(-1.0);  // h(0) = max_x g(x)

    const double t_min = 2.0 / lambda_max;
    const double t_max = 2.0 / bank.lambda_min;
    const double log_min = std::log(t_min);
    const double log_max = std::log(t_max);
    bank.level_scales.resize(resolution);
    for (int level = 1; level <= resolution; ++level) {
        auto& scales = bank.level_scales[level - 1];
        scales.resize(level);
        for (int k = 0; k < level; ++k) {
            double frac = level == 1 ? 0.0 : static_cast<double>(k) / (level - 1);
            scales[k] = std::exp(log_max + frac * (log_min - log_max));
        }
    }
    return bank;
}

double wavelet_coefficient(const EigenSystem& eigs, double t, int vertex) {
    if (vertex < 0 || vertex >= eigs.dimension()) {
        throw ArgumentError("wavelet_coefficient: vertex index out of range");
    }
    if (!(t > 0.0)) throw ArgumentError("wavelet_coefficient: scale must be positive");
    double sum = 0.0;
    for (int l = 0; l < eigs.count(); ++l) {
        double xi = eigs.eigenvectors(vertex, l);
        sum += WaveletFilterBank::wavelet_kernel(t * eigs.eigenvalues[l]) * xi * xi;
    }
    return sum;
}

double scaling_coefficient(const EigenSystem& eigs, const WaveletFilterBank& bank,
                           int vertex) {
    if (vertex < 0 || vertex >= eigs.dimension()) {
        throw ArgumentError("scaling_coefficient: vertex index out of range");
    }
    double sum = 0.0;
    for (int l = 0; l < eigs.count(); ++l) {
        double xi = eigs.eigenvectors(vertex, l);
        sum += bank.scaling_kernel(eigs.eigenvalues[l]) * xi * xi;
    }
    return sum;
}

Eigen::MatrixXd compute_signature(const EigenSystem& eigs, const WaveletFilterBank& bank) {
    const double lam_max = eigs.eigenvalues[eigs.count() - 1];
    if (std::abs(lam_max - bank.lambda_max) > 1e-6 * std::abs(bank.lambda_max)) {
        throw ArgumentError("compute_signature: filter bank was designed for a different "
                            "spectrum (lambda_max mismatch)");
    }

    const int p = bank.signature_rows();
    const int count = eigs.count();

    // Row r of K holds that row's kernel sampled on the spectrum; the
    // signature is then one dense product with the squared eigenvectors.
    Eigen::MatrixXd kernels(p, count);
    int row = 0;
    for (int level = 1; level <= bank.resolution; ++level) {
        for (double t : bank.level_scales[level - 1]) {
            for (int l = 0; l < count; ++l) {
                kernels(row, l) = WaveletFilterBank::wavelet_kernel(t * eigs.eigenvalues[l]);
            }
            ++row;
        }
        for (int l = 0; l < count; ++l) {
            kernels(row, l) = bank.scaling_kernel(eigs.eigenvalues[l]);
        }
        ++row;
    }

    Eigen::MatrixXd squared = eigs.eigenvectors.array().square().matrix();
    return kernels * squared.transpose();
}

namespace {

static_assert(std::endian::native == std::endian::little,
              "signature cache assumes a little-endian host");

constexpr char kSigMagic[6] = {'S', 'W', 'S', 'I', 'G', '1'};

}  // namespace

void save_signature(const Eigen::MatrixXd& sig, std::ostream& out) {
    out.write(kSigMagic, sizeof kSigMagic);
    std::uint64_t dims[2] = {static_cast<std::uint64_t>(sig.rows()),
                             static_cast<std::uint64_t>(sig.cols())};
    out.write(reinterpret_cast<const char*>(dims), sizeof dims);
    for (Eigen::Index r = 0; r < sig.rows(); ++r) {
        for (Eigen::Index c = 0; c < sig.cols(); ++c) {
            double v = sig(r, c);
            out.write(reinterpret_cast<const char*>(&v), sizeof v);
        }
    }
}

Eigen::MatrixXd load_signature(std::istream& in) {
    char magic[6];
    in.read(magic, sizeof magic);
    if (!in || !std::equal(magic, magic + 6, kSigMagic)) {
        throw ParseError("signature cache: bad magic");
    }
    std::uint64_t dims[2];
    in.read(reinterpret_cast<char*>(dims), sizeof dims);
    if (!in) throw ParseError("signature cache: truncated header");
    Eigen::MatrixXd sig(static_cast<Eigen::Index>(dims[0]), static_cast<Eigen::Index>(dims[1]));
    for (Eigen::Index r = 0; r < sig.rows(); ++r) {
        for (Eigen::Index c = 0; c < sig.cols(); ++c) {
            double v;
            in.read(reinterpret_cast<char*>(&v), sizeof v);
            if (!in) throw ParseError("signature cache: truncated payload");
            sig(r, c) = v;
        }
    }
    return sig;
}

void save_signature_file(const Eigen::MatrixXd& sig, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write signature cache: " + path);
    save_signature(sig, out);
}

Eigen::MatrixXd load_signature_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open signature cache: " + path);
    return load_signature(in);
}

}  // namespace sw
