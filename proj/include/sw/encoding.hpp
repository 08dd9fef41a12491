#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>

namespace sw {

// Geometric-word dictionary: k centers in descriptor space plus the
// Gaussian soft-assignment bandwidth.
struct Dictionary {
    Eigen::MatrixXd centers;  // k x p, row per word
    double sigma = 0.0;

    int word_count() const { return static_cast<int>(centers.rows()); }
    int descriptor_dim() const { return static_cast<int>(centers.cols()); }

    std::string to_json() const;
    static Dictionary from_json(const std::string& text);
};

// k-means (k-means++ init from `seed`, Lloyd until center movement < 1e-6
// or 300 iterations) over the columns of a p x N descriptor matrix.
// Columns are canonically sorted first, so the result depends on the
// descriptor set, not its order. sigma is the mean distance from each
// training column to its nearest center.
Dictionary learn_dictionary(const Eigen::MatrixXd& descriptors, int k, std::uint64_t seed);

// Gaussian-kernel soft assignment of each signature column over all words,
// normalized per column; underflow collapses to hard nearest-center
// assignment.
Eigen::MatrixXd soft_assign(const Eigen::MatrixXd& signature, const Dictionary& dict);

// Sum-pool code columns into the k-histogram; total mass equals the
// number of columns.
Eigen::VectorXd pool(const Eigen::MatrixXd& codes);

// Flattened global feature: [histogram..., diameter, volume, carcass_weight].
Eigen::VectorXd assemble_features(const Eigen::VectorXd& histogram, double geodesic_diameter,
                                  double volume, double carcass_weight);

}  // namespace sw
