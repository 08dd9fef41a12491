#include "sw/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include <json.hpp>

#include "sw/errors.hpp"

namespace sw {

namespace {

double uniform01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

// Columns sorted lexicographically; makes the clustering a function of the
// descriptor set rather than the mesh/manifest order.
Eigen::MatrixXd sorted_columns(const Eigen::MatrixXd& descriptors) {
    const int n = static_cast<int>(descriptors.cols());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        for (int r = 0; r < descriptors.rows(); ++r) {
            if (descriptors(r, a) != descriptors(r, b)) {
                return descriptors(r, a) < descriptors(r, b);
            }
        }
        return false;
    });
    Eigen::MatrixXd out(descriptors.rows(), n);
    for (int i = 0; i < n; ++i) out.col(i) = descriptors.col(order[i]);
    return out;
}

int count_distinct_sorted(const Eigen::MatrixXd& pts) {
    int distinct = pts.cols() > 0 ? 1 : 0;
    for (int i = 1; i < pts.cols(); ++i) {
        if (pts.col(i) != pts.col(i - 1)) ++distinct;
    }
    return distinct;
}

}  // namespace

Dictionary learn_dictionary(const Eigen::MatrixXd& descriptors, int k, std::uint64_t seed) {
    const int p = static_cast<int>(descriptors.rows());
    const int n = static_cast<int>(descriptors.cols());
    if (k <= p) {
        throw ArgumentError("learn_dictionary: need k > descriptor dimension (k=" +
                            std::to_string(k) + ", p=" + std::to_string(p) + ")");
    }
    if (!descriptors.allFinite()) {
        throw ArgumentError("learn_dictionary: descriptors contain non-finite values");
    }
    Eigen::MatrixXd pts = sorted_columns(descriptors);
    if (count_distinct_sorted(pts) < k) {
        throw ArgumentError("learn_dictionary: fewer than k distinct descriptors");
    }

    std::mt19937_64 rng(seed);
    Eigen::MatrixXd centers(k, p);

    // k-means++ seeding.
    {
        int first = static_cast<int>(uniform01(rng) * n);
        first = std::min(first, n - 1);
        centers.row(0) = pts.col(first).transpose();
        Eigen::VectorXd d2(n);
        for (int i = 0; i < n; ++i) {
            d2[i] = (pts.col(i).transpose() - centers.row(0)).squaredNorm();
        }
        for (int c = 1; c < k; ++c) {
            double total = d2.sum();
            int pick;
            if (total <= 0.0) {
                // All remaining mass on existing centers; take the first
                // point not yet chosen as a center.
                pick = 0;
                for (int i = 0; i < n; ++i) {
                    bool dup = false;
                    for (int cc = 0; cc < c; ++cc) {
                        if ((pts.col(i).transpose() - centers.row(cc)).squaredNorm() == 0.0) {
                            dup = true;
                            break;
                        }
                    }
                    if (!dup) {
                        pick = i;
                        break;
                    }
                }
            } else {
                double target = uniform01(rng) * total;
                double acc = 0.0;
                pick = n - 1;
                for (int i = 0; i < n; ++i) {
                    acc += d2[i];
                    if (acc >= target) {
                        pick = i;
                        break;
                    }
                }
            }
            centers.row(c) = pts.col(pick).transpose();
            for (int i = 0; i < n; ++i) {
                double nd = (pts.col(i).transpose() - centers.row(c)).squaredNorm();
                d2[i] = std::min(d2[i], nd);
            }
        }
    }

    // Lloyd iterations.
    std::vector<int> assign(n, -1);
    Eigen::VectorXd best_d2(n);
    for (int iter = 0; iter < 300; ++iter) {
        for (int i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            int arg = 0;
            for (int c = 0; c < k; ++c) {
                double d = (pts.col(i).transpose() - centers.row(c)).squaredNorm();
                if (d < best) {
                    best = d;
                    arg = c;
                }
            }
            assign[i] = arg;
            best_d2[i] = best;
        }

        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, p);
        Eigen::VectorXi counts = Eigen::VectorXi::Zero(k);
        for (int i = 0; i < n; ++i) {
            sums.row(assign[i]) += pts.col(i).transpose();
            ++counts[assign[i]];
        }
        double moved = 0.0;
        for (int c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                // Re-seed an empty cluster at the point farthest from its center.
                int far = 0;
                best_d2.maxCoeff(&far);
                sums.row(c) = pts.col(far).transpose();
                counts[c] = 1;
                best_d2[far] = 0.0;
            }
            Eigen::RowVectorXd nc = sums.row(c) / counts[c];
            moved = std::max(moved, (nc - centers.row(c)).norm());
            centers.row(c) = nc;
        }
        if (moved < 1e-6) break;
    }

    double mean_nearest = 0.0;
    for (int i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
            best = std::min(best, (pts.col(i).transpose() - centers.row(c)).norm());
        }
        mean_nearest += best;
    }
    mean_nearest /= n;

    Dictionary dict;
    dict.centers = centers;
    // Zero happens when every training point sits on a center; keep sigma
    // positive, assignment then degenerates to hard nearest-center.
    dict.sigma = mean_nearest > 0.0 ? mean_nearest : std::numeric_limits<double>::min();
    return dict;
}

Eigen::MatrixXd soft_assign(const Eigen::MatrixXd& signature, const Dictionary& dict) {
    if (signature.rows() != dict.descriptor_dim()) {
        throw ArgumentError("soft_assign: descriptor dimension mismatch (signature p=" +
                            std::to_string(signature.rows()) + ", dictionary p=" +
                            std::to_string(dict.descriptor_dim()) + ")");
    }
    const int k = dict.word_count();
    const int m = static_cast<int>(signature.cols());
    const double inv_two_sigma2 = 1.0 / (2.0 * dict.sigma * dict.sigma);

    Eigen::MatrixXd codes(k, m);
    Eigen::VectorXd expo(k);
    for (int i = 0; i < m; ++i) {
        for (int c = 0; c < k; ++c) {
            double d2 = (signature.col(i).transpose() - dict.centers.row(c)).squaredNorm();
            expo[c] = -d2 * inv_two_sigma2;
        }
        // Shift by the max exponent: identical to the plain normalized kernel
        // when nothing underflows, hard nearest-center assignment when
        // everything else does.
        int nearest = 0;
        double emax = expo.maxCoeff(&nearest);
        double total = 0.0;
        for (int c = 0; c < k; ++c) {
            double e = std::isfinite(emax) ? std::exp(expo[c] - emax) : (c == nearest ? 1.0 : 0.0);
            codes(c, i) = e;
            total += e;
        }
        codes.col(i) /= total;
    }
    return codes;
}

Eigen::VectorXd pool(const Eigen::MatrixXd& codes) { return codes.rowwise().sum(); }

Eigen::VectorXd assemble_features(const Eigen::VectorXd& histogram, double geodesic_diameter,
                                  double volume, double carcass_weight) {
    auto check = [](double v, const char* name) {
        if (!std::isfinite(v) || v <= 0.0) {
            throw ArgumentError(std::string("assemble_features: ") + name +
                                " must be finite and positive");
        }
    };
    check(geodesic_diameter, "geodesic_diameter");
    check(volume, "volume");
    check(carcass_weight, "carcass_weight");
    if (!histogram.allFinite()) {
        throw ArgumentError("assemble_features: histogram has non-finite entries");
    }
    Eigen::VectorXd out(histogram.size() + 3);
    out.head(histogram.size()) = histogram;
    out[histogram.size()] = geodesic_diameter;
    out[histogram.size() + 1] = volume;
    out[histogram.size() + 2] = carcass_weight;
    return out;
}

std::string Dictionary::to_json() const {
    nlohmann::json j;
    j["version"] = 1;
    j["k"] = word_count();
    j["p"] = descriptor_dim();
    j["sigma"] = sigma;
    std::vector<double> flat;
    flat.reserve(static_cast<size_t>(centers.size()));
    for (int r = 0; r < centers.rows(); ++r) {
        for (int c = 0; c < centers.cols(); ++c) flat.push_back(centers(r, c));
    }
    j["centers"] = flat;
    return j.dump();
}

Dictionary Dictionary::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("dictionary JSON: ") + e.what());
    }
    if (!j.contains("version") || j["version"].get<int>() != 1) {
        throw ParseError("dictionary JSON: unsupported version");
    }
    Dictionary dict;
    const int k = j.at("k").get<int>();
    const int p = j.at("p").get<int>();
    dict.sigma = j.at("sigma").get<double>();
    auto flat = j.at("centers").get<std::vector<double>>();
    if (static_cast<int>(flat.size()) != k * p || k <= 0 || p <= 0 || !(dict.sigma > 0.0)) {
        throw ParseError("dictionary JSON: inconsistent payload");
    }
    dict.centers.resize(k, p);
    for (int r = 0; r < k; ++r) {
        for (int c = 0; c < p; ++c) dict.centers(r, c) = flat[static_cast<size_t>(r) * p + c];
    }
    return dict;
}

}  // namespace sw
