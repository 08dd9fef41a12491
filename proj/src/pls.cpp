#include "sw/pls.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>

#include <json.hpp>

#include "sw/errors.hpp"

namespace sw {

namespace {

Eigen::VectorXd column_std(const Eigen::MatrixXd& x, const Eigen::VectorXd& mean) {
    const double n = static_cast<double>(x.rows());
    Eigen::VectorXd out(x.cols());
    for (int j = 0; j < x.cols(); ++j) {
        out[j] = std::sqrt((x.col(j).array() - mean[j]).square().sum() / (n - 1.0));
    }
    return out;
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
    return {v.data(), v.data() + v.size()};
}

Eigen::VectorXd from_std(const std::vector<double>& v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
    return out;
}

}  // namespace

PLSModel fit_pls(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int n_components) {
    const int n = static_cast<int>(x.rows());
    const int d = static_cast<int>(x.cols());
    if (y.size() != n) throw ArgumentError("fit_pls: X and y row counts differ");
    if (n < 3) throw ArgumentError("fit_pls: need at least 3 samples");
    if (n_components < 1 || n_components > std::min(d, n - 1)) {
        throw ArgumentError("fit_pls: n_components must be in [1, min(d, n-1)], got " +
                            std::to_string(n_components));
    }
    if (!x.allFinite() || !y.allFinite()) {
        throw ArgumentError("fit_pls: non-finite values in training data");
    }

    PLSModel model;
    model.n_components = n_components;
    model.x_mean = x.colwise().mean();
    model.x_scale = column_std(x, model.x_mean);
    for (int j = 0; j < d; ++j) {
        if (model.x_scale[j] == 0.0) model.x_scale[j] = 1.0;  // constant column
    }
    model.y_mean = y.mean();
    const double y_sd =
        std::sqrt((y.array() - model.y_mean).square().sum() / (n - 1.0));
    if (y_sd == 0.0) throw ArgumentError("fit_pls: target has zero variance");
    model.y_scale = y_sd;

    Eigen::MatrixXd xs =
        (x.rowwise() - model.x_mean.transpose()).array().rowwise() /
        model.x_scale.transpose().array();
    Eigen::VectorXd ys = (y.array() - model.y_mean) / model.y_scale;

    const int c = n_components;
    model.weights = Eigen::MatrixXd::Zero(d, c);
    model.loadings = Eigen::MatrixXd::Zero(d, c);
    model.y_loadings = Eigen::VectorXd::Zero(c);

    const double w_floor = 1e-14 * (xs.transpose() * ys).norm() + 1e-300;
    int built = 0;
    for (int h = 0; h < c; ++h) {
        Eigen::VectorXd w = xs.transpose() * ys;
        double wn = w.norm();
        if (wn <= w_floor) break;  // response residual exhausted
        w /= wn;
        Eigen::VectorXd t = xs * w;
        double tt = t.squaredNorm();
        if (tt <= 0.0) break;
        Eigen::VectorXd p = (xs.transpose() * t) / tt;
        double q = ys.dot(t) / tt;
        model.weights.col(h) = w;
        model.loadings.col(h) = p;
        model.y_loadings[h] = q;
        xs.noalias() -= t * p.transpose();
        ys.noalias() -= q * t;
        ++built;
    }

    // B = W (P^T W)^-1 q over the components actually built.
    model.coefficients = Eigen::VectorXd::Zero(d);
    if (built > 0) {
        Eigen::MatrixXd wl = model.weights.leftCols(built);
        Eigen::MatrixXd pl = model.loadings.leftCols(built);
        Eigen::VectorXd ql = model.y_loadings.head(built);
        Eigen::MatrixXd pw = pl.transpose() * wl;
        model.coefficients = wl * pw.partialPivLu().solve(ql);
    }
    return model;
}

double predict(const PLSModel& model, const Eigen::VectorXd& x) {
    if (x.size() != model.dimension()) {
        throw ArgumentError("predict: feature dimension mismatch (expected " +
                            std::to_string(model.dimension()) + ", got " +
                            std::to_string(x.size()) + ")");
    }
    Eigen::VectorXd xs = (x - model.x_mean).cwiseQuotient(model.x_scale);
    return model.y_mean + model.y_scale * xs.dot(model.coefficients);
}

Eigen::VectorXd predict(const PLSModel& model, const Eigen::MatrixXd& x) {
    Eigen::VectorXd out(x.rows());
    for (int i = 0; i < x.rows(); ++i) out[i] = predict(model, x.row(i).transpose());
    return out;
}

double predict_via_scores(const PLSModel& model, const Eigen::VectorXd& x) {
    if (x.size() != model.dimension()) {
        throw ArgumentError("predict_via_scores: feature dimension mismatch");
    }
    int built = model.n_components;
    while (built > 0 && model.weights.col(built - 1).isZero(0.0)) --built;
    if (built == 0) return model.y_mean;
    Eigen::VectorXd xs = (x - model.x_mean).cwiseQuotient(model.x_scale);
    Eigen::MatrixXd wl = model.weights.leftCols(built);
    Eigen::MatrixXd pl = model.loadings.leftCols(built);
    Eigen::MatrixXd rotation =
        wl * (pl.transpose() * wl).partialPivLu().solve(Eigen::MatrixXd::Identity(built, built));
    Eigen::VectorXd scores = rotation.transpose() * xs;
    return model.y_mean + model.y_scale * scores.dot(model.y_loadings.head(built));
}

EvalReport metrics(const Eigen::VectorXd& y, const Eigen::VectorXd& y_hat) {
    if (y.size() != y_hat.size()) throw ArgumentError("metrics: length mismatch");
    const int n = static_cast<int>(y.size());
    if (n < 2) throw ArgumentError("metrics: need at least 2 samples");
    const double mean = y.mean();
    const double ss_tot = (y.array() - mean).square().sum();
    if (ss_tot == 0.0) {
        throw NumericalError("metrics: R^2 undefined for zero-variance targets");
    }
    if (mean == 0.0) {
        throw NumericalError("metrics: CVe undefined for zero-mean targets");
    }
    const double ss_res = (y - y_hat).squaredNorm();
    EvalReport rep;
    rep.r2 = 1.0 - ss_res / ss_tot;
    rep.rmse = std::sqrt(ss_res / n);
    rep.cve_percent = 100.0 * rep.rmse / mean;
    rep.folds.reserve(n);
    for (int i = 0; i < n; ++i) rep.folds.emplace_back(y[i], y_hat[i]);
    return rep;
}

EvalReport loocv(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int n_components) {
    const int n = static_cast<int>(x.rows());
    if (n < 4) throw ArgumentError("loocv: need at least 4 samples");
    Eigen::VectorXd y_hat(n);
    Eigen::MatrixXd x_train(n - 1, x.cols());
    Eigen::VectorXd y_train(n - 1);
    for (int i = 0; i < n; ++i) {
        int r = 0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            x_train.row(r) = x.row(j);
            y_train[r] = y[j];
            ++r;
        }
        try {
            PLSModel model = fit_pls(x_train, y_train, n_components);
            y_hat[i] = predict(model, x.row(i).transpose());
        } catch (const ArgumentError& e) {
            throw ArgumentError("loocv fold " + std::to_string(i) + ": " + e.what());
        } catch (const NumericalError& e) {
            throw NumericalError("loocv fold " + std::to_string(i) + ": " + e.what());
        }
    }
    return metrics(y, y_hat);
}

std::string PLSModel::to_json() const {
    nlohmann::json j;
    j["version"] = 1;
    j["n_components"] = n_components;
    j["d"] = dimension();
    j["x_mean"] = to_std(x_mean);
    j["x_scale"] = to_std(x_scale);
    j["y_mean"] = y_mean;
    j["y_scale"] = y_scale;
    std::vector<double> w_flat, p_flat;
    for (int r = 0; r < weights.rows(); ++r) {
        for (int c = 0; c < weights.cols(); ++c) {
            w_flat.push_back(weights(r, c));
            p_flat.push_back(loadings(r, c));
        }
    }
    j["weights"] = w_flat;
    j["loadings"] = p_flat;
    j["y_loadings"] = to_std(y_loadings);
    j["coefficients"] = to_std(coefficients);
    return j.dump();
}

PLSModel PLSModel::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("PLS model JSON: ") + e.what());
    }
    if (!j.contains("version") || j["version"].get<int>() != 1) {
        throw ParseError("PLS model JSON: unsupported version");
    }
    PLSModel m;
    m.n_components = j.at("n_components").get<int>();
    const int d = j.at("d").get<int>();
    m.x_mean = from_std(j.at("x_mean").get<std::vector<double>>());
    m.x_scale = from_std(j.at("x_scale").get<std::vector<double>>());
    m.y_mean = j.at("y_mean").get<double>();
    m.y_scale = j.at("y_scale").get<double>();
    auto w_flat = j.at("weights").get<std::vector<double>>();
    auto p_flat = j.at("loadings").get<std::vector<double>>();
    m.y_loadings = from_std(j.at("y_loadings").get<std::vector<double>>());
    m.coefficients = from_std(j.at("coefficients").get<std::vector<double>>());
    const int c = m.n_components;
    if (m.x_mean.size() != d || m.x_scale.size() != d || m.coefficients.size() != d ||
        m.y_loadings.size() != c || static_cast<int>(w_flat.size()) != d * c ||
        static_cast<int>(p_flat.size()) != d * c || c < 1 || d < 1) {
        throw ParseError("PLS model JSON: inconsistent payload");
    }
    m.weights.resize(d, c);
    m.loadings.resize(d, c);
    for (int r = 0; r < d; ++r) {
        for (int col = 0; col < c; ++col) {
            m.weights(r, col) = w_flat[static_cast<size_t>(r) * c + col];
            m.loadings(r, col) = p_flat[static_cast<size_t>(r) * c + col];
        }
    }
    return m;
}

std::string EvalReport::to_json() const {
    nlohmann::json j;
    j["r2"] = r2;
    j["rmse"] = rmse;
    j["cve_percent"] = cve_percent;
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& [yy, yh] : folds) pairs.push_back({yy, yh});
    j["folds"] = pairs;
    return j.dump();
}

std::string report_table_header() {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-28s %9s %8s %8s %8s %7s %8s %8s", "Target", "Mean",
                  "S.D.", "Min", "Max", "R2", "RMSE", "CVe(%)");
    return buf;
}

std::string format_report_row(const std::string& label, const EvalReport& report) {
    const int n = static_cast<int>(report.folds.size());
    double mean = 0.0, mn = 0.0, mx = 0.0, sd = 0.0;
    if (n > 0) {
        mn = mx = report.folds[0].first;
        for (const auto& [y, yh] : report.folds) {
            mean += y;
            mn = std::min(mn, y);
            mx = std::max(mx, y);
        }
        mean /= n;
        for (const auto& [y, yh] : report.folds) sd += (y - mean) * (y - mean);
        sd = n > 1 ? std::sqrt(sd / (n - 1)) : 0.0;
    }
    char buf[200];
    std::snprintf(buf, sizeof buf, "%-28s %9.3f %8.3f %8.3f %8.3f %7.2f %8.3f %8.2f",
                  label.c_str(), mean, sd, mn, mx, report.r2, report.rmse,
                  report.cve_percent);
    return buf;
}

}  // namespace sw
