#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace sw {

// Single-response partial least squares fitted by NIPALS on standardized
// data. B is the collapsed coefficient vector; predictions through B and
// through the latent scores agree to rounding.
struct PLSModel {
    int n_components = 0;
    Eigen::VectorXd x_mean, x_scale;  // length d
    double y_mean = 0.0, y_scale = 1.0;
    Eigen::MatrixXd weights;     // W, d x c
    Eigen::MatrixXd loadings;    // P, d x c
    Eigen::VectorXd y_loadings;  // q, length c
    Eigen::VectorXd coefficients;  // B, length d

    int dimension() const { return static_cast<int>(x_mean.size()); }

    std::string to_json() const;
    static PLSModel from_json(const std::string& text);
};

struct EvalReport {
    double r2 = 0.0;
    double rmse = 0.0;         // kg
    double cve_percent = 0.0;  // 100 * rmse / mean(y)
    std::vector<std::pair<double, double>> folds;  // (y, y_hat) per held-out row

    std::string to_json() const;
};

PLSModel fit_pls(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int n_components);

double predict(const PLSModel& model, const Eigen::VectorXd& x);
Eigen::VectorXd predict(const PLSModel& model, const Eigen::MatrixXd& x);

// Same prediction routed through the latent scores instead of B; exists so
// the two algebraic routes can be cross-checked.
double predict_via_scores(const PLSModel& model, const Eigen::VectorXd& x);

EvalReport metrics(const Eigen::VectorXd& y, const Eigen::VectorXd& y_hat);

// Leave-one-out cross-validation; refits on each length-(n-1) subset.
EvalReport loocv(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int n_components);

// One aligned text row in the layout Mean / S.D. / Min / Max / R2 / RMSE /
// CVe(%), with the descriptive statistics taken from the held-out targets.
std::string format_report_row(const std::string& label, const EvalReport& report);
std::string report_table_header();

}  // namespace sw
