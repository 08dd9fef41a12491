#include "sw/eigensolver.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "sw/errors.hpp"

namespace sw {

namespace {

constexpr double kShift = -1e-8;
constexpr double kResidualFactor = 1e-8;  // times ||C||_inf

double uniform_pm1(std::mt19937_64& rng) {
    // Explicit mapping keeps the stream identical across standard libraries.
    return 2.0 * ((rng() >> 11) * 0x1.0p-53) - 1.0;
}

double inf_norm(const Eigen::SparseMatrix<double>& c) {
    Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(c.rows());
    for (int k = 0; k < c.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(c, k); it; ++it) {
            row_sums[it.row()] += std::abs(it.value());
        }
    }
    return row_sums.maxCoeff();
}

}  // namespace

EigenSystem solve_eigs(const CotanLaplacian& lap, int count) {
    const int m = lap.size();
    if (count < 1 || count > m - 1) {
        throw ArgumentError("solve_eigs: count must be in [1, m-1], got " +
                            std::to_string(count) + " for m=" + std::to_string(m));
    }

    const Eigen::VectorXd& a = lap.mass;
    Eigen::SparseMatrix<double> shifted = lap.stiffness;
    {
        Eigen::SparseMatrix<double> a_diag(m, m);
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(m);
        for (int i = 0; i < m; ++i) trips.emplace_back(i, i, -kShift * a[i]);
        a_diag.setFromTriplets(trips.begin(), trips.end());
        shifted += a_diag;
    }

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(shifted);
    if (ldlt.info() != Eigen::Success) {
        throw NumericalError("solve_eigs: factorization of shifted stiffness failed");
    }

    const double res_tol = kResidualFactor * inf_norm(lap.stiffness);
    const int max_steps = std::min(m, 50 * count);

    auto a_dot = [&a](const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
        return u.dot(a.cwiseProduct(v));
    };

    Eigen::MatrixXd basis(m, max_steps);
    std::vector<double> alpha, beta;  // beta[j] couples v_j and v_{j+1}
    alpha.reserve(max_steps);
    beta.reserve(max_steps);

    std::mt19937_64 rng(0x53574549ull);
    auto fresh_vector = [&]() {
        Eigen::VectorXd v(m);
        for (int i = 0; i < m; ++i) v[i] = uniform_pm1(rng);
        return v;
    };

    // A-orthonormalize `w` against the first `j` basis columns (two passes).
    auto reorthogonalize = [&](Eigen::VectorXd& w, int j) {
        for (int pass = 0; pass < 2; ++pass) {
            Eigen::VectorXd coeffs =
                basis.leftCols(j).transpose() * a.cwiseProduct(w).matrix();
            w.noalias() -= basis.leftCols(j) * coeffs;
        }
    };

    {
        Eigen::VectorXd v0 = fresh_vector();
        v0 /= std::sqrt(a_dot(v0, v0));
        basis.col(0) = v0;
    }

    EigenSystem out;
    int j = 0;  // number of completed Lanczos vectors - 1
    double worst_residual = std::numeric_limits<double>::quiet_NaN();

    auto try_extract = [&](int steps) -> bool {
        // Ritz pairs of the tridiagonal operator projection.
        Eigen::MatrixXd trid = Eigen::MatrixXd::Zero(steps, steps);
        for (int i = 0; i < steps; ++i) {
            trid(i, i) = alpha[i];
            if (i + 1 < steps && beta[i] != 0.0) {
                trid(i, i + 1) = beta[i];
                trid(i + 1, i) = beta[i];
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(trid);
        if (es.info() != Eigen::Success) return false;
        const Eigen::VectorXd& theta = es.eigenvalues();  // ascending
        if (steps < count) return false;

        // Largest theta <-> smallest lambda of the pencil.
        std::vector<int> sel(count);
        std::iota(sel.begin(), sel.end(), steps - count);

        const bool exhausted = steps == m;
        if (!exhausted) {
            const double last_beta = beta.empty() ? 0.0 : beta.back();
            for (int idx : sel) {
                if (theta[idx] <= 0.0) return false;
                double est = std::abs(last_beta * es.eigenvectors()(steps - 1, idx));
                if (est > 1e-11 * theta[idx]) return false;
            }
        }

        Eigen::MatrixXd ritz_coeffs(steps, count);
        Eigen::VectorXd lambdas(count);
        for (int i = 0; i < count; ++i) {
            int idx = sel[count - 1 - i];  // ascending lambda
            ritz_coeffs.col(i) = es.eigenvectors().col(idx);
            lambdas[i] = kShift + 1.0 / theta[idx];
        }
        Eigen::MatrixXd vectors = basis.leftCols(steps) * ritz_coeffs;

        // Authoritative residual check on the original pencil.
        worst_residual = 0.0;
        for (int i = 0; i < count; ++i) {
            Eigen::VectorXd xi = vectors.col(i);
            double nrm = std::sqrt(a_dot(xi, xi));
            if (!(nrm > 0.0)) return false;
            xi /= nrm;
            vectors.col(i) = xi;
            Eigen::VectorXd res =
                lap.stiffness * xi - lambdas[i] * a.cwiseProduct(xi).matrix();
            worst_residual = std::max(worst_residual, res.norm());
        }
        if (worst_residual > res_tol) return false;

        const double lam_scale = std::max(std::abs(lambdas[count - 1]), 1e-300);
        for (int i = 0; i < count; ++i) {
            if (lambdas[i] < 0.0) {
                if (lambdas[i] < -1e-6 * lam_scale) {
                    throw NumericalError("solve_eigs: negative eigenvalue " +
                                         std::to_string(lambdas[i]));
                }
                lambdas[i] = 0.0;
            }
        }

        // Deterministic sign: largest-magnitude entry positive.
        for (int i = 0; i < count; ++i) {
            int arg = 0;
            vectors.col(i).cwiseAbs().maxCoeff(&arg);
            if (vectors(arg, i) < 0.0) vectors.col(i) = -vectors.col(i);
        }

        out.eigenvalues = lambdas;
        out.eigenvectors = vectors;
        out.mass = a;
        return true;
    };

    const int check_interval = std::max(10, count / 8);
    int next_check = count + std::min(count, std::max(4, count / 10));

    while (true) {
        // One Lanczos step: w = K^-1 (A v_j).
        Eigen::VectorXd w = ldlt.solve(a.cwiseProduct(basis.col(j)).matrix());
        double aj = a_dot(w, basis.col(j));
        alpha.push_back(aj);
        w -= aj * basis.col(j);
        if (j > 0 && beta[j - 1] != 0.0) w -= beta[j - 1] * basis.col(j - 1);
        reorthogonalize(w, j + 1);

        if (j + 1 == max_steps || j + 1 == m) {
            if (try_extract(j + 1)) return out;
            if (j + 1 == m) {
                // Full space built yet residuals still too large.
                throw NumericalError(
                    "solve_eigs: residual " + std::to_string(worst_residual) +
                    " above tolerance " + std::to_string(res_tol) +
                    " after exhausting the space");
            }
            throw NumericalError("solve_eigs: no convergence after " +
                                 std::to_string(max_steps) + " iterations (worst residual " +
                                 std::to_string(worst_residual) + ", tolerance " +
                                 std::to_string(res_tol) + ")");
        }

        double bj = std::sqrt(std::max(a_dot(w, w), 0.0));
        if (bj > 1e-13) {
            beta.push_back(bj);
            basis.col(j + 1) = w / bj;
        } else {
            // Invariant subspace found; deflate and continue in its complement.
            Eigen::VectorXd v = fresh_vector();
            reorthogonalize(v, j + 1);
            double nrm = std::sqrt(a_dot(v, v));
            if (nrm <= 1e-13) {
                if (try_extract(j + 1)) return out;
                throw NumericalError("solve_eigs: basis exhausted before convergence");
            }
            beta.push_back(0.0);
            basis.col(j + 1) = v / nrm;
        }
        ++j;

        if (j + 1 >= next_check) {
            if (try_extract(j + 1)) return out;
            next_check = j + 1 + check_interval;
        }
    }
}

namespace {

static_assert(std::endian::native == std::endian::little,
              "eigensystem cache assumes a little-endian host");

constexpr char kEigMagic[6] = {'S', 'W', 'E', 'I', 'G', '1'};

void write_u64(std::ostream& out, std::uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint64_t read_u64(std::istream& in) {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw ParseError("eigensystem cache: truncated header");
    return v;
}

void write_doubles(std::ostream& out, const double* p, std::size_t n) {
    out.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
}

void read_doubles(std::istream& in, double* p, std::size_t n) {
    in.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) throw ParseError("eigensystem cache: truncated payload");
}

}  // namespace

void save_eigensystem(const EigenSystem& eigs, std::ostream& out) {
    out.write(kEigMagic, sizeof kEigMagic);
    write_u64(out, static_cast<std::uint64_t>(eigs.dimension()));
    write_u64(out, static_cast<std::uint64_t>(eigs.count()));
    write_doubles(out, eigs.eigenvalues.data(), eigs.eigenvalues.size());
    write_doubles(out, eigs.eigenvectors.data(),
                  static_cast<std::size_t>(eigs.eigenvectors.size()));
    write_doubles(out, eigs.mass.data(), eigs.mass.size());
}

EigenSystem load_eigensystem(std::istream& in) {
    char magic[6];
    in.read(magic, sizeof magic);
    if (!in || !std::equal(magic, magic + 6, kEigMagic)) {
        throw ParseError("eigensystem cache: bad magic");
    }
    EigenSystem eigs;
    const auto m = static_cast<Eigen::Index>(read_u64(in));
    const auto count = static_cast<Eigen::Index>(read_u64(in));
    if (m <= 0 || count <= 0 || count > m) {
        throw ParseError("eigensystem cache: implausible dimensions");
    }
    eigs.eigenvalues.resize(count);
    eigs.eigenvectors.resize(m, count);
    eigs.mass.resize(m);
    read_doubles(in, eigs.eigenvalues.data(), count);
    read_doubles(in, eigs.eigenvectors.data(), static_cast<std::size_t>(m * count));
    read_doubles(in, eigs.mass.data(), m);
    return eigs;
}

void save_eigensystem_file(const EigenSystem& eigs, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write eigensystem cache: " + path);
    save_eigensystem(eigs, out);
}

EigenSystem load_eigensystem_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open eigensystem cache: " + path);
    return load_eigensystem(in);
}

}  // namespace sw
