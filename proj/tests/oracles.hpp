#pragma once

// Reference implementations used only by tests. Each one is written
// independently of the library code it checks.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <tuple>
#include <utility>
#include <vector>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Nonnegative LASSO 1/2||x - D a||^2 + lambda sum(a), a >= 0, by FISTA with
/// a fixed 1/L step.
inline Vector nonneg_lasso(const Matrix& d, const Vector& x, double lambda, int iterations = 20000) {
    const Matrix gram = d.transpose() * d;
    const Vector dtx = d.transpose() * x;
    const double lip = Eigen::SelfAdjointEigenSolver<Matrix>(gram, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
    const double step = 1.0 / lip;
    Vector a = Vector::Zero(d.cols()), y = a, prev = a;
    double t = 1.0;
    for (int k = 0; k < iterations; ++k) {
        const Vector grad = gram * y - dtx;
        a = (y - step * grad).array() - step * lambda;
        a = a.cwiseMax(0.0);
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        y = a + ((t - 1.0) / t_next) * (a - prev);
        prev = a;
        t = t_next;
    }
    return a;
}

inline double lasso_objective(const Matrix& d, const Vector& x, const Vector& a, double lambda) {
    return 0.5 * (x - d * a).squaredNorm() + lambda * a.cwiseAbs().sum();
}

/// Cyclic Jacobi rotations for a symmetric matrix. Eigenpairs sorted by
/// descending eigenvalue; eigenvectors are the columns of the second matrix.
inline std::pair<Vector, Matrix> jacobi_eigen(Matrix a, int sweeps = 100) {
    const Eigen::Index n = a.rows();
    Matrix v = Matrix::Identity(n, n);
    for (int s = 0; s < sweeps; ++s) {
        double off = 0.0;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-30) break;
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), sn = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - sn * akq;
                    a(k, q) = sn * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - sn * aqk;
                    a(q, k) = sn * apk + c * aqk;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - sn * vkq;
                    v(k, q) = sn * vkp + c * vkq;
                }
            }
        }
    }
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](auto i, auto j) { return a(i, i) > a(j, j); });
    Vector values(n);
    Matrix vectors(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        values[k] = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]);
        vectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
    }
    return {values, vectors};
}

/// Magnitude of an order-n analog Butterworth band-pass mapped through the
/// pre-warped bilinear transform, evaluated in closed form.
inline double butterworth_bandpass_magnitude(int order, double low_hz, double high_hz, double fs, double f_hz) {
    const auto warp = [fs](double f) { return std::tan(std::numbers::pi * f / fs); };
    const double wl = warp(low_hz), wh = warp(high_hz), w = warp(f_hz);
    if (w == 0.0) return 0.0;
    const double ratio = (w * w - wl * wh) / ((wh - wl) * w);
    return 1.0 / std::sqrt(1.0 + std::pow(ratio * ratio, order));
}

/// Direct-form difference equation for a cascade of (b, a) sections.
inline std::vector<double> filter_direct(const std::vector<std::array<double, 5>>& sos, std::vector<double> x) {
    for (const auto& s : sos) {
        std::vector<double> y(x.size());
        for (std::size_t n = 0; n < x.size(); ++n) {
            double acc = s[0] * x[n];
            if (n >= 1) acc += s[1] * x[n - 1] - s[3] * y[n - 1];
            if (n >= 2) acc += s[2] * x[n - 2] - s[4] * y[n - 2];
            y[n] = acc;
        }
        x = std::move(y);
    }
    return x;
}

/// D + eta * reduce((x - D a) a^T), entry by entry, columns renormalized.
inline Matrix dictionary_step(const Matrix& d, const std::vector<std::pair<Vector, Vector>>& batch, double eta,
                              bool mean) {
    Matrix out = d;
    const double scale = mean ? eta / static_cast<double>(batch.size()) : eta;
    for (const auto& [x, a] : batch) {
        Vector r = x;
        for (Eigen::Index i = 0; i < d.rows(); ++i)
            for (Eigen::Index j = 0; j < d.cols(); ++j) r[i] -= d(i, j) * a[j];
        for (Eigen::Index i = 0; i < d.rows(); ++i)
            for (Eigen::Index j = 0; j < d.cols(); ++j) out(i, j) += scale * r[i] * a[j];
    }
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
        double n = 0.0;
        for (Eigen::Index i = 0; i < out.rows(); ++i) n += out(i, j) * out(i, j);
        out.col(j) /= std::sqrt(n);
    }
    return out;
}

/// Greedy nearest-first one-to-one matching by exhaustive pair listing.
inline std::size_t count_matches(const std::vector<double>& a, const std::vector<double>& b, double tol_s) {
    std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            if (std::abs(a[i] - b[j]) <= tol_s) pairs.emplace_back(std::abs(a[i] - b[j]), i, j);
    std::sort(pairs.begin(), pairs.end());
    std::vector<char> used_a(a.size(), 0), used_b(b.size(), 0);
    std::size_t matched = 0;
    for (const auto& [dist, i, j] : pairs) {
        if (used_a[i] || used_b[j]) continue;
        used_a[i] = used_b[j] = 1;
        ++matched;
    }
    return matched;
}

inline double agreement(const std::vector<double>& a, const std::vector<double>& b, double tol_s) {
    const double m = static_cast<double>(count_matches(a, b, tol_s));
    const double denom = static_cast<double>(a.size() + b.size()) - m;
    return denom > 0 ? m / denom : 0.0;
}

/// Random matrix with unit-norm columns.
inline Matrix random_dictionary(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix d(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) d(i, j) = n(rng);
        d.col(j).normalize();
    }
    return d;
}

inline Vector random_unit(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = g(rng);
    return v.normalized();
}

}  // namespace oracle
