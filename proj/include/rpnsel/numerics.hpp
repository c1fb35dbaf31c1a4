// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 rpnsel contributors
//
// Complex-matrix capacity kernels: log-det objective evaluation and
// water-filling power allocation for zero-forcing rate reporting.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace rpnsel {

using ComplexMatrix = Eigen::MatrixXcd;

// Per-user fractions of the total transmit power. Diagonal of the power
// distribution matrix; entries are non-negative and sum to one.
struct PowerAllocation {
    std::vector<double> weights;

    PowerAllocation() = default;
    explicit PowerAllocation(std::vector<double> w) : weights(std::move(w)) { check(); }

    static PowerAllocation uniform(int n_users) {
        if (n_users < 1) throw std::invalid_argument("PowerAllocation: n_users must be >= 1");
        return PowerAllocation(std::vector<double>(n_users, 1.0 / n_users));
    }

    int size() const { return static_cast<int>(weights.size()); }

    void check() const {
        if (weights.empty()) throw std::invalid_argument("PowerAllocation: empty weight vector");
        double sum = 0.0;
        for (double w : weights) {
            if (!(w >= 0.0)) throw std::invalid_argument("PowerAllocation: negative or NaN weight");
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw std::invalid_argument("PowerAllocation: weights sum to " + std::to_string(sum) +
                                        ", expected 1");
    }
};

// Linear-scale SNR plus the two counts entering the power scaling N_R/N_TS.
struct SnrConfig {
    double rho = 1.0;   // linear, not dB
    int n_selected = 1; // N_TS
    int n_users = 1;    // N_R

    SnrConfig() = default;
    SnrConfig(double rho_linear, int selected, int users)
        : rho(rho_linear), n_selected(selected), n_users(users) {
        if (!(rho > 0.0)) throw std::invalid_argument("SnrConfig: rho must be > 0 (linear scale)");
        if (n_selected < 1) throw std::invalid_argument("SnrConfig: n_selected must be >= 1");
        if (n_users < 1) throw std::invalid_argument("SnrConfig: n_users must be >= 1");
    }

    static double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

    // rho * N_R / N_TS, the per-evaluation power scale.
    double power_scale() const { return rho * static_cast<double>(n_users) / n_selected; }

    SnrConfig with_selected(int selected) const { return SnrConfig(rho, selected, n_users); }
};

namespace detail {

inline void require_hermitian(const ComplexMatrix& m, double tol) {
    if (m.rows() != m.cols())
        throw std::invalid_argument("logdet_hermitian_psd: matrix is not square");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = j; i < m.rows(); ++i) {
            const std::complex<double> d = m(i, j) - std::conj(m(j, i));
            if (std::abs(d) > tol * scale)
                throw std::invalid_argument("logdet_hermitian_psd: matrix is not Hermitian at (" +
                                            std::to_string(i) + "," + std::to_string(j) + ")");
        }
    }
}

}  // namespace detail

// log2 det of a Hermitian positive-definite matrix via an in-place complex
// Cholesky factorisation, accumulating the determinant in log space.
// Callers pass I + X with X PSD, so the input is positive definite.
inline double logdet_hermitian_psd(const ComplexMatrix& m) {
    detail::require_hermitian(m, 1e-10);
    const Eigen::Index n = m.rows();
    ComplexMatrix l = m;
    double log_acc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        const double d = l(j, j).real() - l.row(j).head(j).squaredNorm();
        if (!(d > 0.0))
            throw std::domain_error("logdet_hermitian_psd: non-positive pivot " +
                                    std::to_string(d) + " at index " + std::to_string(j));
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        log_acc += std::log(d);
        const Eigen::Index rest = n - j - 1;
        if (rest > 0) {
            l.col(j).tail(rest).noalias() -=
                l.bottomLeftCorner(rest, j) * l.row(j).head(j).adjoint();
            l.col(j).tail(rest) /= ljj;
        }
    }
    return log_acc / std::numbers::ln2;
}

// Sum-capacity objective for a fixed selection and power allocation:
//   log2 det(I + rho * (N_R/N_TS) * H_c diag(P) H_c^H)
// with H_c of shape N_TS x N_R (rows = selected antennas, cols = users) and
// I of size N_TS x N_TS. Result in bits/s/Hz.
inline double sum_capacity(const ComplexMatrix& h_c, const PowerAllocation& p,
                           const SnrConfig& snr) {
    if (h_c.rows() != snr.n_selected)
        throw std::invalid_argument("sum_capacity: H_c row count " + std::to_string(h_c.rows()) +
                                    " != n_selected " + std::to_string(snr.n_selected));
    if (h_c.cols() != snr.n_users)
        throw std::invalid_argument("sum_capacity: H_c col count " + std::to_string(h_c.cols()) +
                                    " != n_users " + std::to_string(snr.n_users));
    if (p.size() != snr.n_users)
        throw std::invalid_argument("sum_capacity: power allocation size mismatch");

    const Eigen::Index s = h_c.rows();
    ComplexMatrix scaled = h_c;
    const double beta = snr.power_scale();
    for (Eigen::Index k = 0; k < scaled.cols(); ++k)
        scaled.col(k) *= std::sqrt(beta * p.weights[static_cast<std::size_t>(k)]);

    ComplexMatrix m = ComplexMatrix::Zero(s, s);
    m.selfadjointView<Eigen::Lower>().rankUpdate(scaled, 1.0);
    m = m.selfadjointView<Eigen::Lower>();  // mirror for the Hermitian check
    m.diagonal().array() += 1.0;
    return logdet_hermitian_psd(m);
}

// Zero-forcing effective channel gains g_k = 1 / [(H_c^H H_c)^{-1}]_{kk}.
// Requires N_TS >= N_R and a well-conditioned H_c.
inline std::vector<double> zf_gains(const ComplexMatrix& h_c, const SnrConfig& snr) {
    if (h_c.rows() != snr.n_selected || h_c.cols() != snr.n_users)
        throw std::invalid_argument("zf_gains: H_c dimensions do not match SnrConfig");
    if (snr.n_selected < snr.n_users)
        throw std::invalid_argument("zf_gains: need n_selected >= n_users for zero forcing");

    const Eigen::Index u = h_c.cols();
    ComplexMatrix gram = h_c.adjoint() * h_c;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(gram);
    const double lmin = es.eigenvalues().minCoeff();
    const double lmax = es.eigenvalues().maxCoeff();
    // cond(H_c) = sqrt(lmax/lmin) of the Gram matrix
    if (!(lmin > 0.0) || std::sqrt(lmax / lmin) >= 1e12)
        throw std::domain_error("zf_gains: H_c is rank deficient or too ill-conditioned for ZF");

    ComplexMatrix inv = es.eigenvectors() *
                        es.eigenvalues().cwiseInverse().asDiagonal() *
                        es.eigenvectors().adjoint();
    std::vector<double> g(static_cast<std::size_t>(u));
    for (Eigen::Index k = 0; k < u; ++k) g[static_cast<std::size_t>(k)] = 1.0 / inv(k, k).real();
    return g;
}

// Water-filling over effective gains: maximises sum_k log2(1 + beta p_k g_k)
// subject to sum p = 1, p >= 0. Exact active-set solution: sort the inverse
// gains ascending and keep the largest prefix with positive powers.
inline PowerAllocation waterfill_gains(const std::vector<double>& gains, double beta) {
    const int n = static_cast<int>(gains.size());
    if (n < 1) throw std::invalid_argument("waterfill_gains: empty gain vector");
    for (double g : gains)
        if (!(g > 0.0)) throw std::domain_error("waterfill_gains: non-positive gain");

    std::vector<int> order(gains.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> a(gains.size());  // a_k = 1/(beta g_k)
    for (int k = 0; k < n; ++k) a[static_cast<std::size_t>(k)] = 1.0 / (beta * gains[static_cast<std::size_t>(k)]);
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return a[static_cast<std::size_t>(i)] < a[static_cast<std::size_t>(j)]; });

    // Largest m such that the water level (1 + sum of the m smallest a) / m
    // exceeds the m-th smallest a.
    double prefix = 0.0;
    double mu = 0.0;
    int active = 0;
    for (int m = 1; m <= n; ++m) {
        prefix += a[static_cast<std::size_t>(order[static_cast<std::size_t>(m - 1)])];
        const double level = (1.0 + prefix) / m;
        if (level > a[static_cast<std::size_t>(order[static_cast<std::size_t>(m - 1)])]) {
            mu = level;
            active = m;
        }
    }

    std::vector<double> p(gains.size(), 0.0);
    double sum = 0.0;
    for (int m = 0; m < active; ++m) {
        const int k = order[static_cast<std::size_t>(m)];
        p[static_cast<std::size_t>(k)] = mu - a[static_cast<std::size_t>(k)];
        sum += p[static_cast<std::size_t>(k)];
    }
    // Exact unit budget despite rounding in the prefix sums.
    for (double& w : p) w /= sum;
    return PowerAllocation(std::move(p));
}

// Water-filling for zero forcing on a channel submatrix.
inline PowerAllocation waterfill_zf(const ComplexMatrix& h_c, const SnrConfig& snr) {
    return waterfill_gains(zf_gains(h_c, snr), snr.power_scale());
}

// Post-ZF sum rate sum_k log2(1 + beta p_k g_k).
inline double zf_sum_rate(const ComplexMatrix& h_c, const PowerAllocation& p,
                          const SnrConfig& snr) {
    const std::vector<double> g = zf_gains(h_c, snr);
    if (p.size() != static_cast<int>(g.size()))
        throw std::invalid_argument("zf_sum_rate: power allocation size mismatch");
    const double beta = snr.power_scale();
    double rate = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k)
        rate += std::log2(1.0 + beta * p.weights[k] * g[k]);
    return rate;
}

}  // namespace rpnsel
