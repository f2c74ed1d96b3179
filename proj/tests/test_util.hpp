#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "spinbath/bath_model.hpp"
#include "spinbath/errors.hpp"
#include "spinbath/spin_ops.hpp"

namespace testutil {

inline std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out;
    out.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        out.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
    return out;
}

/// least-squares fit of exp(-(t/tau)^2) to magnitude samples, linear in
/// 1/tau^2 after taking logs
inline double fit_gaussian_tau(const std::vector<double>& ts,
                               const std::vector<double>& mags, double mag0) {
    double num = 0, den = 0;
    for (size_t i = 0; i < ts.size(); ++i) {
        if (ts[i] == 0) continue;
        const double t2 = ts[i] * ts[i];
        num -= t2 * std::log(mags[i] / mag0);
        den += t2 * t2;
    }
    return 1.0 / std::sqrt(num / den);
}

/// log-log slope of err(t) by linear regression
inline double loglog_slope(const std::vector<double>& ts,
                           const std::vector<double>& errs) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(ts.size());
    for (size_t i = 0; i < ts.size(); ++i) {
        const double x = std::log(ts[i]);
        const double y = std::log(errs[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// classic fixed-step RK4 for dP/dt = rhs(t, P)
inline Eigen::Vector3d rk4_step(
    const std::function<Eigen::Vector3d(double, const Eigen::Vector3d&)>& rhs,
    double t, double h, const Eigen::Vector3d& p) {
    const Eigen::Vector3d k1 = rhs(t, p);
    const Eigen::Vector3d k2 = rhs(t + h / 2, p + h / 2 * k1);
    const Eigen::Vector3d k3 = rhs(t + h / 2, p + h / 2 * k2);
    const Eigen::Vector3d k4 = rhs(t + h, p + h * k3);
    return p + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
}

/// hermitian rank-3 operators on a spin-I space, orthogonal to every operator
/// of rank <= 2: the traceless cubic in Iz and the +/-3 ladder combination
inline std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> rank3_ops(int two_spin) {
    spinbath::SpinMatrices s = spinbath::spin_matrices(two_spin);
    const Eigen::MatrixXcd iz2 = s.z * s.z;
    const double a = (iz2 * iz2).trace().real() / iz2.trace().real();
    Eigen::MatrixXcd o1 = s.z * iz2 - a * s.z;
    Eigen::MatrixXcd ip = s.x + std::complex<double>(0, 1) * s.y;
    Eigen::MatrixXcd im = s.x - std::complex<double>(0, 1) * s.y;
    Eigen::MatrixXcd o2 = (ip * ip * ip + im * im * im) / 2.0;
    o1 /= o1.norm();
    o2 /= o2.norm();
    return {o1, o2};
}

/// random sector polarization whose rank-2 truncation is a positive matrix
inline spinbath::SectorPolarization random_positive_pol(int two_spin,
                                                        std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::uniform_real_distribution<double> mag(0.0, 1.0);
    for (int attempt = 0; attempt < 256; ++attempt) {
        spinbath::SectorPolarization pol;
        pol.two_spin = two_spin;
        if (two_spin >= 1) {
            Eigen::Vector3d dir(uni(rng), uni(rng), uni(rng));
            if (dir.norm() < 1e-6) continue;
            pol.vector_pol =
                dir.normalized() *
                (0.8 * mag(rng) * std::min(1.0, spinbath::vector_pol_bound(two_spin)));
        }
        if (two_spin >= 2) {
            Eigen::Matrix3d m;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) m(i, j) = uni(rng);
            Eigen::Matrix3d sym = 0.5 * (m + m.transpose());
            sym -= (sym.trace() / 3.0) * Eigen::Matrix3d::Identity();
            if (sym.norm() > 1e-9) pol.tensor_pol = sym / sym.norm() * (0.4 * mag(rng));
        }
        try {
            spinbath::sector_density_matrix(pol);
            return pol;
        } catch (const spinbath::NotAStateError&) {
        }
    }
    throw std::runtime_error("sampler failed to find a positive polarization");
}

inline Eigen::Vector3d random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::Vector3d v(g(rng), g(rng), g(rng));
    while (v.norm() < 1e-6) v = Eigen::Vector3d(g(rng), g(rng), g(rng));
    return v.normalized();
}

}  // namespace testutil
