#include "spinbath/master_eq.hpp"

#include <cmath>
#include <stdexcept>

#include "spinbath/errors.hpp"

namespace spinbath {

namespace {

Eigen::Matrix3d cross_matrix(const Eigen::Vector3d& v) {
    Eigen::Matrix3d m;
    m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
    return m;
}

}  // namespace

std::pair<Eigen::Matrix3d, Eigen::Matrix3d> m_matrix_and_derivative(
    const EvolutionCoefficients& c) {
    Eigen::Matrix3d m =
        c.f * Eigen::Matrix3d::Identity() + cross_matrix(c.h) + c.pi_tilde;
    Eigen::Matrix3d m_dot =
        c.df * Eigen::Matrix3d::Identity() + cross_matrix(c.dh) + c.dpi_tilde;
    return {m, m_dot};
}

DMatrixResult d_matrix(const Eigen::Matrix3d& m, const Eigen::Matrix3d& m_dot,
                       double singular_tol, double time) {
    const double det = m.determinant();
    if (std::abs(det) < singular_tol)
        throw SingularEvolutionError(
            "evolution matrix is singular at t = " + std::to_string(time) +
                " (det M = " + std::to_string(det) + ")",
            time, det);
    // D M = Mdot  <=>  M^T D^T = Mdot^T
    Eigen::PartialPivLU<Eigen::Matrix3d> lu(m.transpose());
    Eigen::Matrix3d d = lu.solve(m_dot.transpose()).transpose();
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(m);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(2);
    return {d, det, smax > 0 ? smin / smax : 0.0};
}

std::pair<Eigen::Matrix3cd, Eigen::Vector3d> gamma_and_field(
    const Eigen::Matrix3d& d, const Eigen::Vector3d& r) {
    Eigen::Matrix3cd gamma = Eigen::Matrix3cd::Zero();
    const double tr = d.trace();
    for (int l = 0; l < 3; ++l)
        for (int m = 0; m < 3; ++m)
            gamma(l, m) = d(l, m) + d(m, l) - (l == m ? tr : 0.0);
    // -i eps_lmn R_n
    using C = std::complex<double>;
    gamma(0, 1) -= C(0, 1) * r.z();
    gamma(1, 0) += C(0, 1) * r.z();
    gamma(1, 2) -= C(0, 1) * r.x();
    gamma(2, 1) += C(0, 1) * r.x();
    gamma(2, 0) -= C(0, 1) * r.y();
    gamma(0, 2) += C(0, 1) * r.y();
    // axial vector of D_a in the convention D_a = [b_eff]_x, so that the
    // antisymmetric part acts as b_eff x P (plain precession about b_eff)
    Eigen::Vector3d b_eff(0.5 * (d(2, 1) - d(1, 2)), 0.5 * (d(0, 2) - d(2, 0)),
                          0.5 * (d(1, 0) - d(0, 1)));
    return {gamma, b_eff};
}

DecayRates decay_rates(const Eigen::Matrix3d& d) {
    const Eigen::Matrix3d ds = 0.5 * (d + d.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(ds);
    DecayRates out;
    out.gamma = es.eigenvalues();
    out.axes = es.eigenvectors();
    constexpr double tol = 1e-9;
    const double d01 = std::abs(out.gamma(0) - out.gamma(1));
    const double d12 = std::abs(out.gamma(1) - out.gamma(2));
    if (d01 <= tol && d12 > tol) {
        out.axial = {{out.gamma(0), out.gamma(2)}};
    } else if (d12 <= tol && d01 > tol) {
        out.axial = {{out.gamma(2), out.gamma(0)}};
    } else if (d01 <= tol && d12 <= tol) {
        out.axial = {{out.gamma(1), out.gamma(1)}};  // isotropic
    }
    return out;
}

MasterEqSnapshot master_eq_snapshot(const BathSpec& spec, double coupling,
                                    double t, double singular_tol) {
    const EvolutionCoefficients c = evolution_coefficients(spec, coupling, t);
    auto [m, m_dot] = m_matrix_and_derivative(c);
    DMatrixResult dm = d_matrix(m, m_dot, singular_tol, t);
    const Eigen::Vector3d r = c.dg - dm.d * c.g;
    auto [gamma, b_eff] = gamma_and_field(dm.d, r);
    MasterEqSnapshot snap;
    snap.time = t;
    snap.m_matrix = m;
    snap.m_dot = m_dot;
    snap.d = dm.d;
    snap.r = r;
    snap.gamma_matrix = gamma;
    snap.b_eff = b_eff;
    snap.rates = decay_rates(dm.d);
    snap.det_m = dm.det_m;
    snap.rcond = dm.rcond;
    return snap;
}

}  // namespace spinbath
