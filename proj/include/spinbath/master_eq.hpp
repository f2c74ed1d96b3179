#pragma once

#include <Eigen/Dense>
#include <optional>

#include "spinbath/closed_form.hpp"

namespace spinbath {

// The closed-form map P(t) - g(t) = M(t) P(0) is recast as the master equation
//   dP/dt = D P + R,   D = Mdot M^-1,   R = gdot - D g.
// Conventions used throughout:
//   * M = f 1 + [h]_x + Pi~, where [h]_x v = h x v (the cross-product matrix),
//     so M is the actual transfer matrix of the closed form.
//   * B_eff is the axial vector of the antisymmetric part of D in the standard
//     sense D_a = [B_eff]_x, i.e. precession dP/dt = B_eff x P + ...
//   * decay rates gamma_i are the eigenvalues of D_s = (D + D^T)/2,
//     logarithmic-derivative sign: negative while the component decays.

std::pair<Eigen::Matrix3d, Eigen::Matrix3d> m_matrix_and_derivative(
    const EvolutionCoefficients& c);

struct DMatrixResult {
    Eigen::Matrix3d d;
    double det_m;
    double rcond;  // min/max singular value estimate
};

/// D = Mdot M^-1 by direct solve; throws SingularEvolutionError when
/// |det M| < singular_tol
DMatrixResult d_matrix(const Eigen::Matrix3d& m, const Eigen::Matrix3d& m_dot,
                       double singular_tol = 1e-10, double time = 0.0);

/// kossakowski matrix Gamma_lm = D_lm + D_ml - delta_lm tr D - i eps_lmn R_n
/// and the effective field from D's antisymmetric part
std::pair<Eigen::Matrix3cd, Eigen::Vector3d> gamma_and_field(
    const Eigen::Matrix3d& d, const Eigen::Vector3d& r);

struct DecayRates {
    Eigen::Vector3d gamma;  // ascending eigenvalues of D_s
    Eigen::Matrix3d axes;   // matching eigenvectors in columns
    /// set when two rates coincide within 1e-9: (gamma_perp = the degenerate
    /// pair, gamma_parallel = the distinct rate along the symmetry axis)
    std::optional<std::pair<double, double>> axial;
};

DecayRates decay_rates(const Eigen::Matrix3d& d);

struct MasterEqSnapshot {
    double time;
    Eigen::Matrix3d m_matrix;
    Eigen::Matrix3d m_dot;
    Eigen::Matrix3d d;
    Eigen::Vector3d r;
    Eigen::Matrix3cd gamma_matrix;
    Eigen::Vector3d b_eff;
    DecayRates rates;
    double det_m;
    double rcond;
};

/// full extraction at a single time; throws SingularEvolutionError at
/// singular crossings
MasterEqSnapshot master_eq_snapshot(const BathSpec& spec, double coupling,
                                    double t, double singular_tol = 1e-10);

}  // namespace spinbath
