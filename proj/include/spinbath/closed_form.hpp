#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "spinbath/bath_model.hpp"

namespace spinbath {

// Exact solution for H = K S.I_B at fixed bath spin I.  The propagator in a
// sector factorizes as a phase times (a + b S.I) with
//   a(t) = cos(Lt) - i sin(Lt)/(2I+1),  b(t) = -4i sin(Lt)/(2I+1),
//   L = K(I + 1/2)/2.
struct SectorEvolution {
    int two_spin;
    double coupling;

    double lambda_freq() const;
    std::complex<double> a(double t) const;
    std::complex<double> b(double t) const;
    /// full 2(2I+1)-dim unitary e^{-iHt}
    Eigen::MatrixXcd unitary(double t) const;
};

/// coefficients of the qubit map P(t) = f P0 + g + h x P0 + Pi~^T P0,
/// with analytic time derivatives carried along
struct EvolutionCoefficients {
    double time = 0;
    double f = 1, df = 0;
    Eigen::Vector3d g = Eigen::Vector3d::Zero(), dg = Eigen::Vector3d::Zero();
    Eigen::Vector3d h = Eigen::Vector3d::Zero(), dh = Eigen::Vector3d::Zero();
    Eigen::Matrix3d pi_tilde = Eigen::Matrix3d::Zero();
    Eigen::Matrix3d dpi_tilde = Eigen::Matrix3d::Zero();
};

EvolutionCoefficients evolution_coefficients(const BathSpec& spec,
                                             double coupling, double t);

/// apply the qubit map; |p0| <= 1 required
Eigen::Vector3d qubit_polarization_at(const Eigen::Vector3d& p0,
                                      const EvolutionCoefficients& c);

struct Trajectory {
    std::vector<double> times;
    std::vector<Eigen::Vector3d> polarizations;
    std::vector<double> magnitudes;
    std::vector<Eigen::Vector3d> bath_polarization;  // empty unless requested
};

Trajectory trajectory(const BathSpec& spec, double coupling,
                      const Eigen::Vector3d& p0, std::span<const double> grid);

/// leading small-time moments: f ~ 1 - w_f t^2, |h| ~ sqrt(w_h) t,
/// Pi~_mn ~ w_mn t^2.  w_h is stored as the squared quantity.  The angles are
/// between the limiting h/g directions and p0, absent when the bath carries no
/// vector polarization.
struct SmallTimeMoments {
    double w_f = 0;
    double w_h = 0;
    Eigen::Matrix3d w_mn = Eigen::Matrix3d::Zero();
    std::optional<double> theta_h;
    std::optional<double> theta_g;
};

SmallTimeMoments small_time_moments(const BathSpec& spec, double coupling,
                                    const Eigen::Vector3d& p0);

/// 1/tau^2 = w_f_term + h_term + g_term + tensor_term (terms carry their sign)
struct GaussianTau {
    double tau;
    double w_f_term;
    double h_term;
    double g_term;
    double tensor_term;
};

/// short-time gaussian decay scale of |P_A|; throws NoGaussianDecayError when
/// 1/tau^2 <= 0 and std::invalid_argument for p0 = 0
GaussianTau gaussian_tau(const BathSpec& spec, double coupling,
                         const Eigen::Vector3d& p0);

/// bath polarization induced by the qubit when every sector starts maximally
/// mixed; collinear with p0
Eigen::Vector3d induced_bath_polarization(const SectorWeightTable& weights,
                                          double coupling,
                                          const Eigen::Vector3d& p0, double t);

/// exact two-spin dynamics, period 2 pi / K; returns (P_A(t), P_B(t))
std::pair<Eigen::Vector3d, Eigen::Vector3d> two_spin_polarization(
    const Eigen::Vector3d& pa0, const Eigen::Vector3d& pb0, double coupling,
    double t);

enum class FidelityKind { two_spin_pure, two_spin_all, bath_pure, bath_all };

/// qubit-state-averaged fidelity; bath kinds need a weight table
double average_fidelity(FidelityKind kind, const SectorWeightTable* weights,
                        double coupling, double t);

}  // namespace spinbath
