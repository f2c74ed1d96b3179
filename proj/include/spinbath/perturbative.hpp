#pragma once

#include <Eigen/Dense>
#include <vector>

namespace spinbath {

/// H = sum_i J_i S.I_i + B.S with per-site product-state polarizations
struct LocalCouplingModel {
    std::vector<double> couplings;
    std::vector<Eigen::Vector3d> site_polarizations;
    Eigen::Vector3d external_field = Eigen::Vector3d::Zero();
};

/// throws std::invalid_argument on length mismatch, empty model, or |P_i| > 1
void validate_model(const LocalCouplingModel& model);

/// qubit polarization to O(t^2), no resummation:
///   P(t) = p0 - (t/2) { sum J_i p0 x P_i + 2 p0 x B }
///        + (t^2/4) { sum J_i^2 (P_i - p0)
///                  + 1/2 sum_{i != j} J_i J_j (p0 x P_j) x P_i
///                  + sum J_i [ P_i x (B x p0) + B x (P_i x p0) ]
///                  + 2 (p0 x B) x B }
/// The double sum runs over ordered pairs.
Eigen::Vector3d second_order_polarization(const LocalCouplingModel& model,
                                          const Eigen::Vector3d& p0, double t);

}  // namespace spinbath
