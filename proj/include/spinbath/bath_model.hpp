#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "spinbath/sector_algebra.hpp"

namespace spinbath {

// Sector states are parameterized by a vector polarization P and a symmetric
// traceless rank-2 tensor polarization Pi, normalized so that
//   <I>      = P (I+1)/3
//   <Q^{mn}> = Pi^{mn} (2I-1)(2I+3)/10
// which keeps both of order unity.  |P| <= 3I/(I+1), saturated by |I,I>.

struct SectorPolarization {
    int two_spin = 0;
    Eigen::Vector3d vector_pol = Eigen::Vector3d::Zero();
    Eigen::Matrix3d tensor_pol = Eigen::Matrix3d::Zero();
};

/// largest |P| a spin-I sector can carry
double vector_pol_bound(int two_spin);

class BathSpec {
public:
    /// polarization keys must appear in the weight table; sectors without an
    /// entry are unpolarized
    BathSpec(SectorWeightTable weights,
             std::map<int, SectorPolarization> polarizations = {});

    const SectorWeightTable& weights() const { return weights_; }
    const std::map<int, SectorPolarization>& polarizations() const {
        return polarizations_;
    }
    /// zero polarization for absent sectors
    SectorPolarization polarization(int two_spin) const;
    int n_spins() const { return weights_.n_spins(); }

private:
    SectorWeightTable weights_;
    std::map<int, SectorPolarization> polarizations_;
};

/// all n spins aligned with the given unit axis: single sector I = n/2 in the
/// pure |I,I> state, P = 3n/(n+2), Pi = 5n/(6(n+3)) diag(-1,-1,2) rotated to axis
BathSpec fully_polarized_spec(int n_spins, const Eigen::Vector3d& axis);

/// materialize a sector state from (P, Pi), truncating all ranks >= 3 to zero.
/// throws NotAStateError if the truncation is indefinite below -1e-10.
Eigen::MatrixXcd sector_density_matrix(const SectorPolarization& pol);

/// projector |I,I><I,I| -- the exact fully polarized sector state, carrying
/// the saturated (P, Pi) moments plus the higher-rank content the rank-2
/// truncation cannot represent
Eigen::MatrixXcd max_weight_projector(int two_spin);

/// read P back from a sector density matrix
Eigen::Vector3d extract_vector_pol(const Eigen::MatrixXcd& rho);
/// read Pi back from a sector density matrix
Eigen::Matrix3d extract_tensor_pol(const Eigen::MatrixXcd& rho);

struct BathViolation {
    std::string what;
    int two_spin;
    double magnitude;
};

struct SectorPositivity {
    int two_spin;
    bool positive;
    double min_eigenvalue;
};

/// report-only diagnostics.  violations is empty iff the spec satisfies every
/// polarization invariant.  positivity records, per polarized sector, whether
/// the rank-2 truncation is itself a positive matrix; valid moments can fail
/// this (a saturated sector needs its higher-rank content), so it is status,
/// not a violation.
struct ValidationReport {
    std::vector<BathViolation> violations;
    std::vector<SectorPositivity> positivity;
    bool clean() const { return violations.empty(); }
};

ValidationReport validate_bath_spec(const BathSpec& spec);

}  // namespace spinbath
