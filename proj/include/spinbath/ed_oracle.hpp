#pragma once

#include <Eigen/Dense>
#include <span>
#include <variant>
#include <vector>

#include "spinbath/closed_form.hpp"

namespace spinbath {

// Brute-force product-space evolution used to validate the closed forms.
// Everything here goes through a one-time dense Hermitian eigendecomposition,
// never through the analytic propagator coefficients.

struct DenseState {
    Eigen::MatrixXcd rho;

    int dim() const { return static_cast<int>(rho.rows()); }
    /// hermiticity to 1e-10, trace 1 to 1e-10, eigenvalues >= -1e-9
    void validate() const;
};

/// qubit (x) N spin-1/2 bath with the bath in a product of single-site states
DenseState product_state(const Eigen::Vector3d& qubit_p0,
                         const std::vector<Eigen::Vector3d>& site_pols);
/// qubit (x) maximally mixed bath
DenseState qubit_with_mixed_bath(const Eigen::Vector3d& qubit_p0, int n_spins);
/// qubit (x) given sector state
DenseState qubit_with_sector(const Eigen::Vector3d& qubit_p0,
                             const Eigen::MatrixXcd& rho_sector);

struct GlobalHeisenberg {
    double coupling;
    int n_spins;
};
struct LocalHamiltonian {
    std::vector<double> couplings;
    Eigen::Vector3d field = Eigen::Vector3d::Zero();
};
struct IrrepHamiltonian {
    double coupling;
    int two_spin;
};
using HamiltonianKind =
    std::variant<GlobalHeisenberg, LocalHamiltonian, IrrepHamiltonian>;

class HamiltonianSpec {
public:
    /// dense hermitian realization; global/local capped at max_bath_spins
    /// (default 12), irrep at I <= 50
    static HamiltonianSpec build(const HamiltonianKind& kind,
                                 int max_bath_spins = 12);

    const HamiltonianKind& kind() const { return kind_; }
    const Eigen::MatrixXcd& matrix() const { return matrix_; }
    int dim() const { return static_cast<int>(matrix_.rows()); }
    int bath_dim() const { return dim() / 2; }

private:
    HamiltonianSpec(HamiltonianKind kind, Eigen::MatrixXcd matrix)
        : kind_(std::move(kind)), matrix_(std::move(matrix)) {}
    HamiltonianKind kind_;
    Eigen::MatrixXcd matrix_;
};

struct OracleTrajectory {
    std::vector<double> times;
    std::vector<Eigen::Vector3d> qubit_polarizations;
    std::vector<double> magnitudes;
    /// <I_B> expectation per time (total bath spin), filled when requested
    std::vector<Eigen::Vector3d> bath_spin;
};

/// evolve rho0 under h and reduce: qubit Bloch vector per grid point, plus the
/// bath spin expectation when with_bath_spin.  Energy tr(rho H) is checked
/// constant to 1e-9 along the grid.
OracleTrajectory evolve_reduced(const HamiltonianSpec& h, const DenseState& rho0,
                                std::span<const double> grid,
                                bool with_bath_spin = false);

/// single-sector oracle: qubit (x) spin-I under K S.I, numerically
/// diagonalized; sector mixing by weights is the caller's job (linearity)
OracleTrajectory irrep_evolve(double coupling,
                              const Eigen::MatrixXcd& rho_sector,
                              const Eigen::Vector3d& p0,
                              std::span<const double> grid,
                              bool with_bath_spin = false);

enum class Keep { first, second };

/// trace out one factor of a dim_first * dim_second product space
DenseState partial_trace(const DenseState& rho, int dim_first, int dim_second,
                         Keep keep);

/// wootters concurrence of a two-qubit state
double concurrence(const Eigen::MatrixXcd& rho);

}  // namespace spinbath
