#include "spinbath/bath_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "spinbath/errors.hpp"
#include "spinbath/spin_ops.hpp"

namespace spinbath {

namespace {

constexpr double kSymTol = 1e-12;
constexpr double kEigFloor = -1e-10;

// throws on violated sector-polarization invariants
std::vector<BathViolation> polarization_violations(const SectorPolarization& pol) {
    std::vector<BathViolation> out;
    const int ti = pol.two_spin;
    const double sym =
        (pol.tensor_pol - pol.tensor_pol.transpose()).cwiseAbs().maxCoeff();
    if (sym > kSymTol) out.push_back({"tensor symmetry", ti, sym});
    const double tr = std::abs(pol.tensor_pol.trace());
    if (tr > kSymTol) out.push_back({"tensor trace", ti, tr});
    if (ti == 0) {
        const double mag = pol.vector_pol.norm() + pol.tensor_pol.norm();
        if (mag > kSymTol) out.push_back({"singlet polarization", ti, mag});
    }
    if (ti == 1) {
        const double mag = pol.tensor_pol.cwiseAbs().maxCoeff();
        if (mag > kSymTol) out.push_back({"spin-1/2 tensor", ti, mag});
    }
    if (pol.vector_pol.norm() > vector_pol_bound(ti) + 1e-12)
        out.push_back({"vector polarization bound", ti, pol.vector_pol.norm()});
    return out;
}

void check_polarization(const SectorPolarization& pol) {
    if (pol.two_spin < 0) throw std::invalid_argument("two_spin must be >= 0");
    auto v = polarization_violations(pol);
    if (!v.empty())
        throw std::invalid_argument("sector I = " + std::to_string(pol.two_spin / 2.0) +
                                    ": " + v.front().what + " violated");
}

// truncated state without the positivity gate
Eigen::MatrixXcd build_sector_matrix(const SectorPolarization& pol) {
    const int ti = pol.two_spin;
    const int dim = ti + 1;
    const double i_val = ti / 2.0;
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Identity(dim, dim);
    if (ti >= 1) {
        SpinMatrices s = spin_matrices(ti);
        rho += (pol.vector_pol.x() * s.x + pol.vector_pol.y() * s.y +
                pol.vector_pol.z() * s.z) /
               i_val;
        if (ti >= 2) {
            for (int m = 0; m < 3; ++m)
                for (int n = 0; n < 3; ++n)
                    rho += 3.0 * pol.tensor_pol(m, n) * rank2_tensor_op(s, m, n) /
                           (i_val * (i_val + 1.0));
        }
    }
    return rho / dim;
}

}  // namespace

double vector_pol_bound(int two_spin) {
    if (two_spin == 0) return 0.0;
    const double i_val = two_spin / 2.0;
    return 3.0 * i_val / (i_val + 1.0);
}

// only structural consistency here; physical invariants are the job of
// validate_bath_spec, which must be able to see a broken spec to report it
BathSpec::BathSpec(SectorWeightTable weights,
                   std::map<int, SectorPolarization> polarizations)
    : weights_(std::move(weights)), polarizations_(std::move(polarizations)) {
    for (const auto& [ti, pol] : polarizations_) {
        if (pol.two_spin != ti)
            throw std::invalid_argument("polarization key does not match its sector");
        bool found = false;
        for (const auto& e : weights_.entries()) found |= (e.two_spin == ti);
        if (!found)
            throw std::invalid_argument("polarized sector " + std::to_string(ti / 2.0) +
                                        " is absent from the weight table");
    }
}

SectorPolarization BathSpec::polarization(int two_spin) const {
    auto it = polarizations_.find(two_spin);
    if (it != polarizations_.end()) return it->second;
    SectorPolarization zero;
    zero.two_spin = two_spin;
    return zero;
}

BathSpec fully_polarized_spec(int n_spins, const Eigen::Vector3d& axis) {
    if (n_spins < 1) throw std::invalid_argument("n_spins must be >= 1");
    const double norm = axis.norm();
    if (norm < kSymTol) throw std::invalid_argument("polarization axis is zero");
    if (std::abs(norm - 1.0) > 1e-12)
        throw std::invalid_argument("polarization axis must be a unit vector");

    const double n = n_spins;
    SectorPolarization pol;
    pol.two_spin = n_spins;
    pol.vector_pol = Eigen::Vector3d(0, 0, 3.0 * n / (n + 2.0));
    pol.tensor_pol = Eigen::Vector3d(-1, -1, 2).asDiagonal();
    pol.tensor_pol *= 5.0 * n / (6.0 * (n + 3.0));
    if (n_spins == 1) pol.tensor_pol.setZero();  // no rank-2 operator on spin-1/2

    Eigen::Matrix3d rot = rotation_from_z(axis / norm);
    pol.vector_pol = rot * pol.vector_pol;
    pol.tensor_pol = rot * pol.tensor_pol * rot.transpose();

    SectorWeightTable weights(n_spins, {{n_spins, 1.0}});
    return BathSpec(std::move(weights), {{n_spins, pol}});
}

Eigen::MatrixXcd sector_density_matrix(const SectorPolarization& pol) {
    check_polarization(pol);
    const double i_val = pol.two_spin / 2.0;
    Eigen::MatrixXcd rho = build_sector_matrix(pol);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
    const double min_ev = es.eigenvalues().minCoeff();
    if (min_ev < kEigFloor)
        throw NotAStateError("rank-2 truncated sector state is indefinite: min eigenvalue " +
                                 std::to_string(min_ev) + " at I = " +
                                 std::to_string(i_val),
                             min_ev);
    return rho;
}

Eigen::MatrixXcd max_weight_projector(int two_spin) {
    if (two_spin < 0) throw std::invalid_argument("two_spin must be >= 0");
    const int dim = two_spin + 1;
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
    rho(0, 0) = 1.0;  // basis is m = I..-I
    return rho;
}

Eigen::Vector3d extract_vector_pol(const Eigen::MatrixXcd& rho) {
    const int dim = static_cast<int>(rho.rows());
    const int ti = dim - 1;
    if (ti == 0) return Eigen::Vector3d::Zero();
    const double i_val = ti / 2.0;
    SpinMatrices s = spin_matrices(ti);
    Eigen::Vector3d mean((rho * s.x).trace().real(), (rho * s.y).trace().real(),
                         (rho * s.z).trace().real());
    return 3.0 * mean / (i_val + 1.0);
}

Eigen::Matrix3d extract_tensor_pol(const Eigen::MatrixXcd& rho) {
    const int dim = static_cast<int>(rho.rows());
    const int ti = dim - 1;
    if (ti < 2) return Eigen::Matrix3d::Zero();
    const double i_val = ti / 2.0;
    SpinMatrices s = spin_matrices(ti);
    Eigen::Matrix3d pi;
    const double scale = 10.0 / ((2.0 * i_val - 1.0) * (2.0 * i_val + 3.0));
    for (int m = 0; m < 3; ++m)
        for (int n = 0; n < 3; ++n)
            pi(m, n) = scale * (rho * rank2_tensor_op(s, m, n)).trace().real();
    return pi;
}

ValidationReport validate_bath_spec(const BathSpec& spec) {
    ValidationReport report;
    for (const auto& [ti, pol] : spec.polarizations()) {
        auto v = polarization_violations(pol);
        const bool algebra_ok = v.empty();
        for (auto& item : v) report.violations.push_back(std::move(item));
        if (algebra_ok) {
            Eigen::MatrixXcd rho = build_sector_matrix(pol);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho,
                                                               Eigen::EigenvaluesOnly);
            const double min_ev = es.eigenvalues().minCoeff();
            report.positivity.push_back({ti, min_ev >= kEigFloor, min_ev});
        }
    }
    return report;
}

}  // namespace spinbath
