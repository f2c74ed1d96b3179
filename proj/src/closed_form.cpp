#include "spinbath/closed_form.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "spinbath/errors.hpp"
#include "spinbath/spin_ops.hpp"

namespace spinbath {

namespace {

constexpr double kNormSlack = 1e-9;

void check_p0(const Eigen::Vector3d& p0) {
    if (p0.norm() > 1.0 + kNormSlack)
        throw std::invalid_argument("initial polarization exceeds unit norm");
}

}  // namespace

double SectorEvolution::lambda_freq() const {
    return coupling * (two_spin / 2.0 + 0.5) / 2.0;
}

std::complex<double> SectorEvolution::a(double t) const {
    const double lt = lambda_freq() * t;
    return {std::cos(lt), -std::sin(lt) / (two_spin + 1.0)};
}

std::complex<double> SectorEvolution::b(double t) const {
    const double lt = lambda_freq() * t;
    return {0.0, -4.0 * std::sin(lt) / (two_spin + 1.0)};
}

Eigen::MatrixXcd SectorEvolution::unitary(double t) const {
    const int dim = 2 * (two_spin + 1);
    Eigen::MatrixXcd u = a(t) * Eigen::MatrixXcd::Identity(dim, dim) +
                         b(t) * qubit_sector_coupling(two_spin);
    // overall phase fixing u = exp(-iHt); drops out of rho -> u rho u^+
    return std::exp(std::complex<double>(0, coupling * t / 4.0)) * u;
}

EvolutionCoefficients evolution_coefficients(const BathSpec& spec,
                                             double coupling, double t) {
    if (!(coupling > 0)) throw std::invalid_argument("coupling must be > 0");
    EvolutionCoefficients c;
    c.time = t;
    for (const auto& e : spec.weights().entries()) {
        const double i_val = e.two_spin / 2.0;
        const double ihalf = i_val + 0.5;
        const double w = ihalf * coupling / 2.0;  // sin^2(w t) frequency
        const double s2 = std::sin(w * t) * std::sin(w * t);
        const double ds2 = w * std::sin(2.0 * w * t);

        const double cf = 4.0 * i_val * (i_val + 1.0) / (3.0 * ihalf * ihalf);
        c.f -= e.weight * cf * s2;
        c.df -= e.weight * cf * ds2;

        const SectorPolarization pol = spec.polarization(e.two_spin);
        if (pol.vector_pol.squaredNorm() > 0) {
            const double cg = 2.0 * (i_val + 1.0) / (3.0 * ihalf * ihalf);
            c.g += e.weight * cg * s2 * pol.vector_pol;
            c.dg += e.weight * cg * ds2 * pol.vector_pol;
            const double ch = (i_val + 1.0) / (3.0 * ihalf);
            c.h += e.weight * ch * std::sin(2.0 * w * t) * pol.vector_pol;
            c.dh += e.weight * ch * 2.0 * w * std::cos(2.0 * w * t) * pol.vector_pol;
        }
        if (pol.tensor_pol.cwiseAbs().maxCoeff() > 0) {
            const double cp =
                (4.0 * i_val * (i_val + 1.0) - 3.0) / (5.0 * ihalf * ihalf);
            c.pi_tilde += e.weight * cp * s2 * pol.tensor_pol;
            c.dpi_tilde += e.weight * cp * ds2 * pol.tensor_pol;
        }
    }
    return c;
}

Eigen::Vector3d qubit_polarization_at(const Eigen::Vector3d& p0,
                                      const EvolutionCoefficients& c) {
    check_p0(p0);
    return c.f * p0 + c.g + c.h.cross(p0) + c.pi_tilde.transpose() * p0;
}

Trajectory trajectory(const BathSpec& spec, double coupling,
                      const Eigen::Vector3d& p0, std::span<const double> grid) {
    if (grid.empty()) throw std::invalid_argument("time grid is empty");
    for (size_t k = 1; k < grid.size(); ++k)
        if (!(grid[k] > grid[k - 1]))
            throw std::invalid_argument("time grid must increase monotonically");
    check_p0(p0);
    Trajectory tr;
    tr.times.assign(grid.begin(), grid.end());
    tr.polarizations.reserve(grid.size());
    tr.magnitudes.reserve(grid.size());
    const bool bath_series = spec.polarizations().empty();
    for (double t : grid) {
        Eigen::Vector3d p = qubit_polarization_at(p0, evolution_coefficients(spec, coupling, t));
        tr.polarizations.push_back(p);
        tr.magnitudes.push_back(p.norm());
        if (bath_series)
            tr.bath_polarization.push_back(
                induced_bath_polarization(spec.weights(), coupling, p0, t));
    }
    return tr;
}

SmallTimeMoments small_time_moments(const BathSpec& spec, double coupling,
                                    const Eigen::Vector3d& p0) {
    if (!(coupling > 0)) throw std::invalid_argument("coupling must be > 0");
    if (p0.norm() == 0)
        throw std::invalid_argument("angles are undefined for p0 = 0");
    check_p0(p0);
    SmallTimeMoments m;
    Eigen::Vector3d u = Eigen::Vector3d::Zero();  // sum lambda (I+1) P_I
    for (const auto& e : spec.weights().entries()) {
        const double i_val = e.two_spin / 2.0;
        m.w_f += e.weight * i_val * (i_val + 1.0);
        const SectorPolarization pol = spec.polarization(e.two_spin);
        u += e.weight * (i_val + 1.0) * pol.vector_pol;
        m.w_mn += e.weight * (i_val * (i_val + 1.0) - 0.75) * pol.tensor_pol;
    }
    m.w_f *= coupling * coupling / 3.0;
    m.w_mn *= coupling * coupling / 5.0;
    const double unorm = u.norm();
    m.w_h = coupling * coupling * unorm * unorm / 9.0;
    if (unorm > 0) {
        // h and g share the same limiting direction u as t -> 0+
        const double c = std::clamp(u.dot(p0) / (unorm * p0.norm()), -1.0, 1.0);
        m.theta_h = std::acos(c);
        m.theta_g = std::acos(c);
    }
    return m;
}

GaussianTau gaussian_tau(const BathSpec& spec, double coupling,
                         const Eigen::Vector3d& p0) {
    const SmallTimeMoments m = small_time_moments(spec, coupling, p0);
    const double p0n = p0.norm();
    GaussianTau out{};
    out.w_f_term = m.w_f;
    if (m.theta_h) {
        const double sth = std::sin(*m.theta_h);
        out.h_term = -m.w_h / 2.0 * sth * sth;
        out.g_term = -coupling * std::sqrt(m.w_h) / (2.0 * p0n) * std::cos(*m.theta_g);
    }
    out.tensor_term = -(p0.dot(m.w_mn * p0)) / (p0n * p0n);
    const double inv_tau_sq = out.w_f_term + out.h_term + out.g_term + out.tensor_term;
    if (!(inv_tau_sq > 0))
        throw NoGaussianDecayError(
            "polarization grows at second order: 1/tau^2 = " +
                std::to_string(inv_tau_sq),
            inv_tau_sq);
    out.tau = 1.0 / std::sqrt(inv_tau_sq);
    return out;
}

Eigen::Vector3d induced_bath_polarization(const SectorWeightTable& weights,
                                          double coupling,
                                          const Eigen::Vector3d& p0, double t) {
    double acc = 0;
    for (const auto& e : weights.entries()) {
        const double i_val = e.two_spin / 2.0;
        if (i_val == 0) continue;
        const double ihalf = i_val + 0.5;
        const double s = std::sin(ihalf * coupling * t / 2.0);
        acc += e.weight * 2.0 * i_val / (ihalf * ihalf) * s * s;
    }
    return acc * p0;
}

std::pair<Eigen::Vector3d, Eigen::Vector3d> two_spin_polarization(
    const Eigen::Vector3d& pa0, const Eigen::Vector3d& pb0, double coupling,
    double t) {
    check_p0(pa0);
    check_p0(pb0);
    const double c2 = std::cos(coupling * t / 2.0) * std::cos(coupling * t / 2.0);
    const double s2 = std::sin(coupling * t / 2.0) * std::sin(coupling * t / 2.0);
    const double sk = std::sin(coupling * t);
    Eigen::Vector3d pa = c2 * pa0 + s2 * pb0 + 0.5 * sk * pb0.cross(pa0);
    Eigen::Vector3d pb = c2 * pb0 + s2 * pa0 + 0.5 * sk * pa0.cross(pb0);
    return {pa, pb};
}

double average_fidelity(FidelityKind kind, const SectorWeightTable* weights,
                        double coupling, double t) {
    // both averages depend on the bath only through f(t):
    //   pure states:          F = (1 + f)/2
    //   pure and mixed states: F = 1 - 3(pi/4 - 2/3)(1 - f)
    double one_minus_f = 0;
    switch (kind) {
        case FidelityKind::two_spin_pure:
        case FidelityKind::two_spin_all: {
            const double s = std::sin(coupling * t / 2.0);
            one_minus_f = s * s;
            break;
        }
        case FidelityKind::bath_pure:
        case FidelityKind::bath_all: {
            if (weights == nullptr)
                throw std::invalid_argument("bath fidelity requires a weight table");
            for (const auto& e : weights->entries()) {
                const double i_val = e.two_spin / 2.0;
                const double ihalf = i_val + 0.5;
                const double s = std::sin(ihalf * coupling * t / 2.0);
                one_minus_f +=
                    e.weight * 4.0 * i_val * (i_val + 1.0) / (3.0 * ihalf * ihalf) * s * s;
            }
            break;
        }
    }
    if (kind == FidelityKind::two_spin_pure || kind == FidelityKind::bath_pure)
        return 1.0 - 0.5 * one_minus_f;
    return 1.0 - 3.0 * (std::numbers::pi / 4.0 - 2.0 / 3.0) * one_minus_f;
}

}  // namespace spinbath
