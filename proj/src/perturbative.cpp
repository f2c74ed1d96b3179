#include "spinbath/perturbative.hpp"

#include <stdexcept>

namespace spinbath {

void validate_model(const LocalCouplingModel& model) {
    if (model.couplings.empty())
        throw std::invalid_argument("local model needs at least one site");
    if (model.couplings.size() != model.site_polarizations.size())
        throw std::invalid_argument("couplings and site polarizations differ in length");
    for (const auto& p : model.site_polarizations)
        if (p.norm() > 1.0 + 1e-12)
            throw std::invalid_argument("site polarization exceeds unit norm");
}

Eigen::Vector3d second_order_polarization(const LocalCouplingModel& model,
                                          const Eigen::Vector3d& p0, double t) {
    validate_model(model);
    if (p0.norm() > 1.0 + 1e-9)
        throw std::invalid_argument("initial polarization exceeds unit norm");
    const Eigen::Vector3d& b = model.external_field;
    const size_t n = model.couplings.size();

    Eigen::Vector3d first = 2.0 * p0.cross(b);
    Eigen::Vector3d second = 2.0 * (p0.cross(b)).cross(b);
    for (size_t i = 0; i < n; ++i) {
        const double ji = model.couplings[i];
        const Eigen::Vector3d& pi = model.site_polarizations[i];
        first += ji * p0.cross(pi);
        second += ji * ji * (pi - p0);
        // hyperfine-field mixed term
        second += ji * (pi.cross(b.cross(p0)) + b.cross(pi.cross(p0)));
        // ordered double sum over distinct sites
        for (size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double jj = model.couplings[j];
            const Eigen::Vector3d& pj = model.site_polarizations[j];
            second += 0.5 * ji * jj * (p0.cross(pj)).cross(pi);
        }
    }
    return p0 - 0.5 * t * first + 0.25 * t * t * second;
}

}  // namespace spinbath
