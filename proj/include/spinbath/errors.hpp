#pragma once

#include <stdexcept>
#include <string>

namespace spinbath {

/// a rank-2-truncated density matrix came out indefinite
class NotAStateError : public std::runtime_error {
public:
    NotAStateError(const std::string& what, double min_eigenvalue)
        : std::runtime_error(what), min_eigenvalue_(min_eigenvalue) {}
    double min_eigenvalue() const { return min_eigenvalue_; }

private:
    double min_eigenvalue_;
};

/// |det M| fell below the singular tolerance while extracting D = Mdot M^-1
class SingularEvolutionError : public std::runtime_error {
public:
    SingularEvolutionError(const std::string& what, double time, double det_m)
        : std::runtime_error(what), time_(time), det_m_(det_m) {}
    double time() const { return time_; }
    double det_m() const { return det_m_; }

private:
    double time_;
    double det_m_;
};

/// 1/tau^2 <= 0: the polarization grows at second order, no gaussian decay
class NoGaussianDecayError : public std::runtime_error {
public:
    NoGaussianDecayError(const std::string& what, double inv_tau_sq)
        : std::runtime_error(what), inv_tau_sq_(inv_tau_sq) {}
    double inv_tau_sq() const { return inv_tau_sq_; }

private:
    double inv_tau_sq_;
};

/// request exceeds a configured size cap (dense dimensions, exact integer range)
class ResourceLimitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// weight truncation removed every sector
class EmptyTableError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace spinbath
