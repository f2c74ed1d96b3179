#include "spinbath/ed_oracle.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "spinbath/errors.hpp"
#include "spinbath/spin_ops.hpp"

namespace spinbath {

namespace {

using C = std::complex<double>;

constexpr int kMaterializeDim = 128;

// product basis: site 0 = qubit (most significant), bath sites 1..n.
// bit 0 = spin up (m = +1/2), so index 0 is the all-up state.
double site_m(int idx, int site, int n_sites) {
    int bit = (idx >> (n_sites - 1 - site)) & 1;
    return bit == 0 ? 0.5 : -0.5;
}

int toggle(int idx, int site, int n_sites) {
    return idx ^ (1 << (n_sites - 1 - site));
}

Eigen::MatrixXcd build_local_matrix(const std::vector<double>& couplings,
                                    const Eigen::Vector3d& field) {
    const int n_bath = static_cast<int>(couplings.size());
    const int n_sites = n_bath + 1;
    const int dim = 1 << n_sites;
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
    for (int idx = 0; idx < dim; ++idx) {
        const double m0 = site_m(idx, 0, n_sites);
        double diag = field.z() * m0;
        for (int i = 0; i < n_bath; ++i) {
            const double mi = site_m(idx, i + 1, n_sites);
            diag += couplings[static_cast<size_t>(i)] * m0 * mi;
            if (m0 != mi) {  // flip-flop (S0+ Si- + S0- Si+)/2
                const int jdx = toggle(toggle(idx, 0, n_sites), i + 1, n_sites);
                h(jdx, idx) += couplings[static_cast<size_t>(i)] / 2.0;
            }
        }
        h(idx, idx) += diag;
        if (field.x() != 0 || field.y() != 0) {
            const int jdx = toggle(idx, 0, n_sites);
            // <up|H|down> = (Bx - iBy)/2 on the qubit
            if (m0 < 0)
                h(jdx, idx) += C(field.x(), -field.y()) / 2.0;
            else
                h(jdx, idx) += C(field.x(), field.y()) / 2.0;
        }
    }
    return h;
}

// sum over bath sites of a single-spin cartesian component
Eigen::MatrixXcd bath_spin_component(int n_bath, int axis) {
    const int n_sites = n_bath + 1;
    const int dim = 1 << n_sites;
    Eigen::MatrixXcd op = Eigen::MatrixXcd::Zero(dim, dim);
    for (int idx = 0; idx < dim; ++idx) {
        for (int i = 1; i <= n_bath; ++i) {
            const double mi = site_m(idx, i, n_sites);
            if (axis == 2) {
                op(idx, idx) += mi;
            } else {
                const int jdx = toggle(idx, i, n_sites);
                if (axis == 0) {
                    op(jdx, idx) += 0.5;
                } else {
                    // <down|Sy|up> = i/2
                    op(jdx, idx) += mi > 0 ? C(0, 0.5) : C(0, -0.5);
                }
            }
        }
    }
    return op;
}

Eigen::MatrixXcd qubit_component(int bath_dim, int axis) {
    SpinMatrices q = spin_matrices(1);
    const Eigen::MatrixXcd& s = axis == 0 ? q.x : axis == 1 ? q.y : q.z;
    return kron(2.0 * s, Eigen::MatrixXcd::Identity(bath_dim, bath_dim));
}

// sum of a cartesian spin component over every site, qubit included
Eigen::MatrixXcd total_spin_component(int n_sites, int axis) {
    const int dim = 1 << n_sites;
    Eigen::MatrixXcd op = Eigen::MatrixXcd::Zero(dim, dim);
    for (int idx = 0; idx < dim; ++idx) {
        for (int site = 0; site < n_sites; ++site) {
            const double m = site_m(idx, site, n_sites);
            if (axis == 2) {
                op(idx, idx) += m;
            } else {
                const int jdx = toggle(idx, site, n_sites);
                if (axis == 0)
                    op(jdx, idx) += 0.5;
                else
                    op(jdx, idx) += m > 0 ? C(0, 0.5) : C(0, -0.5);
            }
        }
    }
    return op;
}

// the isotropic coupling must conserve total spin and its z component;
// verified where the dense commutators stay desk-cheap
void check_global_symmetries(const Eigen::MatrixXcd& h, int n_sites) {
    if (h.rows() > 512) return;
    Eigen::MatrixXcd sx = total_spin_component(n_sites, 0);
    Eigen::MatrixXcd sy = total_spin_component(n_sites, 1);
    Eigen::MatrixXcd sz = total_spin_component(n_sites, 2);
    Eigen::MatrixXcd tot2 = sx * sx + sy * sy + sz * sz;
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    if ((h * tot2 - tot2 * h).cwiseAbs().maxCoeff() > 1e-12 * scale * tot2.rows())
        throw std::logic_error("global hamiltonian does not conserve total spin");
    if ((h * sz - sz * h).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::logic_error("global hamiltonian does not conserve total z spin");
}

struct Reducer {
    Eigen::VectorXd eigvals;
    Eigen::MatrixXcd rho_tilde;                 // rho0 in the eigenbasis
    std::vector<Eigen::MatrixXcd> freq_kernels; // rho~ .* O~^T per observable
    std::vector<Eigen::MatrixXcd> observables;  // original basis (materialize path)
    Eigen::MatrixXcd eigvecs;
    bool materialize = false;
    double energy0 = 0;
};

Reducer prepare(const Eigen::MatrixXcd& h, const Eigen::MatrixXcd& rho0,
                std::vector<Eigen::MatrixXcd> observables) {
    Reducer r;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("hamiltonian eigendecomposition failed");
    r.eigvals = es.eigenvalues();
    r.eigvecs = es.eigenvectors();
    r.rho_tilde = r.eigvecs.adjoint() * rho0 * r.eigvecs;
    r.energy0 = (r.rho_tilde.diagonal().real().array() * r.eigvals.array()).sum();
    r.materialize = h.rows() <= kMaterializeDim;
    if (r.materialize) {
        r.observables = std::move(observables);
    } else {
        for (const auto& o : observables) {
            Eigen::MatrixXcd ot = r.eigvecs.adjoint() * o * r.eigvecs;
            r.freq_kernels.push_back(r.rho_tilde.cwiseProduct(ot.transpose()));
        }
    }
    return r;
}

void check_state_health(const Eigen::MatrixXcd& rho, double energy0,
                        const Eigen::MatrixXcd& h, bool with_eigs) {
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
        throw std::runtime_error("evolved state lost hermiticity");
    if (std::abs(rho.trace().real() - 1.0) > 1e-10)
        throw std::runtime_error("evolved state lost unit trace");
    const double e = (rho * h).trace().real();
    if (std::abs(e - energy0) > 1e-9 * std::max(1.0, std::abs(energy0)))
        throw std::runtime_error("energy drifted along the evolution");
    if (with_eigs) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-9)
            throw std::runtime_error("evolved state lost positivity");
    }
}

OracleTrajectory reduce_over_grid(const Eigen::MatrixXcd& h, Reducer& r,
                                  std::span<const double> grid,
                                  size_t n_qubit_obs, bool with_bath_spin) {
    OracleTrajectory out;
    out.times.assign(grid.begin(), grid.end());
    const Eigen::Index dim = h.rows();
    const size_t eig_check_stride = std::max<size_t>(1, grid.size() / 8);
    for (size_t k = 0; k < grid.size(); ++k) {
        const double t = grid[k];
        Eigen::Vector3d pq = Eigen::Vector3d::Zero();
        Eigen::Vector3d bs = Eigen::Vector3d::Zero();
        Eigen::VectorXcd phase(dim);
        for (Eigen::Index a = 0; a < dim; ++a)
            phase(a) = std::exp(C(0, -r.eigvals(a) * t));
        // e^{-i(Ea - Eb)t} as an outer product
        Eigen::MatrixXcd phases = phase * phase.adjoint();
        if (r.materialize) {
            Eigen::MatrixXcd rho_t =
                r.eigvecs * r.rho_tilde.cwiseProduct(phases) * r.eigvecs.adjoint();
            check_state_health(rho_t, r.energy0, h, k % eig_check_stride == 0);
            for (size_t o = 0; o < r.observables.size(); ++o) {
                const double v = (rho_t * r.observables[o]).trace().real();
                if (o < n_qubit_obs)
                    pq(static_cast<int>(o)) = v;
                else
                    bs(static_cast<int>(o - n_qubit_obs)) = v;
            }
        } else {
            // tr(rho(t) O) = sum_ab e^{-i(Ea - Eb)t} rho~_ab O~_ba
            for (size_t o = 0; o < r.freq_kernels.size(); ++o) {
                const double v = phases.cwiseProduct(r.freq_kernels[o]).sum().real();
                if (o < n_qubit_obs)
                    pq(static_cast<int>(o)) = v;
                else
                    bs(static_cast<int>(o - n_qubit_obs)) = v;
            }
        }
        out.qubit_polarizations.push_back(pq);
        out.magnitudes.push_back(pq.norm());
        if (with_bath_spin) out.bath_spin.push_back(bs);
    }
    return out;
}

}  // namespace

void DenseState::validate() const {
    if (rho.rows() != rho.cols()) throw std::invalid_argument("state must be square");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("state is not hermitian");
    if (std::abs(rho.trace().real() - 1.0) > 1e-10 || std::abs(rho.trace().imag()) > 1e-10)
        throw std::invalid_argument("state trace is not 1");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-9)
        throw std::invalid_argument("state has a negative eigenvalue");
}

static Eigen::Matrix2cd bloch_state(const Eigen::Vector3d& p) {
    if (p.norm() > 1.0 + 1e-9)
        throw std::invalid_argument("polarization exceeds unit norm");
    Eigen::Matrix2cd rho;
    rho << 1.0 + p.z(), C(p.x(), -p.y()), C(p.x(), p.y()), 1.0 - p.z();
    return rho / 2.0;
}

DenseState product_state(const Eigen::Vector3d& qubit_p0,
                         const std::vector<Eigen::Vector3d>& site_pols) {
    Eigen::MatrixXcd rho = bloch_state(qubit_p0);
    for (const auto& p : site_pols) rho = kron(rho, bloch_state(p));
    return {rho};
}

DenseState qubit_with_mixed_bath(const Eigen::Vector3d& qubit_p0, int n_spins) {
    if (n_spins < 1) throw std::invalid_argument("n_spins must be >= 1");
    const int bd = 1 << n_spins;
    Eigen::MatrixXcd rho = kron(bloch_state(qubit_p0),
                                Eigen::MatrixXcd::Identity(bd, bd) / bd);
    return {rho};
}

DenseState qubit_with_sector(const Eigen::Vector3d& qubit_p0,
                             const Eigen::MatrixXcd& rho_sector) {
    return {kron(bloch_state(qubit_p0), rho_sector)};
}

HamiltonianSpec HamiltonianSpec::build(const HamiltonianKind& kind,
                                       int max_bath_spins) {
    if (std::holds_alternative<GlobalHeisenberg>(kind)) {
        const auto& g = std::get<GlobalHeisenberg>(kind);
        if (g.n_spins < 1) throw std::invalid_argument("n_spins must be >= 1");
        if (g.n_spins > max_bath_spins)
            throw ResourceLimitError("global hamiltonian: n_spins exceeds cap of " +
                                     std::to_string(max_bath_spins));
        std::vector<double> j(static_cast<size_t>(g.n_spins), g.coupling);
        Eigen::MatrixXcd h = build_local_matrix(j, Eigen::Vector3d::Zero());
        check_global_symmetries(h, g.n_spins + 1);
        return {kind, std::move(h)};
    }
    if (std::holds_alternative<LocalHamiltonian>(kind)) {
        const auto& l = std::get<LocalHamiltonian>(kind);
        if (l.couplings.empty()) throw std::invalid_argument("no couplings given");
        if (static_cast<int>(l.couplings.size()) > max_bath_spins)
            throw ResourceLimitError("local hamiltonian: n_spins exceeds cap of " +
                                     std::to_string(max_bath_spins));
        return {kind, build_local_matrix(l.couplings, l.field)};
    }
    const auto& ir = std::get<IrrepHamiltonian>(kind);
    if (ir.two_spin < 0 || ir.two_spin > 100)
        throw ResourceLimitError("irrep hamiltonian: I must lie in [0, 50]");
    return {kind, ir.coupling * qubit_sector_coupling(ir.two_spin)};
}

OracleTrajectory evolve_reduced(const HamiltonianSpec& h, const DenseState& rho0,
                                std::span<const double> grid,
                                bool with_bath_spin) {
    if (grid.empty()) throw std::invalid_argument("time grid is empty");
    for (size_t k = 1; k < grid.size(); ++k)
        if (!(grid[k] > grid[k - 1]))
            throw std::invalid_argument("time grid must increase monotonically");
    if (rho0.dim() != h.dim())
        throw std::invalid_argument("state dimension does not match hamiltonian");

    std::vector<Eigen::MatrixXcd> obs;
    const int bd = h.bath_dim();
    for (int a = 0; a < 3; ++a) obs.push_back(qubit_component(bd, a));
    if (with_bath_spin) {
        if (std::holds_alternative<IrrepHamiltonian>(h.kind())) {
            const auto& ir = std::get<IrrepHamiltonian>(h.kind());
            SpinMatrices s = spin_matrices(ir.two_spin);
            Eigen::MatrixXcd id2 = Eigen::MatrixXcd::Identity(2, 2);
            obs.push_back(kron(id2, s.x));
            obs.push_back(kron(id2, s.y));
            obs.push_back(kron(id2, s.z));
        } else {
            int n_bath = 0;
            while ((1 << n_bath) < bd) ++n_bath;
            for (int a = 0; a < 3; ++a) obs.push_back(bath_spin_component(n_bath, a));
        }
    }
    Reducer r = prepare(h.matrix(), rho0.rho, std::move(obs));
    return reduce_over_grid(h.matrix(), r, grid, 3, with_bath_spin);
}

OracleTrajectory irrep_evolve(double coupling, const Eigen::MatrixXcd& rho_sector,
                              const Eigen::Vector3d& p0,
                              std::span<const double> grid, bool with_bath_spin) {
    const int dim = static_cast<int>(rho_sector.rows());
    if (dim < 1 || rho_sector.cols() != dim)
        throw std::invalid_argument("sector state must be square");
    if ((rho_sector - rho_sector.adjoint()).cwiseAbs().maxCoeff() > 1e-10 ||
        std::abs(rho_sector.trace().real() - 1.0) > 1e-10)
        throw std::invalid_argument("sector state is not a density matrix");
    HamiltonianSpec h =
        HamiltonianSpec::build(IrrepHamiltonian{coupling, dim - 1});
    DenseState rho0 = qubit_with_sector(p0, rho_sector);
    return evolve_reduced(h, rho0, grid, with_bath_spin);
}

DenseState partial_trace(const DenseState& rho, int dim_first, int dim_second,
                         Keep keep) {
    if (dim_first * dim_second != rho.dim())
        throw std::invalid_argument("dimension does not factorize as requested");
    if (keep == Keep::first) {
        Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim_first, dim_first);
        for (int i = 0; i < dim_first; ++i)
            for (int j = 0; j < dim_first; ++j)
                for (int k = 0; k < dim_second; ++k)
                    out(i, j) += rho.rho(i * dim_second + k, j * dim_second + k);
        return {out};
    }
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim_second, dim_second);
    for (int i = 0; i < dim_second; ++i)
        for (int j = 0; j < dim_second; ++j)
            for (int k = 0; k < dim_first; ++k)
                out(i, j) += rho.rho(k * dim_second + i, k * dim_second + j);
    return {out};
}

double concurrence(const Eigen::MatrixXcd& rho) {
    if (rho.rows() != 4 || rho.cols() != 4)
        throw std::invalid_argument("concurrence needs a two-qubit state");
    Eigen::Matrix4cd yy = Eigen::Matrix4cd::Zero();
    yy(0, 3) = -1;
    yy(1, 2) = 1;
    yy(2, 1) = 1;
    yy(3, 0) = -1;
    Eigen::Matrix4cd r = rho * yy * rho.conjugate() * yy;
    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(r);
    Eigen::Vector4d mu = es.eigenvalues().real().cwiseMax(0.0).cwiseSqrt();
    std::sort(mu.data(), mu.data() + 4, std::greater<double>());
    const double c = mu(0) - mu(1) - mu(2) - mu(3);
    return std::max(0.0, c);
}

}  // namespace spinbath
