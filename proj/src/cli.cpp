#include "spinbath/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <random>

#include "spinbath/bath_json.hpp"
#include "spinbath/closed_form.hpp"
#include "spinbath/ed_oracle.hpp"
#include "spinbath/errors.hpp"
#include "spinbath/master_eq.hpp"

namespace spinbath::cli {

namespace {

using nlohmann::json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<double> linspace(double t_max, int n) {
    std::vector<double> out;
    if (n == 1) {
        out.push_back(0.0);
        return out;
    }
    out.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) out.push_back(t_max * i / (n - 1));
    return out;
}

Eigen::Vector3d vec_from_json(const json& j) {
    if (!j.is_array() || j.size() != 3)
        throw std::invalid_argument("expected a 3-vector");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

// resolved-config header plus rows, written atomically
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<json>> rows;
};

void write_output(const OutputSpec& out, const json& resolved, const Table& table) {
    namespace fs = std::filesystem;
    const fs::path path(out.path);
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open output path " + out.path);
        if (out.format == "json") {
            json doc;
            doc["config"] = resolved;
            doc["columns"] = table.columns;
            doc["rows"] = table.rows;
            f << doc.dump(2) << "\n";
        } else {
            f << "# config = " << resolved.dump() << "\n";
            for (size_t c = 0; c < table.columns.size(); ++c)
                f << table.columns[c] << (c + 1 < table.columns.size() ? "," : "\n");
            for (const auto& row : table.rows) {
                for (size_t c = 0; c < row.size(); ++c) {
                    if (row[c].is_number_float())
                        f << fmt(row[c].get<double>());
                    else if (row[c].is_string())
                        f << row[c].get<std::string>();
                    else
                        f << row[c].dump();
                    f << (c + 1 < row.size() ? "," : "\n");
                }
            }
        }
    }
    fs::rename(tmp, path);
}

json vec_to_json(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }

BathSpec gaussian_preset(int n, double alpha, double eps, bool with_vector,
                         bool with_tensor) {
    SectorWeightTable w = gaussian_weights(n, alpha, eps);
    std::map<int, SectorPolarization> pols;
    for (const auto& e : w.entries()) {
        if (e.two_spin < 1) continue;
        SectorPolarization p;
        p.two_spin = e.two_spin;
        if (with_vector) p.vector_pol = Eigen::Vector3d(0, 0, 1);
        if (with_tensor && e.two_spin >= 2) {
            p.tensor_pol = Eigen::Vector3d(-1, -1, 2).asDiagonal();
            p.tensor_pol /= 3.0;
        }
        if (with_vector || (with_tensor && e.two_spin >= 2))
            pols.emplace(e.two_spin, p);
    }
    return BathSpec(std::move(w), std::move(pols));
}

}  // namespace

std::pair<BathSpec, Eigen::Vector3d> resolve_preset(const std::string& name,
                                                    int n_spins, double alpha,
                                                    double truncation_eps) {
    const Eigen::Vector3d zhat(0, 0, 1);
    const Eigen::Vector3d tilted = Eigen::Vector3d(1, 0, 1).normalized();
    if (name == "unpolarized")
        return {BathSpec(maximally_mixed_weights(n_spins)), zhat};
    if (name == "fully_polarized")
        return {fully_polarized_spec(n_spins, zhat), -zhat};
    if (name == "vector_only") {
        SectorPolarization pol;
        pol.two_spin = n_spins;
        pol.vector_pol =
            Eigen::Vector3d(0, 0, 3.0 * n_spins / (n_spins + 2.0));
        SectorWeightTable w(n_spins, {{n_spins, 1.0}});
        return {BathSpec(std::move(w), {{n_spins, pol}}), -zhat};
    }
    if (name == "fig3")
        return {gaussian_preset(n_spins, alpha, truncation_eps, false, false), zhat};
    if (name == "fig5_i")
        return {gaussian_preset(n_spins, alpha, truncation_eps, false, false), tilted};
    if (name == "fig5_ii")
        return {gaussian_preset(n_spins, alpha, truncation_eps, false, true), tilted};
    if (name == "fig5_iii")
        return {gaussian_preset(n_spins, alpha, truncation_eps, true, false), tilted};
    if (name == "fig5_iv")
        return {gaussian_preset(n_spins, alpha, truncation_eps, true, true), tilted};
    if (name == "fig6")
        return {gaussian_preset(n_spins, alpha, truncation_eps, true, false), -zhat};
    throw std::invalid_argument("unknown preset '" + name + "'");
}

RunConfig config_from_json(const json& j) {
    RunConfig cfg;
    if (j.contains("scenario")) cfg.scenario = j.at("scenario").get<std::string>();
    if (j.contains("bath")) {
        const auto& b = j.at("bath");
        if (b.is_string())
            cfg.preset = b.get<std::string>();
        else if (b.is_object() && b.contains("preset"))
            cfg.preset = b.at("preset").get<std::string>();
        else
            cfg.bath = bath_spec_from_json(b);
    }
    if (j.contains("preset")) cfg.preset = j.at("preset").get<std::string>();
    if (j.contains("n_spins")) cfg.n_spins = j.at("n_spins").get<int>();
    if (j.contains("alpha")) cfg.alpha = j.at("alpha").get<double>();
    if (j.contains("truncation_eps"))
        cfg.truncation_eps = j.at("truncation_eps").get<double>();
    if (j.contains("qubit_p0")) cfg.qubit_p0 = vec_from_json(j.at("qubit_p0"));
    if (j.contains("bath_p0")) cfg.bath_p0 = vec_from_json(j.at("bath_p0"));
    if (j.contains("coupling")) cfg.coupling = j.at("coupling").get<double>();
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        if (g.contains("t_max")) cfg.grid.t_max = g.at("t_max").get<double>();
        if (g.contains("points")) cfg.grid.n_points = g.at("points").get<int>();
    }
    if (j.contains("output")) {
        const auto& o = j.at("output");
        if (o.contains("path")) cfg.output.path = o.at("path").get<std::string>();
        if (o.contains("format")) cfg.output.format = o.at("format").get<std::string>();
    }
    if (j.contains("local")) {
        const auto& l = j.at("local");
        LocalCouplingModel m;
        for (const auto& c : l.at("couplings")) m.couplings.push_back(c.get<double>());
        if (l.contains("site_polarizations"))
            for (const auto& p : l.at("site_polarizations"))
                m.site_polarizations.push_back(vec_from_json(p));
        else
            m.site_polarizations.assign(m.couplings.size(), Eigen::Vector3d::Zero());
        if (l.contains("field")) m.external_field = vec_from_json(l.at("field"));
        cfg.local = std::move(m);
    }
    if (j.contains("compare")) {
        const auto& c = j.at("compare");
        if (c.contains("mode")) cfg.compare.mode = c.at("mode").get<std::string>();
        if (c.contains("tolerance"))
            cfg.compare.tolerance = c.at("tolerance").get<double>();
        if (c.contains("n_random_specs"))
            cfg.compare.n_random_specs = c.at("n_random_specs").get<int>();
    }
    if (j.contains("oracle")) {
        const auto& o = j.at("oracle");
        if (o.contains("kind")) cfg.oracle.kind = o.at("kind").get<std::string>();
        if (o.contains("two_spin")) cfg.oracle.two_spin = o.at("two_spin").get<int>();
        if (o.contains("max_bath_spins"))
            cfg.oracle.max_bath_spins = o.at("max_bath_spins").get<int>();
    }
    if (j.contains("tau_presets"))
        for (const auto& p : j.at("tau_presets"))
            cfg.tau_presets.push_back(p.get<std::string>());
    if (j.contains("seed")) cfg.seed = j.at("seed").get<unsigned long>();
    return cfg;
}

namespace {

struct Resolved {
    BathSpec bath;
    Eigen::Vector3d p0;
    std::vector<double> grid;
    json header;
};

Resolved resolve(const RunConfig& cfg) {
    std::optional<BathSpec> bath = cfg.bath;
    Eigen::Vector3d p0_default(0, 0, 1);
    if (!bath) {
        auto [spec, p0] =
            resolve_preset(cfg.preset, cfg.n_spins, cfg.alpha, cfg.truncation_eps);
        bath = std::move(spec);
        p0_default = p0;
    }
    Eigen::Vector3d p0 = cfg.qubit_p0.value_or(p0_default);
    if (cfg.grid.n_points < 1)
        throw std::invalid_argument("grid needs at least one point");
    if (!(cfg.coupling > 0)) throw std::invalid_argument("coupling must be > 0");
    if (!(cfg.grid.t_max >= 0)) throw std::invalid_argument("t_max must be >= 0");

    Resolved r{std::move(*bath), p0, linspace(cfg.grid.t_max, cfg.grid.n_points), {}};
    r.header["scenario"] = cfg.scenario;
    r.header["coupling"] = cfg.coupling;
    r.header["qubit_p0"] = vec_to_json(p0);
    r.header["grid"] = {{"t_max", cfg.grid.t_max}, {"points", cfg.grid.n_points}};
    r.header["bath"] = to_json(r.bath);
    if (!cfg.bath) r.header["preset"] = cfg.preset;
    r.header["seed"] = cfg.seed;
    return r;
}

int scenario_two_spin(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    Eigen::Vector3d pa0 = cfg.qubit_p0.value_or(Eigen::Vector3d(1, 0, 0));
    Eigen::Vector3d pb0 = cfg.bath_p0;
    if (pb0.norm() == 0)
        pb0 = Eigen::Vector3d(-1, 0, 1) / (2.0 * std::sqrt(2.0));
    const double k = cfg.coupling;
    auto grid = linspace(cfg.grid.t_max, cfg.grid.n_points);

    // exact 4-dim evolution for the entanglement column
    HamiltonianSpec h =
        HamiltonianSpec::build(LocalHamiltonian{{k}, Eigen::Vector3d::Zero()});
    DenseState rho0 = product_state(pa0, {pb0});
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.matrix());

    json header;
    header["scenario"] = cfg.scenario;
    header["coupling"] = k;
    header["qubit_p0"] = vec_to_json(pa0);
    header["bath_p0"] = vec_to_json(pb0);
    header["grid"] = {{"t_max", cfg.grid.t_max}, {"points", cfg.grid.n_points}};

    Table table;
    table.columns = {"t",     "P_Ax", "P_Ay",   "P_Az",  "P_Amag", "P_Bx",
                     "P_By",  "P_Bz", "P_Bmag", "C",     "F_pure", "F_all"};
    for (double t : grid) {
        auto [pa, pb] = two_spin_polarization(pa0, pb0, k, t);
        Eigen::VectorXcd phase(4);
        for (int a = 0; a < 4; ++a)
            phase(a) = std::exp(std::complex<double>(0, -es.eigenvalues()(a) * t));
        Eigen::MatrixXcd rho_t =
            es.eigenvectors() *
            (es.eigenvectors().adjoint() * rho0.rho * es.eigenvectors())
                .cwiseProduct((phase * phase.adjoint()).eval()) *
            es.eigenvectors().adjoint();
        const double c = concurrence(rho_t);
        const double f_pure =
            average_fidelity(FidelityKind::two_spin_pure, nullptr, k, t);
        const double f_all =
            average_fidelity(FidelityKind::two_spin_all, nullptr, k, t);
        table.rows.push_back({t, pa.x(), pa.y(), pa.z(), pa.norm(), pb.x(), pb.y(),
                              pb.z(), pb.norm(), c, f_pure, f_all});
    }
    write_output(cfg.output, header, table);
    out << "wrote " << cfg.output.path << " (" << table.rows.size() << " rows)\n";
    return kExitOk;
}

int scenario_closed_form(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    Resolved r = resolve(cfg);
    auto report = validate_bath_spec(r.bath);
    if (!report.clean()) {
        for (const auto& v : report.violations)
            err << "bath violation: " << v.what << ", sector I = " << v.two_spin / 2.0
                << " (magnitude " << v.magnitude << ")\n";
        return kExitConfig;
    }
    Trajectory tr = trajectory(r.bath, cfg.coupling, r.p0, r.grid);
    Table table;
    table.columns = {"t", "P_x", "P_y", "P_z", "P_mag"};
    const bool with_bath = !tr.bath_polarization.empty();
    if (with_bath) {
        table.columns.insert(table.columns.end(), {"P_B_x", "P_B_y", "P_B_z"});
    }
    for (size_t i = 0; i < tr.times.size(); ++i) {
        std::vector<json> row = {tr.times[i], tr.polarizations[i].x(),
                                 tr.polarizations[i].y(), tr.polarizations[i].z(),
                                 tr.magnitudes[i]};
        if (with_bath) {
            row.push_back(tr.bath_polarization[i].x());
            row.push_back(tr.bath_polarization[i].y());
            row.push_back(tr.bath_polarization[i].z());
        }
        table.rows.push_back(std::move(row));
    }
    write_output(cfg.output, r.header, table);
    out << "wrote " << cfg.output.path << " (" << table.rows.size() << " rows)\n";
    return kExitOk;
}

int scenario_perturbative(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (!cfg.local) {
        err << "perturbative scenario needs a local coupling model\n";
        return kExitConfig;
    }
    validate_model(*cfg.local);
    Eigen::Vector3d p0 = cfg.qubit_p0.value_or(Eigen::Vector3d(0, 0, 1));
    auto grid = linspace(cfg.grid.t_max, cfg.grid.n_points);
    json header;
    header["scenario"] = cfg.scenario;
    header["qubit_p0"] = vec_to_json(p0);
    header["couplings"] = cfg.local->couplings;
    header["field"] = vec_to_json(cfg.local->external_field);
    Table table;
    table.columns = {"t", "P_x", "P_y", "P_z", "P_mag"};
    for (double t : grid) {
        Eigen::Vector3d p = second_order_polarization(*cfg.local, p0, t);
        table.rows.push_back({t, p.x(), p.y(), p.z(), p.norm()});
    }
    write_output(cfg.output, header, table);
    out << "wrote " << cfg.output.path << " (" << table.rows.size() << " rows)\n";
    return kExitOk;
}

int scenario_master_eq(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    Resolved r = resolve(cfg);
    auto report = validate_bath_spec(r.bath);
    if (!report.clean()) {
        for (const auto& v : report.violations)
            err << "bath violation: " << v.what << ", sector I = " << v.two_spin / 2.0
                << "\n";
        return kExitConfig;
    }
    constexpr double singular_tol = 1e-10;
    Table table;
    table.columns = {"t",       "B_eff_x", "B_eff_y", "B_eff_z", "gamma_1",
                     "gamma_2", "gamma_3", "det_M",   "singular_flag"};
    const double qnan = std::numeric_limits<double>::quiet_NaN();
    int n_singular = 0;
    for (double t : r.grid) {
        EvolutionCoefficients c = evolution_coefficients(r.bath, cfg.coupling, t);
        auto [m, m_dot] = m_matrix_and_derivative(c);
        const double det = m.determinant();
        if (std::abs(det) < singular_tol) {
            // flagged, not fatal: trajectory-level extraction skips the point
            table.rows.push_back({t, qnan, qnan, qnan, qnan, qnan, qnan, det, 1});
            ++n_singular;
            continue;
        }
        DMatrixResult dm = d_matrix(m, m_dot, singular_tol, t);
        Eigen::Vector3d rvec = c.dg - dm.d * c.g;
        auto [gamma, b_eff] = gamma_and_field(dm.d, rvec);
        DecayRates rates = decay_rates(dm.d);
        table.rows.push_back({t, b_eff.x(), b_eff.y(), b_eff.z(), rates.gamma(0),
                              rates.gamma(1), rates.gamma(2), det, 0});
    }
    write_output(cfg.output, r.header, table);
    out << "wrote " << cfg.output.path << " (" << table.rows.size() << " rows, "
        << n_singular << " singular)\n";
    return kExitOk;
}

// initial dense state for oracle/compare runs; only bath contents the product
// space can represent directly
DenseState oracle_initial_state(const RunConfig& cfg, const Resolved& r) {
    if (cfg.preset == "unpolarized" && !cfg.bath)
        return qubit_with_mixed_bath(r.p0, r.bath.n_spins());
    if (cfg.preset == "fully_polarized" && !cfg.bath) {
        std::vector<Eigen::Vector3d> ups(static_cast<size_t>(r.bath.n_spins()),
                                         Eigen::Vector3d(0, 0, 1));
        return product_state(r.p0, ups);
    }
    throw std::invalid_argument(
        "product-space oracle supports the unpolarized and fully_polarized "
        "presets; use the irrep kind for sector-polarized baths");
}

int scenario_oracle(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    auto grid = linspace(cfg.grid.t_max, cfg.grid.n_points);
    Eigen::Vector3d p0;
    OracleTrajectory tr;
    json header;
    header["scenario"] = cfg.scenario;
    header["coupling"] = cfg.coupling;
    header["oracle_kind"] = cfg.oracle.kind;
    if (cfg.oracle.kind == "global") {
        Resolved r = resolve(cfg);
        p0 = r.p0;
        DenseState rho0 = oracle_initial_state(cfg, r);
        HamiltonianSpec h = HamiltonianSpec::build(
            GlobalHeisenberg{cfg.coupling, r.bath.n_spins()}, cfg.oracle.max_bath_spins);
        tr = evolve_reduced(h, rho0, grid, true);
        header["n_spins"] = r.bath.n_spins();
    } else if (cfg.oracle.kind == "local") {
        if (!cfg.local) {
            err << "local oracle needs a local coupling model\n";
            return kExitConfig;
        }
        validate_model(*cfg.local);
        p0 = cfg.qubit_p0.value_or(Eigen::Vector3d(0, 0, 1));
        HamiltonianSpec h = HamiltonianSpec::build(
            LocalHamiltonian{cfg.local->couplings, cfg.local->external_field},
            cfg.oracle.max_bath_spins);
        DenseState rho0 = product_state(p0, cfg.local->site_polarizations);
        tr = evolve_reduced(h, rho0, grid, true);
        header["couplings"] = cfg.local->couplings;
        header["field"] = vec_to_json(cfg.local->external_field);
    } else if (cfg.oracle.kind == "irrep") {
        Resolved r = resolve(cfg);
        p0 = r.p0;
        SectorPolarization pol = r.bath.polarization(cfg.oracle.two_spin);
        Eigen::MatrixXcd rho_sector = sector_density_matrix(pol);
        tr = irrep_evolve(cfg.coupling, rho_sector, p0, grid, true);
        header["two_spin"] = cfg.oracle.two_spin;
    } else {
        err << "unknown oracle kind '" << cfg.oracle.kind << "'\n";
        return kExitConfig;
    }
    header["qubit_p0"] = vec_to_json(p0);
    Table table;
    table.columns = {"t", "P_x", "P_y", "P_z", "P_mag", "IB_x", "IB_y", "IB_z"};
    for (size_t i = 0; i < tr.times.size(); ++i)
        table.rows.push_back({tr.times[i], tr.qubit_polarizations[i].x(),
                              tr.qubit_polarizations[i].y(),
                              tr.qubit_polarizations[i].z(), tr.magnitudes[i],
                              tr.bath_spin[i].x(), tr.bath_spin[i].y(),
                              tr.bath_spin[i].z()});
    write_output(cfg.output, header, table);
    out << "wrote " << cfg.output.path << " (" << table.rows.size() << " rows)\n";
    return kExitOk;
}

// random sector polarization with a positive rank-2 truncation
SectorPolarization random_positive_pol(int two_spin, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::uniform_real_distribution<double> mag(0.0, 1.0);
    for (int attempt = 0; attempt < 256; ++attempt) {
        SectorPolarization pol;
        pol.two_spin = two_spin;
        if (two_spin >= 1) {
            Eigen::Vector3d dir(uni(rng), uni(rng), uni(rng));
            if (dir.norm() < 1e-6) continue;
            pol.vector_pol = dir.normalized() *
                             (0.8 * mag(rng) * std::min(1.0, vector_pol_bound(two_spin)));
        }
        if (two_spin >= 2) {
            Eigen::Matrix3d a;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) a(i, j) = uni(rng);
            Eigen::Matrix3d s = 0.5 * (a + a.transpose());
            s -= (s.trace() / 3.0) * Eigen::Matrix3d::Identity();
            if (s.norm() > 1e-9) pol.tensor_pol = s / s.norm() * (0.4 * mag(rng));
        }
        try {
            sector_density_matrix(pol);
            return pol;
        } catch (const NotAStateError&) {
            continue;
        }
    }
    throw std::runtime_error("could not sample a positive sector polarization");
}

int scenario_compare(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    auto grid = linspace(cfg.grid.t_max, cfg.grid.n_points);
    Table table;
    double max_dev = 0;
    json header;
    header["scenario"] = cfg.scenario;
    header["mode"] = cfg.compare.mode;
    header["coupling"] = cfg.coupling;
    header["seed"] = cfg.seed;

    if (cfg.compare.mode == "ed") {
        Resolved r = resolve(cfg);
        DenseState rho0 = oracle_initial_state(cfg, r);
        HamiltonianSpec h = HamiltonianSpec::build(
            GlobalHeisenberg{cfg.coupling, r.bath.n_spins()}, cfg.oracle.max_bath_spins);
        OracleTrajectory ed = evolve_reduced(h, rho0, grid, false);
        Trajectory cf = trajectory(r.bath, cfg.coupling, r.p0, grid);
        table.columns = {"t",   "P_x",      "P_y",      "P_z",
                         "P_x_oracle", "P_y_oracle", "P_z_oracle", "abs_dev"};
        for (size_t i = 0; i < grid.size(); ++i) {
            const double dev =
                (cf.polarizations[i] - ed.qubit_polarizations[i]).cwiseAbs().maxCoeff();
            max_dev = std::max(max_dev, dev);
            table.rows.push_back({grid[i], cf.polarizations[i].x(),
                                  cf.polarizations[i].y(), cf.polarizations[i].z(),
                                  ed.qubit_polarizations[i].x(),
                                  ed.qubit_polarizations[i].y(),
                                  ed.qubit_polarizations[i].z(), dev});
        }
        header["n_spins"] = r.bath.n_spins();
        header["preset"] = cfg.preset;
    } else if (cfg.compare.mode == "irrep") {
        // random sector mixtures checked against weight-mixed irrep evolutions
        std::mt19937_64 rng(cfg.seed);
        const int n = cfg.n_spins;
        std::vector<int> sectors;
        for (int ti : allowed_two_spins(n))
            if (ti <= 10) sectors.push_back(ti);
        std::uniform_real_distribution<double> uni(0.05, 1.0);
        table.columns = {"spec_index", "max_abs_dev"};
        for (int si = 0; si < cfg.compare.n_random_specs; ++si) {
            std::vector<SectorWeight> entries;
            double z = 0;
            for (int ti : sectors) {
                double w = uni(rng);
                entries.push_back({ti, w});
                z += w;
            }
            for (auto& e : entries) e.weight /= z;
            std::map<int, SectorPolarization> pols;
            for (int ti : sectors)
                if (ti >= 1) pols.emplace(ti, random_positive_pol(ti, rng));
            BathSpec spec(SectorWeightTable(n, entries), pols);

            Eigen::Vector3d p0 = cfg.qubit_p0.value_or(
                Eigen::Vector3d(0.3, -0.5, 0.7).normalized());
            Trajectory cf = trajectory(spec, cfg.coupling, p0, grid);
            std::vector<Eigen::Vector3d> mixed(grid.size(), Eigen::Vector3d::Zero());
            for (const auto& e : spec.weights().entries()) {
                Eigen::MatrixXcd rho_i =
                    sector_density_matrix(spec.polarization(e.two_spin));
                OracleTrajectory sub =
                    irrep_evolve(cfg.coupling, rho_i, p0, grid, false);
                for (size_t g = 0; g < grid.size(); ++g)
                    mixed[g] += e.weight * sub.qubit_polarizations[g];
            }
            double dev = 0;
            for (size_t g = 0; g < grid.size(); ++g)
                dev = std::max(dev,
                               (cf.polarizations[g] - mixed[g]).cwiseAbs().maxCoeff());
            max_dev = std::max(max_dev, dev);
            table.rows.push_back({si, dev});
        }
        header["n_spins"] = n;
        header["n_random_specs"] = cfg.compare.n_random_specs;
    } else {
        err << "unknown compare mode '" << cfg.compare.mode << "'\n";
        return kExitConfig;
    }

    write_output(cfg.output, header, table);
    const bool ok = max_dev <= cfg.compare.tolerance;
    out << "max_abs_deviation=" << fmt(max_dev) << " (tolerance "
        << fmt(cfg.compare.tolerance) << "): " << (ok ? "OK" : "FAIL") << "\n";
    if (!ok) {
        err << "oracle deviation exceeds tolerance\n";
        return kExitRuntime;
    }
    return kExitOk;
}

int scenario_tau_table(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    std::vector<std::string> presets = cfg.tau_presets;
    if (presets.empty())
        presets = {"unpolarized", "fully_polarized", "vector_only"};
    json header;
    header["scenario"] = cfg.scenario;
    header["coupling"] = cfg.coupling;
    header["n_spins"] = cfg.n_spins;
    Table table;
    table.columns = {"preset", "n",      "k",      "tau",
                     "term_wf", "term_h", "term_g", "term_tensor"};
    for (const auto& name : presets) {
        auto [spec, p0_default] =
            resolve_preset(name, cfg.n_spins, cfg.alpha, cfg.truncation_eps);
        Eigen::Vector3d p0 = cfg.qubit_p0.value_or(p0_default);
        GaussianTau gt = gaussian_tau(spec, cfg.coupling, p0);
        table.rows.push_back({name, cfg.n_spins, cfg.coupling, gt.tau, gt.w_f_term,
                              gt.h_term, gt.g_term, gt.tensor_term});
        out << name << ": tau = " << fmt(gt.tau) << "\n";
    }
    (void)err;
    write_output(cfg.output, header, table);
    return kExitOk;
}

}  // namespace

int execute(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        RunConfig run = cfg;
        if (run.output.path.empty())
            run.output.path = "spinbath_out." + run.output.format;
        if (run.output.format != "csv" && run.output.format != "json") {
            err << "unknown output format '" << run.output.format << "'\n";
            return kExitConfig;
        }
        if (run.scenario == "two_spin") return scenario_two_spin(run, out, err);
        if (run.scenario == "closed_form") return scenario_closed_form(run, out, err);
        if (run.scenario == "perturbative")
            return scenario_perturbative(run, out, err);
        if (run.scenario == "master_eq") return scenario_master_eq(run, out, err);
        if (run.scenario == "oracle") return scenario_oracle(run, out, err);
        if (run.scenario == "compare") return scenario_compare(run, out, err);
        if (run.scenario == "tau_table") return scenario_tau_table(run, out, err);
        err << "unknown scenario '" << run.scenario << "'\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        err << "invalid configuration: " << e.what() << "\n";
        return kExitConfig;
    } catch (const nlohmann::json::exception& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "runtime error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
    CLI::App app{"central-spin decoherence simulator"};
    std::string config_path, scenario, preset, out_path, format;
    int n = -1, points = -1;
    double k = -1, tmax = -1;
    long long seed = -1;
    app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--scenario", scenario,
                   "two_spin|closed_form|perturbative|master_eq|oracle|compare|tau_table");
    app.add_option("--preset", preset, "bath preset name");
    app.add_option("--n", n, "number of bath spins");
    app.add_option("--k", k, "coupling strength");
    app.add_option("--tmax", tmax, "time horizon (units 1/K)");
    app.add_option("--points", points, "number of grid points");
    app.add_option("--out", out_path, "output file path");
    app.add_option("--format", format, "csv|json");
    app.add_option("--seed", seed, "seed for randomized scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "argument error: " << e.what() << "\n";
        return kExitConfig;
    }

    RunConfig cfg;
    if (!config_path.empty()) {
        std::ifstream f(config_path);
        if (!f) {
            err << "cannot open config file " << config_path << "\n";
            return kExitConfig;
        }
        try {
            nlohmann::json j = nlohmann::json::parse(f);
            cfg = config_from_json(j);
        } catch (const std::exception& e) {
            err << "config error: " << e.what() << "\n";
            return kExitConfig;
        }
    }
    if (!scenario.empty()) cfg.scenario = scenario;
    if (!preset.empty()) {
        cfg.preset = preset;
        cfg.bath.reset();
    }
    if (n > 0) cfg.n_spins = n;
    if (k > 0) cfg.coupling = k;
    if (tmax >= 0) cfg.grid.t_max = tmax;
    if (points > 0) cfg.grid.n_points = points;
    if (!out_path.empty()) cfg.output.path = out_path;
    if (!format.empty()) cfg.output.format = format;
    if (seed >= 0) cfg.seed = static_cast<unsigned long>(seed);
    return execute(cfg, out, err);
}

}  // namespace spinbath::cli
