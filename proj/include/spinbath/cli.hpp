#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "spinbath/bath_model.hpp"
#include "spinbath/perturbative.hpp"

namespace spinbath::cli {

// exit codes: 0 success, 2 config/validation failure, 3 runtime error
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

struct GridSpec {
    double t_max = 10.0;
    int n_points = 200;
};

struct OutputSpec {
    std::string path;
    std::string format = "csv";  // csv | json
};

struct CompareSpec {
    std::string mode = "ed";  // ed | irrep
    double tolerance = 1e-10;
    int n_random_specs = 20;  // irrep mode
};

struct OracleSpec {
    std::string kind = "global";  // global | local | irrep
    int two_spin = 2;             // irrep kind
    int max_bath_spins = 12;
};

struct RunConfig {
    std::string scenario = "closed_form";
    // bath: preset name with knobs, or an inline spec (wins when present)
    std::string preset = "unpolarized";
    std::optional<BathSpec> bath;
    int n_spins = 100;
    double alpha = 0.1;
    double truncation_eps = 1e-12;
    std::optional<Eigen::Vector3d> qubit_p0;  // preset default when unset
    Eigen::Vector3d bath_p0 = Eigen::Vector3d::Zero();  // two_spin scenario
    double coupling = 1.0;
    GridSpec grid;
    OutputSpec output;
    std::optional<LocalCouplingModel> local;  // perturbative / local oracle
    CompareSpec compare;
    OracleSpec oracle;
    std::vector<std::string> tau_presets;  // tau_table scenario
    unsigned long seed = 12345;
};

/// parse a config document; throws std::invalid_argument on schema errors
RunConfig config_from_json(const nlohmann::json& j);

/// resolve preset name -> (BathSpec, default p0); throws on unknown preset
std::pair<BathSpec, Eigen::Vector3d> resolve_preset(const std::string& name,
                                                    int n_spins, double alpha,
                                                    double truncation_eps);

/// run one configuration end to end; report lines to out, errors to err
int execute(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// full command line: flags (--config, --scenario, --preset, --n, --k,
/// --tmax, --points, --out, --format, --seed, ...) merged over the config file
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace spinbath::cli
