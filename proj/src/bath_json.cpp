#include "spinbath/bath_json.hpp"

#include <stdexcept>

namespace spinbath {

using nlohmann::json;

nlohmann::json to_json(const SectorWeightTable& table) {
    json weights = json::array();
    for (const auto& e : table.entries())
        weights.push_back({{"two_spin", e.two_spin}, {"weight", e.weight}});
    return {{"n_spins", table.n_spins()}, {"weights", weights}};
}

SectorWeightTable weight_table_from_json(const nlohmann::json& j) {
    if (!j.contains("n_spins") || !j.contains("weights"))
        throw std::invalid_argument("bath spec needs n_spins and weights");
    std::vector<SectorWeight> entries;
    for (const auto& w : j.at("weights"))
        entries.push_back({w.at("two_spin").get<int>(), w.at("weight").get<double>()});
    return SectorWeightTable(j.at("n_spins").get<int>(), std::move(entries));
}

nlohmann::json to_json(const BathSpec& spec) {
    json out = to_json(spec.weights());
    json pols = json::array();
    for (const auto& [ti, pol] : spec.polarizations()) {
        json p = {{"two_spin", ti},
                  {"vector", {pol.vector_pol.x(), pol.vector_pol.y(), pol.vector_pol.z()}}};
        if (pol.tensor_pol.cwiseAbs().maxCoeff() > 0) {
            json rows = json::array();
            for (int r = 0; r < 3; ++r)
                rows.push_back({pol.tensor_pol(r, 0), pol.tensor_pol(r, 1),
                                pol.tensor_pol(r, 2)});
            p["tensor"] = rows;
        }
        pols.push_back(p);
    }
    if (!pols.empty()) out["polarizations"] = pols;
    return out;
}

BathSpec bath_spec_from_json(const nlohmann::json& j) {
    SectorWeightTable weights = weight_table_from_json(j);
    std::map<int, SectorPolarization> pols;
    if (j.contains("polarizations")) {
        for (const auto& p : j.at("polarizations")) {
            SectorPolarization pol;
            pol.two_spin = p.at("two_spin").get<int>();
            const auto& v = p.at("vector");
            if (v.size() != 3) throw std::invalid_argument("vector must have 3 components");
            pol.vector_pol = Eigen::Vector3d(v[0].get<double>(), v[1].get<double>(),
                                             v[2].get<double>());
            if (p.contains("tensor")) {
                const auto& tn = p.at("tensor");
                if (tn.size() != 3) throw std::invalid_argument("tensor must be 3x3");
                for (int r = 0; r < 3; ++r) {
                    if (tn[r].size() != 3)
                        throw std::invalid_argument("tensor must be 3x3");
                    for (int cidx = 0; cidx < 3; ++cidx)
                        pol.tensor_pol(r, cidx) = tn[r][cidx].get<double>();
                }
            }
            pols.emplace(pol.two_spin, pol);
        }
    }
    return BathSpec(std::move(weights), std::move(pols));
}

}  // namespace spinbath
