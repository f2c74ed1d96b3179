#pragma once

#include <json.hpp>

#include "spinbath/bath_model.hpp"

namespace spinbath {

// JSON layout used by the CLI config schema:
// {
//   "n_spins": 10,
//   "weights": [ {"two_spin": 10, "weight": 0.5}, ... ],
//   "polarizations": [
//     {"two_spin": 10, "vector": [0,0,1],
//      "tensor": [[-0.33,0,0],[0,-0.33,0],[0,0,0.67]]}, ... ]
// }
// "tensor" may be omitted for a vector-only sector.

nlohmann::json to_json(const SectorWeightTable& table);
SectorWeightTable weight_table_from_json(const nlohmann::json& j);

nlohmann::json to_json(const BathSpec& spec);
BathSpec bath_spec_from_json(const nlohmann::json& j);

}  // namespace spinbath
