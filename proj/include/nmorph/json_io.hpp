#pragma once

#include <json.hpp>

#include "nmorph/graded.hpp"

namespace nmorph {

/* {"basis": [["x", 0], ...]} */
nlohmann::json module_to_json(const GradedModule& m);
ModulePtr module_from_json(const nlohmann::json& j);

/* {"arity": 2, "degree": 0, "coeffs": [[["y"], ["x", "x"], 1], ...]},
 * entries sorted by output name then input names. */
nlohmann::json map_to_json(const GradedMap& f);
GradedMap map_from_json(const nlohmann::json& j, std::vector<ModulePtr> sources,
                        ModulePtr target);

}  // namespace nmorph
