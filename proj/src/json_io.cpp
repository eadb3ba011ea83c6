#include "nmorph/json_io.hpp"

#include <algorithm>
#include <stdexcept>

namespace nmorph {

using nlohmann::json;

json module_to_json(const GradedModule& m) {
  json basis = json::array();
  for (auto& [name, deg] : m.basis) basis.push_back(json::array({name, deg}));
  return json{{"basis", basis}};
}

ModulePtr module_from_json(const json& j) {
  if (!j.contains("basis") || !j["basis"].is_array())
    throw std::invalid_argument("module json needs a \"basis\" array");
  std::vector<std::pair<std::string, int>> basis;
  for (auto& e : j["basis"]) {
    if (!e.is_array() || e.size() != 2)
      throw std::invalid_argument("basis entries must be [name, degree] pairs");
    basis.emplace_back(e[0].get<std::string>(), e[1].get<int>());
  }
  return make_module(std::move(basis));
}

json map_to_json(const GradedMap& f) {
  std::vector<std::tuple<std::string, std::vector<std::string>, Int>> rows;
  for (auto& [k, c] : f.coeffs) {
    std::vector<std::string> ins;
    for (int i = 0; i < f.arity(); ++i) ins.push_back(f.sources[i]->name(k.second[i]));
    rows.emplace_back(f.target->name(k.first), ins, c);
  }
  std::sort(rows.begin(), rows.end());
  json coeffs = json::array();
  for (auto& [out, ins, c] : rows)
    coeffs.push_back(json::array({json::array({out}), json(ins), c}));
  return json{{"arity", f.arity()}, {"degree", f.degree}, {"coeffs", coeffs}};
}

GradedMap map_from_json(const json& j, std::vector<ModulePtr> sources,
                        ModulePtr target) {
  if ((int)sources.size() != j.at("arity").get<int>())
    throw std::invalid_argument("map json arity does not match given sources");
  GradedMap f = zero_map(std::move(sources), std::move(target),
                         j.at("degree").get<int>());
  for (auto& row : j.at("coeffs")) {
    if (!row.is_array() || row.size() != 3)
      throw std::invalid_argument("coeff rows must be [[out], [ins...], c]");
    auto& outs = row[0];
    if (!outs.is_array() || outs.size() != 1)
      throw std::invalid_argument("coeff output must be a singleton list");
    int out = f.target->index_of(outs[0].get<std::string>());
    if (out < 0) throw std::invalid_argument("unknown output basis name");
    std::vector<int> ins;
    for (size_t i = 0; i < row[1].size(); ++i) {
      int idx = f.sources[i]->index_of(row[1][i].get<std::string>());
      if (idx < 0) throw std::invalid_argument("unknown input basis name");
      ins.push_back(idx);
    }
    f.add(out, ins, row[2].get<Int>());
  }
  return f;
}

}  // namespace nmorph
