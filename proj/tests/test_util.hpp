#pragma once

#include <random>
#include <string>
#include <vector>

#include "nmorph/graded.hpp"

namespace nmorph::testutil {

inline std::vector<std::vector<int>> all_tuples(const std::vector<ModulePtr>& sources) {
  std::vector<std::vector<int>> out;
  std::vector<int> idx(sources.size(), 0);
  for (;;) {
    out.push_back(idx);
    int p = (int)sources.size() - 1;
    while (p >= 0 && ++idx[p] == sources[p]->rank()) idx[p--] = 0;
    if (p < 0) break;
  }
  return out;
}

inline ModulePtr random_module(std::mt19937_64& rng, const std::string& prefix,
                               int max_rank = 3, int deg_min = -3, int deg_max = 3) {
  std::uniform_int_distribution<int> rank_d(1, max_rank), deg_d(deg_min, deg_max);
  int r = rank_d(rng);
  std::vector<std::pair<std::string, int>> basis;
  for (int i = 0; i < r; ++i) basis.emplace_back(prefix + std::to_string(i), deg_d(rng));
  return make_module(std::move(basis));
}

/* Fills roughly half of the degree-admissible entries with coefficients in
 * [-2, 2] \ {0}. */
inline GradedMap random_map(std::mt19937_64& rng, std::vector<ModulePtr> sources,
                            ModulePtr target, int degree) {
  GradedMap f = zero_map(std::move(sources), std::move(target), degree);
  std::uniform_int_distribution<int> coin(0, 1), coeff_d(1, 2), sign_d(0, 1);
  for (auto& ins : all_tuples(f.sources)) {
    int total = 0;
    for (size_t i = 0; i < ins.size(); ++i) total += f.sources[i]->degree(ins[i]);
    for (int out = 0; out < f.target->rank(); ++out) {
      if (f.target->degree(out) != total + degree) continue;
      if (coin(rng)) continue;
      f.add(out, ins, sign_d(rng) ? coeff_d(rng) : -coeff_d(rng));
    }
  }
  return f;
}

}  // namespace nmorph::testutil
