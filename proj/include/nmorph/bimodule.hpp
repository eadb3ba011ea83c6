#pragma once

#include <json.hpp>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "nmorph/graded.hpp"
#include "nmorph/simplex.hpp"
#include "nmorph/trees.hpp"

namespace nmorph {

/* Generator of the coefficient bimodule in its corolla presentation: one
 * operation per simplex face and arity, of degree 1 - arity + face.degree(). */
struct NAinfGenerator {
  Face face;
  int arity = 1;
  auto operator<=>(const NAinfGenerator&) const = default;
};

Int nainf_generator_degree(const NAinfGenerator& g);

/* Word of the free bimodule on those generators: a planar tree of letters
 * stored in preorder (parent before child, siblings left to right). A letter
 * is either an operad corolla (gen = false, arity >= 2, degree 2 - arity) or
 * a face-carrying generator (gen = true, arity >= 1). parent/slot plug a
 * letter into a 1-based input slot of an earlier letter; unplugged slots are
 * the free inputs of the word, read in planar order. */
struct AinfLetter {
  bool gen = false;
  int arity = 0;
  Face face;
  int parent = -1;
  int slot = 0;
  auto operator<=>(const AinfLetter&) const = default;
};

struct AinfWord {
  std::vector<AinfLetter> letters;
  auto operator<=>(const AinfWord&) const = default;
};

AinfWord ainf_generator_word(const NAinfGenerator& g);
AinfWord ainf_corolla_word(int k);

/* preorder storage with consistent slots and arities, one shared ambient
 * simplex for all generator letters, and every root-to-leaf path crossing
 * generator letters uniformly: always exactly once (bimodule word) or never
 * (operad word) */
bool ainf_word_valid(const AinfWord& w);
int ainf_word_arity(const AinfWord& w);
Int ainf_word_degree(const AinfWord& w);
/* free input slots as (letter, slot) pairs, planar left-to-right order */
std::vector<std::pair<int, int>> ainf_free_slots(const AinfWord& w);

nlohmann::json ainf_word_to_json(const AinfWord& w);
AinfWord ainf_word_from_json(const nlohmann::json& j);

/* Integer chains of words resp. of labeled broken words; zero coefficients
 * are dropped eagerly. */
using AinfChain = std::map<AinfWord, Int>;
using BrokenChain = std::map<BrokenTree, Int>;

void add_term(AinfChain& c, const AinfWord& w, Int coef);
void add_term(BrokenChain& c, const BrokenTree& t, Int coef);

/* Differential on the corolla side. On a generator letter it has three
 * families: the face boundary of the label, the operad acting under the
 * letter with sign (-1)^{|I|} (-1)^{i1 + i2 i3}, and the operad acting over a
 * fully overlapping split of the label with sign -(-1)^eps, eps the crossing
 * parity of the split. On a corolla letter it is the associativity boundary
 * -sum (-1)^{i1 + i2 i3}. Extends to words letter by letter with graded
 * prefix signs and reorder parities. Raises degree by +1. */
AinfChain nainf_diff(const AinfWord& w);
AinfChain nainf_diff(const NAinfGenerator& g);

/* Differential on the broken-word side of the same bimodule. On a single
 * gauged component it is the face boundary of the label plus, twisted by
 * (-1)^{label dimension}, the cell boundary of the gauged tree, below-break
 * terms distributing the label over the new gauges with one summand per
 * fully overlapping split into as many blocks as gauges. Extends to words
 * through the root decomposition into grafts and root actions. Raises degree
 * by +1. Requires a fully labeled word in canonical orientation. */
BrokenChain nombas_diff(const BrokenTree& elem);

/* Operadic actions on labeled broken words, returned as one-entry chains:
 * grafting a bare word onto a free leaf (sign the orientation reorder
 * parity) and stacking labeled words under a bare host (sign the degree
 * crossing twist on top of the reorder parity). Shapes and labeling are
 * validated. */
BrokenChain circ_action(const BrokenTree& elem, int leaf, const BrokenTree& bare_word);
BrokenChain mu_action(const BrokenTree& bare_host, const std::vector<BrokenTree>& elems);

/* Brute-force audit that the differential squares to zero on every generator
 * within the caps: arity <= m_max, ambient simplex dimension <= n_max. */
enum class BimoduleFamily { NAinf, NOmbas };

struct D2Report {
  bool ok = true;
  int generators = 0;
  std::vector<std::string> offenders;
};

D2Report d2_check(BimoduleFamily family, int m_max, int n_max);
nlohmann::json d2_report_to_json(const D2Report& r);

/* Corolla-to-broken comparison on the operad level: each corolla maps to a
 * signed sum of the binary bare letters of its arity. Signs are solved from
 * the chain-map condition, seeded +1 on the 2-corolla; conflicts are
 * reported, never patched over. */
struct OperadSignTable {
  bool ok = true;
  int m_max = 0;
  std::map<RibbonTree, Int> sign;
  std::vector<std::string> conflicts;
};

OperadSignTable operad_sign_solve(int m_max);
/* signed sum of binary bare letters for the arity-k corolla, 2 <= k <= cap */
BrokenChain operad_comparison(int k, const OperadSignTable& table);

/* Comparison of the two sides over the operad-level one: a generator of
 * arity m maps to the signed sum, over binary trees whose gauge crosses no
 * vertex, of the labeled gauged letter in ascending orientation. Signs are
 * solved from compatibility with both differentials, seeded +1 at arity 1,
 * then re-verified on every generator within the caps. */
struct ComparisonSignTable {
  bool ok = true;
  int m_max = 0;
  int n_max = 0;
  OperadSignTable operad;
  std::map<GaugedTree, Int> sign;
  std::vector<std::string> conflicts;
};

ComparisonSignTable phi_compat_solve(int m_max, int n_max);
BrokenChain phi(const NAinfGenerator& g, const ComparisonSignTable& table);
/* comparison applied to a whole word: letters map through the tables and
 * reassemble with the broken-side actions */
BrokenChain phi_word(const AinfWord& w, const ComparisonSignTable& table);

/* Cosimplicial structure on both families: every face label is pushed
 * through the vertex-relabeling maps. A codegeneracy drops any term one of
 * whose labels contains the collapsed edge. Both commute with the
 * differentials. */
AinfChain bimodule_coface(const AinfWord& w, int i);
AinfChain bimodule_codegeneracy(const AinfWord& w, int i);
BrokenChain bimodule_coface(const BrokenTree& elem, int i);
BrokenChain bimodule_codegeneracy(const BrokenTree& elem, int i);

}  // namespace nmorph
