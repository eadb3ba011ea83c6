#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "nmorph/bimodule.hpp"
#include "nmorph/graded.hpp"
#include "nmorph/simplex.hpp"
#include "nmorph/trees.hpp"

/* Concrete algebraic structures on graded modules, and residual checkers
 * that test them against the relations generated by the tree calculus.
 * Absent operations are treated as zero maps of the expected shape. */

namespace nmorph {

/* ops[k] is the arity-k operation of degree 2 - k; ops[1] is the
 * differential. Missing arities are zero. */
struct AInfAlgebra {
  ModulePtr module;
  std::map<int, GradedMap> ops;
};

/* One operation per stable ribbon tree, of degree t.degree(); the
 * differential is stored separately since no tree carries it. */
struct OmegaBAsAlgebra {
  ModulePtr module;
  GradedMap diff;
  std::map<RibbonTree, GradedMap> ops;
};

/* Simplex-shaped morphism families between two fixed algebras. maps holds
 * one coefficient map per (face, arity) resp. (face, gauged cell); missing
 * keys are zero. The expected degrees are nainf_generator_degree resp.
 * face.degree() + gauged_degree(cell). */
struct NAinfMorphism {
  AInfAlgebra source;
  AInfAlgebra target;
  int n = 0;
  std::map<NAinfGenerator, GradedMap> maps;
};

struct NOmbasMorphism {
  OmegaBAsAlgebra source;
  OmegaBAsAlgebra target;
  int n = 0;
  std::map<std::pair<Face, GaugedTree>, GradedMap> maps;
};

/* Operation lookups that materialise the zero map when a key is absent. */
GradedMap ainf_op(const AInfAlgebra& a, int arity);
GradedMap ombas_op(const OmegaBAsAlgebra& a, const RibbonTree& t);
GradedMap nainf_map(const NAinfMorphism& f, const NAinfGenerator& g);
GradedMap nombas_map(const NOmbasMorphism& f, const Face& face, const GaugedTree& cell);

/* Value of a word in the free bimodule: corolla letters above the generator
 * layer act by target operations, generator letters by the morphism's
 * coefficient maps, letters below by source operations. Free slots feed the
 * source module. All composition signs are Koszul. */
GradedMap represent_ainf_word(const AinfWord& w, const NAinfMorphism& f);

/* Same for a labeled broken word: the bare root component acts by target
 * operations, gauged components by coefficient maps at their label, upper
 * bare components by source operations. */
GradedMap represent_broken_word(const BrokenTree& b, const NOmbasMorphism& f);

/* One failed relation: where it lives and what is left over. */
struct ResidualEntry {
  std::string relation;
  GradedMap residual;
};

/* checked counts every relation looked at; entries keeps the nonzero ones. */
struct ResidualReport {
  bool ok = true;
  int cap = 0;
  int checked = 0;
  std::vector<ResidualEntry> entries;
};

nlohmann::json residual_report_to_json(const ResidualReport& r);

/* Structure relations up to and including the given arity cap. For each
 * total arity m the residual is the signed sum of all two-level composites
 * ops[s](id, ops[i2], id); zero exactly when the family is a valid
 * structure in that range. Throws on an operation of the wrong shape. */
ResidualReport check_ainf(const AInfAlgebra& a, int cap);

/* Tree-shaped relations up to the cap: for every stable tree the bracket of
 * its operation with the differential must equal the represented cellular
 * boundary. Includes the relation that the differential squares to zero. */
ResidualReport check_ombas(const OmegaBAsAlgebra& a, int cap);

/* Morphism relations for every face of the n-simplex and arity <= cap: the
 * bracket of each coefficient map against the two differentials must equal
 * the represented differential of the matching bimodule generator. */
ResidualReport check_n_morphism(const NAinfMorphism& f, int cap);

/* Same over gauged cells. With twisted set, both differentials are
 * reinterpreted as x -> (-1)^{(ambient_dim + 1)|x|} d(x) before bracketing. */
ResidualReport check_n_ombas_morphism(const NOmbasMorphism& f, int cap,
                                      bool twisted = false, int ambient_dim = 0);

/* Arity-k operations summed from binary tree operations with the solved
 * comparison signs; the differential is copied. Covers arities up to the
 * table's range. Throws if the table is not marked ok. */
AInfAlgebra induce_ainf(const OmegaBAsAlgebra& a, const OperadSignTable& table);

/* Coefficient maps summed from gauged-cell maps over the solved two-sided
 * comparison, per face and arity up to the table's range; source and target
 * are induced through the table's operad half. Throws if the table is not
 * marked ok. */
NAinfMorphism push_forward(const NOmbasMorphism& f, const ComparisonSignTable& table);

nlohmann::json ainf_algebra_to_json(const AInfAlgebra& a);
AInfAlgebra ainf_algebra_from_json(const nlohmann::json& j);
nlohmann::json ombas_algebra_to_json(const OmegaBAsAlgebra& a);
OmegaBAsAlgebra ombas_algebra_from_json(const nlohmann::json& j);
nlohmann::json nainf_morphism_to_json(const NAinfMorphism& f);
NAinfMorphism nainf_morphism_from_json(const nlohmann::json& j);
nlohmann::json nombas_morphism_to_json(const NOmbasMorphism& f);
NOmbasMorphism nombas_morphism_from_json(const nlohmann::json& j);

}  // namespace nmorph
