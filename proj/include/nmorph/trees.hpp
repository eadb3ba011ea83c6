#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nmorph/graded.hpp"
#include "nmorph/simplex.hpp"

namespace nmorph {

/* Planar rooted tree. kids[v] lists the children of internal vertex v left to
 * right; entries >= 0 name internal vertices, -1 marks a leaf slot. Vertices
 * are numbered in preorder (root 0), so equal trees compare equal. The empty
 * pool is the unit tree: a bare edge carrying one leaf and no vertex.
 * Internal edge g joins vertex g+1 to its parent, g = 0..nv()-2; this gives
 * every internal edge a stable id inside its tree. */
struct RibbonTree {
  std::vector<std::vector<int>> kids;

  int nv() const { return (int)kids.size(); }
  int edges() const { return kids.empty() ? 0 : nv() - 1; }
  bool is_unit() const { return kids.empty(); }
  int arity() const;
  int degree() const { return -edges(); }
  std::vector<int> parent() const;
  /* leaf slots as (vertex, slot) pairs, in planar left-to-right order */
  std::vector<std::pair<int, int>> leaf_slots() const;
  auto operator<=>(const RibbonTree&) const = default;
};

RibbonTree unit_tree();
RibbonTree corolla(int m);
/* preorder ids, >= 2 children per vertex */
bool tree_valid(const RibbonTree& t);
/* nested arrays, leaves as their 1-based planar index: [[1,2],3] */
nlohmann::json tree_to_json(const RibbonTree& t);
RibbonTree tree_from_json(const nlohmann::json& j);

/* Tree with a horizontal gauge; status records the side of the gauge each
 * internal vertex sits on. A vertex on or below the gauge needs its parent
 * strictly below, which is exactly when strictly monotone heights exist. The
 * unit tree with no statuses is the trivial gauged tree: the gauge crossing a
 * bare edge. */
struct GaugedTree {
  RibbonTree tree;
  std::vector<Rel> status;
  auto operator<=>(const GaugedTree&) const = default;
};

GaugedTree trivial_gauged();
bool gauge_valid(const GaugedTree& t);
int on_count(const GaugedTree& t);
/* gauge crossings sweep out cells: dim = edges + 1 - on_count, degree is its
 * negative; the trivial gauged tree is a point */
int cell_dim(const GaugedTree& t);
int gauged_degree(const GaugedTree& t);
/* strictly increasing heights along root-to-leaf paths, gauge at 0; throws
 * when the statuses are not realizable */
std::vector<Int> realizability_witness(const GaugedTree& t);
/* vertices sitting on the gauge, ordered left to right across the tree */
std::vector<int> on_vertices_left_right(const GaugedTree& t);

std::string rel_name(Rel r);
Rel rel_from_name(const std::string& s);
nlohmann::json gauged_to_json(const GaugedTree& t);
GaugedTree gauged_from_json(const nlohmann::json& j);

enum class TreeFamily { SRT, SCRT, CBRT };

/* stable ribbon trees: every vertex has >= 2 children; m = 1 gives the unit */
std::vector<RibbonTree> enumerate_srt(int m);
/* stable gauged ribbon trees: all realizable gauge positions on each SRT */
std::vector<GaugedTree> enumerate_scrt(int m);
/* binary trees with gauge off the vertices: the top-dimensional cells */
std::vector<GaugedTree> enumerate_cbrt(int m);
nlohmann::json enumerate_trees(TreeFamily f, int m);

/* Stack of tree components. comps[0] is the root component; every later
 * component plugs its root edge into a leaf slot of an earlier one, so the
 * connecting edges are the broken (infinite-length) ones. Components are
 * stored in global preorder: parent before child, children by leaf slot.
 * Gauged components carry statuses (the unit shape is allowed there);
 * bare components are single letters, never the unit. labels optionally
 * attaches one simplex face per gauged component, left to right. orient
 * lists each finite internal edge id exactly once; global edge ids
 * concatenate the per-component ids in component order. */
struct Component {
  RibbonTree shape;
  bool gauged = false;
  std::vector<Rel> status;
  int parent = -1;
  int leaf = 0;
  auto operator<=>(const Component&) const = default;
};

struct BrokenTree {
  std::vector<Component> comps;
  std::vector<Face> labels;
  std::vector<int> orient;
  auto operator<=>(const BrokenTree&) const = default;
};

BrokenTree single_bare(const RibbonTree& t);
BrokenTree single_gauged(const GaugedTree& t);
BrokenTree unit_word();

int edge_count(const BrokenTree& t);
int edge_offset(const BrokenTree& t, int comp);
int broken_arity(const BrokenTree& t);
/* free leaf slot i (1-based, planar order) as (component, local leaf) */
std::pair<int, int> locate_leaf(const BrokenTree& t, int leaf);
int gauge_count(const BrokenTree& t);
/* degree summed over components, label degrees included */
int broken_degree(const BrokenTree& t);
/* degree after forgetting gauges and labels */
int bare_degree(const BrokenTree& t);
/* forget gauges and labels, delete unit components */
BrokenTree forget_gauges(const BrokenTree& t);

enum class WordContext { Operad, Bimodule, Any };
/* structural well-formedness; Operad wants no gauges, Bimodule exactly one
 * gauged component on every root-to-leaf path */
bool broken_valid(const BrokenTree& t, WordContext ctx);

/* identity permutation on the finite internal edges */
std::vector<int> canonical_orientation(const BrokenTree& t);
std::vector<int> canonical_orientation(const GaugedTree& t);
/* sorts t.orient ascending, returns the permutation parity; throws when the
 * listing does not name each finite internal edge exactly once */
int normalize_orientation(BrokenTree& t);
std::string canon_key(const BrokenTree& t);

nlohmann::json broken_to_json(const BrokenTree& t);
BrokenTree broken_from_json(const nlohmann::json& j);

/* Stacks arg onto the given free leaf slot of host. Orientations concatenate
 * host first, then arg, before resorting; sign is the resorting parity.
 * host_edges / arg_edges map old global edge ids to new ones. */
struct Grafted {
  BrokenTree tree;
  int sign = 1;
  std::vector<int> host_edges;
  std::vector<int> arg_edges;
};
Grafted graft(const BrokenTree& host, int leaf, const BrokenTree& arg);

/* Root action: stacks args left to right under the bare host word. The sign
 * twists by the degree crossings of labels, gauges and gauge intersections
 * moving past the lower-order parts, on top of the resorting parity. */
struct MuResult {
  BrokenTree tree;
  int sign = 1;
};
MuResult mu_compose(const BrokenTree& host, const std::vector<BrokenTree>& args);
MuResult mu_compose(const RibbonTree& host, const std::vector<BrokenTree>& args);

/* Replaces component comp of word by the stack repl (matching arity), the
 * children of comp re-plugging into the free leaves of repl. Requires both
 * orientations canonical; sign is the parity of re-sorting the spliced
 * orientation. Labels of comp are replaced by repl's labels. */
struct Substituted {
  BrokenTree tree;
  int sign = 1;
  std::vector<int> host_edges;
  std::vector<int> repl_edges;
};
Substituted substitute(const BrokenTree& word, int comp, const BrokenTree& repl);

/* One summand of a boundary. tree is canonical with ascending orientation and
 * the re-sorting parity folded into sign. */
struct BoundaryTerm {
  std::string kind;
  BrokenTree tree;
  int sign = 1;
};

/* Cellular boundary of a single gauged tree, orientation omega on its edges.
 * Families: "collapse" contracts an edge not crossing the gauge;
 * "gauge-vertex" lets a vertex land on the gauge from either side;
 * "above-break" breaks an edge whose upper endpoint is strictly above the
 * gauge (or the outgoing edge when the whole tree is above); "below-break"
 * cuts every path once at an edge leaving the strictly-below region, the
 * lower part becoming the bare root component. */
std::vector<BoundaryTerm> gauged_boundary(const GaugedTree& t, const std::vector<int>& omega);

/* Boundary of a bare letter: "collapse" contracts and "break" splits each
 * internal edge. */
std::vector<BoundaryTerm> srt_boundary(const RibbonTree& t, const std::vector<int>& omega);

/* Leibniz extension of srt_boundary over a bare word, letter prefix signs
 * included; requires canonical orientation. */
struct WordTerm {
  BrokenTree tree;
  int sign = 1;
};
std::vector<WordTerm> bare_word_boundary(const BrokenTree& word);

/* Dimension and orientation-twist bookkeeping for the pearly moduli spaces
 * behind these operations: t_deg the operation degree, y the output, xs the
 * inputs, d the ambient manifold dimension. sigma is a parity. */
struct MorseBookkeeping {
  Int dim = 0;
  int sigma = 0;
  int sign = 1;
};
MorseBookkeeping morse_bookkeeping(Int t_deg, Int y_deg, const std::vector<Int>& x_degs, Int d);

}  // namespace nmorph
