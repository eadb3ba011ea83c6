#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nmorph/graded.hpp"

namespace nmorph {

using Rat = boost::multiprecision::cpp_rational;

/* Nonempty face of a standard simplex: strictly increasing vertex list inside
 * [0, ambient].  Cohomological degree is -dim. */
struct Face {
  int ambient = 0;
  std::vector<int> verts;

  int dim() const { return (int)verts.size() - 1; }
  int degree() const { return -dim(); }
  std::string name() const;

  auto operator<=>(const Face&) const = default;
};

Face make_face(int ambient, std::vector<int> verts);
Face full_face(int n);
Face vertex_face(int n, int v);

/* All faces of the n-simplex, ordered by dimension then lexicographically. */
std::vector<Face> all_faces(int n);

using FaceSum = std::map<Face, Int>;
using FaceTensor = std::map<std::vector<Face>, Int>;

void add_term(FaceSum& s, const Face& f, Int c);
void add_term(FaceTensor& s, const std::vector<Face>& fs, Int c);

/* Alternating vertex deletions; empty on vertices. */
FaceSum simplicial_diff(const Face& f);

/* Componentwise differential of a tensor of faces with Koszul signs
 * (-1)^{deg of earlier factors}. */
FaceTensor tensor_diff(const FaceTensor& x);

/* [i_0 < ... < i_k] -> sum_j [i_0..i_j] (x) [i_j..i_k]; every coefficient +1. */
FaceTensor aw_coproduct(const Face& f);

/* Right-iterated coproduct with `factors` tensor slots (factors >= 1); the
 * coproduct is applied factors-1 times to the last slot.  All coefficients
 * stay +1. */
FaceTensor iterated_aw(const Face& f, int factors);

/* Blocks covering a face; junction between consecutive blocks either shares
 * the boundary vertex (max = min, an overlap) or skips it (max < min, a gap). */
struct OverlappingPartition {
  std::vector<Face> blocks;

  int overlaps() const;
  int gaps() const { return (int)blocks.size() - 1 - overlaps(); }
  auto operator<=>(const OverlappingPartition&) const = default;
};

/* All s-block partitions of f with exactly i overlaps.  The two-argument form
 * uses i = s-1 (every junction shared). */
std::vector<OverlappingPartition> enumerate_overlapping(const Face& f, int s, int i);
std::vector<OverlappingPartition> enumerate_overlapping(const Face& f, int s);

/* Cosimplicial structure maps acting on faces.  coface_apply(i, -) relabels
 * v -> v (v < i), v+1 (v >= i); codegeneracy_apply(i, -) returns nullopt on
 * faces containing the edge [i, i+1] and otherwise relabels v -> v (v <= i),
 * v-1 (v > i). */
Face coface_apply(int i, const Face& f);
std::optional<Face> codegeneracy_apply(int i, const Face& f);

/* Chain complex of the n-simplex as a graded module, basis ordered like
 * all_faces(n). */
ModulePtr simplex_module(int n);
int face_index(int n, const Face& f);
GradedMap simplicial_diff_map(int n);

/* p i = id and id - i p = d h + h d, all exactly. */
struct Retraction {
  GradedMap p;  // to the point complex
  GradedMap i;  // from the point complex
  GradedMap h;  // degree -1 homotopy
};
Retraction retraction(int n);

/* Chain-level square comparison: lower composite keeps the factor order
 * 1-2-3-4, upper swaps the middle factors with the Koszul sign
 * (-1)^{dim I_2 dim I_3}.  Both are sums over fully overlapping 4-block
 * partitions. */
struct SquareWitness {
  FaceTensor upper;
  FaceTensor lower;
  FaceTensor difference;
};
SquareWitness square_noncommutativity_witness(int n);

/* ---- pointwise AW geometry, exact rationals ---- */

/* Point of the n-simplex in the coordinates 1 >= z_1 >= ... >= z_n >= 0. */
struct RationalPoint {
  std::vector<Rat> z;
};

bool in_simplex(const RationalPoint& p);

/* AW(z) = ((2z_1-1, .., 2z_i-1, 0, .., 0), (1, .., 1, 2z_{i+1}, .., 2z_n))
 * where i = #{j : z_j > 1/2}; both factor choices agree when some z_j = 1/2. */
std::pair<RationalPoint, RationalPoint> aw_point(const RationalPoint& p);

/* Right iteration: factors-1 applications of aw_point to the last slot. */
std::vector<RationalPoint> aw_point_iter(const RationalPoint& p, int factors);

/* (AW x id) o AW versus (id x AW) o AW at a given point. */
struct PointWitness {
  std::vector<RationalPoint> left;   // (AW x id) AW
  std::vector<RationalPoint> right;  // (id x AW) AW
  bool equal = false;
};
PointWitness aw_point_witness(const RationalPoint& p);

/* Stratum of the s-threshold subdivision of the n-simplex, carried by a face.
 * Coordinate t of the face interior sits Above / On / Below each threshold
 * (1/2)^{k+1}; the label is the induced (s+1)-block partition of the carrier
 * face. */
enum class Rel { Above, On, Below };

struct SubdivisionStratum {
  Face face;
  int thresholds = 0;                  // s
  std::vector<std::vector<Rel>> rels;  // rels[t][k], t over interior coordinates
  OverlappingPartition label;          // s+1 blocks covering `face`
  int dim = 0;                         // face dim minus number of On coordinates
};

/* Every stratum of every face, deterministic order. */
std::vector<SubdivisionStratum> subdivision(int n, int s);

/* Vertices of the stratum closure in ambient z-coordinates. */
std::vector<RationalPoint> stratum_vertices(const SubdivisionStratum& st);

}  // namespace nmorph
