#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace nmorph {

using Int = long long;

struct GradedModule;
using ModulePtr = std::shared_ptr<const GradedModule>;

/* Finitely generated free graded Z-module with an ordered basis.  Identity is
 * structural: two modules are interchangeable iff their (name, degree) lists
 * agree entrywise.  Modules built by tensor_module keep their (flattened)
 * factor list so composite basis indices can be split factorwise. */
struct GradedModule {
  std::vector<std::pair<std::string, int>> basis;
  std::vector<ModulePtr> factors;  // nonempty iff built as a tensor product

  int rank() const { return (int)basis.size(); }
  int degree(int i) const { return basis.at(i).second; }
  const std::string& name(int i) const { return basis.at(i).first; }
  int index_of(const std::string& name) const;  // -1 when absent
};

ModulePtr make_module(std::vector<std::pair<std::string, int>> basis);

/* Tensor product; nested tensor factors are flattened.  With a single atomic
 * factor this returns the factor itself. */
ModulePtr tensor_module(std::vector<ModulePtr> factors);

/* Same basis names, every degree shifted by -1 (resp. +1). */
ModulePtr suspend_module(const ModulePtr& m);
ModulePtr desuspend_module(const ModulePtr& m);

bool same_module(const GradedModule& a, const GradedModule& b);
bool same_module(const ModulePtr& a, const ModulePtr& b);

/* Atomic factor list: the module itself when not a tensor product. */
std::vector<ModulePtr> flat_factors(const ModulePtr& m);

/* Composite index <-> per-factor indices (mixed radix, first factor coarsest). */
std::vector<int> split_index(const GradedModule& tensor, int index);
int join_index(const GradedModule& tensor, const std::vector<int>& parts);

/* Sparse integer combination of basis vectors of one module. */
struct Element {
  ModulePtr module;
  std::map<int, Int> coeffs;  // basis index -> nonzero coefficient

  bool is_zero() const { return coeffs.empty(); }
  bool is_homogeneous() const;
  /* nullopt when zero or inhomogeneous */
  std::optional<int> degree() const;

  void add(int index, Int c);
  Element& operator+=(const Element& other);
  Element& operator-=(const Element& other);
  Element& operator*=(Int c);
};

Element zero_element(ModulePtr m);
Element basis_element(ModulePtr m, int index, Int c = 1);
bool operator==(const Element& a, const Element& b);

/* Multilinear map between graded modules: sources s_1..s_k, one target, fixed
 * homogeneous degree.  Sparse matrix keyed by (target index, source index
 * tuple); every entry satisfies deg(out) = sum deg(in) + degree. */
struct GradedMap {
  std::vector<ModulePtr> sources;
  ModulePtr target;
  int degree = 0;
  std::map<std::pair<int, std::vector<int>>, Int> coeffs;

  int arity() const { return (int)sources.size(); }
  bool is_zero() const { return coeffs.empty(); }
  /* Adds c to the entry, checking the degree constraint; erases zeros. */
  void add(int out, const std::vector<int>& ins, Int c);
  Int coeff(int out, const std::vector<int>& ins) const;
};

GradedMap zero_map(std::vector<ModulePtr> sources, ModulePtr target, int degree);
GradedMap identity_map(const ModulePtr& m);

bool same_shape(const GradedMap& f, const GradedMap& g);
bool operator==(const GradedMap& f, const GradedMap& g);
GradedMap operator+(const GradedMap& f, const GradedMap& g);
GradedMap operator-(const GradedMap& f, const GradedMap& g);
GradedMap operator*(Int c, const GradedMap& f);

/* f_1 (x) ... (x) f_k with Koszul signs: on a basis tuple split into segments
 * a_1..a_k the matrix entry picks up (-1)^{sum_{i<j} |f_j| |a_i|}.  The result
 * consumes the concatenated sources and lands in tensor_module(targets). */
GradedMap tensor_maps(const std::vector<GradedMap>& fs);

/* (outer_1 (x) ... (x) outer_k) o (inner_1 (x) ... (x) inner_m).  The flattened
 * targets of the inner maps must match the flattened sources of the outer
 * ones.  All Koszul signs come from the two tensor_maps layers; the matrix
 * composition itself is sign-free. */
GradedMap koszul_compose(const std::vector<GradedMap>& outer,
                         const std::vector<GradedMap>& inner);

/* Evaluate f_1 (x) ... (x) f_k on an element of the tensor product of their
 * sources.  Signs are resolved per homogeneous basis tuple. */
Element koszul_tensor_apply(const std::vector<GradedMap>& maps, const Element& x);

/* d_target o f - (-1)^{|f|} sum_i f o (id (x) .. d_source .. (x) id).
 * Both differentials must have arity 1 and degree +1; every source of f must
 * equal the source differential's module. */
GradedMap bracket(const GradedMap& f, const GradedMap& d_source,
                  const GradedMap& d_target);

/* s o f o w^{(x)m} where s is the degree -1 suspension and w its inverse.
 * Coefficientwise: sign (-1)^{sum_i (m-i)(|a_i|-1)}, degree |f| + arity - 1.
 * desuspend_conjugate is the inverse construction; their round trip scales by
 * (-1)^{binom(m,2)}. */
GradedMap suspend_conjugate(const GradedMap& f);
GradedMap desuspend_conjugate(const GradedMap& b);

/* Scale by (-1)^{binom(arity,2)}; converts between the two standard sign
 * conventions for operations of a given arity. */
GradedMap convention_twist(const GradedMap& f);

}  // namespace nmorph
