#include "nmorph/graded.hpp"

#include <algorithm>
#include <stdexcept>

namespace nmorph {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

int checked_total_degree(const GradedMap& f, const std::vector<int>& ins) {
  if ((int)ins.size() != f.arity()) fail("arity mismatch in map entry");
  int total = 0;
  for (int i = 0; i < f.arity(); ++i) total += f.sources[i]->degree(ins[i]);
  return total;
}

}  // namespace

int GradedModule::index_of(const std::string& name) const {
  for (int i = 0; i < rank(); ++i)
    if (basis[i].first == name) return i;
  return -1;
}

ModulePtr make_module(std::vector<std::pair<std::string, int>> basis) {
  for (size_t i = 0; i < basis.size(); ++i)
    for (size_t j = i + 1; j < basis.size(); ++j)
      if (basis[i].first == basis[j].first) fail("duplicate basis name: " + basis[i].first);
  auto m = std::make_shared<GradedModule>();
  m->basis = std::move(basis);
  return m;
}

std::vector<ModulePtr> flat_factors(const ModulePtr& m) {
  if (!m) fail("null module");
  if (m->factors.empty()) return {m};
  return m->factors;
}

ModulePtr tensor_module(std::vector<ModulePtr> factors) {
  if (factors.empty()) fail("tensor_module needs at least one factor");
  std::vector<ModulePtr> flat;
  for (auto& f : factors)
    for (auto& g : flat_factors(f)) flat.push_back(g);
  if (flat.size() == 1) return flat[0];
  auto m = std::make_shared<GradedModule>();
  m->factors = flat;
  std::vector<int> idx(flat.size(), 0);
  for (;;) {
    std::string name;
    int deg = 0;
    for (size_t i = 0; i < flat.size(); ++i) {
      if (i) name += "\xE2\x8A\x97";  // tensor sign
      name += flat[i]->name(idx[i]);
      deg += flat[i]->degree(idx[i]);
    }
    m->basis.emplace_back(name, deg);
    int p = (int)flat.size() - 1;
    while (p >= 0 && ++idx[p] == flat[p]->rank()) idx[p--] = 0;
    if (p < 0) break;
  }
  return m;
}

ModulePtr suspend_module(const ModulePtr& m) {
  auto out = std::make_shared<GradedModule>();
  out->basis = m->basis;
  for (auto& b : out->basis) b.second -= 1;
  return out;
}

ModulePtr desuspend_module(const ModulePtr& m) {
  auto out = std::make_shared<GradedModule>();
  out->basis = m->basis;
  for (auto& b : out->basis) b.second += 1;
  return out;
}

bool same_module(const GradedModule& a, const GradedModule& b) {
  return a.basis == b.basis;
}

bool same_module(const ModulePtr& a, const ModulePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return same_module(*a, *b);
}

std::vector<int> split_index(const GradedModule& tensor, int index) {
  if (tensor.factors.empty()) return {index};
  std::vector<int> parts(tensor.factors.size());
  for (int i = (int)tensor.factors.size() - 1; i >= 0; --i) {
    int r = tensor.factors[i]->rank();
    parts[i] = index % r;
    index /= r;
  }
  return parts;
}

int join_index(const GradedModule& tensor, const std::vector<int>& parts) {
  if (tensor.factors.empty()) {
    if (parts.size() != 1) fail("join_index on atomic module expects one part");
    return parts[0];
  }
  if (parts.size() != tensor.factors.size()) fail("join_index: factor count mismatch");
  int index = 0;
  for (size_t i = 0; i < parts.size(); ++i)
    index = index * tensor.factors[i]->rank() + parts[i];
  return index;
}

bool Element::is_homogeneous() const {
  std::optional<int> d;
  for (auto& [i, c] : coeffs) {
    (void)c;
    int di = module->degree(i);
    if (d && *d != di) return false;
    d = di;
  }
  return true;
}

std::optional<int> Element::degree() const {
  if (coeffs.empty() || !is_homogeneous()) return std::nullopt;
  return module->degree(coeffs.begin()->first);
}

void Element::add(int index, Int c) {
  if (index < 0 || index >= module->rank()) fail("element index out of range");
  auto it = coeffs.find(index);
  if (it == coeffs.end()) {
    if (c != 0) coeffs.emplace(index, c);
  } else {
    it->second += c;
    if (it->second == 0) coeffs.erase(it);
  }
}

Element& Element::operator+=(const Element& other) {
  if (!same_module(module, other.module)) fail("element module mismatch");
  for (auto& [i, c] : other.coeffs) add(i, c);
  return *this;
}

Element& Element::operator-=(const Element& other) {
  if (!same_module(module, other.module)) fail("element module mismatch");
  for (auto& [i, c] : other.coeffs) add(i, -c);
  return *this;
}

Element& Element::operator*=(Int c) {
  if (c == 0) {
    coeffs.clear();
    return *this;
  }
  for (auto& [i, v] : coeffs) {
    (void)i;
    v *= c;
  }
  return *this;
}

Element zero_element(ModulePtr m) { return Element{std::move(m), {}}; }

Element basis_element(ModulePtr m, int index, Int c) {
  Element e = zero_element(std::move(m));
  e.add(index, c);
  return e;
}

bool operator==(const Element& a, const Element& b) {
  return same_module(a.module, b.module) && a.coeffs == b.coeffs;
}

void GradedMap::add(int out, const std::vector<int>& ins, Int c) {
  if (out < 0 || out >= target->rank()) fail("map output index out of range");
  int total = checked_total_degree(*this, ins);
  if (target->degree(out) != total + degree)
    fail("degree violation in map entry: " + target->name(out));
  auto key = std::make_pair(out, ins);
  auto it = coeffs.find(key);
  if (it == coeffs.end()) {
    if (c != 0) coeffs.emplace(key, c);
  } else {
    it->second += c;
    if (it->second == 0) coeffs.erase(it);
  }
}

Int GradedMap::coeff(int out, const std::vector<int>& ins) const {
  auto it = coeffs.find(std::make_pair(out, ins));
  return it == coeffs.end() ? 0 : it->second;
}

GradedMap zero_map(std::vector<ModulePtr> sources, ModulePtr target, int degree) {
  if (sources.empty()) fail("maps need arity >= 1");
  GradedMap f;
  f.sources = std::move(sources);
  f.target = std::move(target);
  f.degree = degree;
  return f;
}

GradedMap identity_map(const ModulePtr& m) {
  GradedMap f = zero_map({m}, m, 0);
  for (int i = 0; i < m->rank(); ++i) f.add(i, {i}, 1);
  return f;
}

bool same_shape(const GradedMap& f, const GradedMap& g) {
  if (f.arity() != g.arity() || f.degree != g.degree) return false;
  for (int i = 0; i < f.arity(); ++i)
    if (!same_module(f.sources[i], g.sources[i])) return false;
  return same_module(f.target, g.target);
}

bool operator==(const GradedMap& f, const GradedMap& g) {
  return same_shape(f, g) && f.coeffs == g.coeffs;
}

GradedMap operator+(const GradedMap& f, const GradedMap& g) {
  if (!same_shape(f, g)) fail("map shape mismatch in sum");
  GradedMap out = f;
  for (auto& [k, c] : g.coeffs) out.add(k.first, k.second, c);
  return out;
}

GradedMap operator-(const GradedMap& f, const GradedMap& g) {
  return f + (Int(-1)) * g;
}

GradedMap operator*(Int c, const GradedMap& f) {
  GradedMap out = zero_map(f.sources, f.target, f.degree);
  if (c == 0) return out;
  out.coeffs = f.coeffs;
  for (auto& [k, v] : out.coeffs) {
    (void)k;
    v *= c;
  }
  return out;
}

GradedMap tensor_maps(const std::vector<GradedMap>& fs) {
  if (fs.empty()) fail("tensor_maps needs at least one map");
  std::vector<ModulePtr> sources;
  std::vector<ModulePtr> targets;
  int degree = 0;
  for (auto& f : fs) {
    sources.insert(sources.end(), f.sources.begin(), f.sources.end());
    targets.push_back(f.target);
    degree += f.degree;
  }
  GradedMap out = zero_map(sources, tensor_module(targets), degree);
  // odometer over one entry per factor map
  std::vector<std::map<std::pair<int, std::vector<int>>, Int>::const_iterator> its;
  for (auto& f : fs) {
    if (f.coeffs.empty()) return out;
    its.push_back(f.coeffs.begin());
  }
  for (;;) {
    // Koszul: (-1)^{sum_{i<j} |f_j| |segment_i|}
    int sign_exp = 0;
    int tail_deg = 0;  // sum of |f_j| for j > current, accumulated right to left
    std::vector<int> seg_deg(fs.size());
    for (size_t i = 0; i < fs.size(); ++i)
      seg_deg[i] = fs[i].target->degree(its[i]->first.first) - fs[i].degree;
    for (int i = (int)fs.size() - 1; i >= 0; --i) {
      sign_exp += tail_deg * seg_deg[i];
      tail_deg += fs[i].degree;
    }
    Int c = (sign_exp % 2 == 0) ? 1 : -1;
    std::vector<int> ins;
    std::vector<int> outparts;
    for (size_t i = 0; i < fs.size(); ++i) {
      c *= its[i]->second;
      auto& k = its[i]->first;
      ins.insert(ins.end(), k.second.begin(), k.second.end());
      if (fs[i].target->factors.empty())
        outparts.push_back(k.first);
      else
        for (int p : split_index(*fs[i].target, k.first)) outparts.push_back(p);
    }
    out.add(out.target->factors.empty() ? outparts[0] : join_index(*out.target, outparts),
            ins, c);
    int p = (int)fs.size() - 1;
    while (p >= 0) {
      ++its[p];
      if (its[p] != fs[p].coeffs.end()) break;
      its[p] = fs[p].coeffs.begin();
      --p;
    }
    if (p < 0) break;
  }
  return out;
}

namespace {

/* Split a composite index of `whole` into one composite index per module of
 * `parts`, matching flattened factors positionally. */
std::vector<int> regroup_index(const GradedModule& whole, int index,
                               const std::vector<ModulePtr>& parts) {
  std::vector<int> flat = split_index(whole, index);
  std::vector<ModulePtr> wf = whole.factors.empty()
                                  ? std::vector<ModulePtr>{}
                                  : whole.factors;
  size_t pos = 0;
  std::vector<int> out;
  for (auto& p : parts) {
    size_t n = flat_factors(p).size();
    if (pos + n > flat.size()) fail("factor shape mismatch in composition");
    std::vector<int> sub(flat.begin() + pos, flat.begin() + pos + n);
    out.push_back(join_index(*p, sub));
    pos += n;
  }
  if (pos != flat.size()) fail("factor shape mismatch in composition");
  (void)wf;
  return out;
}

void check_flat_match(const std::vector<ModulePtr>& inner_targets,
                      const std::vector<ModulePtr>& outer_sources) {
  std::vector<ModulePtr> a, b;
  for (auto& m : inner_targets)
    for (auto& f : flat_factors(m)) a.push_back(f);
  for (auto& m : outer_sources)
    for (auto& f : flat_factors(m)) b.push_back(f);
  if (a.size() != b.size()) fail("arity mismatch between outer and inner maps");
  for (size_t i = 0; i < a.size(); ++i)
    if (!same_module(a[i], b[i])) fail("module mismatch between outer and inner maps");
}

}  // namespace

GradedMap koszul_compose(const std::vector<GradedMap>& outer,
                         const std::vector<GradedMap>& inner) {
  GradedMap F = tensor_maps(outer);
  GradedMap G = tensor_maps(inner);
  std::vector<ModulePtr> gt{G.target};
  check_flat_match(gt, F.sources);
  GradedMap out = zero_map(G.sources, F.target, F.degree + G.degree);
  // index F entries by their input tuple
  std::map<std::vector<int>, std::vector<std::pair<int, Int>>> by_ins;
  for (auto& [k, c] : F.coeffs) by_ins[k.second].emplace_back(k.first, c);
  for (auto& [gk, gc] : G.coeffs) {
    std::vector<int> fins = regroup_index(*G.target, gk.first, F.sources);
    auto it = by_ins.find(fins);
    if (it == by_ins.end()) continue;
    for (auto& [fout, fc] : it->second) out.add(fout, gk.second, fc * gc);
  }
  return out;
}

Element koszul_tensor_apply(const std::vector<GradedMap>& maps, const Element& x) {
  GradedMap F = tensor_maps(maps);
  check_flat_match({x.module}, F.sources);
  std::map<std::vector<int>, std::vector<std::pair<int, Int>>> by_ins;
  for (auto& [k, c] : F.coeffs) by_ins[k.second].emplace_back(k.first, c);
  Element out = zero_element(F.target);
  for (auto& [idx, c] : x.coeffs) {
    std::vector<int> parts = regroup_index(*x.module, idx, F.sources);
    // regroup to the full per-source tuple: each part is already composite per
    // source, but map entries key on per-source indices directly
    auto it = by_ins.find(parts);
    if (it == by_ins.end()) continue;
    for (auto& [fout, fc] : it->second) out.add(fout, fc * c);
  }
  return out;
}

GradedMap bracket(const GradedMap& f, const GradedMap& d_source,
                  const GradedMap& d_target) {
  for (auto d : {&d_source, &d_target}) {
    if (d->arity() != 1 || d->degree != 1) fail("differential must have arity 1, degree +1");
    if (!same_module(d->sources[0], d->target)) fail("differential must be an endomap");
  }
  for (auto& s : f.sources)
    if (!same_module(s, d_source.sources[0])) fail("bracket: source module mismatch");
  if (!same_module(f.target, d_target.sources[0])) fail("bracket: target module mismatch");
  GradedMap out = koszul_compose({d_target}, {f});
  Int sgn = (f.degree % 2 == 0) ? 1 : -1;
  for (int i = 0; i < f.arity(); ++i) {
    std::vector<GradedMap> gs;
    for (int j = 0; j < f.arity(); ++j)
      gs.push_back(j == i ? d_source : identity_map(f.sources[j]));
    out = out - sgn * koszul_compose({f}, gs);
  }
  return out;
}

GradedMap suspend_conjugate(const GradedMap& f) {
  int m = f.arity();
  std::vector<ModulePtr> ss;
  for (auto& s : f.sources) ss.push_back(suspend_module(s));
  GradedMap out = zero_map(ss, suspend_module(f.target), f.degree + m - 1);
  for (auto& [k, c] : f.coeffs) {
    int e = 0;
    for (int i = 0; i < m; ++i) e += (m - 1 - i) * (f.sources[i]->degree(k.second[i]) - 1);
    out.add(k.first, k.second, (e % 2 == 0) ? c : -c);
  }
  return out;
}

GradedMap desuspend_conjugate(const GradedMap& b) {
  int m = b.arity();
  std::vector<ModulePtr> ss;
  for (auto& s : b.sources) ss.push_back(desuspend_module(s));
  GradedMap out = zero_map(ss, desuspend_module(b.target), b.degree - m + 1);
  for (auto& [k, c] : b.coeffs) {
    int e = 0;
    for (int i = 0; i < m; ++i) e += (m - 1 - i) * (b.sources[i]->degree(k.second[i]) + 1);
    out.add(k.first, k.second, (e % 2 == 0) ? c : -c);
  }
  return out;
}

GradedMap convention_twist(const GradedMap& f) {
  int m = f.arity();
  return Int((m * (m - 1) / 2) % 2 == 0 ? 1 : -1) * f;
}

}  // namespace nmorph
