#include "nmorph/algebra.hpp"

#include <functional>
#include <stdexcept>

#include "nmorph/json_io.hpp"

namespace nmorph {

namespace {

Int parity_sign(Int x) { return (x % 2 + 2) % 2 == 0 ? 1 : -1; }

void require_shape(const GradedMap& f, int arity, const ModulePtr& src,
                   const ModulePtr& tgt, int degree, const std::string& what) {
  bool ok = f.arity() == arity && f.degree == degree && same_module(f.target, tgt);
  for (int i = 0; ok && i < arity; ++i) ok = same_module(f.sources[i], src);
  if (!ok) throw std::invalid_argument(what + ": operation has the wrong shape");
}

void validate_ainf(const AInfAlgebra& a, const std::string& who) {
  if (!a.module) throw std::invalid_argument(who + ": missing module");
  for (const auto& [k, op] : a.ops) {
    if (k < 1) throw std::invalid_argument(who + ": operation arity below one");
    require_shape(op, k, a.module, a.module, 2 - k, who + " arity " + std::to_string(k));
  }
}

void validate_ombas(const OmegaBAsAlgebra& a, const std::string& who) {
  if (!a.module) throw std::invalid_argument(who + ": missing module");
  require_shape(a.diff, 1, a.module, a.module, 1, who + " differential");
  for (const auto& [t, op] : a.ops) {
    if (t.is_unit() || !tree_valid(t)) throw std::invalid_argument(who + ": bad operation tree");
    require_shape(op, t.arity(), a.module, a.module, int(t.degree()),
                  who + " tree " + tree_to_json(t).dump());
  }
}

std::string face_str(const Face& f) { return nlohmann::json(f.verts).dump(); }

std::string cell_str(const GaugedTree& g) {
  std::string s = tree_to_json(g.tree).dump() + " {";
  for (size_t i = 0; i < g.status.size(); ++i) {
    if (i) s += ",";
    s += rel_name(g.status[i]);
  }
  return s + "}";
}

/* x -> (-1)^{(ambient_dim + 1)|x|} d(x) on a basis coefficient level */
GradedMap twist_diff(const GradedMap& d, int ambient_dim) {
  GradedMap out = zero_map(d.sources, d.target, d.degree);
  for (const auto& [key, c] : d.coeffs) {
    Int deg = d.sources[0]->degree(key.second[0]);
    out.add(key.first, key.second, parity_sign((ambient_dim + 1) * deg) * c);
  }
  return out;
}

/* Composite value of a component stack; comp_map names each component's
 * operation, free leaf slots feed free_module. */
GradedMap stack_value(const BrokenTree& b, const std::function<GradedMap(int)>& comp_map,
                      const ModulePtr& free_module) {
  std::function<GradedMap(int)> eval = [&](int c) -> GradedMap {
    int ar = b.comps[c].shape.arity();
    std::vector<GradedMap> inner((size_t)ar, identity_map(free_module));
    for (int j = 0; j < (int)b.comps.size(); ++j)
      if (b.comps[j].parent == c) inner[(size_t)b.comps[j].leaf - 1] = eval(j);
    return koszul_compose({comp_map(c)}, inner);
  };
  return eval(0);
}

void record(ResidualReport& rep, const std::string& relation, const GradedMap& residual) {
  ++rep.checked;
  if (residual.is_zero()) return;
  rep.ok = false;
  rep.entries.push_back({relation, residual});
}

nlohmann::json face_to_json(const Face& f) {
  return {{"ambient", f.ambient}, {"verts", f.verts}};
}

Face face_from_json(const nlohmann::json& j) {
  return make_face(j.at("ambient").get<int>(), j.at("verts").get<std::vector<int>>());
}

}  // namespace

GradedMap ainf_op(const AInfAlgebra& a, int arity) {
  auto it = a.ops.find(arity);
  if (it != a.ops.end()) return it->second;
  return zero_map(std::vector<ModulePtr>((size_t)arity, a.module), a.module, 2 - arity);
}

GradedMap ombas_op(const OmegaBAsAlgebra& a, const RibbonTree& t) {
  auto it = a.ops.find(t);
  if (it != a.ops.end()) return it->second;
  return zero_map(std::vector<ModulePtr>((size_t)t.arity(), a.module), a.module,
                  int(t.degree()));
}

GradedMap nainf_map(const NAinfMorphism& f, const NAinfGenerator& g) {
  auto it = f.maps.find(g);
  if (it != f.maps.end()) return it->second;
  return zero_map(std::vector<ModulePtr>((size_t)g.arity, f.source.module), f.target.module,
                  int(nainf_generator_degree(g)));
}

GradedMap nombas_map(const NOmbasMorphism& f, const Face& face, const GaugedTree& cell) {
  auto it = f.maps.find({face, cell});
  if (it != f.maps.end()) return it->second;
  return zero_map(std::vector<ModulePtr>((size_t)cell.tree.arity(), f.source.module),
                  f.target.module, int(face.degree()) + gauged_degree(cell));
}

GradedMap represent_ainf_word(const AinfWord& w, const NAinfMorphism& f) {
  if (!ainf_word_valid(w)) throw std::invalid_argument("represent_ainf_word: invalid word");
  int n = (int)w.letters.size();
  std::function<GradedMap(int)> eval = [&](int i) -> GradedMap {
    const AinfLetter& l = w.letters[i];
    GradedMap head = [&]() -> GradedMap {
      if (l.gen) return nainf_map(f, {l.face, l.arity});
      bool below = false;
      for (int p = l.parent; p >= 0; p = w.letters[p].parent)
        below = below || w.letters[p].gen;
      return ainf_op(below ? f.source : f.target, l.arity);
    }();
    std::vector<GradedMap> inner((size_t)l.arity, identity_map(f.source.module));
    for (int j = 0; j < n; ++j)
      if (w.letters[j].parent == i) inner[(size_t)w.letters[j].slot - 1] = eval(j);
    return koszul_compose({head}, inner);
  };
  return eval(0);
}

GradedMap represent_broken_word(const BrokenTree& b, const NOmbasMorphism& f) {
  if (!broken_valid(b, WordContext::Bimodule) || b.labels.size() != (size_t)gauge_count(b))
    throw std::invalid_argument("represent_broken_word: invalid labeled word");
  std::vector<int> label_of(b.comps.size(), -1);
  int seen = 0;
  for (size_t c = 0; c < b.comps.size(); ++c)
    if (b.comps[c].gauged) label_of[c] = seen++;
  return stack_value(
      b,
      [&](int c) -> GradedMap {
        const Component& comp = b.comps[(size_t)c];
        if (comp.gauged)
          return nombas_map(f, b.labels[(size_t)label_of[(size_t)c]],
                            {comp.shape, comp.status});
        bool below = false;
        for (int p = comp.parent; p >= 0; p = b.comps[(size_t)p].parent)
          below = below || b.comps[(size_t)p].gauged;
        return ombas_op(below ? f.source : f.target, comp.shape);
      },
      f.source.module);
}

nlohmann::json residual_report_to_json(const ResidualReport& r) {
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& e : r.entries)
    failures.push_back({{"relation", e.relation}, {"residual", map_to_json(e.residual)}});
  return {{"ok", r.ok}, {"cap", r.cap}, {"checked", r.checked}, {"failures", failures}};
}

ResidualReport check_ainf(const AInfAlgebra& a, int cap) {
  validate_ainf(a, "algebra");
  ResidualReport rep;
  rep.cap = cap;
  for (int m = 1; m <= cap; ++m) {
    GradedMap r = zero_map(std::vector<ModulePtr>((size_t)m, a.module), a.module, 3 - m);
    for (int i2 = 1; i2 <= m; ++i2)
      for (int i1 = 0; i1 + i2 <= m; ++i1) {
        int i3 = m - i1 - i2;
        std::vector<GradedMap> inner;
        for (int i = 0; i < i1; ++i) inner.push_back(identity_map(a.module));
        inner.push_back(ainf_op(a, i2));
        for (int i = 0; i < i3; ++i) inner.push_back(identity_map(a.module));
        r = r + parity_sign(i1 + i2 * i3) * koszul_compose({ainf_op(a, i1 + 1 + i3)}, inner);
      }
    record(rep, "arity " + std::to_string(m), r);
  }
  return rep;
}

ResidualReport check_ombas(const OmegaBAsAlgebra& a, int cap) {
  validate_ombas(a, "algebra");
  ResidualReport rep;
  rep.cap = cap;
  record(rep, "differential", koszul_compose({a.diff}, {a.diff}));
  for (int k = 2; k <= cap; ++k)
    for (const RibbonTree& t : enumerate_srt(k)) {
      GradedMap lhs = bracket(ombas_op(a, t), a.diff, a.diff);
      std::vector<int> omega(t.edges());
      for (int e = 0; e < t.edges(); ++e) omega[(size_t)e] = e;
      GradedMap rhs = zero_map(lhs.sources, lhs.target, lhs.degree);
      for (const BoundaryTerm& term : srt_boundary(t, omega))
        rhs = rhs + Int(term.sign) * stack_value(
                                         term.tree,
                                         [&](int c) { return ombas_op(a, term.tree.comps[(size_t)c].shape); },
                                         a.module);
      record(rep, "tree " + tree_to_json(t).dump(), lhs - rhs);
    }
  return rep;
}

ResidualReport check_n_morphism(const NAinfMorphism& f, int cap) {
  validate_ainf(f.source, "source");
  validate_ainf(f.target, "target");
  for (const auto& [g, map] : f.maps) {
    if (g.face.ambient != f.n || g.arity < 1)
      throw std::invalid_argument("morphism: key outside the ambient simplex");
    require_shape(map, g.arity, f.source.module, f.target.module,
                  int(nainf_generator_degree(g)),
                  "map " + face_str(g.face) + " arity " + std::to_string(g.arity));
  }
  GradedMap d_src = ainf_op(f.source, 1);
  GradedMap d_tgt = ainf_op(f.target, 1);
  ResidualReport rep;
  rep.cap = cap;
  for (const Face& face : all_faces(f.n))
    for (int m = 1; m <= cap; ++m) {
      NAinfGenerator g{face, m};
      GradedMap lhs = bracket(nainf_map(f, g), d_src, d_tgt);
      GradedMap rhs = zero_map(lhs.sources, lhs.target, lhs.degree);
      for (const auto& [w, c] : nainf_diff(g)) rhs = rhs + c * represent_ainf_word(w, f);
      record(rep, "face " + face_str(face) + " arity " + std::to_string(m), lhs - rhs);
    }
  return rep;
}

ResidualReport check_n_ombas_morphism(const NOmbasMorphism& f, int cap, bool twisted,
                                      int ambient_dim) {
  validate_ombas(f.source, "source");
  validate_ombas(f.target, "target");
  for (const auto& [key, map] : f.maps) {
    if (key.first.ambient != f.n || !gauge_valid(key.second))
      throw std::invalid_argument("morphism: key outside the ambient simplex");
    require_shape(map, key.second.tree.arity(), f.source.module, f.target.module,
                  int(key.first.degree()) + gauged_degree(key.second),
                  "map " + face_str(key.first) + " cell " + cell_str(key.second));
  }
  GradedMap d_src = twisted ? twist_diff(f.source.diff, ambient_dim) : f.source.diff;
  GradedMap d_tgt = twisted ? twist_diff(f.target.diff, ambient_dim) : f.target.diff;
  ResidualReport rep;
  rep.cap = cap;
  for (const Face& face : all_faces(f.n))
    for (int m = 1; m <= cap; ++m)
      for (const GaugedTree& cell : enumerate_scrt(m)) {
        BrokenTree elem = single_gauged(cell);
        elem.labels = {face};
        GradedMap lhs = bracket(nombas_map(f, face, cell), d_src, d_tgt);
        GradedMap rhs = zero_map(lhs.sources, lhs.target, lhs.degree);
        for (const auto& [b, c] : nombas_diff(elem)) rhs = rhs + c * represent_broken_word(b, f);
        record(rep, "face " + face_str(face) + " cell " + cell_str(cell), lhs - rhs);
      }
  return rep;
}

AInfAlgebra induce_ainf(const OmegaBAsAlgebra& a, const OperadSignTable& table) {
  if (!table.ok)
    throw std::invalid_argument("sign table unavailable: run operad_sign_solve first");
  validate_ombas(a, "algebra");
  AInfAlgebra out;
  out.module = a.module;
  if (!a.diff.is_zero()) out.ops[1] = a.diff;
  for (int k = 2; k <= table.m_max; ++k) {
    GradedMap op = zero_map(std::vector<ModulePtr>((size_t)k, a.module), a.module, 2 - k);
    for (const auto& [b, eps] : operad_comparison(k, table))
      op = op + eps * ombas_op(a, b.comps[0].shape);
    if (!op.is_zero()) out.ops[k] = op;
  }
  return out;
}

NAinfMorphism push_forward(const NOmbasMorphism& f, const ComparisonSignTable& table) {
  if (!table.ok)
    throw std::invalid_argument("sign table unavailable: run phi_compat_solve first");
  NAinfMorphism out;
  out.source = induce_ainf(f.source, table.operad);
  out.target = induce_ainf(f.target, table.operad);
  out.n = f.n;
  for (const Face& face : all_faces(f.n))
    for (int m = 1; m <= table.m_max; ++m) {
      NAinfGenerator g{face, m};
      GradedMap map = zero_map(std::vector<ModulePtr>((size_t)m, f.source.module),
                               f.target.module, int(nainf_generator_degree(g)));
      for (const auto& [b, eps] : phi(g, table))
        map = map + eps * nombas_map(f, b.labels[0], {b.comps[0].shape, b.comps[0].status});
      if (!map.is_zero()) out.maps[g] = map;
    }
  return out;
}

nlohmann::json ainf_algebra_to_json(const AInfAlgebra& a) {
  nlohmann::json ops = nlohmann::json::array();
  for (const auto& [k, op] : a.ops) ops.push_back({{"arity", k}, {"map", map_to_json(op)}});
  return {{"module", module_to_json(*a.module)}, {"ops", ops}};
}

AInfAlgebra ainf_algebra_from_json(const nlohmann::json& j) {
  AInfAlgebra a;
  a.module = module_from_json(j.at("module"));
  for (const auto& jo : j.at("ops")) {
    int k = jo.at("arity").get<int>();
    a.ops.emplace(k, map_from_json(jo.at("map"),
                                   std::vector<ModulePtr>((size_t)k, a.module), a.module));
  }
  return a;
}

nlohmann::json ombas_algebra_to_json(const OmegaBAsAlgebra& a) {
  nlohmann::json ops = nlohmann::json::array();
  for (const auto& [t, op] : a.ops)
    ops.push_back({{"tree", tree_to_json(t)}, {"map", map_to_json(op)}});
  return {{"module", module_to_json(*a.module)}, {"diff", map_to_json(a.diff)}, {"ops", ops}};
}

OmegaBAsAlgebra ombas_algebra_from_json(const nlohmann::json& j) {
  OmegaBAsAlgebra a;
  a.module = module_from_json(j.at("module"));
  a.diff = map_from_json(j.at("diff"), {a.module}, a.module);
  for (const auto& jo : j.at("ops")) {
    RibbonTree t = tree_from_json(jo.at("tree"));
    a.ops.emplace(t, map_from_json(jo.at("map"),
                                   std::vector<ModulePtr>((size_t)t.arity(), a.module),
                                   a.module));
  }
  return a;
}

nlohmann::json nainf_morphism_to_json(const NAinfMorphism& f) {
  nlohmann::json maps = nlohmann::json::array();
  for (const auto& [g, map] : f.maps)
    maps.push_back(
        {{"face", face_to_json(g.face)}, {"arity", g.arity}, {"map", map_to_json(map)}});
  return {{"flavor", "ainf"},
          {"n", f.n},
          {"source", ainf_algebra_to_json(f.source)},
          {"target", ainf_algebra_to_json(f.target)},
          {"maps", maps}};
}

NAinfMorphism nainf_morphism_from_json(const nlohmann::json& j) {
  if (j.at("flavor").get<std::string>() != "ainf")
    throw std::invalid_argument("expected an ainf-flavored morphism");
  NAinfMorphism f;
  f.n = j.at("n").get<int>();
  f.source = ainf_algebra_from_json(j.at("source"));
  f.target = ainf_algebra_from_json(j.at("target"));
  for (const auto& jm : j.at("maps")) {
    NAinfGenerator g{face_from_json(jm.at("face")), jm.at("arity").get<int>()};
    f.maps.emplace(g, map_from_json(jm.at("map"),
                                    std::vector<ModulePtr>((size_t)g.arity, f.source.module),
                                    f.target.module));
  }
  return f;
}

nlohmann::json nombas_morphism_to_json(const NOmbasMorphism& f) {
  nlohmann::json maps = nlohmann::json::array();
  for (const auto& [key, map] : f.maps)
    maps.push_back({{"face", face_to_json(key.first)},
                    {"cell", gauged_to_json(key.second)},
                    {"map", map_to_json(map)}});
  return {{"flavor", "ombas"},
          {"n", f.n},
          {"source", ombas_algebra_to_json(f.source)},
          {"target", ombas_algebra_to_json(f.target)},
          {"maps", maps}};
}

NOmbasMorphism nombas_morphism_from_json(const nlohmann::json& j) {
  if (j.at("flavor").get<std::string>() != "ombas")
    throw std::invalid_argument("expected an ombas-flavored morphism");
  NOmbasMorphism f;
  f.n = j.at("n").get<int>();
  f.source = ombas_algebra_from_json(j.at("source"));
  f.target = ombas_algebra_from_json(j.at("target"));
  for (const auto& jm : j.at("maps")) {
    GaugedTree cell = gauged_from_json(jm.at("cell"));
    f.maps.emplace(
        std::make_pair(face_from_json(jm.at("face")), cell),
        map_from_json(jm.at("map"),
                      std::vector<ModulePtr>((size_t)cell.tree.arity(), f.source.module),
                      f.target.module));
  }
  return f;
}

}  // namespace nmorph
