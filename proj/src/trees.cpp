#include "nmorph/trees.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>

namespace nmorph {

namespace {

int sort_parity(std::vector<int>& v) {
  int sign = 1;
  for (size_t i = 1; i < v.size(); ++i)
    for (size_t k = i; k > 0 && v[k - 1] > v[k]; --k) {
      std::swap(v[k - 1], v[k]);
      sign = -sign;
    }
  return sign;
}

void check_omega(const std::vector<int>& omega, int edges) {
  std::vector<int> copy = omega;
  std::sort(copy.begin(), copy.end());
  for (int g = 0; g < edges; ++g)
    if (g >= (int)copy.size() || copy[g] != g)
      throw std::invalid_argument("ordering does not list exactly the internal edges");
  if ((int)copy.size() != edges)
    throw std::invalid_argument("ordering does not list exactly the internal edges");
}

/* 1-based position of edge g in omega */
int omega_pos(const std::vector<int>& omega, int g) {
  for (size_t i = 0; i < omega.size(); ++i)
    if (omega[i] == g) return (int)i + 1;
  throw std::logic_error("edge not in ordering");
}

}  // namespace

int RibbonTree::arity() const {
  if (is_unit()) return 1;
  int m = 0;
  for (const auto& row : kids)
    for (int c : row)
      if (c < 0) ++m;
  return m;
}

std::vector<int> RibbonTree::parent() const {
  std::vector<int> par(nv(), -1);
  for (int v = 0; v < nv(); ++v)
    for (int c : kids[v])
      if (c >= 0) par[c] = v;
  return par;
}

std::vector<std::pair<int, int>> RibbonTree::leaf_slots() const {
  std::vector<std::pair<int, int>> out;
  if (is_unit()) return out;
  std::function<void(int)> rec = [&](int v) {
    for (int s = 0; s < (int)kids[v].size(); ++s) {
      int c = kids[v][s];
      if (c < 0)
        out.push_back({v, s});
      else
        rec(c);
    }
  };
  rec(0);
  return out;
}

RibbonTree unit_tree() { return {}; }

RibbonTree corolla(int m) {
  if (m < 2) throw std::invalid_argument("corolla needs at least two leaves");
  RibbonTree t;
  t.kids.push_back(std::vector<int>(m, -1));
  return t;
}

bool tree_valid(const RibbonTree& t) {
  if (t.is_unit()) return true;
  int n = t.nv();
  int counter = 0;
  bool ok = true;
  std::function<void(int)> rec = [&](int v) {
    if (!ok || v != counter) {
      ok = false;
      return;
    }
    ++counter;
    if ((int)t.kids[v].size() < 2) {
      ok = false;
      return;
    }
    for (int c : t.kids[v]) {
      if (!ok) return;
      if (c >= n) {
        ok = false;
        return;
      }
      if (c >= 0) rec(c);
    }
  };
  rec(0);
  return ok && counter == n;
}

nlohmann::json tree_to_json(const RibbonTree& t) {
  if (t.is_unit()) return 1;
  int next_leaf = 1;
  std::function<nlohmann::json(int)> rec = [&](int v) -> nlohmann::json {
    nlohmann::json a = nlohmann::json::array();
    for (int c : t.kids[v]) {
      if (c < 0)
        a.push_back(next_leaf++);
      else
        a.push_back(rec(c));
    }
    return a;
  };
  return rec(0);
}

RibbonTree tree_from_json(const nlohmann::json& j) {
  RibbonTree t;
  if (j.is_number_integer()) {
    if (j.get<int>() != 1) throw std::invalid_argument("unit tree is the single leaf 1");
    return t;
  }
  int next_leaf = 1;
  std::function<int(const nlohmann::json&)> rec = [&](const nlohmann::json& a) -> int {
    if (!a.is_array() || a.size() < 2)
      throw std::invalid_argument("tree vertex needs at least two children");
    int v = t.nv();
    t.kids.push_back(std::vector<int>(a.size(), -1));
    for (size_t s = 0; s < a.size(); ++s) {
      if (a[s].is_number_integer()) {
        if (a[s].get<int>() != next_leaf)
          throw std::invalid_argument("leaves must read 1..m left to right");
        ++next_leaf;
      } else {
        int c = rec(a[s]);
        t.kids[v][s] = c;
      }
    }
    return v;
  };
  rec(j);
  return t;
}

GaugedTree trivial_gauged() { return {unit_tree(), {}}; }

bool gauge_valid(const GaugedTree& t) {
  if (!tree_valid(t.tree)) return false;
  if ((int)t.status.size() != t.tree.nv()) return false;
  auto par = t.tree.parent();
  for (int v = 1; v < t.tree.nv(); ++v)
    if (t.status[v] != Rel::Above && t.status[par[v]] != Rel::Below) return false;
  return true;
}

int on_count(const GaugedTree& t) {
  int j = 0;
  for (Rel r : t.status)
    if (r == Rel::On) ++j;
  return j;
}

int cell_dim(const GaugedTree& t) {
  if (t.tree.is_unit()) return 0;
  return t.tree.edges() + 1 - on_count(t);
}

int gauged_degree(const GaugedTree& t) { return -cell_dim(t); }

std::vector<Int> realizability_witness(const GaugedTree& t) {
  if (!gauge_valid(t)) throw std::invalid_argument("gauge statuses are not realizable");
  int n = t.tree.nv();
  auto par = t.tree.parent();
  std::vector<int> depth(n, 0);
  int maxd = 0;
  for (int v = 1; v < n; ++v) {
    depth[v] = depth[par[v]] + 1;
    maxd = std::max(maxd, depth[v]);
  }
  std::vector<Int> h(n, 0);
  for (int v = 0; v < n; ++v) {
    if (t.status[v] == Rel::Below)
      h[v] = depth[v] - (maxd + 1);
    else if (t.status[v] == Rel::On)
      h[v] = 0;
    else
      h[v] = depth[v] + 1;
  }
  return h;
}

std::vector<int> on_vertices_left_right(const GaugedTree& t) {
  std::vector<int> out;
  if (t.tree.is_unit()) return out;
  std::function<void(int)> rec = [&](int v) {
    if (t.status[v] == Rel::On) {
      out.push_back(v);
      return;
    }
    if (t.status[v] == Rel::Above) return;
    for (int c : t.tree.kids[v])
      if (c >= 0) rec(c);
  };
  rec(0);
  return out;
}

std::string rel_name(Rel r) {
  switch (r) {
    case Rel::Above: return "above";
    case Rel::On: return "on";
    default: return "below";
  }
}

Rel rel_from_name(const std::string& s) {
  if (s == "above") return Rel::Above;
  if (s == "on") return Rel::On;
  if (s == "below") return Rel::Below;
  throw std::invalid_argument("unknown status " + s);
}

nlohmann::json gauged_to_json(const GaugedTree& t) {
  nlohmann::json st = nlohmann::json::array();
  for (Rel r : t.status) st.push_back(rel_name(r));
  return {{"tree", tree_to_json(t.tree)}, {"status", st}};
}

GaugedTree gauged_from_json(const nlohmann::json& j) {
  GaugedTree t;
  t.tree = tree_from_json(j.at("tree"));
  for (const auto& s : j.at("status")) t.status.push_back(rel_from_name(s.get<std::string>()));
  if (!gauge_valid(t)) throw std::invalid_argument("gauge statuses are not realizable");
  return t;
}

namespace {

/* root vertex plus leaves or subtrees below it, left to right */
RibbonTree assemble(const std::vector<std::optional<RibbonTree>>& children) {
  RibbonTree t;
  t.kids.emplace_back();
  for (const auto& ch : children) {
    if (!ch) {
      t.kids[0].push_back(-1);
      continue;
    }
    int base = t.nv();
    t.kids[0].push_back(base);
    for (const auto& row : ch->kids) {
      std::vector<int> shifted = row;
      for (int& c : shifted)
        if (c >= 0) c += base;
      t.kids.push_back(std::move(shifted));
    }
  }
  return t;
}

}  // namespace

std::vector<RibbonTree> enumerate_srt(int m) {
  if (m < 1) throw std::invalid_argument("arity must be positive");
  if (m == 1) return {unit_tree()};
  std::vector<RibbonTree> out;
  std::vector<std::optional<RibbonTree>> children;
  std::function<void(int)> build = [&](int rest) {
    if (rest == 0) {
      if (children.size() >= 2) out.push_back(assemble(children));
      return;
    }
    children.push_back(std::nullopt);
    build(rest - 1);
    children.pop_back();
    for (int k = 2; k <= rest; ++k) {
      if (children.empty() && k == m) continue;  // a root carries at least two children
      for (const auto& sub : enumerate_srt(k)) {
        children.push_back(sub);
        build(rest - k);
        children.pop_back();
      }
    }
  };
  build(m);
  return out;
}

std::vector<GaugedTree> enumerate_scrt(int m) {
  if (m == 1) return {trivial_gauged()};
  std::vector<GaugedTree> out;
  for (const auto& t : enumerate_srt(m)) {
    auto par = t.parent();
    std::vector<Rel> st(t.nv(), Rel::Above);
    std::function<void(int)> assign = [&](int v) {
      if (v == t.nv()) {
        out.push_back({t, st});
        return;
      }
      bool free_side = v == 0 || st[par[v]] == Rel::Below;
      for (Rel r : {Rel::Above, Rel::On, Rel::Below}) {
        if (!free_side && r != Rel::Above) continue;
        st[v] = r;
        assign(v + 1);
      }
      st[v] = Rel::Above;
    };
    assign(0);
  }
  return out;
}

std::vector<GaugedTree> enumerate_cbrt(int m) {
  if (m == 1) return {trivial_gauged()};
  std::vector<GaugedTree> out;
  for (const auto& t : enumerate_srt(m)) {
    bool binary = true;
    for (const auto& row : t.kids)
      if (row.size() != 2) binary = false;
    if (!binary) continue;
    auto par = t.parent();
    std::vector<Rel> st(t.nv(), Rel::Above);
    std::function<void(int)> assign = [&](int v) {
      if (v == t.nv()) {
        out.push_back({t, st});
        return;
      }
      bool free_side = v == 0 || st[par[v]] == Rel::Below;
      for (Rel r : {Rel::Above, Rel::Below}) {
        if (!free_side && r != Rel::Above) continue;
        st[v] = r;
        assign(v + 1);
      }
      st[v] = Rel::Above;
    };
    assign(0);
  }
  return out;
}

nlohmann::json enumerate_trees(TreeFamily f, int m) {
  nlohmann::json out = nlohmann::json::array();
  if (f == TreeFamily::SRT)
    for (const auto& t : enumerate_srt(m)) out.push_back(tree_to_json(t));
  else if (f == TreeFamily::SCRT)
    for (const auto& t : enumerate_scrt(m)) out.push_back(gauged_to_json(t));
  else
    for (const auto& t : enumerate_cbrt(m)) out.push_back(gauged_to_json(t));
  return out;
}

BrokenTree unit_word() {
  BrokenTree b;
  b.comps.push_back({unit_tree(), false, {}, -1, 0});
  return b;
}

BrokenTree single_bare(const RibbonTree& t) {
  if (!tree_valid(t)) throw std::invalid_argument("malformed tree");
  if (t.is_unit()) return unit_word();
  BrokenTree b;
  b.comps.push_back({t, false, {}, -1, 0});
  b.orient = canonical_orientation(b);
  return b;
}

BrokenTree single_gauged(const GaugedTree& t) {
  if (!gauge_valid(t)) throw std::invalid_argument("gauge statuses are not realizable");
  BrokenTree b;
  b.comps.push_back({t.tree, true, t.status, -1, 0});
  b.orient = canonical_orientation(b);
  return b;
}

int edge_count(const BrokenTree& t) {
  int e = 0;
  for (const auto& c : t.comps) e += c.shape.edges();
  return e;
}

int edge_offset(const BrokenTree& t, int comp) {
  int e = 0;
  for (int k = 0; k < comp; ++k) e += t.comps[k].shape.edges();
  return e;
}

int broken_arity(const BrokenTree& t) {
  int m = 0;
  for (const auto& c : t.comps) m += c.shape.arity();
  return m - ((int)t.comps.size() - 1);
}

namespace {

/* children of each component keyed by leaf slot */
std::map<std::pair<int, int>, int> occupancy(const std::vector<Component>& comps) {
  std::map<std::pair<int, int>, int> occ;
  for (int k = 0; k < (int)comps.size(); ++k) {
    if (comps[k].parent < 0) continue;
    auto key = std::make_pair(comps[k].parent, comps[k].leaf);
    if (occ.count(key)) throw std::invalid_argument("two components on one leaf slot");
    occ[key] = k;
  }
  return occ;
}

std::vector<int> comp_preorder(const std::vector<Component>& comps) {
  int root = -1;
  for (int k = 0; k < (int)comps.size(); ++k)
    if (comps[k].parent < 0) {
      if (root >= 0) throw std::invalid_argument("two root components");
      root = k;
    }
  if (root < 0) throw std::invalid_argument("no root component");
  auto occ = occupancy(comps);
  std::vector<int> order;
  std::function<void(int)> rec = [&](int c) {
    order.push_back(c);
    for (const auto& [slot, k] : occ)
      if (slot.first == c) rec(k);
  };
  rec(root);
  if (order.size() != comps.size()) throw std::invalid_argument("disconnected components");
  return order;
}

/* permutes comps into preorder; comp_map gives old index -> new index */
void apply_preorder(std::vector<Component>& comps, std::vector<int>& comp_map) {
  auto order = comp_preorder(comps);
  comp_map.assign(comps.size(), -1);
  for (int pos = 0; pos < (int)order.size(); ++pos) comp_map[order[pos]] = pos;
  std::vector<Component> next(comps.size());
  for (int k = 0; k < (int)comps.size(); ++k) {
    next[comp_map[k]] = comps[k];
    if (comps[k].parent >= 0) next[comp_map[k]].parent = comp_map[comps[k].parent];
  }
  comps = std::move(next);
}

}  // namespace

std::pair<int, int> locate_leaf(const BrokenTree& t, int leaf) {
  auto occ = occupancy(t.comps);
  int count = 0, fc = -1, fs = -1;
  std::function<void(int)> rec = [&](int c) {
    int ar = t.comps[c].shape.arity();
    for (int s = 1; s <= ar; ++s) {
      auto it = occ.find({c, s});
      if (it != occ.end()) {
        rec(it->second);
      } else {
        ++count;
        if (count == leaf) {
          fc = c;
          fs = s;
        }
      }
    }
  };
  int root = 0;
  for (int k = 0; k < (int)t.comps.size(); ++k)
    if (t.comps[k].parent < 0) root = k;
  rec(root);
  if (fc < 0) throw std::invalid_argument("no such leaf slot");
  return {fc, fs};
}

int gauge_count(const BrokenTree& t) {
  int g = 0;
  for (const auto& c : t.comps)
    if (c.gauged) ++g;
  return g;
}

int broken_degree(const BrokenTree& t) {
  int d = 0;
  for (const auto& c : t.comps)
    d += c.gauged ? gauged_degree({c.shape, c.status}) : c.shape.degree();
  for (const auto& f : t.labels) d += f.degree();
  return d;
}

int bare_degree(const BrokenTree& t) { return -edge_count(t); }

BrokenTree forget_gauges(const BrokenTree& t) {
  BrokenTree out;
  std::vector<int> kept;  // old comp index for each kept comp, old order
  for (int k = 0; k < (int)t.comps.size(); ++k)
    if (!t.comps[k].shape.is_unit()) kept.push_back(k);
  if (kept.empty()) return unit_word();
  std::vector<int> new_index(t.comps.size(), -1);
  for (int pos = 0; pos < (int)kept.size(); ++pos) new_index[kept[pos]] = pos;
  for (int k : kept) {
    Component c = t.comps[k];
    c.gauged = false;
    c.status.clear();
    /* resolve parents through deleted unit components */
    while (c.parent >= 0 && t.comps[c.parent].shape.is_unit()) {
      c.leaf = t.comps[c.parent].leaf;
      c.parent = t.comps[c.parent].parent;
    }
    if (c.parent >= 0)
      c.parent = new_index[c.parent];
    else
      c.leaf = 0;
    out.comps.push_back(c);
  }
  /* deleted components carry no edges, so global edge ids are unchanged */
  out.orient = t.orient;
  return out;
}

bool broken_valid(const BrokenTree& t, WordContext ctx) {
  int n = (int)t.comps.size();
  if (n == 0) return false;
  for (int k = 0; k < n; ++k) {
    const auto& c = t.comps[k];
    if (!tree_valid(c.shape)) return false;
    if (c.gauged) {
      if (!gauge_valid({c.shape, c.status})) return false;
    } else {
      if (!c.status.empty()) return false;
      if (c.shape.is_unit() && n > 1) return false;
    }
    if (k == 0) {
      if (c.parent != -1 || c.leaf != 0) return false;
    } else {
      if (c.parent < 0 || c.parent >= k) return false;
      if (c.leaf < 1 || c.leaf > t.comps[c.parent].shape.arity()) return false;
    }
  }
  try {
    auto order = comp_preorder(t.comps);
    for (int k = 0; k < n; ++k)
      if (order[k] != k) return false;
  } catch (const std::invalid_argument&) {
    return false;
  }
  if (!t.labels.empty() && (int)t.labels.size() != gauge_count(t)) return false;
  std::vector<int> copy = t.orient;
  std::sort(copy.begin(), copy.end());
  for (int g = 0; g < edge_count(t); ++g)
    if (g >= (int)copy.size() || copy[g] != g) return false;
  if ((int)copy.size() != edge_count(t)) return false;
  if (ctx == WordContext::Any) return true;
  if (ctx == WordContext::Operad) return gauge_count(t) == 0;
  /* bimodule: exactly one gauged component over every free leaf slot */
  if (t.comps[0].shape.is_unit() && !t.comps[0].gauged) return false;
  auto occ = occupancy(t.comps);
  std::vector<int> depth(n, 0);
  for (int k = 0; k < n; ++k) {
    depth[k] = (t.comps[k].gauged ? 1 : 0) + (t.comps[k].parent >= 0 ? depth[t.comps[k].parent] : 0);
    int free_slots = t.comps[k].shape.arity();
    for (const auto& [slot, kk] : occ)
      if (slot.first == k) --free_slots;
    if (free_slots > 0 && depth[k] != 1) return false;
  }
  return true;
}

std::vector<int> canonical_orientation(const BrokenTree& t) {
  std::vector<int> out(edge_count(t));
  std::iota(out.begin(), out.end(), 0);
  return out;
}

std::vector<int> canonical_orientation(const GaugedTree& t) {
  std::vector<int> out(t.tree.edges());
  std::iota(out.begin(), out.end(), 0);
  return out;
}

int normalize_orientation(BrokenTree& t) {
  check_omega(t.orient, edge_count(t));
  return sort_parity(t.orient);
}

std::string canon_key(const BrokenTree& t) { return broken_to_json(t).dump(); }

nlohmann::json broken_to_json(const BrokenTree& t) {
  nlohmann::json comps = nlohmann::json::array();
  for (const auto& c : t.comps) {
    nlohmann::json jc = {{"tree", tree_to_json(c.shape)},
                         {"gauged", c.gauged},
                         {"parent", c.parent},
                         {"leaf", c.leaf}};
    if (c.gauged) {
      nlohmann::json st = nlohmann::json::array();
      for (Rel r : c.status) st.push_back(rel_name(r));
      jc["status"] = st;
    }
    comps.push_back(jc);
  }
  nlohmann::json edges = nlohmann::json::array();
  for (int k = 0; k < (int)t.comps.size(); ++k)
    for (int g = 0; g < t.comps[k].shape.edges(); ++g)
      edges.push_back(nlohmann::json::array({k, g + 1}));
  nlohmann::json labels = nlohmann::json::array();
  for (const auto& f : t.labels) labels.push_back({{"ambient", f.ambient}, {"verts", f.verts}});
  return {{"comps", comps}, {"labels", labels}, {"edges", edges}, {"orient", t.orient}};
}

BrokenTree broken_from_json(const nlohmann::json& j) {
  BrokenTree t;
  for (const auto& jc : j.at("comps")) {
    Component c;
    c.shape = tree_from_json(jc.at("tree"));
    c.gauged = jc.at("gauged").get<bool>();
    if (c.gauged)
      for (const auto& s : jc.at("status")) c.status.push_back(rel_from_name(s.get<std::string>()));
    c.parent = jc.at("parent").get<int>();
    c.leaf = jc.at("leaf").get<int>();
    t.comps.push_back(c);
  }
  for (const auto& jf : j.at("labels"))
    t.labels.push_back(make_face(jf.at("ambient").get<int>(), jf.at("verts").get<std::vector<int>>()));
  t.orient = j.at("orient").get<std::vector<int>>();
  if (!broken_valid(t, WordContext::Any)) throw std::invalid_argument("malformed component stack");
  return t;
}

Grafted graft(const BrokenTree& host, int leaf, const BrokenTree& arg) {
  if (!broken_valid(host, WordContext::Any) || !broken_valid(arg, WordContext::Any))
    throw std::invalid_argument("malformed component stack");
  Grafted out;
  bool host_unit = host.comps.size() == 1 && host.comps[0].shape.is_unit() && !host.comps[0].gauged;
  bool arg_unit = arg.comps.size() == 1 && arg.comps[0].shape.is_unit() && !arg.comps[0].gauged;
  if (host_unit) {
    if (leaf != 1) throw std::invalid_argument("no such leaf slot");
    out.tree = arg;
    out.arg_edges.resize(edge_count(arg));
    std::iota(out.arg_edges.begin(), out.arg_edges.end(), 0);
    return out;
  }
  if (arg_unit) {
    locate_leaf(host, leaf);
    out.tree = host;
    out.host_edges.resize(edge_count(host));
    std::iota(out.host_edges.begin(), out.host_edges.end(), 0);
    return out;
  }
  auto [pc, ps] = locate_leaf(host, leaf);
  int hn = (int)host.comps.size();
  std::vector<Component> comps = host.comps;
  for (int k = 0; k < (int)arg.comps.size(); ++k) {
    Component c = arg.comps[k];
    if (k == 0) {
      c.parent = pc;
      c.leaf = ps;
    } else {
      c.parent += hn;
    }
    comps.push_back(c);
  }
  std::vector<int> comp_map;
  apply_preorder(comps, comp_map);
  out.tree.comps = comps;
  std::vector<int> offsets(comps.size() + 1, 0);
  for (int k = 0; k < (int)comps.size(); ++k) offsets[k + 1] = offsets[k] + comps[k].shape.edges();
  out.host_edges.assign(edge_count(host), -1);
  for (int k = 0; k < hn; ++k)
    for (int g = 0; g < host.comps[k].shape.edges(); ++g)
      out.host_edges[edge_offset(host, k) + g] = offsets[comp_map[k]] + g;
  out.arg_edges.assign(edge_count(arg), -1);
  for (int k = 0; k < (int)arg.comps.size(); ++k)
    for (int g = 0; g < arg.comps[k].shape.edges(); ++g)
      out.arg_edges[edge_offset(arg, k) + g] = offsets[comp_map[hn + k]] + g;
  for (int e : host.orient) out.tree.orient.push_back(out.host_edges[e]);
  for (int e : arg.orient) out.tree.orient.push_back(out.arg_edges[e]);
  out.sign = sort_parity(out.tree.orient);
  if (!host.labels.empty() || !arg.labels.empty()) {
    if ((int)host.labels.size() != gauge_count(host) || (int)arg.labels.size() != gauge_count(arg))
      throw std::invalid_argument("label counts do not match gauges");
    size_t hq = 0, aq = 0;
    for (int k = 0; k < (int)comps.size(); ++k) {
      if (!comps[k].gauged) continue;
      /* find source side of this component */
      int old = -1;
      for (int kk = 0; kk < (int)comp_map.size(); ++kk)
        if (comp_map[kk] == k) old = kk;
      if (old < hn)
        out.tree.labels.push_back(host.labels[hq++]);
      else
        out.tree.labels.push_back(arg.labels[aq++]);
    }
  }
  return out;
}

MuResult mu_compose(const BrokenTree& host, const std::vector<BrokenTree>& args) {
  if (!broken_valid(host, WordContext::Operad))
    throw std::invalid_argument("root action needs a bare host word");
  if (broken_arity(host) != (int)args.size())
    throw std::invalid_argument("argument count must match host arity");
  /* crossing parities: labels, gauges and gauge intersections of each
   * argument move past the host and all earlier arguments */
  Int host_deg = bare_degree(host);
  Int dagger = 0;
  Int acc_full = 0, acc_bare = 0;  // degrees of earlier arguments
  for (const auto& a : args) {
    Int lab = 0;
    for (const auto& f : a.labels) lab += f.degree();
    Int comp_deg = broken_degree(a) - lab;
    Int gauges = 0, ons = 0;
    for (const auto& c : a.comps)
      if (c.gauged) {
        if (!c.shape.is_unit()) ++gauges;
        ons += on_count({c.shape, c.status});
      }
    dagger += lab * (host_deg + acc_full);
    dagger += gauges * (host_deg + acc_bare);
    dagger += ons * (host_deg + acc_full);
    acc_full += comp_deg;
    acc_bare += bare_degree(a);
  }
  MuResult out;
  out.sign = ((dagger % 2) + 2) % 2 ? -1 : 1;
  out.tree = host;
  int pos = 0;
  for (const auto& a : args) {
    ++pos;
    auto g = graft(out.tree, pos, a);
    out.sign *= g.sign;
    out.tree = std::move(g.tree);
    pos += broken_arity(a) - 1;
  }
  return out;
}

MuResult mu_compose(const RibbonTree& host, const std::vector<BrokenTree>& args) {
  return mu_compose(single_bare(host), args);
}

Substituted substitute(const BrokenTree& word, int comp, const BrokenTree& repl) {
  if (!broken_valid(word, WordContext::Any) || !broken_valid(repl, WordContext::Any))
    throw std::invalid_argument("malformed component stack");
  if (word.orient != canonical_orientation(word) || repl.orient != canonical_orientation(repl))
    throw std::invalid_argument("substitution requires canonical orientations");
  if (comp < 0 || comp >= (int)word.comps.size()) throw std::invalid_argument("no such component");
  if (broken_arity(repl) != word.comps[comp].shape.arity())
    throw std::invalid_argument("replacement arity must match the component");
  int wn = (int)word.comps.size(), rn = (int)repl.comps.size();
  auto idx_word = [&](int k) { return k < comp ? k : k - 1 + rn; };
  auto idx_repl = [&](int r) { return comp + r; };
  std::vector<Component> comps(wn - 1 + rn);
  for (int k = 0; k < wn; ++k) {
    if (k == comp) continue;
    Component c = word.comps[k];
    if (c.parent == comp) {
      auto [rc, rs] = locate_leaf(repl, c.leaf);
      c.parent = idx_repl(rc);
      c.leaf = rs;
    } else if (c.parent >= 0) {
      c.parent = idx_word(c.parent);
    }
    comps[idx_word(k)] = c;
  }
  for (int r = 0; r < rn; ++r) {
    Component c = repl.comps[r];
    if (r == 0) {
      c.parent = word.comps[comp].parent >= 0 ? idx_word(word.comps[comp].parent) : -1;
      c.leaf = word.comps[comp].parent >= 0 ? word.comps[comp].leaf : 0;
    } else {
      c.parent = idx_repl(c.parent);
    }
    comps[idx_repl(r)] = c;
  }
  /* a unit replacement degenerates to deleting the component */
  bool repl_unit = rn == 1 && repl.comps[0].shape.is_unit() && !repl.comps[0].gauged;
  if (repl_unit && wn > 1) {
    std::vector<Component> pruned;
    for (int k = 0; k < (int)comps.size(); ++k)
      if (k != idx_repl(0)) pruned.push_back(comps[k]);
    for (auto& c : pruned)
      if (c.parent == idx_repl(0)) {
        c.parent = word.comps[comp].parent >= 0 ? idx_word(word.comps[comp].parent) : -1;
        c.leaf = word.comps[comp].parent >= 0 ? word.comps[comp].leaf : 0;
      } else if (c.parent > idx_repl(0)) {
        --c.parent;
      }
    comps = pruned;
  }
  Substituted out;
  std::vector<int> comp_map;
  apply_preorder(comps, comp_map);
  out.tree.comps = comps;
  std::vector<int> offsets(comps.size() + 1, 0);
  for (int k = 0; k < (int)comps.size(); ++k) offsets[k + 1] = offsets[k] + comps[k].shape.edges();
  auto mapped = [&](int combined, int g) { return offsets[comp_map[combined]] + g; };
  out.host_edges.assign(edge_count(word), -1);
  out.repl_edges.assign(edge_count(repl), -1);
  for (int k = 0; k < wn; ++k) {
    if (k == comp) continue;
    for (int g = 0; g < word.comps[k].shape.edges(); ++g)
      out.host_edges[edge_offset(word, k) + g] = mapped(idx_word(k), g);
  }
  if (!repl_unit)
    for (int r = 0; r < rn; ++r)
      for (int g = 0; g < repl.comps[r].shape.edges(); ++g)
        out.repl_edges[edge_offset(repl, r) + g] = mapped(idx_repl(r), g);
  for (int k = 0; k < wn; ++k) {
    if (k == comp) {
      for (int e : repl.orient) out.tree.orient.push_back(out.repl_edges[e]);
      continue;
    }
    for (int g = 0; g < word.comps[k].shape.edges(); ++g)
      out.tree.orient.push_back(out.host_edges[edge_offset(word, k) + g]);
  }
  out.sign = sort_parity(out.tree.orient);
  if (!word.labels.empty() || !repl.labels.empty()) {
    int kept_gauges = gauge_count(word) - (word.comps[comp].gauged ? 1 : 0);
    bool word_ok = word.labels.empty() ? kept_gauges == 0
                                       : (int)word.labels.size() == gauge_count(word);
    bool repl_ok = repl.labels.empty() ? gauge_count(repl) == 0
                                       : (int)repl.labels.size() == gauge_count(repl);
    if (!word_ok || !repl_ok) throw std::invalid_argument("label counts do not match gauges");
    std::vector<Face> word_queue;
    int gpos = 0;
    for (int k = 0; k < wn; ++k) {
      if (!word.comps[k].gauged) continue;
      if (k != comp && !word.labels.empty()) word_queue.push_back(word.labels[gpos]);
      ++gpos;
    }
    size_t wq = 0, rq = 0;
    std::vector<int> inv(comps.size(), -1);
    for (int kk = 0; kk < (int)comp_map.size(); ++kk) inv[comp_map[kk]] = kk;
    for (int k = 0; k < (int)out.tree.comps.size(); ++k) {
      if (!out.tree.comps[k].gauged) continue;
      int combined = inv[k];
      bool from_repl = !repl_unit && combined >= comp && combined < comp + rn;
      if (from_repl)
        out.tree.labels.push_back(repl.labels.at(rq++));
      else
        out.tree.labels.push_back(word_queue.at(wq++));
    }
  }
  return out;
}

namespace {

struct ContractedTree {
  RibbonTree tree;
  std::vector<int> vmap;
};

/* contracts the edge joining v to its parent; vmap sends v to the merged id */
ContractedTree contract_edge(const RibbonTree& t, int v) {
  ContractedTree out;
  out.vmap.assign(t.nv(), -1);
  std::function<void(int)> rec = [&](int w) {
    int id = out.tree.nv();
    out.vmap[w] = id;
    std::vector<int> content;
    for (int c : t.kids[w]) {
      if (c == v)
        for (int cc : t.kids[v]) content.push_back(cc);
      else
        content.push_back(c);
    }
    out.tree.kids.push_back(std::vector<int>(content.size(), -1));
    for (size_t s = 0; s < content.size(); ++s) {
      if (content[s] >= 0) {
        rec(content[s]);
        out.tree.kids[id][s] = out.vmap[content[s]];
      }
    }
  };
  rec(0);
  out.vmap[v] = out.vmap[t.parent()[v]];
  return out;
}

struct SplitTree {
  RibbonTree lower, upper;
  std::vector<int> lower_map, upper_map;
  int leaf_pos = 0;
};

/* removes the subtree hanging at v, leaving a leaf slot in its place */
SplitTree split_at(const RibbonTree& t, int v) {
  SplitTree out;
  out.lower_map.assign(t.nv(), -1);
  out.upper_map.assign(t.nv(), -1);
  std::function<void(int, RibbonTree&, std::vector<int>&, int)> rec =
      [&](int w, RibbonTree& dst, std::vector<int>& vmap, int skip) {
        int id = dst.nv();
        vmap[w] = id;
        dst.kids.push_back(std::vector<int>(t.kids[w].size(), -1));
        for (size_t s = 0; s < t.kids[w].size(); ++s) {
          int c = t.kids[w][s];
          if (c < 0 || c == skip) continue;
          rec(c, dst, vmap, skip);
          dst.kids[id][s] = vmap[c];
        }
      };
  rec(0, out.lower, out.lower_map, v);
  rec(v, out.upper, out.upper_map, -1);
  int u = t.parent()[v];
  int slot = 0;
  for (size_t s = 0; s < t.kids[u].size(); ++s)
    if (t.kids[u][s] == v) slot = (int)s;
  auto slots = out.lower.leaf_slots();
  for (size_t i = 0; i < slots.size(); ++i)
    if (slots[i] == std::make_pair(out.lower_map[u], slot)) out.leaf_pos = (int)i + 1;
  return out;
}

BoundaryTerm finish_term(std::string kind, std::vector<Component> comps, std::vector<int> orient,
                         int family_sign) {
  BoundaryTerm term;
  term.kind = std::move(kind);
  term.tree.comps = std::move(comps);
  term.tree.orient = std::move(orient);
  term.sign = family_sign * sort_parity(term.tree.orient);
  return term;
}

}  // namespace

std::vector<BoundaryTerm> gauged_boundary(const GaugedTree& t, const std::vector<int>& omega) {
  if (!gauge_valid(t)) throw std::invalid_argument("gauge statuses are not realizable");
  check_omega(omega, t.tree.edges());
  std::vector<BoundaryTerm> out;
  if (t.tree.is_unit()) return out;
  int n = t.tree.nv(), ne = t.tree.edges();
  int j = on_count(t);
  auto par = t.tree.parent();

  /* collapse: contract an edge not crossing the gauge */
  for (int g = 0; g < ne; ++g) {
    int v = g + 1, u = par[v];
    Rel su = t.status[u], sv = t.status[v];
    Rel merged;
    if (su == Rel::Above && sv == Rel::Above)
      merged = Rel::Above;
    else if (su == Rel::Below && sv == Rel::Below)
      merged = Rel::Below;
    else if (su == Rel::On && sv == Rel::Above)
      merged = Rel::On;
    else
      continue;
    auto ct = contract_edge(t.tree, v);
    std::vector<Rel> st(ct.tree.nv(), Rel::Above);
    for (int w = 0; w < n; ++w)
      if (w != v) st[ct.vmap[w]] = t.status[w];
    st[ct.vmap[u]] = merged;
    if (!gauge_valid({ct.tree, st})) continue;  // the sides must merge transversally
    std::vector<int> orient;
    for (int e : omega)
      if (e != g) orient.push_back(ct.vmap[e + 1] - 1);
    int p = omega_pos(omega, g);
    out.push_back(finish_term("collapse", {{ct.tree, true, st, -1, 0}}, std::move(orient),
                              (p + 1 + j) % 2 ? -1 : 1));
  }

  /* level merge: a strictly-below vertex rises onto the gauge, absorbing all
   * its on children through simultaneous edge contractions; the lone-child
   * case is the transversal below-on collapse */
  for (int u = 0; u < n; ++u) {
    if (t.status[u] != Rel::Below) continue;
    std::vector<int> merge;
    for (int v : t.tree.kids[u])
      if (v >= 0 && t.status[v] == Rel::On) merge.push_back(v);
    if (merge.empty()) continue;
    RibbonTree cur = t.tree;
    std::vector<int> total(n);
    for (int w = 0; w < n; ++w) total[w] = w;
    for (int v : merge) {
      auto ct = contract_edge(cur, total[v]);
      for (int w = 0; w < n; ++w) total[w] = ct.vmap[total[w]];
      cur = ct.tree;
    }
    std::vector<Rel> st(cur.nv(), Rel::Above);
    for (int w = 0; w < n; ++w) st[total[w]] = t.status[w];
    st[total[u]] = Rel::On;
    if (!gauge_valid({cur, st})) continue;  // a lower vertex blocks the rise
    int ext = 0;
    std::vector<int> working = omega;
    for (int v : merge) {
      int at = omega_pos(working, v - 1);
      ext += at + 1;
      working.erase(working.begin() + (at - 1));
    }
    std::vector<int> orient;
    for (int e : omega) {
      bool gone = false;
      for (int v : merge) gone = gone || v == e + 1;
      if (!gone) orient.push_back(total[e + 1] - 1);
    }
    out.push_back(finish_term("collapse", {{cur, true, st, -1, 0}}, std::move(orient),
                              (ext + j) % 2 ? -1 : 1));
  }

  /* gauge-vertex: a vertex lands on the gauge from below or from above */
  for (int v = 0; v < n; ++v) {
    int extra;
    if (t.status[v] == Rel::Below)
      extra = 0;
    else if (t.status[v] == Rel::Above && (v == 0 || t.status[par[v]] == Rel::Below))
      extra = 1;
    else
      continue;
    std::vector<Rel> st = t.status;
    st[v] = Rel::On;
    GaugedTree moved{t.tree, st};
    if (!gauge_valid(moved)) continue;
    auto ons = on_vertices_left_right(moved);
    int k = 0;
    for (size_t i = 0; i < ons.size(); ++i)
      if (ons[i] == v) k = (int)i;
    std::vector<int> orient = omega;
    out.push_back(finish_term("gauge-vertex", {{t.tree, true, st, -1, 0}}, std::move(orient),
                              (j + k + extra) % 2 ? -1 : 1));
  }

  /* above-break: an edge with upper endpoint strictly above the gauge breaks,
   * the piece above drifting off as a bare tree; when the whole tree sits
   * above the gauge its outgoing edge breaks instead */
  if (t.status[0] == Rel::Above) {
    std::vector<Component> comps = {{unit_tree(), true, {}, -1, 0}, {t.tree, false, {}, 0, 1}};
    std::vector<int> orient = omega;
    out.push_back(finish_term("above-break", std::move(comps), std::move(orient), 1));
  }
  for (int g = 0; g < ne; ++g) {
    int v = g + 1;
    if (t.status[v] != Rel::Above) continue;
    auto sp = split_at(t.tree, v);
    std::vector<Rel> st(sp.lower.nv(), Rel::Above);
    for (int w = 0; w < n; ++w)
      if (sp.lower_map[w] >= 0) st[sp.lower_map[w]] = t.status[w];
    int e_low = sp.lower.edges();
    std::vector<int> orient;
    for (int e : omega) {
      if (e == g) continue;
      int w = e + 1;
      orient.push_back(sp.lower_map[w] >= 0 ? sp.lower_map[w] - 1 : e_low + sp.upper_map[w] - 1);
    }
    int p = omega_pos(omega, g);
    std::vector<Component> comps = {{sp.lower, true, st, -1, 0},
                                    {sp.upper, false, {}, 0, sp.leaf_pos}};
    out.push_back(finish_term("above-break", std::move(comps), std::move(orient),
                              (p + j) % 2 ? -1 : 1));
  }

  /* below-break: every root-to-leaf path cuts once at an edge leaving the
   * strictly-below region, which drifts off downward as the bare root word */
  if (t.status[0] == Rel::Below) {
    std::vector<int> below;  // strictly-below vertices connected to the root
    std::vector<char> in_below(n, 0);
    for (int v = 0; v < n; ++v)
      if (t.status[v] == Rel::Below && (v == 0 || in_below[par[v]])) {
        in_below[v] = 1;
        below.push_back(v);
      }
    int nb = (int)below.size();
    for (int mask = 1; mask < (1 << nb); ++mask) {
      std::vector<char> in_r(n, 0);
      bool closed = true;
      for (int i = 0; i < nb; ++i)
        if (mask & (1 << i)) in_r[below[i]] = 1;
      if (!in_r[0]) continue;
      for (int i = 0; i < nb; ++i)
        if ((mask & (1 << i)) && below[i] != 0 && !in_r[par[below[i]]]) closed = false;
      if (!closed) continue;

      /* root component: the region tree with cut slots as leaves */
      RibbonTree root_tree;
      std::vector<int> rmap(n, -1);
      struct Cut {
        int vertex;  // subtree root, -1 for a leaf cut
      };
      std::vector<Cut> cuts;
      std::function<void(int)> build = [&](int w) {
        int id = root_tree.nv();
        rmap[w] = id;
        root_tree.kids.push_back(std::vector<int>(t.tree.kids[w].size(), -1));
        for (size_t s = 0; s < t.tree.kids[w].size(); ++s) {
          int c = t.tree.kids[w][s];
          if (c >= 0 && in_r[c]) {
            build(c);
            root_tree.kids[id][s] = rmap[c];
          } else {
            cuts.push_back({c < 0 ? -1 : c});
          }
        }
      };
      build(0);

      std::vector<Component> comps = {{root_tree, false, {}, -1, 0}};
      std::vector<int> cut_edges;  // internal cut edges, left to right
      std::vector<std::vector<int>> maps;
      for (int ci = 0; ci < (int)cuts.size(); ++ci) {
        if (cuts[ci].vertex < 0) {
          comps.push_back({unit_tree(), true, {}, 0, ci + 1});
          maps.emplace_back();
          continue;
        }
        int v = cuts[ci].vertex;
        cut_edges.push_back(v - 1);
        auto sp = split_at(t.tree, v);
        std::vector<Rel> st(sp.upper.nv(), Rel::Above);
        for (int w = 0; w < n; ++w)
          if (sp.upper_map[w] >= 0) st[sp.upper_map[w]] = t.status[w];
        comps.push_back({sp.upper, true, st, 0, ci + 1});
        maps.push_back(sp.upper_map);
      }

      /* parity of pulling the cut edges to the front of omega */
      std::vector<int> working = omega;
      Int eps = 0;
      for (size_t k = 0; k < cut_edges.size(); ++k) {
        int idx = -1;
        for (size_t i = 0; i < working.size(); ++i)
          if (working[i] == cut_edges[k]) idx = (int)i;
        eps += idx - (int)k;
        working.erase(working.begin() + idx);
        working.insert(working.begin() + k, cut_edges[k]);
      }
      working.erase(working.begin(), working.begin() + cut_edges.size());

      std::vector<int> offsets((int)comps.size() + 1, 0);
      for (int k = 0; k < (int)comps.size(); ++k)
        offsets[k + 1] = offsets[k] + comps[k].shape.edges();
      std::vector<int> orient;
      for (int e : working) {
        int w = e + 1;
        if (rmap[w] >= 0) {
          orient.push_back(rmap[w] - 1);
          continue;
        }
        for (int ci = 0; ci < (int)cuts.size(); ++ci)
          if (cuts[ci].vertex >= 0 && maps[ci][w] >= 0) orient.push_back(offsets[ci + 1] + maps[ci][w] - 1);
      }
      out.push_back(finish_term("below-break", std::move(comps), std::move(orient),
                                ((eps + 1 + j) % 2 + 2) % 2 ? -1 : 1));
    }
  }
  return out;
}

std::vector<BoundaryTerm> srt_boundary(const RibbonTree& t, const std::vector<int>& omega) {
  if (!tree_valid(t)) throw std::invalid_argument("malformed tree");
  check_omega(omega, t.edges());
  std::vector<BoundaryTerm> out;
  if (t.is_unit()) return out;
  for (int g = 0; g < t.edges(); ++g) {
    int v = g + 1;
    int p = omega_pos(omega, g);
    auto ct = contract_edge(t, v);
    std::vector<int> orient;
    for (int e : omega)
      if (e != g) orient.push_back(ct.vmap[e + 1] - 1);
    out.push_back(finish_term("collapse", {{ct.tree, false, {}, -1, 0}}, std::move(orient),
                              p % 2 ? -1 : 1));
    auto sp = split_at(t, v);
    int e_low = sp.lower.edges();
    std::vector<int> orient2;
    for (int e : omega) {
      if (e == g) continue;
      int w = e + 1;
      orient2.push_back(sp.lower_map[w] >= 0 ? sp.lower_map[w] - 1 : e_low + sp.upper_map[w] - 1);
    }
    std::vector<Component> comps = {{sp.lower, false, {}, -1, 0},
                                    {sp.upper, false, {}, 0, sp.leaf_pos}};
    out.push_back(finish_term("break", std::move(comps), std::move(orient2), (p + 1) % 2 ? -1 : 1));
  }
  return out;
}

std::vector<WordTerm> bare_word_boundary(const BrokenTree& word) {
  if (!broken_valid(word, WordContext::Operad))
    throw std::invalid_argument("bare word boundary needs an operad word");
  if (word.orient != canonical_orientation(word))
    throw std::invalid_argument("bare word boundary requires canonical orientation");
  std::vector<WordTerm> out;
  int prefix = 1;
  for (int c = 0; c < (int)word.comps.size(); ++c) {
    const RibbonTree& shape = word.comps[c].shape;
    std::vector<int> local(shape.edges());
    std::iota(local.begin(), local.end(), 0);
    for (const auto& term : srt_boundary(shape, local)) {
      auto sub = substitute(word, c, term.tree);
      out.push_back({std::move(sub.tree), prefix * term.sign * sub.sign});
    }
    if (shape.edges() % 2) prefix = -prefix;
  }
  return out;
}

MorseBookkeeping morse_bookkeeping(Int t_deg, Int y_deg, const std::vector<Int>& x_degs, Int d) {
  MorseBookkeeping out;
  Int m = (Int)x_degs.size();
  Int sx = 0;
  for (Int x : x_degs) sx += x;
  out.dim = -t_deg + y_deg - sx;
  Int acc = d * m * (1 + y_deg + t_deg) + t_deg * y_deg;
  for (Int i = 1; i <= m; ++i) acc += d * x_degs[(size_t)(i - 1)] * (m - i);
  out.sigma = (int)(((acc % 2) + 2) % 2);
  out.sign = out.sigma ? -1 : 1;
  return out;
}

}  // namespace nmorph
