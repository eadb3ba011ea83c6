#include "nmorph/bimodule.hpp"

#include <algorithm>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace nmorph {

namespace {

Int sign_of_parity(Int x) { return (x % 2 + 2) % 2 == 0 ? 1 : -1; }

Int letter_degree(const AinfLetter& l) {
  return l.gen ? Int(1 - l.arity + l.face.degree()) : Int(2 - l.arity);
}

/* Rebuilds the preorder listing of letters whose parent fields index an
 * arbitrary ordering of the same list; the returned sign is the graded
 * reordering parity, one factor (-1)^{|a||b|} per crossed pair. */
std::pair<AinfWord, Int> assemble_word(const std::vector<AinfLetter>& seq) {
  int n = (int)seq.size();
  if (n == 0) throw std::invalid_argument("empty word");
  int root = -1;
  std::vector<std::vector<std::pair<int, int>>> kids(n);
  for (int i = 0; i < n; ++i) {
    const AinfLetter& l = seq[i];
    if (l.arity < (l.gen ? 1 : 2)) throw std::invalid_argument("letter arity too small");
    if (l.parent < 0) {
      if (root >= 0) throw std::invalid_argument("two roots in one word");
      root = i;
    } else {
      if (l.parent >= n) throw std::invalid_argument("dangling parent");
      if (l.slot < 1 || l.slot > seq[l.parent].arity)
        throw std::invalid_argument("slot out of range");
      kids[l.parent].push_back({l.slot, i});
    }
  }
  if (root < 0) throw std::invalid_argument("no root letter");
  for (auto& k : kids) {
    std::sort(k.begin(), k.end());
    for (size_t a = 1; a < k.size(); ++a)
      if (k[a].first == k[a - 1].first) throw std::invalid_argument("slot used twice");
  }
  std::vector<int> order;
  order.reserve(n);
  std::vector<int> stack = {root};
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    order.push_back(v);
    for (auto it = kids[v].rbegin(); it != kids[v].rend(); ++it) stack.push_back(it->second);
  }
  if ((int)order.size() != n) throw std::invalid_argument("disconnected word");
  std::vector<int> pos(n);
  for (int p = 0; p < n; ++p) pos[order[p]] = p;
  Int cross = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (pos[i] > pos[j]) cross += letter_degree(seq[i]) * letter_degree(seq[j]);
  AinfWord out;
  out.letters.reserve(n);
  for (int p = 0; p < n; ++p) {
    AinfLetter l = seq[order[p]];
    if (l.parent >= 0) l.parent = pos[l.parent];
    out.letters.push_back(l);
  }
  return {out, sign_of_parity(cross)};
}

std::vector<std::vector<int>> compositions(int m, int s) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int rest, int slots) -> void {
    if (slots == 1) {
      if (rest >= 1) {
        cur.push_back(rest);
        out.push_back(cur);
        cur.pop_back();
      }
      return;
    }
    for (int first = 1; first <= rest - (slots - 1); ++first) {
      cur.push_back(first);
      self(self, rest - first, slots - 1);
      cur.pop_back();
    }
  };
  if (s >= 1) rec(rec, m, s);
  return out;
}

/* crossing parity of an arity split against a label split */
Int split_parity(const std::vector<int>& parts, const OverlappingPartition& split) {
  int s = (int)parts.size();
  Int eps = 0;
  for (int j = 0; j < s; ++j) {
    for (int k = j + 1; k < s; ++k) eps += Int(parts[j]) * split.blocks[k].dim();
    eps += Int(s - 1 - j) * (1 - parts[j] - split.blocks[j].dim());
  }
  return eps;
}

/* boundary of a single letter, as mini words whose free slots match the
 * letter's inputs in planar order */
std::vector<std::pair<AinfWord, Int>> letter_boundary(const AinfLetter& L) {
  std::vector<std::pair<AinfWord, Int>> out;
  auto two_level = [](bool root_gen, int root_arity, const Face& f, int child_arity, int at) {
    AinfWord w;
    w.letters.push_back({root_gen, root_arity, root_gen ? f : Face{}, -1, 0});
    w.letters.push_back({false, child_arity, Face{}, 0, at});
    return w;
  };
  if (!L.gen) {
    int k = L.arity;
    for (int i2 = 2; i2 <= k - 1; ++i2)
      for (int i1 = 0; i1 + i2 <= k; ++i1) {
        int i3 = k - i1 - i2;
        out.push_back({two_level(false, k - i2 + 1, Face{}, i2, i1 + 1),
                       -sign_of_parity(i1 + i2 * i3)});
      }
    return out;
  }
  int m = L.arity;
  const Face& I = L.face;
  for (const auto& [f, c] : simplicial_diff(I)) {
    AinfWord w;
    w.letters.push_back({true, m, f, -1, 0});
    out.push_back({w, c});
  }
  Int twist = sign_of_parity(I.dim());
  for (int i2 = 2; i2 <= m; ++i2)
    for (int i1 = 0; i1 + i2 <= m; ++i1) {
      int i3 = m - i1 - i2;
      out.push_back({two_level(true, m - i2 + 1, I, i2, i1 + 1),
                     twist * sign_of_parity(i1 + i2 * i3)});
    }
  for (int s = 2; s <= m; ++s) {
    auto parts = compositions(m, s);
    auto splits = enumerate_overlapping(I, s);
    for (const auto& p : parts)
      for (const auto& sp : splits) {
        AinfWord w;
        w.letters.push_back({false, s, Face{}, -1, 0});
        for (int j = 0; j < s; ++j) w.letters.push_back({true, p[j], sp.blocks[j], 0, j + 1});
        out.push_back({w, -sign_of_parity(split_parity(p, sp))});
      }
  }
  return out;
}

bool orientation_canonical(const BrokenTree& t) { return t.orient == canonical_orientation(t); }

/* contiguous component range [from, to) of a canonical word, as a standalone
 * canonical word carrying its own labels */
BrokenTree extract_block(const BrokenTree& t, int from, int to) {
  BrokenTree out;
  for (int k = from; k < to; ++k) {
    Component c = t.comps[k];
    if (k == from) {
      c.parent = -1;
      c.leaf = 0;
    } else {
      if (c.parent < from || c.parent >= to) throw std::logic_error("component block not closed");
      c.parent -= from;
    }
    out.comps.push_back(c);
  }
  if (!t.labels.empty()) {
    int gidx = 0;
    for (int k = 0; k < (int)t.comps.size(); ++k) {
      if (!t.comps[k].gauged) continue;
      if (k >= from && k < to) out.labels.push_back(t.labels[gidx]);
      ++gidx;
    }
  }
  out.orient = canonical_orientation(out);
  return out;
}

/* non-simplicial part of the differential of a single labeled gauged letter:
 * the cell boundary twisted by (-1)^{label dimension}, below-break terms
 * fanning out over the fully overlapping splits of the label */
BrokenChain gauged_tree_part(const Face& I, const GaugedTree& g, const std::vector<int>& omega) {
  BrokenChain out;
  Int twist = sign_of_parity(I.dim());
  for (const auto& bt : gauged_boundary(g, omega)) {
    int b = gauge_count(bt.tree);
    if (b < 1) throw std::logic_error("cell boundary lost every gauge");
    if (b == 1) {
      BrokenTree t = bt.tree;
      t.labels = {I};
      add_term(out, t, twist * bt.sign);
    } else {
      for (const auto& sp : enumerate_overlapping(I, b)) {
        BrokenTree t = bt.tree;
        t.labels = sp.blocks;
        add_term(out, t, twist * bt.sign);
      }
    }
  }
  return out;
}

BrokenChain diff_labeled(const BrokenTree& elem);

/* bare root: the word is the root action of its root letter on the child
 * blocks, so the differential follows the action's graded expansion */
BrokenChain diff_bare_root(const BrokenTree& elem) {
  const RibbonTree& r = elem.comps[0].shape;
  std::vector<int> starts;
  for (int k = 1; k < (int)elem.comps.size(); ++k)
    if (elem.comps[k].parent == 0) starts.push_back(k);
  if ((int)starts.size() != r.arity()) throw std::logic_error("uncovered leaf under a bare root");
  std::vector<BrokenTree> args;
  for (size_t i = 0; i < starts.size(); ++i) {
    int to = (i + 1 < starts.size()) ? starts[i + 1] : (int)elem.comps.size();
    args.push_back(extract_block(elem, starts[i], to));
  }
  MuResult whole = mu_compose(single_bare(r), args);
  if (whole.tree != elem) throw std::logic_error("root action does not reassemble the word");
  Int sigma = whole.sign;
  BrokenChain out;
  for (const auto& wt : bare_word_boundary(single_bare(r))) {
    MuResult mr = mu_compose(wt.tree, args);
    add_term(out, mr.tree, sigma * wt.sign * mr.sign);
  }
  Int host_sign = sign_of_parity(r.edges());
  Int acc = 0;
  for (size_t i = 0; i < args.size(); ++i) {
    Int pre = host_sign * sign_of_parity(acc);
    for (const auto& [t, c] : diff_labeled(args[i])) {
      std::vector<BrokenTree> margs = args;
      margs[i] = t;
      MuResult mr = mu_compose(single_bare(r), margs);
      add_term(out, mr.tree, sigma * pre * c * mr.sign);
    }
    acc += broken_degree(args[i]);
  }
  return out;
}

/* gauged root with children: peel the rightmost bare block off the root and
 * expand the graft by the graded rule */
BrokenChain diff_gauged_root(const BrokenTree& elem) {
  int c = -1;
  for (int k = 1; k < (int)elem.comps.size(); ++k)
    if (elem.comps[k].parent == 0) c = k;
  if (c < 0) throw std::logic_error("gauged root with stray components");
  BrokenTree y = extract_block(elem, c, (int)elem.comps.size());
  BrokenTree u;
  u.comps.assign(elem.comps.begin(), elem.comps.begin() + c);
  u.labels = elem.labels;
  u.orient = canonical_orientation(u);
  int attach = elem.comps[c].leaf;
  int p = 0;
  for (int i = 1; i <= broken_arity(u); ++i)
    if (locate_leaf(u, i) == std::pair<int, int>{0, attach}) {
      p = i;
      break;
    }
  if (p == 0) throw std::logic_error("lost the attachment leaf");
  Grafted whole = graft(u, p, y);
  if (whole.tree != elem) throw std::logic_error("graft does not reassemble the word");
  Int sigma = whole.sign;
  BrokenChain out;
  for (const auto& [t, cu] : diff_labeled(u)) {
    Grafted gr = graft(t, p, y);
    add_term(out, gr.tree, sigma * cu * gr.sign);
  }
  Int pre = sign_of_parity(broken_degree(u));
  for (const auto& wt : bare_word_boundary(y)) {
    Grafted gr = graft(u, p, wt.tree);
    add_term(out, gr.tree, sigma * pre * wt.sign * gr.sign);
  }
  return out;
}

BrokenChain diff_labeled(const BrokenTree& elem) {
  if ((int)elem.comps.size() == 1) {
    const Component& c = elem.comps[0];
    const Face& I = elem.labels[0];
    BrokenChain out;
    for (const auto& [f, coef] : simplicial_diff(I)) {
      BrokenTree t = elem;
      t.labels = {f};
      add_term(out, t, coef);
    }
    for (const auto& [t, coef] : gauged_tree_part(I, {c.shape, c.status}, elem.orient))
      add_term(out, t, coef);
    return out;
  }
  return elem.comps[0].gauged ? diff_gauged_root(elem) : diff_bare_root(elem);
}

void require_labeled_canonical(const BrokenTree& elem) {
  if (!broken_valid(elem, WordContext::Bimodule))
    throw std::invalid_argument("not a one-gauge-per-path word");
  if ((int)elem.labels.size() != gauge_count(elem))
    throw std::invalid_argument("every gauge needs a label");
  if (!orientation_canonical(elem)) throw std::invalid_argument("orientation must be canonical");
}

int subtree_end(const AinfWord& w, int v) {
  int n = (int)w.letters.size();
  int e = v + 1;
  while (e < n) {
    int a = e;
    bool inside = false;
    while (a >= 0) {
      if (a == v) {
        inside = true;
        break;
      }
      a = w.letters[a].parent;
    }
    if (!inside) break;
    ++e;
  }
  return e;
}

AinfWord extract_subword(const AinfWord& w, int from, int to) {
  AinfWord out;
  for (int i = from; i < to; ++i) {
    AinfLetter l = w.letters[i];
    if (i == from) {
      l.parent = -1;
      l.slot = 0;
    } else {
      l.parent -= from;
    }
    out.letters.push_back(l);
  }
  return out;
}

/* peel the rightmost child subword of the root letter, which is a preorder
 * suffix; returns prefix word, suffix word and the planar index of the freed
 * slot in the prefix */
struct Peeled {
  AinfWord rest;
  AinfWord sub;
  int leaf = 0;
};

Peeled peel_last_child(const AinfWord& w) {
  int v = -1;
  for (int i = 1; i < (int)w.letters.size(); ++i)
    if (w.letters[i].parent == 0) v = i;
  if (v < 0) throw std::logic_error("nothing to peel");
  Peeled out;
  out.sub = extract_subword(w, v, (int)w.letters.size());
  out.rest.letters.assign(w.letters.begin(), w.letters.begin() + v);
  auto frees = ainf_free_slots(out.rest);
  for (size_t i = 0; i < frees.size(); ++i)
    if (frees[i] == std::pair<int, int>{0, w.letters[v].slot}) {
      out.leaf = (int)i + 1;
      break;
    }
  if (out.leaf == 0) throw std::logic_error("lost the peeled slot");
  return out;
}

BrokenChain psi_word(const AinfWord& w, const OperadSignTable& tab) {
  if (w.letters.size() == 1) return operad_comparison(w.letters[0].arity, tab);
  Peeled p = peel_last_child(w);
  BrokenChain out;
  for (const auto& [rw, rc] : psi_word(p.rest, tab))
    for (const auto& [uw, uc] : psi_word(p.sub, tab)) {
      Grafted g = graft(rw, p.leaf, uw);
      add_term(out, g.tree, rc * uc * g.sign);
    }
  return out;
}

std::string face_tag(const Face& f) { return f.name(); }

}  // namespace

Int nainf_generator_degree(const NAinfGenerator& g) {
  return Int(1) - g.arity + g.face.degree();
}

AinfWord ainf_generator_word(const NAinfGenerator& g) {
  if (g.arity < 1) throw std::invalid_argument("generator arity must be at least 1");
  AinfWord w;
  w.letters.push_back({true, g.arity, g.face, -1, 0});
  return w;
}

AinfWord ainf_corolla_word(int k) {
  if (k < 2) throw std::invalid_argument("corolla arity must be at least 2");
  AinfWord w;
  w.letters.push_back({false, k, Face{}, -1, 0});
  return w;
}

std::vector<std::pair<int, int>> ainf_free_slots(const AinfWord& w) {
  int n = (int)w.letters.size();
  std::vector<std::map<int, int>> child(n);
  for (int i = 1; i < n; ++i) child[w.letters[i].parent][w.letters[i].slot] = i;
  std::vector<std::pair<int, int>> out;
  auto rec = [&](auto&& self, int v) -> void {
    for (int s = 1; s <= w.letters[v].arity; ++s) {
      auto it = child[v].find(s);
      if (it == child[v].end())
        out.push_back({v, s});
      else
        self(self, it->second);
    }
  };
  rec(rec, 0);
  return out;
}

bool ainf_word_valid(const AinfWord& w) {
  if (w.letters.empty()) return false;
  if (w.letters[0].parent != -1 || w.letters[0].slot != 0) return false;
  try {
    auto [re, sg] = assemble_word(w.letters);
    if (re != w || sg != 1) return false;
  } catch (const std::invalid_argument&) {
    return false;
  }
  int ambient = -1;
  for (const auto& l : w.letters) {
    if (!l.gen) continue;
    if (ambient < 0) ambient = l.face.ambient;
    if (l.face.ambient != ambient) return false;
  }
  int n = (int)w.letters.size();
  std::vector<int> cross(n);
  for (int i = 0; i < n; ++i) {
    int up = w.letters[i].parent;
    cross[i] = (up >= 0 ? cross[up] : 0) + (w.letters[i].gen ? 1 : 0);
  }
  int want = -1;
  for (const auto& [v, s] : ainf_free_slots(w)) {
    (void)s;
    if (want < 0) want = cross[v];
    if (cross[v] != want || cross[v] > 1) return false;
  }
  return true;
}

int ainf_word_arity(const AinfWord& w) { return (int)ainf_free_slots(w).size(); }

Int ainf_word_degree(const AinfWord& w) {
  Int d = 0;
  for (const auto& l : w.letters) d += letter_degree(l);
  return d;
}

nlohmann::json ainf_word_to_json(const AinfWord& w) {
  nlohmann::json letters = nlohmann::json::array();
  for (const auto& l : w.letters) {
    nlohmann::json jl = {{"arity", l.arity}, {"parent", l.parent}, {"slot", l.slot}};
    if (l.gen) jl["face"] = {{"ambient", l.face.ambient}, {"verts", l.face.verts}};
    letters.push_back(jl);
  }
  return {{"letters", letters}};
}

AinfWord ainf_word_from_json(const nlohmann::json& j) {
  AinfWord w;
  for (const auto& jl : j.at("letters")) {
    AinfLetter l;
    l.arity = jl.at("arity").get<int>();
    l.parent = jl.at("parent").get<int>();
    l.slot = jl.at("slot").get<int>();
    if (jl.contains("face")) {
      l.gen = true;
      l.face = make_face(jl.at("face").at("ambient").get<int>(),
                         jl.at("face").at("verts").get<std::vector<int>>());
    }
    w.letters.push_back(l);
  }
  if (!ainf_word_valid(w)) throw std::invalid_argument("malformed word");
  return w;
}

void add_term(AinfChain& c, const AinfWord& w, Int coef) {
  if (coef == 0) return;
  auto it = c.find(w);
  if (it == c.end()) {
    c.emplace(w, coef);
    return;
  }
  it->second += coef;
  if (it->second == 0) c.erase(it);
}

void add_term(BrokenChain& c, const BrokenTree& t, Int coef) {
  if (coef == 0) return;
  auto it = c.find(t);
  if (it == c.end()) {
    c.emplace(t, coef);
    return;
  }
  it->second += coef;
  if (it->second == 0) c.erase(it);
}

AinfChain nainf_diff(const AinfWord& w) {
  if (!ainf_word_valid(w)) throw std::invalid_argument("malformed word");
  AinfChain out;
  int n = (int)w.letters.size();
  Int before = 0;
  for (int v = 0; v < n; ++v) {
    Int prefix = sign_of_parity(before);
    for (const auto& [mini, msign] : letter_boundary(w.letters[v])) {
      int mn = (int)mini.letters.size();
      auto frees = ainf_free_slots(mini);
      std::vector<AinfLetter> seq;
      seq.reserve(n - 1 + mn);
      std::vector<int> idx(n, -1);
      for (int u = 0; u < v; ++u) {
        idx[u] = (int)seq.size();
        seq.push_back(w.letters[u]);
      }
      int base = (int)seq.size();
      for (int t = 0; t < mn; ++t) {
        AinfLetter l = mini.letters[t];
        if (l.parent < 0) {
          l.parent = w.letters[v].parent;
          l.slot = w.letters[v].slot;
        } else {
          l.parent += base;
        }
        seq.push_back(l);
      }
      for (int u = v + 1; u < n; ++u) {
        idx[u] = (int)seq.size();
        seq.push_back(w.letters[u]);
      }
      /* rewire references into the old indexing; mini-internal letters are
       * already final */
      for (int t = 0; t < (int)seq.size(); ++t) {
        if (t > base && t < base + mn) continue;
        AinfLetter& l = seq[t];
        if (l.parent == v) {
          auto [ml, ms] = frees[l.slot - 1];
          l.parent = base + ml;
          l.slot = ms;
        } else if (l.parent >= 0) {
          l.parent = idx[l.parent];
        }
      }
      auto [word, parity] = assemble_word(seq);
      add_term(out, word, prefix * msign * parity);
    }
    before += letter_degree(w.letters[v]);
  }
  return out;
}

AinfChain nainf_diff(const NAinfGenerator& g) { return nainf_diff(ainf_generator_word(g)); }

BrokenChain nombas_diff(const BrokenTree& elem) {
  require_labeled_canonical(elem);
  return diff_labeled(elem);
}

BrokenChain circ_action(const BrokenTree& elem, int leaf, const BrokenTree& bare_word) {
  require_labeled_canonical(elem);
  if (!broken_valid(bare_word, WordContext::Operad) || !bare_word.labels.empty())
    throw std::invalid_argument("grafted word must be bare");
  if (!orientation_canonical(bare_word))
    throw std::invalid_argument("orientation must be canonical");
  Grafted g = graft(elem, leaf, bare_word);
  BrokenChain out;
  add_term(out, g.tree, g.sign);
  return out;
}

BrokenChain mu_action(const BrokenTree& bare_host, const std::vector<BrokenTree>& elems) {
  if (!broken_valid(bare_host, WordContext::Operad) || !bare_host.labels.empty())
    throw std::invalid_argument("host must be a bare word");
  if (!orientation_canonical(bare_host))
    throw std::invalid_argument("orientation must be canonical");
  for (const auto& e : elems) require_labeled_canonical(e);
  MuResult mr = mu_compose(bare_host, elems);
  BrokenChain out;
  add_term(out, mr.tree, mr.sign);
  return out;
}

D2Report d2_check(BimoduleFamily family, int m_max, int n_max) {
  if (m_max < 1 || n_max < 0) throw std::invalid_argument("caps must cover a generator");
  D2Report r;
  for (int n = 0; n <= n_max; ++n)
    for (const Face& I : all_faces(n))
      for (int m = 1; m <= m_max; ++m) {
        if (family == BimoduleFamily::NAinf) {
          AinfChain dd;
          for (const auto& [t, c] : nainf_diff(NAinfGenerator{I, m}))
            for (const auto& [t2, c2] : nainf_diff(t)) add_term(dd, t2, c * c2);
          ++r.generators;
          if (!dd.empty()) {
            r.ok = false;
            std::ostringstream os;
            os << "arity " << m << " label " << face_tag(I) << ": " << dd.size()
               << " residual words";
            r.offenders.push_back(os.str());
          }
        } else {
          for (const auto& g : enumerate_scrt(m)) {
            BrokenTree elem = single_gauged(g);
            elem.labels = {I};
            BrokenChain dd;
            for (const auto& [t, c] : nombas_diff(elem))
              for (const auto& [t2, c2] : nombas_diff(t)) add_term(dd, t2, c * c2);
            ++r.generators;
            if (!dd.empty()) {
              r.ok = false;
              std::ostringstream os;
              os << "label " << face_tag(I) << " word " << canon_key(elem) << ": " << dd.size()
                 << " residual words";
              r.offenders.push_back(os.str());
            }
          }
        }
      }
  return r;
}

nlohmann::json d2_report_to_json(const D2Report& r) {
  return {{"ok", r.ok}, {"generators", r.generators}, {"offenders", r.offenders}};
}

OperadSignTable operad_sign_solve(int m_max) {
  OperadSignTable tab;
  tab.m_max = m_max;
  if (m_max >= 2) tab.sign[corolla(2)] = 1;
  for (int m = 3; m <= m_max; ++m) {
    std::vector<RibbonTree> bins;
    for (const auto& t : enumerate_srt(m)) {
      bool binary = true;
      for (const auto& row : t.kids) binary = binary && row.size() == 2;
      if (binary) bins.push_back(t);
    }
    BrokenChain rhs;
    for (int i2 = 2; i2 <= m - 1; ++i2)
      for (int i1 = 0; i1 + i2 <= m; ++i1) {
        int i3 = m - i1 - i2;
        Int sg = -sign_of_parity(i1 + i2 * i3);
        for (const auto& [ta, ea] : tab.sign) {
          if (ta.arity() != m - i2 + 1) continue;
          for (const auto& [tb, eb] : tab.sign) {
            if (tb.arity() != i2) continue;
            Grafted g = graft(single_bare(ta), i1 + 1, single_bare(tb));
            add_term(rhs, g.tree, sg * ea * eb * g.sign);
          }
        }
      }
    for (const auto& t : bins) {
      std::optional<std::pair<BrokenTree, Int>> pick;
      for (const auto& wt : bare_word_boundary(single_bare(t)))
        if (wt.tree.comps.size() == 2) {
          pick = {wt.tree, wt.sign};
          break;
        }
      auto it = pick ? rhs.find(pick->first) : rhs.end();
      if (!pick || it == rhs.end() || it->second * it->second != 1) {
        tab.ok = false;
        tab.conflicts.push_back("arity " + std::to_string(m) + ": no unit determination");
        continue;
      }
      tab.sign[t] = it->second * pick->second;
    }
    BrokenChain lhs;
    for (const auto& t : bins) {
      auto it = tab.sign.find(t);
      if (it == tab.sign.end()) continue;
      for (const auto& wt : bare_word_boundary(single_bare(t)))
        add_term(lhs, wt.tree, it->second * wt.sign);
    }
    if (lhs != rhs) {
      tab.ok = false;
      tab.conflicts.push_back("arity " + std::to_string(m) + ": residual terms");
    }
  }
  return tab;
}

BrokenChain operad_comparison(int k, const OperadSignTable& table) {
  if (k < 2 || k > table.m_max) throw std::invalid_argument("arity outside the solved range");
  BrokenChain out;
  for (const auto& [t, e] : table.sign)
    if (t.arity() == k) add_term(out, single_bare(t), e);
  if (out.empty()) throw std::invalid_argument("no solved signs for this arity");
  return out;
}

BrokenChain phi(const NAinfGenerator& g, const ComparisonSignTable& table) {
  if (g.arity < 1 || g.arity > table.m_max)
    throw std::invalid_argument("arity outside the solved range");
  BrokenChain out;
  for (const auto& [t, e] : table.sign) {
    if (t.tree.arity() != g.arity) continue;
    BrokenTree w = single_gauged(t);
    w.labels = {g.face};
    add_term(out, w, e);
  }
  if (out.empty()) throw std::invalid_argument("no solved signs for this arity");
  return out;
}

BrokenChain phi_word(const AinfWord& w, const ComparisonSignTable& table) {
  if (!ainf_word_valid(w)) throw std::invalid_argument("malformed word");
  if (w.letters[0].gen) {
    if (w.letters.size() == 1) return phi({w.letters[0].face, w.letters[0].arity}, table);
    Peeled p = peel_last_child(w);
    BrokenChain out;
    for (const auto& [rw, rc] : phi_word(p.rest, table))
      for (const auto& [uw, uc] : psi_word(p.sub, table.operad)) {
        Grafted g = graft(rw, p.leaf, uw);
        add_term(out, g.tree, rc * uc * g.sign);
      }
    return out;
  }
  /* corolla root of a one-gauge-per-path word: every slot carries a child */
  int n = (int)w.letters.size();
  int s = w.letters[0].arity;
  std::vector<AinfWord> subs;
  int v = 1;
  while (v < n) {
    int e = subtree_end(w, v);
    subs.push_back(extract_subword(w, v, e));
    v = e;
  }
  if ((int)subs.size() != s) throw std::invalid_argument("free slot under a corolla root");
  std::vector<std::pair<std::vector<BrokenTree>, Int>> combos = {{{}, 1}};
  for (const auto& u : subs) {
    BrokenChain mapped = phi_word(u, table);
    std::vector<std::pair<std::vector<BrokenTree>, Int>> next;
    for (const auto& [vecs, coef] : combos)
      for (const auto& [t, c] : mapped) {
        auto v2 = vecs;
        v2.push_back(t);
        next.push_back({std::move(v2), coef * c});
      }
    combos = std::move(next);
  }
  BrokenChain out;
  for (const auto& [hb, he] : table.operad.sign) {
    if (hb.arity() != s) continue;
    for (const auto& [argsv, coef] : combos) {
      MuResult mr = mu_compose(single_bare(hb), argsv);
      add_term(out, mr.tree, he * coef * mr.sign);
    }
  }
  return out;
}

ComparisonSignTable phi_compat_solve(int m_max, int n_max) {
  if (m_max < 1 || n_max < 0) throw std::invalid_argument("caps must cover a generator");
  ComparisonSignTable tab;
  tab.m_max = m_max;
  tab.n_max = n_max;
  tab.operad = operad_sign_solve(std::max(m_max, 2));
  if (!tab.operad.ok) {
    tab.ok = false;
    tab.conflicts.push_back("operad-level signs are inconsistent");
  }
  tab.sign[trivial_gauged()] = 1;
  for (int m = 2; m <= m_max; ++m) {
    auto cbrts = enumerate_cbrt(m);
    Face I0 = full_face(0);
    std::map<BrokenTree, std::map<int, Int>> rows;
    for (int i = 0; i < (int)cbrts.size(); ++i)
      for (const auto& [t, c] : gauged_tree_part(I0, cbrts[i], canonical_orientation(cbrts[i])))
        rows[t][i] += c;
    /* right and left families of the corolla-side differential, pushed
     * through the already-solved lower arities; the label-boundary family
     * cancels between the two sides and is skipped */
    BrokenChain rhs;
    for (const auto& [wterm, c] : nainf_diff(NAinfGenerator{I0, m})) {
      if (wterm.letters.size() == 1) continue;
      for (const auto& [t, pc] : phi_word(wterm, tab)) add_term(rhs, t, c * pc);
    }
    std::vector<std::optional<Int>> eps(cbrts.size());
    bool progress = true;
    while (progress) {
      progress = false;
      for (const auto& [word, row] : rows) {
        Int known = 0;
        auto rit = rhs.find(word);
        if (rit != rhs.end()) known = rit->second;
        int open = -1;
        bool single = true;
        for (const auto& [i, coef] : row) {
          if (eps[i]) {
            known -= coef * *eps[i];
          } else if (open < 0) {
            open = i;
          } else {
            single = false;
          }
        }
        if (open < 0 || !single) continue;
        Int coef = row.at(open);
        if (coef * coef != 1 || known % coef != 0) continue;
        Int val = known / coef;
        if (val == 0) {
          tab.ok = false;
          tab.conflicts.push_back("arity " + std::to_string(m) + ": vanishing sign");
          eps[open] = 1;
        } else {
          eps[open] = val;
        }
        progress = true;
      }
    }
    for (int i = 0; i < (int)cbrts.size(); ++i) {
      if (!eps[i]) {
        tab.ok = false;
        tab.conflicts.push_back("arity " + std::to_string(m) + ": undetermined sign");
        continue;
      }
      tab.sign[cbrts[i]] = *eps[i];
    }
  }
  /* re-verify compatibility on every generator inside the caps */
  for (int n = 0; n <= n_max; ++n)
    for (const Face& I : all_faces(n))
      for (int m = 1; m <= m_max; ++m) {
        BrokenChain lhs;
        for (const auto& [tg, e] : tab.sign) {
          if (tg.tree.arity() != m) continue;
          BrokenTree elem = single_gauged(tg);
          elem.labels = {I};
          for (const auto& [t, c] : nombas_diff(elem)) add_term(lhs, t, e * c);
        }
        BrokenChain rhs;
        for (const auto& [wterm, c] : nainf_diff(NAinfGenerator{I, m}))
          for (const auto& [t, pc] : phi_word(wterm, tab)) add_term(rhs, t, c * pc);
        if (lhs != rhs) {
          tab.ok = false;
          tab.conflicts.push_back("arity " + std::to_string(m) + " label " + face_tag(I) +
                                  ": compatibility residual");
        }
      }
  return tab;
}

AinfChain bimodule_coface(const AinfWord& w, int i) {
  if (!ainf_word_valid(w)) throw std::invalid_argument("malformed word");
  AinfWord out = w;
  for (auto& l : out.letters)
    if (l.gen) l.face = coface_apply(i, l.face);
  AinfChain c;
  add_term(c, out, 1);
  return c;
}

AinfChain bimodule_codegeneracy(const AinfWord& w, int i) {
  if (!ainf_word_valid(w)) throw std::invalid_argument("malformed word");
  AinfWord out = w;
  for (auto& l : out.letters) {
    if (!l.gen) continue;
    auto f = codegeneracy_apply(i, l.face);
    if (!f) return {};
    l.face = *f;
  }
  AinfChain c;
  add_term(c, out, 1);
  return c;
}

BrokenChain bimodule_coface(const BrokenTree& elem, int i) {
  require_labeled_canonical(elem);
  BrokenTree out = elem;
  for (auto& f : out.labels) f = coface_apply(i, f);
  BrokenChain c;
  add_term(c, out, 1);
  return c;
}

BrokenChain bimodule_codegeneracy(const BrokenTree& elem, int i) {
  require_labeled_canonical(elem);
  BrokenTree out = elem;
  for (auto& f : out.labels) {
    auto g = codegeneracy_apply(i, f);
    if (!g) return {};
    f = *g;
  }
  BrokenChain c;
  add_term(c, out, 1);
  return c;
}

}  // namespace nmorph
