#include "nmorph/simplex.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace nmorph {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

}  // namespace

std::string Face::name() const {
  std::string out = "[";
  for (size_t i = 0; i < verts.size(); ++i) {
    if (i) out += "<";
    out += std::to_string(verts[i]);
  }
  return out + "]";
}

Face make_face(int ambient, std::vector<int> verts) {
  if (verts.empty()) fail("faces are nonempty");
  for (size_t i = 0; i < verts.size(); ++i) {
    if (verts[i] < 0 || verts[i] > ambient) fail("face vertex out of range");
    if (i && verts[i - 1] >= verts[i]) fail("face vertices must strictly increase");
  }
  return Face{ambient, std::move(verts)};
}

Face full_face(int n) {
  std::vector<int> v(n + 1);
  for (int i = 0; i <= n; ++i) v[i] = i;
  return Face{n, std::move(v)};
}

Face vertex_face(int n, int v) { return make_face(n, {v}); }

std::vector<Face> all_faces(int n) {
  std::vector<Face> out;
  for (int mask = 1; mask < (1 << (n + 1)); ++mask) {
    std::vector<int> verts;
    for (int v = 0; v <= n; ++v)
      if (mask & (1 << v)) verts.push_back(v);
    out.push_back(Face{n, std::move(verts)});
  }
  std::sort(out.begin(), out.end(), [](const Face& a, const Face& b) {
    if (a.dim() != b.dim()) return a.dim() < b.dim();
    return a.verts < b.verts;
  });
  return out;
}

void add_term(FaceSum& s, const Face& f, Int c) {
  auto it = s.find(f);
  if (it == s.end()) {
    if (c != 0) s.emplace(f, c);
  } else {
    it->second += c;
    if (it->second == 0) s.erase(it);
  }
}

void add_term(FaceTensor& s, const std::vector<Face>& fs, Int c) {
  auto it = s.find(fs);
  if (it == s.end()) {
    if (c != 0) s.emplace(fs, c);
  } else {
    it->second += c;
    if (it->second == 0) s.erase(it);
  }
}

FaceSum simplicial_diff(const Face& f) {
  FaceSum out;
  if (f.dim() == 0) return out;
  for (size_t j = 0; j < f.verts.size(); ++j) {
    std::vector<int> v = f.verts;
    v.erase(v.begin() + j);
    add_term(out, Face{f.ambient, std::move(v)}, (j % 2 == 0) ? 1 : -1);
  }
  return out;
}

FaceTensor tensor_diff(const FaceTensor& x) {
  FaceTensor out;
  for (auto& [fs, c] : x) {
    int prefix = 0;
    for (size_t i = 0; i < fs.size(); ++i) {
      Int sgn = (prefix % 2 == 0) ? 1 : -1;
      for (auto& [g, cg] : simplicial_diff(fs[i])) {
        std::vector<Face> t = fs;
        t[i] = g;
        add_term(out, t, sgn * cg * c);
      }
      prefix += fs[i].degree();
    }
  }
  return out;
}

FaceTensor aw_coproduct(const Face& f) {
  FaceTensor out;
  for (size_t j = 0; j < f.verts.size(); ++j) {
    std::vector<int> a(f.verts.begin(), f.verts.begin() + j + 1);
    std::vector<int> b(f.verts.begin() + j, f.verts.end());
    add_term(out, {Face{f.ambient, std::move(a)}, Face{f.ambient, std::move(b)}}, 1);
  }
  return out;
}

FaceTensor iterated_aw(const Face& f, int factors) {
  if (factors < 1) fail("iterated_aw needs at least one factor");
  FaceTensor cur;
  add_term(cur, {f}, 1);
  for (int step = 1; step < factors; ++step) {
    FaceTensor next;
    for (auto& [fs, c] : cur) {
      for (auto& [pair_faces, cc] : aw_coproduct(fs.back())) {
        std::vector<Face> t(fs.begin(), fs.end() - 1);
        t.push_back(pair_faces[0]);
        t.push_back(pair_faces[1]);
        add_term(next, t, c * cc);
      }
    }
    cur = std::move(next);
  }
  return cur;
}

int OverlappingPartition::overlaps() const {
  int k = 0;
  for (size_t i = 0; i + 1 < blocks.size(); ++i)
    if (blocks[i].verts.back() == blocks[i + 1].verts.front()) ++k;
  return k;
}

namespace {

void enumerate_partitions(const Face& f, int s, size_t start,
                          std::vector<Face>& blocks,
                          std::vector<OverlappingPartition>& out) {
  const auto& v = f.verts;
  if ((int)blocks.size() == s - 1) {
    if (start < v.size()) {
      blocks.push_back(Face{f.ambient, std::vector<int>(v.begin() + start, v.end())});
      out.push_back(OverlappingPartition{blocks});
      blocks.pop_back();
    }
    return;
  }
  for (size_t end = start; end < v.size(); ++end) {
    blocks.push_back(Face{f.ambient, std::vector<int>(v.begin() + start, v.begin() + end + 1)});
    enumerate_partitions(f, s, end, blocks, out);      // overlap: share vertex `end`
    enumerate_partitions(f, s, end + 1, blocks, out);  // gap: skip it
    blocks.pop_back();
  }
}

}  // namespace

std::vector<OverlappingPartition> enumerate_overlapping(const Face& f, int s, int i) {
  if (s < 1) fail("partitions need at least one block");
  std::vector<OverlappingPartition> all;
  std::vector<Face> blocks;
  enumerate_partitions(f, s, 0, blocks, all);
  std::vector<OverlappingPartition> out;
  for (auto& p : all)
    if (p.overlaps() == i) out.push_back(p);
  return out;
}

std::vector<OverlappingPartition> enumerate_overlapping(const Face& f, int s) {
  return enumerate_overlapping(f, s, s - 1);
}

Face coface_apply(int i, const Face& f) {
  if (i < 0 || i > f.ambient + 1) fail("coface index out of range");
  std::vector<int> v = f.verts;
  for (auto& x : v)
    if (x >= i) ++x;
  return Face{f.ambient + 1, std::move(v)};
}

std::optional<Face> codegeneracy_apply(int i, const Face& f) {
  if (i < 0 || i >= f.ambient) fail("codegeneracy index out of range");
  bool has_i = std::binary_search(f.verts.begin(), f.verts.end(), i);
  bool has_i1 = std::binary_search(f.verts.begin(), f.verts.end(), i + 1);
  if (has_i && has_i1) return std::nullopt;
  std::vector<int> v = f.verts;
  for (auto& x : v)
    if (x > i) --x;
  return Face{f.ambient - 1, std::move(v)};
}

ModulePtr simplex_module(int n) {
  std::vector<std::pair<std::string, int>> basis;
  for (auto& f : all_faces(n)) basis.emplace_back(f.name(), f.degree());
  return make_module(std::move(basis));
}

int face_index(int n, const Face& f) {
  auto faces = all_faces(n);
  for (size_t i = 0; i < faces.size(); ++i)
    if (faces[i] == f) return (int)i;
  fail("face not in ambient simplex: " + f.name());
}

GradedMap simplicial_diff_map(int n) {
  auto m = simplex_module(n);
  GradedMap d = zero_map({m}, m, 1);
  for (auto& f : all_faces(n))
    for (auto& [g, c] : simplicial_diff(f))
      d.add(face_index(n, g), {face_index(n, f)}, c);
  return d;
}

Retraction retraction(int n) {
  auto m = simplex_module(n);
  auto pt = simplex_module(0);
  GradedMap p = zero_map({m}, pt, 0);
  GradedMap i = zero_map({pt}, m, 0);
  GradedMap h = zero_map({m}, m, -1);
  i.add(face_index(n, vertex_face(n, 0)), {0}, 1);
  for (auto& f : all_faces(n)) {
    if (f.dim() == 0) p.add(0, {face_index(n, f)}, 1);
    if (f.verts.front() != 0) {
      std::vector<int> v = f.verts;
      v.insert(v.begin(), 0);
      h.add(face_index(n, Face{n, std::move(v)}), {face_index(n, f)}, 1);
    }
  }
  return Retraction{std::move(p), std::move(i), std::move(h)};
}

SquareWitness square_noncommutativity_witness(int n) {
  SquareWitness w;
  Face top = full_face(n);
  for (auto& part : enumerate_overlapping(top, 4)) {
    const auto& b = part.blocks;
    add_term(w.lower, {b[0], b[1], b[2], b[3]}, 1);
    Int sgn = ((b[1].dim() * b[2].dim()) % 2 == 0) ? 1 : -1;
    add_term(w.upper, {b[0], b[2], b[1], b[3]}, sgn);
  }
  w.difference = w.upper;
  for (auto& [fs, c] : w.lower) add_term(w.difference, fs, -c);
  return w;
}

bool in_simplex(const RationalPoint& p) {
  Rat prev = 1;
  for (auto& z : p.z) {
    if (z > prev || z < 0) return false;
    prev = z;
  }
  return true;
}

std::pair<RationalPoint, RationalPoint> aw_point(const RationalPoint& p) {
  if (!in_simplex(p)) fail("point outside the simplex");
  const Rat half(1, 2);
  size_t n = p.z.size();
  size_t i = 0;
  while (i < n && p.z[i] > half) ++i;
  RationalPoint left, right;
  left.z.resize(n, Rat(0));
  right.z.resize(n, Rat(1));
  for (size_t j = 0; j < i; ++j) left.z[j] = 2 * p.z[j] - 1;
  for (size_t j = i; j < n; ++j) right.z[j] = 2 * p.z[j];
  return {left, right};
}

std::vector<RationalPoint> aw_point_iter(const RationalPoint& p, int factors) {
  if (factors < 1) fail("aw_point_iter needs at least one factor");
  std::vector<RationalPoint> out{p};
  for (int step = 1; step < factors; ++step) {
    RationalPoint last = out.back();
    out.pop_back();
    auto [a, b] = aw_point(last);
    out.push_back(a);
    out.push_back(b);
  }
  return out;
}

PointWitness aw_point_witness(const RationalPoint& p) {
  PointWitness w;
  auto [a, b] = aw_point(p);
  auto [a1, a2] = aw_point(a);
  auto [b1, b2] = aw_point(b);
  w.left = {a1, a2, b};
  w.right = {a, b1, b2};
  w.equal = true;
  for (int i = 0; i < 3; ++i)
    if (w.left[i].z != w.right[i].z) w.equal = false;
  return w;
}

std::vector<SubdivisionStratum> subdivision(int n, int s) {
  if (n < 0 || s < 1) fail("subdivision needs n >= 0, s >= 1");
  std::vector<SubdivisionStratum> out;
  for (auto& f : all_faces(n)) {
    int k = f.dim();
    // positions 0, 2, .., 2s are the open bands from above threshold 1 down to
    // below threshold s; odd position 2j-1 means "on threshold j".  Coordinates
    // are strictly decreasing inside the face, so On positions hold at most one.
    auto emit = [&](const std::vector<int>& pv) {
      SubdivisionStratum st;
      st.face = f;
      st.thresholds = s;
      st.rels.assign(k, std::vector<Rel>(s, Rel::Above));
      int on_count = 0;
      for (int t = 0; t < k; ++t) {
        for (int j = 1; j <= s; ++j) {
          int th = 2 * j - 1;
          st.rels[t][j - 1] = pv[t] < th ? Rel::Above : (pv[t] == th ? Rel::On : Rel::Below);
        }
        if (pv[t] % 2 == 1) ++on_count;
      }
      st.dim = k - on_count;
      int start = 0;
      for (int j = 1; j <= s + 1; ++j) {
        int end = k;
        bool gap = false;
        if (j <= s) {
          int th = 2 * j - 1;
          end = 0;
          while (end < k && pv[end] < th) ++end;  // a_j = # strictly above
          gap = end < k && pv[end] == th;
        }
        st.label.blocks.push_back(Face{
            n, std::vector<int>(f.verts.begin() + start, f.verts.begin() + end + 1)});
        start = gap ? end + 1 : end;
      }
      out.push_back(std::move(st));
    };
    // depth-first over nondecreasing position vectors, odd positions injective
    std::vector<int> cur;
    std::function<void()> rec = [&]() {
      if ((int)cur.size() == k) {
        emit(cur);
        return;
      }
      int lo = cur.empty() ? 0 : cur.back();
      for (int p = lo; p <= 2 * s; ++p) {
        if (p % 2 == 1 && !cur.empty() && cur.back() == p) continue;
        cur.push_back(p);
        rec();
        cur.pop_back();
      }
    };
    rec();
  }
  return out;
}

std::vector<RationalPoint> stratum_vertices(const SubdivisionStratum& st) {
  int s = st.thresholds;
  int k = st.face.dim();
  auto threshold = [&](int j) {  // T_0 = 1, T_j = (1/2)^j, T_{s+1} = 0
    if (j <= 0) return Rat(1);
    if (j > s) return Rat(0);
    Rat t(1);
    for (int q = 0; q < j; ++q) t /= 2;
    return t;
  };
  // recover each coordinate's closed interval from its relation row
  std::vector<std::pair<Rat, Rat>> iv(k);
  for (int t = 0; t < k; ++t) {
    int above = 0;
    bool on = false;
    for (int j = 1; j <= s; ++j) {
      if (st.rels[t][j - 1] == Rel::Below) ++above;  // below threshold j
      if (st.rels[t][j - 1] == Rel::On) on = true;
    }
    // `above` counts thresholds the coordinate is below; the band is
    // (T_{above+1}, T_{above}) unless pinned On.
    if (on) {
      int j = 1;
      while (st.rels[t][j - 1] != Rel::On) ++j;
      iv[t] = {threshold(j), threshold(j)};
    } else {
      iv[t] = {threshold(above + 1), threshold(above)};
    }
  }
  // split into runs of identical intervals; each run of size r is a simplex
  // with r+1 threshold-valued vertices
  std::vector<std::pair<int, int>> runs;  // [begin, end)
  for (int t = 0; t < k;) {
    int u = t;
    while (u < k && iv[u] == iv[t]) ++u;
    runs.emplace_back(t, u);
    t = u;
  }
  std::vector<RationalPoint> out;
  std::vector<int> choice(runs.size(), 0);
  std::vector<int> max_choice(runs.size(), 0);
  for (size_t r = 0; r < runs.size(); ++r) {
    auto [b, e] = runs[r];
    // a pinned run contributes a single vertex value, not e-b+1 of them
    max_choice[r] = (iv[b].first == iv[b].second) ? 0 : e - b;
  }
  for (;;) {
    std::vector<Rat> w(k);
    for (size_t r = 0; r < runs.size(); ++r) {
      auto [b, e] = runs[r];
      for (int t = b; t < e; ++t)
        w[t] = (t - b < choice[r]) ? iv[t].second : iv[t].first;  // upper then lower
    }
    // lift to ambient z-coordinates: constant blocks between face vertices
    RationalPoint pt;
    pt.z.resize(st.face.ambient, Rat(0));
    const auto& fv = st.face.verts;
    for (int l = 1; l <= st.face.ambient; ++l) {
      if (l <= fv.front()) {
        pt.z[l - 1] = 1;
      } else if (l > fv.back()) {
        pt.z[l - 1] = 0;
      } else {
        int t = 0;
        while (fv[t + 1] < l) ++t;
        pt.z[l - 1] = w[t];  // block (fv[t], fv[t+1]] carries coordinate t
      }
    }
    out.push_back(std::move(pt));
    size_t r = 0;
    while (r < runs.size()) {
      if (++choice[r] <= max_choice[r]) break;
      choice[r++] = 0;
    }
    if (r == runs.size()) break;
  }
  return out;
}

}  // namespace nmorph
