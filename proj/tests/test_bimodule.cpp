#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <string>
#include <vector>

#include "nmorph/bimodule.hpp"

using namespace nmorph;

namespace {

RibbonTree tree_of(const char* s) { return tree_from_json(nlohmann::json::parse(s)); }

GaugedTree gauged_of(const char* s, std::vector<Rel> st) {
  GaugedTree t{tree_of(s), std::move(st)};
  REQUIRE(gauge_valid(t));
  return t;
}

AinfLetter corl(int arity, int parent, int slot) { return {false, arity, Face{}, parent, slot}; }

AinfLetter genl(const Face& f, int arity, int parent, int slot) {
  return {true, arity, f, parent, slot};
}

AinfWord word_of(std::vector<AinfLetter> ls) {
  AinfWord w;
  w.letters = std::move(ls);
  return w;
}

BrokenTree elem_of(const GaugedTree& g, std::vector<Face> labels) {
  BrokenTree t = single_gauged(g);
  t.labels = std::move(labels);
  return t;
}

BrokenTree word_comps(std::vector<Component> comps, std::vector<Face> labels) {
  BrokenTree t;
  t.comps = std::move(comps);
  t.labels = std::move(labels);
  t.orient = canonical_orientation(t);
  return t;
}

Int par(Int x) { return (x % 2 + 2) % 2 == 0 ? 1 : -1; }

AinfChain diff_chain(const AinfChain& c) {
  AinfChain out;
  for (const auto& [w, k] : c)
    for (const auto& [w2, k2] : nainf_diff(w)) add_term(out, w2, k * k2);
  return out;
}

BrokenChain diff_chain(const BrokenChain& c) {
  BrokenChain out;
  for (const auto& [t, k] : c)
    for (const auto& [t2, k2] : nombas_diff(t)) add_term(out, t2, k * k2);
  return out;
}

BrokenChain circ_chain(const BrokenChain& c, int leaf, const BrokenTree& y) {
  BrokenChain out;
  for (const auto& [t, k] : c)
    for (const auto& [t2, k2] : circ_action(t, leaf, y)) add_term(out, t2, k * k2);
  return out;
}

template <typename Chain, typename Map>
Chain apply_chain(const Chain& c, Map&& m) {
  Chain out;
  for (const auto& [t, k] : c)
    for (const auto& [t2, k2] : m(t)) add_term(out, t2, k * k2);
  return out;
}

}  // namespace

TEST_CASE("word bookkeeping: builders, degrees, slots") {
  Face I1 = full_face(1);
  AinfWord g = ainf_generator_word({I1, 2});
  CHECK(ainf_word_valid(g));
  CHECK(ainf_word_arity(g) == 2);
  CHECK(ainf_word_degree(g) == -2);
  CHECK(nainf_generator_degree({I1, 2}) == -2);
  CHECK(nainf_generator_degree({full_face(0), 1}) == 0);

  AinfWord c3 = ainf_corolla_word(3);
  CHECK(ainf_word_valid(c3));
  CHECK(ainf_word_arity(c3) == 3);
  CHECK(ainf_word_degree(c3) == -1);

  Face I0 = full_face(0);
  AinfWord low = word_of({corl(2, -1, 0), genl(I0, 1, 0, 1), genl(I0, 1, 0, 2)});
  CHECK(ainf_word_valid(low));
  CHECK(ainf_word_arity(low) == 2);
  CHECK(ainf_word_degree(low) == 0);
  auto frees = ainf_free_slots(low);
  REQUIRE(frees.size() == 2);
  CHECK(frees[0] == std::pair<int, int>{1, 1});
  CHECK(frees[1] == std::pair<int, int>{2, 1});

  AinfWord high = word_of({genl(I0, 1, -1, 0), corl(2, 0, 1)});
  CHECK(ainf_word_valid(high));
  CHECK(ainf_word_arity(high) == 2);
  auto hf = ainf_free_slots(high);
  REQUIRE(hf.size() == 2);
  CHECK(hf[0] == std::pair<int, int>{1, 1});
  CHECK(hf[1] == std::pair<int, int>{1, 2});

  CHECK_THROWS(ainf_generator_word({I0, 0}));
  CHECK_THROWS(ainf_corolla_word(1));
}

TEST_CASE("word bookkeeping: validity rejections") {
  Face I0 = full_face(0);
  Face J = full_face(1);
  /* two generator letters on one path */
  CHECK_FALSE(ainf_word_valid(word_of({genl(I0, 1, -1, 0), genl(I0, 1, 0, 1)})));
  /* one path crosses a generator, the other does not */
  CHECK_FALSE(ainf_word_valid(word_of({corl(2, -1, 0), genl(I0, 1, 0, 1)})));
  /* mixed ambient simplexes */
  CHECK_FALSE(
      ainf_word_valid(word_of({corl(2, -1, 0), genl(I0, 1, 0, 1), genl(J, 1, 0, 2)})));
  /* not stored in preorder */
  CHECK_FALSE(
      ainf_word_valid(word_of({corl(2, -1, 0), genl(I0, 1, 0, 2), genl(I0, 1, 0, 1)})));
  /* slot collision */
  CHECK_FALSE(
      ainf_word_valid(word_of({corl(2, -1, 0), genl(I0, 1, 0, 1), genl(I0, 1, 0, 1)})));
  CHECK_FALSE(ainf_word_valid(AinfWord{}));
  CHECK_THROWS(nainf_diff(word_of({genl(I0, 1, -1, 0), genl(I0, 1, 0, 1)})));
}

TEST_CASE("word json round trip") {
  Face I1 = full_face(1);
  AinfWord w = word_of({corl(2, -1, 0), genl(make_face(1, {0}), 1, 0, 1), genl(I1, 2, 0, 2),
                        corl(3, 2, 2)});
  REQUIRE(ainf_word_valid(w));
  auto j = ainf_word_to_json(w);
  CHECK(ainf_word_from_json(j) == w);
  CHECK(j.at("letters").size() == 4);
  CHECK_FALSE(j.at("letters")[0].contains("face"));
  CHECK(j.at("letters")[1].at("face").at("ambient") == 1);

  auto bad = j;
  bad["letters"][1]["parent"] = 3;
  CHECK_THROWS(ainf_word_from_json(bad));
}

TEST_CASE("corolla-side differential: frozen generator inventories") {
  /* arity 1 over a point: everything vanishes */
  CHECK(nainf_diff(NAinfGenerator{full_face(0), 1}).empty());

  /* arity 1 over the interval: only the label boundary */
  Face I1 = full_face(1);
  AinfChain d1 = nainf_diff(NAinfGenerator{I1, 1});
  AinfChain want1;
  add_term(want1, ainf_generator_word({make_face(1, {1}), 1}), 1);
  add_term(want1, ainf_generator_word({make_face(1, {0}), 1}), -1);
  CHECK(d1 == want1);

  /* arity 2 over a point: one action under, one action over */
  Face I0 = full_face(0);
  AinfChain d2 = nainf_diff(NAinfGenerator{I0, 2});
  AinfChain want2;
  add_term(want2, word_of({genl(I0, 1, -1, 0), corl(2, 0, 1)}), 1);
  add_term(want2, word_of({corl(2, -1, 0), genl(I0, 1, 0, 1), genl(I0, 1, 0, 2)}), -1);
  CHECK(d2 == want2);

  /* arity 2 over the interval: label boundary, action under with the
   * dimension twist, and the two overlapping splits above */
  AinfChain d3 = nainf_diff(NAinfGenerator{I1, 2});
  AinfChain want3;
  add_term(want3, ainf_generator_word({make_face(1, {1}), 2}), 1);
  add_term(want3, ainf_generator_word({make_face(1, {0}), 2}), -1);
  add_term(want3, word_of({genl(I1, 1, -1, 0), corl(2, 0, 1)}), -1);
  add_term(want3, word_of({corl(2, -1, 0), genl(make_face(1, {0}), 1, 0, 1), genl(I1, 1, 0, 2)}),
           1);
  add_term(want3, word_of({corl(2, -1, 0), genl(I1, 1, 0, 1), genl(make_face(1, {1}), 1, 0, 2)}),
           1);
  CHECK(d3 == want3);
}

TEST_CASE("corolla-side differential: operad letters") {
  AinfChain d3 = nainf_diff(ainf_corolla_word(3));
  AinfChain want;
  add_term(want, word_of({corl(2, -1, 0), corl(2, 0, 1)}), -1);
  add_term(want, word_of({corl(2, -1, 0), corl(2, 0, 2)}), 1);
  CHECK(d3 == want);

  for (int m = 2; m <= 5; ++m) {
    AinfChain d = nainf_diff(ainf_corolla_word(m));
    CHECK(diff_chain(d).empty());
    for (const auto& [w, k] : d) {
      (void)k;
      CHECK(ainf_word_degree(w) == 2 - m + 1);
      CHECK(ainf_word_arity(w) == m);
    }
  }
}

TEST_CASE("corolla-side differential: squares to zero on composite words") {
  Face I1 = full_face(1);
  AinfWord a = word_of({corl(2, -1, 0), genl(I1, 1, 0, 1), genl(I1, 1, 0, 2)});
  AinfWord b = word_of({genl(I1, 2, -1, 0), corl(3, 0, 2)});
  AinfWord c = word_of({corl(2, -1, 0), corl(3, 0, 1)});
  Face I2 = full_face(2);
  AinfWord d = word_of({corl(2, -1, 0), genl(I2, 2, 0, 1), corl(2, 1, 2),
                        genl(make_face(2, {2}), 1, 0, 2)});
  REQUIRE(ainf_word_valid(d));
  for (const AinfWord& w : {a, b, c, d}) {
    AinfChain once;
    add_term(once, w, 1);
    CHECK(diff_chain(diff_chain(once)).empty());
  }
}

TEST_CASE("corolla-side differential: raises degree by one") {
  for (int n = 0; n <= 2; ++n)
    for (const Face& I : all_faces(n))
      for (int m = 1; m <= 3; ++m) {
        NAinfGenerator g{I, m};
        for (const auto& [w, k] : nainf_diff(g)) {
          (void)k;
          CHECK(ainf_word_degree(w) == nainf_generator_degree(g) + 1);
          CHECK(ainf_word_arity(w) == m);
        }
      }
}

TEST_CASE("square-zero audit: corolla side") {
  D2Report r = d2_check(BimoduleFamily::NAinf, 4, 2);
  CHECK(r.ok);
  CHECK(r.generators == 44);
  CHECK(r.offenders.empty());
  auto j = d2_report_to_json(r);
  CHECK(j.at("ok") == true);
  CHECK(j.at("generators") == 44);
  CHECK(j.at("offenders").is_array());
  CHECK(j.at("offenders").empty());
  CHECK_THROWS(d2_check(BimoduleFamily::NAinf, 0, 1));
}

TEST_CASE("broken-side differential: base cases") {
  BrokenTree point = elem_of(trivial_gauged(), {full_face(0)});
  CHECK(nombas_diff(point).empty());

  BrokenTree seg = elem_of(trivial_gauged(), {full_face(1)});
  BrokenChain want;
  add_term(want, elem_of(trivial_gauged(), {make_face(1, {1})}), 1);
  add_term(want, elem_of(trivial_gauged(), {make_face(1, {0})}), -1);
  CHECK(nombas_diff(seg) == want);

  BrokenTree unlabeled = single_gauged(trivial_gauged());
  CHECK_THROWS(nombas_diff(unlabeled));
  CHECK_THROWS(nombas_diff(single_bare(corolla(2))));
}

TEST_CASE("broken-side differential: eleven-term inventory over the triangle") {
  Face I2 = full_face(2);
  GaugedTree tg = gauged_of("[[1,2],[3,4]]", {Rel::Below, Rel::Above, Rel::Above});
  BrokenTree elem = elem_of(tg, {I2});

  Face d0 = make_face(2, {1, 2});
  Face d1 = make_face(2, {0, 2});
  Face d2f = make_face(2, {0, 1});

  BrokenChain want;
  add_term(want, elem_of(tg, {d0}), 1);
  add_term(want, elem_of(tg, {d1}), -1);
  add_term(want, elem_of(tg, {d2f}), 1);
  add_term(want, elem_of(gauged_of("[[1,2],[3,4]]", {Rel::On, Rel::Above, Rel::Above}), {I2}), 1);
  add_term(want, elem_of(gauged_of("[[1,2],[3,4]]", {Rel::Below, Rel::On, Rel::Above}), {I2}),
           -1);
  add_term(want, elem_of(gauged_of("[[1,2],[3,4]]", {Rel::Below, Rel::Above, Rel::On}), {I2}),
           -1);
  add_term(want,
           word_comps({{tree_of("[1,[2,3]]"), true, {Rel::Below, Rel::Above}, -1, 0},
                       {corolla(2), false, {}, 0, 1}},
                      {I2}),
           -1);
  add_term(want,
           word_comps({{tree_of("[[1,2],3]"), true, {Rel::Below, Rel::Above}, -1, 0},
                       {corolla(2), false, {}, 0, 3}},
                      {I2}),
           1);
  std::vector<Component> sink = {{corolla(2), false, {}, -1, 0},
                                 {corolla(2), true, {Rel::Above}, 0, 1},
                                 {corolla(2), true, {Rel::Above}, 0, 2}};
  add_term(want, word_comps(sink, {make_face(2, {0}), I2}), -1);
  add_term(want, word_comps(sink, {d2f, d0}), -1);
  add_term(want, word_comps(sink, {I2, make_face(2, {2})}), -1);

  BrokenChain got = nombas_diff(elem);
  CHECK(got.size() == 11);
  CHECK(got == want);
  for (const auto& [t, k] : got) {
    (void)k;
    CHECK(broken_degree(t) == broken_degree(elem) + 1);
  }
}

TEST_CASE("broken-side differential: raises degree by one") {
  for (int n = 0; n <= 1; ++n)
    for (const Face& I : all_faces(n))
      for (int m = 1; m <= 3; ++m)
        for (const auto& g : enumerate_scrt(m)) {
          BrokenTree elem = elem_of(g, {I});
          for (const auto& [t, k] : nombas_diff(elem)) {
            (void)k;
            CHECK(broken_degree(t) == broken_degree(elem) + 1);
            CHECK(broken_arity(t) == broken_arity(elem));
          }
        }
}

TEST_CASE("square-zero audit: broken side") {
  int scrt_total = 0;
  for (int m = 1; m <= 4; ++m) scrt_total += (int)enumerate_scrt(m).size();
  D2Report r = d2_check(BimoduleFamily::NOmbas, 4, 2);
  CHECK(r.ok);
  CHECK(r.generators == 11 * scrt_total);
  CHECK(r.offenders.empty());
}

TEST_CASE("operadic actions: validated one-term chains") {
  Face I1 = full_face(1);
  BrokenTree triv = elem_of(trivial_gauged(), {I1});

  BrokenChain c = circ_action(triv, 1, single_bare(corolla(2)));
  REQUIRE(c.size() == 1);
  BrokenTree expect = word_comps({{unit_tree(), true, {}, -1, 0}, {corolla(2), false, {}, 0, 1}},
                                 {I1});
  CHECK(c.begin()->first == expect);
  CHECK(c.begin()->second == 1);

  Face I0 = full_face(0);
  BrokenTree pt = elem_of(trivial_gauged(), {I0});
  BrokenChain m = mu_action(single_bare(corolla(2)), {pt, pt});
  REQUIRE(m.size() == 1);
  BrokenTree expect2 = word_comps({{corolla(2), false, {}, -1, 0},
                                   {unit_tree(), true, {}, 0, 1},
                                   {unit_tree(), true, {}, 0, 2}},
                                  {I0, I0});
  CHECK(m.begin()->first == expect2);
  CHECK(m.begin()->second == 1);

  CHECK_THROWS(circ_action(single_bare(corolla(2)), 1, single_bare(corolla(2))));
  CHECK_THROWS(circ_action(triv, 1, triv));
  CHECK_THROWS(mu_action(single_gauged(trivial_gauged()), {pt}));
  CHECK_THROWS(mu_action(single_bare(corolla(2)), {pt, single_bare(corolla(2))}));
}

TEST_CASE("operadic actions: axioms with graded signs") {
  Face I1 = full_face(1);
  std::vector<BrokenTree> xs = {
      elem_of(gauged_of("[1,2]", {Rel::Above}), {I1}),
      elem_of(gauged_of("[1,2]", {Rel::Below}), {make_face(1, {0})}),
      elem_of(gauged_of("[1,2,3]", {Rel::Below}), {I1}),
  };
  std::vector<BrokenTree> ys = {single_bare(corolla(2)), single_bare(corolla(3)),
                                single_bare(tree_of("[[1,2],3]"))};

  /* horizontal: disjoint grafts commute up to the degree crossing */
  for (const auto& x : xs)
    for (const auto& y : ys)
      for (const auto& z : ys) {
        int a = broken_arity(x);
        for (int i = 1; i <= a; ++i)
          for (int j = i + 1; j <= a; ++j) {
            BrokenChain lhs = circ_chain(circ_action(x, i, y), j + broken_arity(y) - 1, z);
            BrokenChain rhs = circ_chain(circ_action(x, j, z), i, y);
            Int kz = par(broken_degree(y) * broken_degree(z));
            BrokenChain scaled;
            for (const auto& [t, k] : rhs) add_term(scaled, t, k * kz);
            CHECK(lhs == scaled);
          }
      }

  /* vertical: grafting a grafted word equals iterated grafting */
  for (const auto& x : xs)
    for (const auto& y : ys)
      for (const auto& z : ys) {
        int a = broken_arity(x);
        int b = broken_arity(y);
        for (int i = 1; i <= a; ++i)
          for (int k = 1; k <= b; ++k) {
            Grafted yz = graft(y, k, z);
            BrokenChain lhs;
            for (const auto& [t, c] : circ_action(x, i, yz.tree)) add_term(lhs, t, c * yz.sign);
            BrokenChain rhs = circ_chain(circ_action(x, i, y), i + k - 1, z);
            CHECK(lhs == rhs);
          }
      }

  /* interchange between the root action and grafting into one argument */
  for (const auto& x1 : xs)
    for (const auto& x2 : xs)
      for (const auto& y : ys) {
        std::vector<BrokenTree> args = {x1, x2};
        for (int i = 0; i < 2; ++i) {
          int offset = i == 0 ? 0 : broken_arity(x1);
          Int after = i == 0 ? broken_degree(x2) : 0;
          for (int l = 1; l <= broken_arity(args[i]); ++l) {
            BrokenChain lhs =
                circ_chain(mu_action(single_bare(corolla(2)), args), offset + l, y);
            std::vector<BrokenTree> moved = args;
            BrokenChain inner = circ_action(args[i], l, y);
            REQUIRE(inner.size() == 1);
            moved[i] = inner.begin()->first;
            BrokenChain rhs = mu_action(single_bare(corolla(2)), moved);
            Int kz = inner.begin()->second * par(broken_degree(y) * after);
            BrokenChain scaled;
            for (const auto& [t, k] : rhs) add_term(scaled, t, k * kz);
            CHECK(lhs == scaled);
          }
        }
      }
}

TEST_CASE("operad comparison signs: solved and frozen low arities") {
  OperadSignTable tab = operad_sign_solve(4);
  CHECK(tab.ok);
  CHECK(tab.conflicts.empty());
  CHECK(tab.m_max == 4);

  BrokenChain c2 = operad_comparison(2, tab);
  REQUIRE(c2.size() == 1);
  CHECK(c2.begin()->first == single_bare(corolla(2)));
  CHECK(c2.begin()->second == 1);

  BrokenChain c3 = operad_comparison(3, tab);
  BrokenChain want3;
  add_term(want3, single_bare(tree_of("[[1,2],3]")), -1);
  add_term(want3, single_bare(tree_of("[1,[2,3]]")), 1);
  CHECK(c3 == want3);

  int quads = 0;
  for (const auto& [t, e] : tab.sign) {
    CHECK(e * e == 1);
    if (t.arity() == 4) ++quads;
  }
  CHECK(quads == 5);

  CHECK_THROWS(operad_comparison(1, tab));
  CHECK_THROWS(operad_comparison(5, tab));

  /* chain map property re-checked through the public pieces */
  for (int m = 2; m <= 4; ++m) {
    BrokenChain lhs;
    for (const auto& [t, e] : tab.sign) {
      if (t.arity() != m) continue;
      for (const auto& wt : bare_word_boundary(single_bare(t))) add_term(lhs, wt.tree, e * wt.sign);
    }
    BrokenChain rhs;
    for (const auto& [w, k] : nainf_diff(ainf_corolla_word(m))) {
      REQUIRE(w.letters.size() == 2);
      Grafted g = graft(single_bare(corolla(w.letters[0].arity)), w.letters[1].slot,
                        single_bare(corolla(w.letters[1].arity)));
      /* push both corollas through the table */
      BrokenChain top = operad_comparison(w.letters[0].arity, tab);
      BrokenChain bot = operad_comparison(w.letters[1].arity, tab);
      (void)g;
      for (const auto& [tw, tk] : top)
        for (const auto& [bw, bk] : bot) {
          Grafted gg = graft(tw, w.letters[1].slot, bw);
          add_term(rhs, gg.tree, k * tk * bk * gg.sign);
        }
    }
    CHECK(lhs == rhs);
  }
}

TEST_CASE("two-sided comparison signs: solved, seeded, verified") {
  ComparisonSignTable tab = phi_compat_solve(3, 1);
  CHECK(tab.ok);
  CHECK(tab.conflicts.empty());
  CHECK(tab.operad.ok);
  CHECK(tab.sign.at(trivial_gauged()) == 1);

  int by_arity[4] = {0, 0, 0, 0};
  for (const auto& [t, e] : tab.sign) {
    CHECK(e * e == 1);
    ++by_arity[t.tree.arity()];
  }
  CHECK(by_arity[1] == 1);
  CHECK(by_arity[2] == 2);
  CHECK(by_arity[3] == 6);

  /* the two-vertex letters weight by shape: right comb plus, left comb minus */
  CHECK(tab.sign.at(gauged_of("[1,2]", {Rel::Above})) == 1);
  CHECK(tab.sign.at(gauged_of("[1,2]", {Rel::Below})) == 1);
  for (Rel inner : {Rel::Above, Rel::Below}) {
    CHECK(tab.sign.at(gauged_of("[1,[2,3]]", {Rel::Below, inner})) == 1);
    CHECK(tab.sign.at(gauged_of("[[1,2],3]", {Rel::Below, inner})) == -1);
  }
  CHECK(tab.sign.at(gauged_of("[1,[2,3]]", {Rel::Above, Rel::Above})) == 1);
  CHECK(tab.sign.at(gauged_of("[[1,2],3]", {Rel::Above, Rel::Above})) == -1);

  Face I1 = full_face(1);
  BrokenChain p1 = phi({I1, 1}, tab);
  REQUIRE(p1.size() == 1);
  CHECK(p1.begin()->first == elem_of(trivial_gauged(), {I1}));
  CHECK(p1.begin()->second == 1);
  CHECK(phi_word(ainf_generator_word({I1, 1}), tab) == p1);

  /* compatibility re-checked through the public pieces at arity 2 */
  for (const Face& I : all_faces(1)) {
    BrokenChain lhs;
    for (const auto& [w, k] : phi({I, 2}, tab))
      for (const auto& [t, c] : nombas_diff(w)) add_term(lhs, t, k * c);
    BrokenChain rhs;
    for (const auto& [w, k] : nainf_diff(NAinfGenerator{I, 2}))
      for (const auto& [t, c] : phi_word(w, tab)) add_term(rhs, t, k * c);
    CHECK(lhs == rhs);
  }

  CHECK_THROWS(phi({I1, 0}, tab));
  CHECK_THROWS(phi({I1, 4}, tab));
}

TEST_CASE("cosimplicial maps: relabeling and commutation") {
  Face I1 = full_face(1);
  AinfWord g = ainf_generator_word({I1, 2});

  AinfChain up = bimodule_coface(g, 0);
  REQUIRE(up.size() == 1);
  CHECK(up.begin()->first == ainf_generator_word({make_face(2, {1, 2}), 2}));

  CHECK(bimodule_codegeneracy(g, 0).empty());
  AinfChain down = bimodule_codegeneracy(ainf_generator_word({make_face(1, {1}), 2}), 0);
  REQUIRE(down.size() == 1);
  CHECK(down.begin()->first == ainf_generator_word({make_face(0, {0}), 2}));

  BrokenTree seg = elem_of(trivial_gauged(), {I1});
  BrokenChain bup = bimodule_coface(seg, 2);
  REQUIRE(bup.size() == 1);
  CHECK(bup.begin()->first == elem_of(trivial_gauged(), {make_face(2, {0, 1})}));
  CHECK(bimodule_codegeneracy(seg, 0).empty());

  /* coface and codegeneracy commute with the differential, corolla side */
  for (int n = 0; n <= 1; ++n)
    for (const Face& I : all_faces(n))
      for (int m = 1; m <= 3; ++m) {
        AinfChain d;
        add_term(d, ainf_generator_word({I, m}), 1);
        AinfChain dd = diff_chain(d);
        for (int i = 0; i <= n + 1; ++i) {
          auto up_then_d = diff_chain(apply_chain(d, [&](const AinfWord& w) {
            return bimodule_coface(w, i);
          }));
          auto d_then_up =
              apply_chain(dd, [&](const AinfWord& w) { return bimodule_coface(w, i); });
          CHECK(up_then_d == d_then_up);
        }
        if (n >= 1)
          for (int i = 0; i <= n - 1; ++i) {
            auto down_then_d = diff_chain(apply_chain(d, [&](const AinfWord& w) {
              return bimodule_codegeneracy(w, i);
            }));
            auto d_then_down =
                apply_chain(dd, [&](const AinfWord& w) { return bimodule_codegeneracy(w, i); });
            CHECK(down_then_d == d_then_down);
          }
      }

  /* same on the broken side */
  for (int n = 0; n <= 1; ++n)
    for (const Face& I : all_faces(n))
      for (int m = 1; m <= 2; ++m)
        for (const auto& tg : enumerate_scrt(m)) {
          BrokenChain d;
          add_term(d, elem_of(tg, {I}), 1);
          BrokenChain dd = diff_chain(d);
          for (int i = 0; i <= n + 1; ++i) {
            auto up_then_d = diff_chain(apply_chain(d, [&](const BrokenTree& t) {
              return bimodule_coface(t, i);
            }));
            auto d_then_up =
                apply_chain(dd, [&](const BrokenTree& t) { return bimodule_coface(t, i); });
            CHECK(up_then_d == d_then_up);
          }
          if (n >= 1)
            for (int i = 0; i <= n - 1; ++i) {
              auto down_then_d = diff_chain(apply_chain(d, [&](const BrokenTree& t) {
                return bimodule_codegeneracy(t, i);
              }));
              auto d_then_down = apply_chain(
                  dd, [&](const BrokenTree& t) { return bimodule_codegeneracy(t, i); });
              CHECK(down_then_d == d_then_down);
            }
        }
}
