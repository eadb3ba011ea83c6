#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "nmorph/algebra.hpp"
#include "nmorph/json_io.hpp"

using namespace nmorph;

namespace {

const Face pt = full_face(0);

/* truncated polynomials on x with x^3 = 0, concentrated in degree zero */
ModulePtr poly_module() { return make_module({{"1", 0}, {"x", 0}, {"xx", 0}}); }

GradedMap poly_mult(const ModulePtr& m) {
  GradedMap f = zero_map({m, m}, m, 0);
  f.add(0, {0, 0}, 1);
  f.add(1, {0, 1}, 1);
  f.add(1, {1, 0}, 1);
  f.add(2, {0, 2}, 1);
  f.add(2, {2, 0}, 1);
  f.add(2, {1, 1}, 1);
  return f;
}

AInfAlgebra poly_ainf() {
  ModulePtr m = poly_module();
  return {m, {{2, poly_mult(m)}}};
}

/* unital instance 1, e with e of degree one and e.e = 0 */
AInfAlgebra unital_pair() {
  ModulePtr m = make_module({{"1", 0}, {"e", 1}});
  GradedMap f = zero_map({m, m}, m, 0);
  f.add(0, {0, 0}, 1);
  f.add(1, {0, 1}, 1);
  f.add(1, {1, 0}, 1);
  return {m, {{2, f}}};
}

/* unital dga 1, a, b with da = b and all products through the unit */
ModulePtr dga_module() { return make_module({{"1", 0}, {"a", 0}, {"b", 1}}); }

GradedMap dga_diff(const ModulePtr& t) {
  GradedMap d = zero_map({t}, t, 1);
  d.add(2, {1}, 1);
  return d;
}

GradedMap dga_mult(const ModulePtr& t) {
  GradedMap f = zero_map({t, t}, t, 0);
  f.add(0, {0, 0}, 1);
  f.add(1, {0, 1}, 1);
  f.add(1, {1, 0}, 1);
  f.add(2, {0, 2}, 1);
  f.add(2, {2, 0}, 1);
  return f;
}

AInfAlgebra dga_ainf() {
  ModulePtr t = dga_module();
  return {t, {{1, dga_diff(t)}, {2, dga_mult(t)}}};
}

/* strict broken structure: corollas carry iterated left products, every tree
 * with an internal edge acts by zero */
OmegaBAsAlgebra strict_ombas(const ModulePtr& m, const GradedMap& diff,
                             const GradedMap& mult, int cap) {
  OmegaBAsAlgebra a;
  a.module = m;
  a.diff = diff;
  GradedMap comb = mult;
  a.ops[corolla(2)] = comb;
  for (int k = 3; k <= cap; ++k) {
    comb = koszul_compose({mult}, {comb, identity_map(m)});
    a.ops[corolla(k)] = comb;
  }
  return a;
}

/* identity over the strict structure: the trivial cell is the identity and
 * the on-gauge corollas repeat the products */
NOmbasMorphism strict_identity(const OmegaBAsAlgebra& a, int n, int cap) {
  NOmbasMorphism f;
  f.source = a;
  f.target = a;
  f.n = n;
  for (const Face& face : all_faces(n)) {
    if (face.dim() > 0) continue;
    f.maps[{face, trivial_gauged()}] = identity_map(a.module);
    for (int k = 2; k <= cap; ++k)
      f.maps[{face, GaugedTree{corolla(k), {Rel::On}}}] = a.ops.at(corolla(k));
  }
  return f;
}

AInfAlgebra direct_sum(const AInfAlgebra& a, const AInfAlgebra& b) {
  std::vector<std::pair<std::string, int>> basis;
  for (int i = 0; i < a.module->rank(); ++i)
    basis.push_back({"l." + a.module->name(i), a.module->degree(i)});
  for (int i = 0; i < b.module->rank(); ++i)
    basis.push_back({"r." + b.module->name(i), b.module->degree(i)});
  AInfAlgebra s;
  s.module = make_module(std::move(basis));
  int shift = a.module->rank();
  std::set<int> arities;
  for (const auto& [k, op] : a.ops) arities.insert(k);
  for (const auto& [k, op] : b.ops) arities.insert(k);
  for (int k : arities) {
    GradedMap op = zero_map(std::vector<ModulePtr>((size_t)k, s.module), s.module, 2 - k);
    for (const auto& [key, c] : ainf_op(a, k).coeffs) op.add(key.first, key.second, c);
    for (const auto& [key, c] : ainf_op(b, k).coeffs) {
      std::vector<int> ins = key.second;
      for (int& i : ins) i += shift;
      op.add(key.first + shift, ins, c);
    }
    s.ops[k] = op;
  }
  return s;
}

AInfAlgebra flip_coefficient(AInfAlgebra a, int arity, int which) {
  GradedMap& op = a.ops.at(arity);
  auto it = op.coeffs.begin();
  std::advance(it, which);
  op.add(it->first.first, it->first.second, -2 * it->second);
  return a;
}

}  // namespace

TEST_CASE("structure residuals vanish for strict truncated polynomials") {
  ResidualReport rep = check_ainf(poly_ainf(), 4);
  CHECK(rep.ok);
  CHECK(rep.checked == 4);
  CHECK(rep.entries.empty());
}

TEST_CASE("zero products with a square-zero differential pass") {
  ModulePtr m = make_module({{"a", 0}, {"b", 1}});
  GradedMap d = zero_map({m}, m, 1);
  d.add(1, {0}, 1);
  AInfAlgebra a{m, {{1, d}}};
  CHECK(check_ainf(a, 3).ok);
}

TEST_CASE("a nonsquaring differential is caught at arity one") {
  ModulePtr m = make_module({{"a", 0}, {"b", 1}, {"c", 2}});
  GradedMap d = zero_map({m}, m, 1);
  d.add(1, {0}, 1);
  d.add(2, {1}, 1);
  AInfAlgebra a{m, {{1, d}}};
  ResidualReport rep = check_ainf(a, 2);
  CHECK_FALSE(rep.ok);
  REQUIRE(rep.entries.size() == 1);
  CHECK(rep.entries[0].relation == "arity 1");
  CHECK(rep.entries[0].residual.coeff(2, {0}) == 1);
}

TEST_CASE("a single sign flip in the product breaks the arity-three relation") {
  AInfAlgebra mutated = flip_coefficient(poly_ainf(), 2, 1);  // 1.x now lands on -x
  ResidualReport rep = check_ainf(mutated, 3);
  CHECK_FALSE(rep.ok);
  bool arity3 = false;
  for (const auto& e : rep.entries) arity3 = arity3 || e.relation == "arity 3";
  CHECK(arity3);
}

TEST_CASE("every sign mutation of the unital instance is caught") {
  AInfAlgebra base = unital_pair();
  CHECK(check_ainf(base, 3).ok);
  int coeffs = (int)base.ops.at(2).coeffs.size();
  REQUIRE(coeffs == 3);
  for (int which = 0; which < coeffs; ++which)
    CHECK_FALSE(check_ainf(flip_coefficient(base, 2, which), 3).ok);
}

TEST_CASE("direct sums check blockwise") {
  AInfAlgebra good = unital_pair();
  AInfAlgebra bad = flip_coefficient(unital_pair(), 2, 2);
  CHECK(check_ainf(direct_sum(good, good), 3).ok);

  ResidualReport part = check_ainf(bad, 3);
  ResidualReport whole = check_ainf(direct_sum(good, bad), 3);
  CHECK_FALSE(whole.ok);
  REQUIRE(whole.entries.size() == part.entries.size());
  int shift = good.module->rank();
  for (size_t i = 0; i < whole.entries.size(); ++i) {
    CHECK(whole.entries[i].relation == part.entries[i].relation);
    /* every residual coefficient lives in the right block and matches */
    for (const auto& [key, c] : whole.entries[i].residual.coeffs) {
      std::vector<int> ins = key.second;
      for (int& v : ins) {
        REQUIRE(v >= shift);
        v -= shift;
      }
      CHECK(part.entries[i].residual.coeff(key.first - shift, ins) == c);
    }
    CHECK(whole.entries[i].residual.coeffs.size() ==
          part.entries[i].residual.coeffs.size());
  }
}

TEST_CASE("tree relations hold for the strict broken structures") {
  ModulePtr m = poly_module();
  OmegaBAsAlgebra a = strict_ombas(m, zero_map({m}, m, 1), poly_mult(m), 4);
  ResidualReport rep = check_ombas(a, 4);
  CHECK(rep.ok);
  CHECK(rep.checked == 16);  // differential plus 1 + 3 + 11 trees

  ModulePtr t = dga_module();
  CHECK(check_ombas(strict_ombas(t, dga_diff(t), dga_mult(t), 3), 3).ok);
}

TEST_CASE("a mutated broken corolla fails its tree relations") {
  ModulePtr m = poly_module();
  OmegaBAsAlgebra a = strict_ombas(m, zero_map({m}, m, 1), poly_mult(m), 3);
  GradedMap& op = a.ops.at(corolla(3));
  auto key = op.coeffs.begin()->first;
  op.add(key.first, key.second, -2 * op.coeffs.begin()->second);
  CHECK_FALSE(check_ombas(a, 3).ok);
}

TEST_CASE("identity and strict quotient zero-morphisms satisfy every relation") {
  AInfAlgebra x = poly_ainf();
  NAinfMorphism id{x, x, 0, {{{pt, 1}, identity_map(x.module)}}};
  ResidualReport rep = check_n_morphism(id, 4);
  CHECK(rep.ok);
  CHECK(rep.checked == 4);

  /* projection of the unital dga onto its ground summand kills a and b */
  AInfAlgebra t = dga_ainf();
  ModulePtr z = make_module({{"1", 0}});
  GradedMap mz = zero_map({z, z}, z, 0);
  mz.add(0, {0, 0}, 1);
  AInfAlgebra ground{z, {{2, mz}}};
  GradedMap q = zero_map({t.module}, z, 0);
  q.add(0, {0}, 1);
  NAinfMorphism quot{t, ground, 0, {{{pt, 1}, q}}};
  CHECK(check_n_morphism(quot, 4).ok);
}

TEST_CASE("a non-multiplicative map leaves an arity-two residual") {
  AInfAlgebra x = poly_ainf();
  GradedMap h = identity_map(x.module);
  h.add(1, {0}, 1);  // the unit also picks up x
  NAinfMorphism f{x, x, 0, {{{pt, 1}, h}}};
  ResidualReport rep = check_n_morphism(f, 2);
  CHECK_FALSE(rep.ok);
  REQUIRE(rep.entries.size() == 1);
  CHECK(rep.entries[0].relation == "face [0] arity 2");
}

TEST_CASE("trivial broken morphism between zero-product algebras passes") {
  ModulePtr u = make_module({{"b", 1}, {"c", 2}});
  GradedMap d = zero_map({u}, u, 1);
  d.add(1, {0}, 1);
  OmegaBAsAlgebra a{u, d, {}};
  NOmbasMorphism f;
  f.source = a;
  f.target = a;
  f.n = 0;
  f.maps[{pt, trivial_gauged()}] = identity_map(u);
  ResidualReport rep = check_n_ombas_morphism(f, 2);
  CHECK(rep.ok);
  CHECK(rep.checked == 4);
}

TEST_CASE("the strict identity closes over every gauged cell") {
  ModulePtr m = poly_module();
  OmegaBAsAlgebra a = strict_ombas(m, zero_map({m}, m, 1), poly_mult(m), 4);
  ResidualReport rep = check_n_ombas_morphism(strict_identity(a, 0, 4), 4);
  CHECK(rep.ok);
  CHECK(rep.checked == 84);
}

TEST_CASE("gauge homotopy corrections close within the checked window") {
  ModulePtr t = dga_module();
  GradedMap td = dga_diff(t);
  OmegaBAsAlgebra a = strict_ombas(t, td, dga_mult(t), 3);

  GradedMap h = zero_map({t, t}, t, -1);
  h.add(2, {2, 2}, 1);  // b (x) b -> b
  GradedMap br = bracket(h, td, td);
  CHECK(br.coeff(2, {1, 2}) == 1);
  CHECK(br.coeff(2, {2, 1}) == -1);
  CHECK(br.coeffs.size() == 2);

  NOmbasMorphism f;
  f.source = a;
  f.target = a;
  f.n = 0;
  f.maps[{pt, trivial_gauged()}] = identity_map(t);
  f.maps[{pt, {corolla(2), {Rel::On}}}] = dga_mult(t) - br;
  f.maps[{pt, {corolla(2), {Rel::Above}}}] = h;
  f.maps[{pt, {corolla(2), {Rel::Below}}}] = Int(-1) * h;
  CHECK(check_n_ombas_morphism(f, 2).ok);

  /* dropping one correction breaks the matching gauge cell */
  f.maps.erase({pt, {corolla(2), {Rel::Below}}});
  ResidualReport rep = check_n_ombas_morphism(f, 2);
  CHECK_FALSE(rep.ok);
  REQUIRE(rep.entries.size() == 1);
  CHECK(rep.entries[0].relation == "face [0] cell [1,2] {below}");
}

TEST_CASE("represented words carry the crossing signs") {
  AInfAlgebra t = dga_ainf();
  GradedMap unit_homotopy = zero_map({t.module, t.module}, t.module, -1);
  unit_homotopy.add(0, {1, 2}, 1);  // a (x) b -> 1
  NAinfMorphism f{t, t, 0,
                  {{{pt, 1}, identity_map(t.module)}, {{pt, 2}, unit_homotopy}}};

  AinfWord pair_then_product;
  pair_then_product.letters = {{false, 2, {}, -1, 0},
                               {true, 1, pt, 0, 1},
                               {true, 2, pt, 0, 2}};
  GradedMap v = represent_ainf_word(pair_then_product, f);
  CHECK(v.coeff(0, {0, 1, 2}) == 1);   // 1.(a b -> 1), no crossing
  CHECK(v.coeff(2, {2, 1, 2}) == -1);  // the odd map crossed b first

  AinfWord swapped;
  swapped.letters = {{false, 2, {}, -1, 0}, {true, 2, pt, 0, 1}, {true, 1, pt, 0, 2}};
  CHECK(represent_ainf_word(swapped, f).coeff(0, {1, 2, 0}) == 1);

  /* broken shape: target product of a below-cell value and a trivial one */
  ModulePtr m = dga_module();
  OmegaBAsAlgebra a = strict_ombas(m, dga_diff(m), dga_mult(m), 2);
  GradedMap p = zero_map({m, m}, m, -1);
  p.add(1, {1, 2}, 1);
  NOmbasMorphism g;
  g.source = a;
  g.target = a;
  g.n = 0;
  g.maps[{pt, trivial_gauged()}] = identity_map(m);
  g.maps[{pt, {corolla(2), {Rel::Below}}}] = p;
  BrokenTree bw;
  bw.comps = {{corolla(2), false, {}, -1, 0},
              {corolla(2), true, {Rel::Below}, 0, 1},
              {unit_tree(), true, {}, 0, 2}};
  bw.labels = {pt, pt};
  CHECK(represent_broken_word(bw, g).coeff(1, {1, 2, 0}) == 1);
}

TEST_CASE("the pushed morphism keeps the solved comparison pattern") {
  ComparisonSignTable table = phi_compat_solve(3, 1);
  REQUIRE(table.ok);

  ModulePtr t = dga_module();
  GradedMap td = dga_diff(t);
  OmegaBAsAlgebra a = strict_ombas(t, td, dga_mult(t), 3);

  /* a degree -1 chain map rides along on the below cell */
  GradedMap p = zero_map({t, t}, t, -1);
  p.add(1, {1, 2}, 1);
  p.add(1, {2, 1}, -1);
  p.add(2, {2, 2}, -1);
  CHECK(bracket(p, td, td).is_zero());
  NOmbasMorphism f;
  f.source = a;
  f.target = a;
  f.n = 0;
  f.maps[{pt, trivial_gauged()}] = identity_map(t);
  f.maps[{pt, {corolla(2), {Rel::On}}}] = dga_mult(t);
  f.maps[{pt, {corolla(2), {Rel::Below}}}] = p;
  CHECK(check_n_ombas_morphism(f, 2).ok);

  NAinfMorphism pushed = push_forward(f, table);
  CHECK(nainf_map(pushed, {pt, 1}) == identity_map(t));
  CHECK(nainf_map(pushed, {pt, 2}) == p);  // above and below both enter with +1
  CHECK(check_n_morphism(pushed, 2).ok);
  CHECK(ainf_op(pushed.source, 2) == dga_mult(t));
  CHECK(ainf_op(pushed.source, 3).is_zero());

  /* opposite gauge corrections cancel in the pushed arity-two map */
  GradedMap h = zero_map({t, t}, t, -1);
  h.add(2, {2, 2}, 1);
  NOmbasMorphism hf;
  hf.source = a;
  hf.target = a;
  hf.n = 0;
  hf.maps[{pt, trivial_gauged()}] = identity_map(t);
  hf.maps[{pt, {corolla(2), {Rel::On}}}] = dga_mult(t) - bracket(h, td, td);
  hf.maps[{pt, {corolla(2), {Rel::Above}}}] = h;
  hf.maps[{pt, {corolla(2), {Rel::Below}}}] = Int(-1) * h;
  CHECK(check_n_ombas_morphism(hf, 2).ok);
  CHECK(nainf_map(push_forward(hf, table), {pt, 2}).is_zero());

  /* constant family over the interval, pushed and rechecked at arity three */
  ModulePtr m = poly_module();
  OmegaBAsAlgebra s = strict_ombas(m, zero_map({m}, m, 1), poly_mult(m), 3);
  NOmbasMorphism family = strict_identity(s, 1, 3);
  CHECK(check_n_ombas_morphism(family, 3).ok);
  NAinfMorphism pushed_family = push_forward(family, table);
  CHECK(check_n_morphism(pushed_family, 3).ok);
  CHECK(nainf_map(pushed_family, {vertex_face(1, 0), 1}) == identity_map(m));
  CHECK(nainf_map(pushed_family, {full_face(1), 1}).is_zero());
}

TEST_CASE("twisted brackets match exactly at odd ambient dimension") {
  ModulePtr u = make_module({{"b", 1}, {"c", 2}});
  GradedMap d = zero_map({u}, u, 1);
  d.add(1, {0}, 1);
  OmegaBAsAlgebra a{u, d, {}};
  GradedMap k = zero_map({u, u}, u, -1);
  k.add(0, {0, 0}, 1);  // b (x) b -> b
  NOmbasMorphism f;
  f.source = a;
  f.target = a;
  f.n = 0;
  f.maps[{pt, trivial_gauged()}] = identity_map(u);
  f.maps[{pt, {corolla(2), {Rel::On}}}] = Int(-1) * bracket(k, d, d);
  f.maps[{pt, {corolla(2), {Rel::Above}}}] = k;
  f.maps[{pt, {corolla(2), {Rel::Below}}}] = Int(-1) * k;

  CHECK(check_n_ombas_morphism(f, 2).ok);
  CHECK(check_n_ombas_morphism(f, 2, true, 1).ok);
  CHECK(check_n_ombas_morphism(f, 2, true, 3).ok);

  /* even ambient dimension flips the differential on odd inputs */
  ResidualReport rep = check_n_ombas_morphism(f, 2, true, 2);
  CHECK_FALSE(rep.ok);
  REQUIRE(rep.entries.size() == 2);
  CHECK(rep.entries[0].relation == "face [0] cell [1,2] {above}");
  CHECK(rep.entries[1].relation == "face [0] cell [1,2] {below}");
}

TEST_CASE("induced operations repeat the binary comparison") {
  OperadSignTable table = operad_sign_solve(4);
  REQUIRE(table.ok);
  ModulePtr t = dga_module();
  OmegaBAsAlgebra a = strict_ombas(t, dga_diff(t), dga_mult(t), 4);
  AInfAlgebra induced = induce_ainf(a, table);
  CHECK(ainf_op(induced, 1) == dga_diff(t));
  CHECK(ainf_op(induced, 2) == dga_mult(t));
  CHECK(ainf_op(induced, 3).is_zero());
  CHECK(ainf_op(induced, 4).is_zero());
  CHECK(check_ainf(induced, 4).ok);
}

TEST_CASE("sign tables must be solved before transport") {
  ModulePtr t = dga_module();
  OmegaBAsAlgebra a = strict_ombas(t, dga_diff(t), dga_mult(t), 2);
  OperadSignTable bad;
  bad.ok = false;
  CHECK_THROWS_AS(induce_ainf(a, bad), std::invalid_argument);

  NOmbasMorphism f;
  f.source = a;
  f.target = a;
  f.n = 0;
  f.maps[{pt, trivial_gauged()}] = identity_map(t);
  ComparisonSignTable badc;
  badc.ok = false;
  CHECK_THROWS_AS(push_forward(f, badc), std::invalid_argument);
}

TEST_CASE("malformed shapes and stray keys are rejected") {
  ModulePtr t = dga_module();
  AInfAlgebra wrong{t, {{2, dga_diff(t)}}};  // arity-one map filed under two
  CHECK_THROWS_AS(check_ainf(wrong, 2), std::invalid_argument);

  AInfAlgebra x = poly_ainf();
  NAinfMorphism stray{x, x, 0, {{{full_face(1), 1}, identity_map(x.module)}}};
  CHECK_THROWS_AS(check_n_morphism(stray, 1), std::invalid_argument);

  ModulePtr m = poly_module();
  OmegaBAsAlgebra a = strict_ombas(m, zero_map({m}, m, 1), poly_mult(m), 2);
  a.ops[unit_tree()] = identity_map(m);
  CHECK_THROWS_AS(check_ombas(a, 2), std::invalid_argument);
}

TEST_CASE("structures survive json round trips") {
  AInfAlgebra t = dga_ainf();
  nlohmann::json jt = ainf_algebra_to_json(t);
  CHECK(ainf_algebra_to_json(ainf_algebra_from_json(jt)) == jt);

  ModulePtr m = dga_module();
  OmegaBAsAlgebra a = strict_ombas(m, dga_diff(m), dga_mult(m), 3);
  nlohmann::json ja = ombas_algebra_to_json(a);
  CHECK(ombas_algebra_to_json(ombas_algebra_from_json(ja)) == ja);

  NAinfMorphism id{t, t, 0, {{{pt, 1}, identity_map(t.module)}}};
  nlohmann::json ji = nainf_morphism_to_json(id);
  CHECK(nainf_morphism_to_json(nainf_morphism_from_json(ji)) == ji);

  NOmbasMorphism f = strict_identity(a, 1, 3);
  nlohmann::json jf = nombas_morphism_to_json(f);
  CHECK(nombas_morphism_to_json(nombas_morphism_from_json(jf)) == jf);
  CHECK_THROWS_AS(nainf_morphism_from_json(jf), std::invalid_argument);
  CHECK_THROWS_AS(nombas_morphism_from_json(ji), std::invalid_argument);
}

TEST_CASE("residual reports serialize their failures") {
  ModulePtr m = make_module({{"a", 0}, {"b", 1}, {"c", 2}});
  GradedMap d = zero_map({m}, m, 1);
  d.add(1, {0}, 1);
  d.add(2, {1}, 1);
  AInfAlgebra a{m, {{1, d}}};
  nlohmann::json j = residual_report_to_json(check_ainf(a, 2));
  CHECK(j.at("ok") == false);
  CHECK(j.at("cap") == 2);
  CHECK(j.at("checked") == 2);
  REQUIRE(j.at("failures").size() == 1);
  CHECK(j.at("failures")[0].at("relation") == "arity 1");

  nlohmann::json good = residual_report_to_json(check_ainf(poly_ainf(), 3));
  CHECK(good.at("ok") == true);
  CHECK(good.at("failures").empty());
}
