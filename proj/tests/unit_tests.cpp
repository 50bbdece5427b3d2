#include "fixtures.hpp"

#include <gtest/gtest.h>

using namespace lcs;
using namespace fixtures;

// ---------------------------------------------------------------- intlinalg

TEST(IntLinAlg, HermiteIdentity) {
  auto h = hermite_normal_form(IntMatrix::identity(2));
  EXPECT_EQ(h.h, IntMatrix::identity(2));
  EXPECT_EQ(h.u, IntMatrix::identity(2));
}

TEST(IntLinAlg, HermiteHandReduction) {
  IntMatrix m{{2, 4}, {1, 1}};
  auto h = hermite_normal_form(m);
  EXPECT_EQ(h.h, (IntMatrix{{1, 1}, {0, 2}}));
  EXPECT_EQ(h.u * m, h.h);
}

TEST(IntLinAlg, HermiteZero) {
  IntMatrix z{{0, 0}, {0, 0}};
  auto h = hermite_normal_form(z);
  EXPECT_EQ(h.h, z);
  EXPECT_EQ(h.u, IntMatrix::identity(2));
}

TEST(IntLinAlg, SmithExamples) {
  EXPECT_EQ(smith_normal_form(IntMatrix{{2, 0}, {0, 3}}).d, (IntMatrix{{1, 0}, {0, 6}}));
  EXPECT_EQ(smith_normal_form(IntMatrix::identity(3)).d, IntMatrix::identity(3));
  EXPECT_EQ(smith_normal_form(IntMatrix{{2, 0}, {0, 2}}).d, (IntMatrix{{2, 0}, {0, 2}}));
  IntMatrix m{{4, 6, 2}, {8, 3, 1}};
  auto s = smith_normal_form(m);
  EXPECT_EQ(s.p * m * s.q, s.d);
  EXPECT_EQ(s.q * s.q_inv, IntMatrix::identity(3));
}

TEST(IntLinAlg, AbelianInvariants) {
  EXPECT_EQ(ll(abelian_invariants(IntMatrix{{2, 0}}, 2).divisors), (std::vector<long long>{2, 0}));
  EXPECT_EQ(ll(abelian_invariants(IntMatrix(0, 1), 1).divisors), (std::vector<long long>{0}));
  EXPECT_TRUE(abelian_invariants(IntMatrix{{1, 0}, {0, 1}}, 2).is_trivial());
  EXPECT_EQ(ll(abelian_invariants(IntMatrix{{2, 0}, {0, 3}}, 2).divisors), (std::vector<long long>{6}));
}

TEST(IntLinAlg, KernelAndSolve) {
  IntMatrix m{{1, 2}, {2, 4}, {0, 1}};
  IntMatrix k = integer_kernel(m);
  ASSERT_EQ(k.rows(), 1u);
  EXPECT_TRUE(row_times(k.row(0), m) == (std::vector<Integer>{0, 0}));
  auto x = solve_left(IntMatrix{{2, 0}, {0, 3}}, {4, 9});
  ASSERT_TRUE(x);
  EXPECT_EQ(ll(*x), (std::vector<long long>{2, 3}));
  EXPECT_FALSE(solve_left(IntMatrix{{2, 0}, {0, 3}}, {1, 0}));
  EXPECT_EQ(determinant(IntMatrix{{2, 1}, {7, 4}}), 1);
}

TEST(IntLinAlg, ArbitraryPrecision) {
  Integer big = Integer(1) << 200;
  IntMatrix m = IntMatrix::from_rows({{big, 0}, {0, big * 3}}, 2);
  auto inv = abelian_invariants(m, 2);
  EXPECT_EQ(inv.divisors[0], big);
  EXPECT_EQ(inv.divisors[1], big * 3);
}

// ---------------------------------------------------------------- pcengine

TEST(PcEngine, HeisenbergCollection) {
  auto h = heisenberg();
  EXPECT_EQ(h->format(word(h, {{1, 1}, {0, 1}})), "a b c");
  EXPECT_EQ(h->multiply(g(1), g(0)), word(h, {{0, 1}, {1, 1}, {2, 1}}));
  EXPECT_TRUE(word(h, {}).is_identity());
  EXPECT_EQ(h->commutator(g(0), g(1)), g(2, -1));
  EXPECT_TRUE(consistency_check(*h).empty());
}

TEST(PcEngine, KleinRelations) {
  auto k = klein();
  EXPECT_EQ(word(k, {{0, 1}, {1, 1}, {0, -1}}), g(1, -1));
  EXPECT_EQ(k->power(k->multiply(g(1), g(0)), 2), g(0, 2));
  EXPECT_EQ(k->commutator(g(0), g(1)), g(1, -2));
  EXPECT_TRUE(k->commutator(g(0), g(0)).is_identity());
}

TEST(PcEngine, InverseAndFiniteOrders) {
  PcPresentation p;
  p.add_generator("x", 4);
  p.add_generator("y", 2);
  p.power_rhs[0] = PcElement();
  auto d = complete_presentation(p);
  EXPECT_EQ(d->power(g(0), 4), PcElement());
  EXPECT_EQ(d->power(g(0), 5), g(0));
  auto h = heisenberg();
  PcElement x = word(h, {{0, 3}, {1, -2}, {2, 5}, {0, -1}});
  EXPECT_TRUE(h->multiply(x, h->invert(x)).is_identity());
}

TEST(PcEngine, InconsistentPresentationReported) {
  PcPresentation p;
  p.add_generator("a");
  p.add_generator("b");
  p.add_generator("c");
  p.conj[{1, 0}] = PcElement({{1, 1}, {2, 2}});
  p.conj_inv[{1, 0}] = PcElement({{1, 1}, {2, -1}});
  auto grp = PcGroup::create(p);
  EXPECT_FALSE(consistency_check(*grp).empty());
  EXPECT_THROW(complete_presentation(p), Inconsistent);
  EXPECT_TRUE(consistency_check(*free_abelian(2)).empty());
}

TEST(PcEngine, DirectProduct) {
  auto z = cyclic("t");
  auto h = heisenberg();
  auto p = complete_presentation(direct_product_presentation(*h, *z, "", ""));
  EXPECT_EQ(p->size(), 4);
  EXPECT_TRUE(consistency_check(*p).empty());
  EXPECT_TRUE(p->commutator(g(0), g(3)).is_identity());
}

// ---------------------------------------------------------------- subgroups

TEST(Subgroups, ClosureExamples) {
  auto k = klein();
  EXPECT_EQ(subgroup_closure(k, {g(1, 2)}, true).format(), "<a^2>");
  EXPECT_TRUE(subgroup_closure(k, {}, false).is_trivial());
  auto h = heisenberg();
  EXPECT_EQ(sub(h, {g(0), g(1)}).format(), "<a, b, c>");
}

TEST(Subgroups, Membership) {
  auto k = klein();
  Subgroup a2 = sub(k, {g(1, 2)});
  EXPECT_TRUE(a2.contains(g(1, 4)));
  EXPECT_FALSE(a2.contains(g(1)));
  auto h = heisenberg();
  EXPECT_TRUE(sub(h, {g(2)}).contains(h->commutator(g(0), g(1))));
}

TEST(Subgroups, Commutators) {
  auto h = heisenberg();
  Subgroup whole = Subgroup::whole(h);
  EXPECT_EQ(commutator_subgroup(whole, whole).format(), "<c>");
  EXPECT_TRUE(commutator_subgroup(whole, Subgroup::trivial(h)).is_trivial());
  auto k = klein();
  Subgroup kw = Subgroup::whole(k);
  EXPECT_EQ(commutator_subgroup(kw, kw).format(), "<a^2>");
}

TEST(Subgroups, PowerSubgroup) {
  auto k = klein();
  EXPECT_EQ(power_subgroup(sub(k, {g(1)}), 2).format(), "<a^2>");
  auto h = heisenberg();
  EXPECT_EQ(power_subgroup(Subgroup::whole(h), 2).format(), "<a^2, b^2, c>");
  EXPECT_EQ(power_subgroup(Subgroup::whole(h), 3).format(), "<a^3, b^3, c^3>");
  EXPECT_TRUE(power_subgroup(Subgroup::trivial(h), 5).is_trivial());
  // (ab)^2 = a^2 b^2 c^{-1} is not a product of generator squares
  EXPECT_TRUE(power_subgroup(Subgroup::whole(h), 2).contains(h->power(h->multiply(g(0), g(1)), 2)));
}

TEST(Subgroups, PowerJoinMatchesPowerSubgroup) {
  auto h = heisenberg();
  Subgroup whole = Subgroup::whole(h);
  Subgroup d = commutator_subgroup(whole, whole);
  for (int p : {2, 3, 5})
    EXPECT_EQ(power_join(whole, d, p), join(power_subgroup(whole, p), d)) << p;
  EXPECT_THROW(power_join(whole, Subgroup::trivial(h), 2), NotAbelianQuotient);
}

TEST(Subgroups, LayerQuotients) {
  auto k = klein();
  auto lq = layer_quotient(sub(k, {g(1, 2)}), sub(k, {g(1, 4)}));
  EXPECT_EQ(ll(lq.divisors()), (std::vector<long long>{2}));
  EXPECT_EQ(k->format(lq.lifts()[0]), "a^2");
  Subgroup a = sub(k, {g(1)});
  EXPECT_TRUE(layer_quotient(a, a).divisors().empty());
  auto h = heisenberg();
  Subgroup whole = Subgroup::whole(h);
  EXPECT_EQ(divisors(whole, commutator_subgroup(whole, whole)), (std::vector<long long>{0, 0}));
  EXPECT_THROW(layer_quotient(whole, Subgroup::trivial(h)), NotAbelianQuotient);
  EXPECT_THROW(layer_quotient(Subgroup::whole(k), sub(k, {g(0)})), NotNormal);
}

TEST(Subgroups, IndexAndNormality) {
  auto k = klein();
  Subgroup whole = Subgroup::whole(k);
  EXPECT_FALSE(subgroup_index(whole, sub(k, {g(1)})));
  EXPECT_EQ(*subgroup_index(sub(k, {g(1)}), sub(k, {g(1, 8)})), 8);
  EXPECT_TRUE(is_normal_in(sub(k, {g(1, 2)}), whole));
  EXPECT_FALSE(is_normal_in(sub(k, {g(0)}), whole));
}

// ---------------------------------------------------------------- homomorphisms

TEST(Homomorphisms, InvertEndomorphism) {
  auto h = heisenberg();
  std::vector<PcElement> f{h->multiply(g(0), g(1)), g(1), g(2)};
  EXPECT_TRUE(homomorphism_violations(*h, *h, f).empty());
  auto inv = invert_endomorphism(h, f);
  ASSERT_TRUE(inv);
  auto id = compose_maps(*h, f, *inv);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(id[static_cast<std::size_t>(i)], g(i));
  std::vector<PcElement> sq{g(0, 2), g(1), g(2, 2)};
  EXPECT_TRUE(homomorphism_violations(*h, *h, sq).empty());
  EXPECT_FALSE(invert_endomorphism(h, sq));
}

// ---------------------------------------------------------------- series

TEST(Series, LowerCentral) {
  auto k = klein();
  auto s = lower_central_series(k, 4);
  EXPECT_EQ(s.term(2).format(), "<a^2>");
  EXPECT_EQ(s.term(3).format(), "<a^4>");
  EXPECT_EQ(s.term(4).format(), "<a^8>");
  auto z2 = lower_central_series(free_abelian(2), 3);
  EXPECT_TRUE(z2.term(2).is_trivial());
  EXPECT_TRUE(z2.term(3).is_trivial());
  auto h = lower_central_series(heisenberg(), 3);
  EXPECT_EQ(h.term(2).format(), "<c>");
  EXPECT_TRUE(h.term(3).is_trivial());
}

TEST(Series, Isolators) {
  auto k = klein();
  Subgroup whole = Subgroup::whole(k);
  auto r = torsion_free_radical(whole, sub(k, {g(1, 2)}));
  EXPECT_EQ(r.radical.format(), "<a>");
  EXPECT_TRUE(r.exact);
  ASSERT_EQ(r.certificates.size(), 1u);
  EXPECT_EQ(*r.certificates[0].exponent, 2);
  EXPECT_EQ(torsion_free_radical(whole, whole).radical, whole);
  auto z = cyclic("x");
  EXPECT_EQ(torsion_free_radical(Subgroup::whole(z), sub(z, {g(0, 2)})).radical, Subgroup::whole(z));
}

TEST(Series, Rational) {
  auto k = rational_lcs(klein(), 3);
  EXPECT_EQ(k.term(2).format(), "<a>");
  EXPECT_EQ(k.term(3).format(), "<a>");
  EXPECT_TRUE(k.verification_failures.empty());
  auto z2 = rational_lcs(free_abelian(2), 3);
  EXPECT_TRUE(z2.term(2).is_trivial());
  auto h = rational_lcs(heisenberg(), 3);
  EXPECT_EQ(h.term(2).format(), "<c>");
  EXPECT_TRUE(h.term(3).is_trivial());
}

TEST(Series, ModP) {
  auto z = cyclic("x");
  for (int p : {2, 3, 5}) {
    auto s = mod_p_lcs(z, 4, p);
    Integer q = 1;
    for (int n = 1; n <= 4; ++n, q *= p) EXPECT_EQ(s.term(n), sub(z, {g(0, q)})) << p << " " << n;
  }
  auto k = mod_p_lcs(klein(), 3, 2);
  EXPECT_EQ(k.term(2).format(), "<t^2, a^2>");
  EXPECT_EQ(k.term(3).format(), "<t^4, a^4>");
  auto zp = cyclic("x", 5);
  EXPECT_TRUE(mod_p_lcs(zp, 2, 5).term(2).is_trivial());
}

TEST(Series, Zassenhaus) {
  auto z = cyclic("x");
  auto s = zassenhaus_series(z, 5, 2);
  std::vector<long long> expected{1, 2, 4, 4, 8, 8};
  for (int n = 1; n <= 6; ++n) EXPECT_EQ(s.term(n), sub(z, {g(0, expected[static_cast<std::size_t>(n - 1)])})) << n;
  auto h = zassenhaus_series(heisenberg(), 3, 3);
  EXPECT_EQ(h.term(1), Subgroup::whole(h.term(1).group()));
  EXPECT_EQ(h.term(2).format(), "<a^3, b^3, c>");
}

TEST(Series, Axioms) {
  EXPECT_TRUE(verify_series_axioms(lower_central_series(heisenberg(), 4), AxiomMode::N).holds());
  EXPECT_TRUE(verify_series_axioms(rational_lcs(klein(), 4), AxiomMode::N0).holds());
  EXPECT_FALSE(verify_series_axioms(lower_central_series(klein(), 4), AxiomMode::N0).holds());
  auto z = cyclic("x");
  EXPECT_TRUE(verify_series_axioms(zassenhaus_series(z, 5, 2), AxiomMode::Np, 2).holds());
  // gamma^2(Z) is p-torsion but 4Z is not inside K_4 = 8Z
  EXPECT_TRUE(verify_series_axioms(mod_p_lcs(z, 5, 2), AxiomMode::p_torsion, 2).holds());
  EXPECT_FALSE(verify_series_axioms(mod_p_lcs(z, 5, 2), AxiomMode::Np, 2).holds());
  auto k = klein();
  auto bad = custom_series({Subgroup::whole(k), sub(k, {g(1, 4)}), Subgroup::trivial(k)});
  EXPECT_FALSE(verify_series_axioms(bad, AxiomMode::N).holds());
}

// ---------------------------------------------------------------- free nilpotent

TEST(FreeNil, HallBasisSizes) {
  auto sizes = [](int k, int c) {
    std::vector<std::size_t> out;
    for (const auto& d : hall_basis(k, c)) out.push_back(d.size());
    return out;
  };
  EXPECT_EQ(sizes(2, 3), (std::vector<std::size_t>{2, 1, 2}));
  EXPECT_EQ(sizes(1, 3), (std::vector<std::size_t>{1, 0, 0}));
  EXPECT_EQ(sizes(3, 2), (std::vector<std::size_t>{3, 3}));
}

TEST(FreeNil, WittRanks) {
  EXPECT_EQ(witt_rank(2, 2), 1);
  EXPECT_EQ(witt_rank(2, 3), 2);
  EXPECT_EQ(witt_rank(2, 5), 6);
  EXPECT_EQ(witt_rank(3, 4), 18);
}

TEST(FreeNil, LieBracket) {
  HallBasis b(2, 3);
  const int x1 = 0, x2 = 1;
  auto t12 = *b.find(x1, x2);
  FreeLieElement e1{{x1, 1}}, e2{{x2, 1}};
  EXPECT_EQ(lie_bracket(b, e1, e2), (FreeLieElement{{t12, 1}}));
  EXPECT_EQ(lie_bracket(b, e2, e1), (FreeLieElement{{t12, -1}}));
  auto lhs = lie_bracket(b, lie_bracket(b, e1, e2), e1);
  auto rhs = lie_bracket(b, e1, lie_bracket(b, e2, e1));
  FreeLieElement sum = lhs;
  detail::add_scaled(sum, rhs, -1);
  EXPECT_TRUE(sum.empty());
  EXPECT_EQ(lie_polynomial(b, lhs, 3), lie_polynomial(b, rhs, 3));
  auto flipped = lie_bracket(b, e1, lie_bracket(b, e1, e2));
  detail::add_scaled(flipped, lhs, 1);
  EXPECT_TRUE(flipped.empty());
}

TEST(FreeNil, Magnus) {
  EXPECT_TRUE(magnus_expand({}, 2, 3).is_one());
  auto m = magnus_expand({{0, 1}, {1, 1}, {0, -1}, {1, -1}}, 2, 2);
  EXPECT_EQ(ll(m.degree(1)), (std::vector<long long>{0, 0}));
  // basis order X1X1, X1X2, X2X1, X2X2
  EXPECT_EQ(ll(m.degree(2)), (std::vector<long long>{0, 1, -1, 0}));
  EXPECT_TRUE(magnus_expand({{0, 1}, {0, -1}}, 2, 3).is_one());
  EXPECT_EQ(magnus_depth({{0, 1}, {1, 1}, {0, -1}, {1, -1}}, 2, 4), 2);
  EXPECT_EQ(magnus_depth({{0, 1}}, 2, 4), 1);
  FreeWord c12{{0, 1}, {1, 1}, {0, -1}, {1, -1}};
  FreeWord c121 = word_commutator(c12, {{0, 1}});
  EXPECT_EQ(magnus_depth(c121, 2, 4), 3);
}

TEST(FreeNil, Presentations) {
  FreeNilpotent f22(2, 2);
  auto grp = f22.group();
  EXPECT_EQ(grp->size(), 3);
  EXPECT_TRUE(grp->commutator(g(0), g(1)) == g(2) || grp->commutator(g(0), g(1)) == g(2, -1));
  EXPECT_EQ(FreeNilpotent(1, 4).group()->size(), 1);
  FreeNilpotent f23(2, 3);
  EXPECT_EQ(f23.group()->presentation().weights, (std::vector<int>{1, 1, 2, 3, 3}));
  EXPECT_TRUE(consistency_check(*f23.group()).empty());
  EXPECT_TRUE(weight_violations(f23.group()).empty());
}

// ---------------------------------------------------------------- extensions

TEST(Extensions, KleinAsExtension) {
  auto e = SplitExtension::build(cyclic("a"), cyclic("t"), {{g(0, -1)}}, "klein");
  const auto& b = e.total();
  EXPECT_EQ(b->format(b->conjugate_left(e.alpha(g(0)), e.sigma(g(0)))), "a^-1");
  auto l = gp_series(e, 4, ModeSpec::parse("int"));
  for (int n = 1; n <= 4; ++n) EXPECT_EQ(e.to_fiber(l.term(n)), sub(e.fiber(), {g(0, Integer(1) << (n - 1))})) << n;
  auto r = gp_series(e, 4, ModeSpec::parse("rat"));
  for (int n = 1; n <= 4; ++n) EXPECT_EQ(e.to_fiber(r.term(n)), Subgroup::whole(e.fiber()));
  auto p = gp_series(e, 4, ModeSpec::parse("p=2"));
  for (int n = 1; n <= 4; ++n) EXPECT_EQ(e.to_fiber(p.term(n)), sub(e.fiber(), {g(0, Integer(1) << (n - 1))})) << n;
}

TEST(Extensions, HeisenbergAsExtension) {
  Document d = sample("heisenberg.lcs");
  const auto& e = d.extension("heis");
  auto l = gp_series(e, 3, ModeSpec::parse("int"));
  EXPECT_EQ(e.to_fiber(l.term(2)).format(), "<a>");
  EXPECT_EQ(divisors(l.term(2), l.term(3)), (std::vector<long long>{0}));
  EXPECT_TRUE(l.term(3).is_trivial());
  EXPECT_TRUE(verify_split_series(e, 3, ModeSpec::parse("int")).holds());
}

TEST(Extensions, ActionChecks) {
  auto a = free_abelian(2);
  auto t = cyclic("t");
  EXPECT_THROW(SplitExtension::build(a, t, {{g(0, 2), g(1)}}), NotAutomorphism);
  auto c2 = cyclic("u", 2);
  // u of order 2 acting by a transvection: its square is not the identity
  EXPECT_THROW(SplitExtension::build(a, c2, {{g(0), a->multiply(g(0), g(1))}}), NotAction);
}

TEST(Extensions, TrivialityFlags) {
  Document k = sample("klein.lcs");
  auto f = action_triviality(k.extension("klein"), {2});
  EXPECT_FALSE(f.on_ab);
  EXPECT_FALSE(f.on_abf);
  EXPECT_TRUE(f.on_mod_p.at(2));
  Document ex = sample("rational.lcs");
  auto fe = action_triviality(ex.extension("ex"));
  EXPECT_FALSE(fe.on_ab);
  EXPECT_TRUE(fe.on_abf);
  Document pr = sample("products.lcs");
  auto fp = action_triviality(pr.extension("zcube"), {2, 3});
  EXPECT_TRUE(fp.on_ab && fp.on_abf && fp.on_mod_p.at(2) && fp.on_mod_p.at(3));
}

TEST(Extensions, SplitSeriesKlein) {
  Document k = sample("klein.lcs");
  const auto& e = k.extension("klein");
  for (const char* m : {"int", "rat", "p=2"}) EXPECT_TRUE(verify_split_series(e, 4, ModeSpec::parse(m)).holds()) << m;
  auto g2 = mod_p_lcs(e.total(), 3, 2);
  EXPECT_EQ(g2.term(2), join(e.alpha(sub(e.fiber(), {g(0, 2)})), e.sigma(sub(e.base(), {g(0, 2)}))));
  EXPECT_EQ(lower_central_series(e.total(), 4).term(3).format(), "<a^4>");
}

TEST(Extensions, Collapse) {
  Document k = sample("klein.lcs");
  const auto& e = k.extension("klein");
  auto mod2 = verify_collapse(e, 4, ModeSpec::parse("p=2"));
  EXPECT_TRUE(mod2.holds());
  auto integral = verify_collapse(e, 4, ModeSpec::parse("int"));
  EXPECT_FALSE(integral.holds());
  ASSERT_EQ(integral.degrees.size(), 4u);
  EXPECT_EQ(integral.degrees[1].terms[0].second, "<a^2>");
  EXPECT_EQ(integral.degrees[1].terms[1].second, "<>");
  Document ex = sample("rational.lcs");
  EXPECT_TRUE(verify_collapse(ex.extension("ex"), 4, ModeSpec::parse("rat")).holds());
}

TEST(Extensions, DepthTerms) {
  Document k = sample("klein.lcs");
  auto om = omega_report(k.extension("klein"), 5);
  EXPECT_EQ(om[0].term, "<a^16>");
  EXPECT_FALSE(om[0].trivial);
}

// ---------------------------------------------------------------- graded Lie algebras

TEST(Graded, FreeNilpotent) {
  FreeNilpotent f(2, 4);
  auto gla = associated_graded(lower_central_series(f.group(), 4));
  ASSERT_EQ(gla.top_degree(), 3);
  EXPECT_EQ(gla.dimension(1), 2u);
  EXPECT_EQ(gla.dimension(2), 1u);
  EXPECT_EQ(gla.dimension(3), 2u);
  auto b = gla.bracket(1, 0, 1, 1);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(abs(b[0]), 1);
}

TEST(Graded, KleinLayers) {
  auto k = klein();
  auto g2 = associated_graded(mod_p_lcs(k, 5, 2));
  for (int n = 1; n <= 4; ++n) EXPECT_EQ(ll(g2.layer(n).divisors()), (std::vector<long long>{2, 2})) << n;
  // [t, a] = a^{-2} is the nonzero class of a^2
  EXPECT_EQ(ll(g2.bracket(1, 0, 1, 1)), (std::vector<long long>{0, 1}));
  auto rat = associated_graded(rational_lcs(k, 4));
  EXPECT_EQ(ll(rat.layer(1).divisors()), (std::vector<long long>{0}));
  EXPECT_TRUE(rat.layer(2).divisors().empty());
  EXPECT_TRUE(rat.layer(3).divisors().empty());
}

TEST(Graded, PowerMaps) {
  auto z = cyclic("x");
  auto g = associated_graded(mod_p_lcs(z, 5, 3));
  auto pm = p_power_map(g, 3);
  for (const auto& [n, m] : pm) EXPECT_EQ(m, IntMatrix{{1}}) << n;
  auto e = cyclic("x", 3);
  PcPresentation p;
  p.add_generator("x", 3);
  p.add_generator("y", 3);
  auto elem = complete_presentation(p);
  auto ge = associated_graded(mod_p_lcs(elem, 3, 3));
  for (const auto& [n, m] : p_power_map(ge, 3)) EXPECT_TRUE(m.is_zero()) << n;
  auto gi = associated_graded(lower_central_series(klein(), 4));
  EXPECT_THROW(p_power_map(gi, 2), NotPTorsionSeries);
}

TEST(Graded, NotAnNSeries) {
  auto k = klein();
  auto bad = custom_series({Subgroup::whole(k), sub(k, {g(1, 4)}), Subgroup::trivial(k)});
  bad.class_bound = 2;
  EXPECT_THROW(associated_graded(bad), NotNSeries);
}

TEST(Graded, Morphisms) {
  Document doc = sample("klein.lcs");
  const auto& e = doc.extension("klein");
  const auto& b = e.total();
  auto ga = associated_graded(gp_series(e, 5, ModeSpec::parse("int")));
  auto gb = associated_graded(lower_central_series(b, 5));
  GroupHom id{b, b, b->generators()};
  auto m = induced_graded_morphism(id, ga, gb);
  for (std::size_t n = 0; n < m.kernel.size(); ++n) EXPECT_TRUE(m.kernel[n].is_trivial()) << n;
  auto self = induced_graded_morphism(id, gb, gb);
  for (std::size_t n = 0; n < self.maps.size(); ++n) {
    EXPECT_EQ(self.maps[n], IntMatrix::identity(self.maps[n].rows()));
    EXPECT_TRUE(self.kernel[n].is_trivial());
    EXPECT_TRUE(self.cokernel[n].is_trivial());
  }
  // beta: B -> C in degree 1 is onto with kernel the class of a
  auto gc = associated_graded(lower_central_series(e.base(), 5));
  GroupHom beta{b, e.base(), {g(0), PcElement()}};
  auto mb = induced_graded_morphism(beta, gb, gc);
  EXPECT_TRUE(mb.cokernel[0].is_trivial());
  EXPECT_EQ(ll(mb.kernel[0].divisors), (std::vector<long long>{2}));
  // gamma(B) is not filtered by the L-series in the other direction
  EXPECT_THROW(induced_graded_morphism(id, associated_graded(mod_p_lcs(b, 5, 2)), gb), NotFiltered);
}

TEST(Graded, ComparisonToRational) {
  auto k = comparison_to_rational(klein(), 4);
  EXPECT_EQ(ll(k.morphism.kernel[0].divisors), (std::vector<long long>{2}));
  EXPECT_TRUE(k.morphism.cokernel[0].is_trivial());
  EXPECT_TRUE(k.finite());
  auto h = comparison_to_rational(heisenberg(), 4);
  for (std::size_t n = 0; n < h.morphism.kernel.size(); ++n) {
    EXPECT_TRUE(h.morphism.kernel[n].is_trivial());
    EXPECT_TRUE(h.morphism.cokernel[n].is_trivial());
  }
  auto z4 = comparison_to_rational(cyclic("x", 4), 3);
  EXPECT_EQ(ll(z4.morphism.kernel[0].divisors), (std::vector<long long>{4}));
  EXPECT_EQ(z4.rational.dimension(1), 0u);
}

TEST(Graded, SplitSequence) {
  Document k = sample("klein.lcs");
  const auto& e = k.extension("klein");
  auto r = verify_graded_split(e, 5, ModeSpec::parse("int"));
  EXPECT_TRUE(r.holds());
  for (const auto& d : r.degrees) EXPECT_EQ(d.divisors[0].second, (std::vector<std::string>{"2"})) << d.degree;
  EXPECT_TRUE(verify_graded_split(e, 5, ModeSpec::parse("p=2")).holds());
  Document pr = sample("products.lcs");
  EXPECT_TRUE(verify_graded_split(pr.extension("zcube"), 4, ModeSpec::parse("int")).holds());
}

// ---------------------------------------------------------------- documents and commands

TEST(Documents, KleinDocument) {
  Document d = sample("klein.lcs");
  const auto& b = d.group("klein_total");
  EXPECT_EQ(b->size(), 2);
  EXPECT_EQ(b->format(b->commutator(g(0), g(1))), "a^-2");
}

TEST(Documents, EmptyAndErrors) {
  auto empty = parse_document("");
  ASSERT_TRUE(empty.ok());
  EXPECT_TRUE(empty.document->empty());
  auto unknown = parse_document("pcgroup H {\n  gen a;\n  gen b;\n  conj b a = b c;\n}\n");
  ASSERT_FALSE(unknown.ok());
  EXPECT_EQ(unknown.diagnostics[0].kind, "UnknownName");
  EXPECT_EQ(unknown.diagnostics[0].line, 4);
  EXPECT_THROW(load_document("pcgroup H {\n  gen a;\n  gen b;\n  conj b a = b c;\n}\n"), UnknownName);
  auto syntax = parse_document("pcgroup H { gen a\n}");
  ASSERT_FALSE(syntax.ok());
  EXPECT_EQ(syntax.diagnostics[0].kind, "SyntaxError");
  EXPECT_EQ(syntax.diagnostics[0].line, 2);
  EXPECT_EQ(syntax.diagnostics[0].column, 1);
  EXPECT_THROW(load_document("free F rank=2 class=2;\nfree F rank=3 class=2;"), DuplicateName);
  EXPECT_THROW(load_document("pcgroup X { gen a; gen b; gen c; conj b a = b c^2; }\n"
                             "extension E { fiber X; base Y; }"),
               UnknownName);
}

TEST(Documents, InconsistentPresentation) {
  // y^2 = 1 while x inverts... x^{-1} y x = y x is not a tail word
  auto r = parse_document("pcgroup P {\n gen x;\n gen y;\n order x 2;\n pow x = y;\n conj y x = y^-1;\n}\n");
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.diagnostics[0].kind, "Inconsistent");
}

TEST(Documents, RoundTrip) {
  for (const char* f : {"klein.lcs", "heisenberg.lcs", "rational.lcs", "poison.lcs", "products.lcs", "ia.lcs"}) {
    Document d = sample(f);
    auto again = parse_document(pretty_print(d));
    ASSERT_TRUE(again.ok()) << f;
    EXPECT_TRUE(*again.document == d) << f;
    EXPECT_EQ(pretty_print(*again.document), pretty_print(d)) << f;
  }
}

TEST(Commands, VerifyKlein) {
  Document d = sample("klein.lcs");
  Command c;
  c.name = "verify";
  c.ext = "klein";
  c.theorem = "split";
  c.class_bound = 4;
  Report r = run(d, c);
  EXPECT_TRUE(r.holds);
  EXPECT_EQ(r.body["degrees"][2]["terms"]["fiber"], "<a^4>");
  EXPECT_TRUE(r.body.contains("exactness_note"));
}

TEST(Commands, GradedKleinModTwo) {
  Document d = sample("klein.lcs");
  Command c;
  c.name = "graded";
  c.group = "klein_total";
  c.kind = "p=2";
  c.class_bound = 4;
  Report r = run(d, c);
  ASSERT_EQ(r.body["degrees"].size(), 3u);
  for (const auto& deg : r.body["degrees"]) EXPECT_EQ(deg["divisors"], Json::parse("[2,2]"));
}

TEST(Commands, OracleAndDeterminism) {
  Command c;
  c.name = "oracle";
  c.free_rank = 2;
  c.free_class = 5;
  c.samples = 100;
  c.seed = 11;
  Report r = run_oracle(c);
  EXPECT_EQ(r.body["agreements"], 100);
  EXPECT_EQ(r.body.dump(), run_oracle(c).body.dump());
  Document d = sample("klein.lcs");
  Command gcmd;
  gcmd.name = "graded";
  gcmd.group = "klein_total";
  gcmd.class_bound = 4;
  gcmd.seed = 5;
  EXPECT_EQ(run(d, gcmd).body.dump(), run(d, gcmd).body.dump());
}
