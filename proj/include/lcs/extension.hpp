#pragma once

#include "lcs/builder.hpp"
#include "lcs/errors.hpp"
#include "lcs/homomorphism.hpp"
#include "lcs/report.hpp"
#include "lcs/series.hpp"
#include "lcs/subgroup.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace lcs {

/// Monodromy: for every base generator, the images of the fiber generators
/// (and the inverse automorphism).
struct GroupAction {
  std::vector<std::vector<PcElement>> images;
  std::vector<std::vector<PcElement>> inverse_images;
};

/// Same subgroup viewed in another group whose generators are those of the
/// source shifted by `shift` (tails and sections of a pc presentation).
inline Subgroup transport(const Subgroup& h, const GroupPtr& target, int shift) {
  std::vector<PcElement> out;
  for (const auto& x : h.igs()) out.push_back(x.shifted(shift));
  return Subgroup(target, std::move(out));
}

/// Action of each base generator given partially: `given[c]` maps fiber
/// generator indices to images. Unlisted fiber generators with a commutator
/// definition get the commutator of their parts' images, other ones are fixed;
/// base generators with a definition [c_l, c_r] and no listed images act by the
/// commutator of automorphisms.
inline std::vector<std::vector<PcElement>> complete_action_images(
    const GroupPtr& fiber, const GroupPtr& base, const std::map<int, std::map<int, PcElement>>& given) {
  const int na = fiber->size();
  const int nc = base->size();
  std::vector<std::vector<PcElement>> out(static_cast<std::size_t>(nc));
  std::vector<std::vector<PcElement>> inv(static_cast<std::size_t>(nc));
  for (int c = 0; c < nc; ++c) {
    auto it = given.find(c);
    const auto& def = base->presentation().definitions[static_cast<std::size_t>(c)];
    std::vector<PcElement> img(static_cast<std::size_t>(na));
    if (it == given.end() && def) {
      const auto& f = out[static_cast<std::size_t>(def->first)];
      const auto& fi = inv[static_cast<std::size_t>(def->first)];
      const auto& g = out[static_cast<std::size_t>(def->second)];
      const auto& gi = inv[static_cast<std::size_t>(def->second)];
      img = compose_maps(*fiber, compose_maps(*fiber, compose_maps(*fiber, f, g), fi), gi);
    } else {
      for (int a = 0; a < na; ++a) {
        const auto& adef = fiber->presentation().definitions[static_cast<std::size_t>(a)];
        if (it != given.end() && it->second.count(a))
          img[static_cast<std::size_t>(a)] = it->second.at(a);
        else if (adef)
          img[static_cast<std::size_t>(a)] = fiber->commutator(img[static_cast<std::size_t>(adef->first)],
                                                                img[static_cast<std::size_t>(adef->second)]);
        else
          img[static_cast<std::size_t>(a)] = fiber->gen(a);
      }
    }
    std::string why;
    auto iv = invert_endomorphism(fiber, img, &why);
    if (!iv) throw NotAutomorphism("action of " + base->name(c) + ": " + why);
    out[static_cast<std::size_t>(c)] = std::move(img);
    inv[static_cast<std::size_t>(c)] = std::move(*iv);
  }
  return out;
}

/// B = A x|_phi C with pc generators of C first, then those of A (the normal
/// subgroup A must be a tail of the pc sequence). phi(c)(a) = c a c^-1 in B.
class SplitExtension {
 public:
  static SplitExtension build(GroupPtr fiber, GroupPtr base, std::vector<std::vector<PcElement>> images,
                              std::string name = "B") {
    SplitExtension e;
    e.fiber_ = std::move(fiber);
    e.base_ = std::move(base);
    e.name_ = std::move(name);
    const PcGroup& A = *e.fiber_;
    const PcGroup& C = *e.base_;
    if (images.size() != static_cast<std::size_t>(C.size()))
      throw NotAction("expected an automorphism for each of the " + std::to_string(C.size()) + " base generators");
    for (int c = 0; c < C.size(); ++c) {
      auto& img = images[static_cast<std::size_t>(c)];
      if (img.size() != static_cast<std::size_t>(A.size()))
        throw NotAutomorphism("action of " + C.name(c) + " needs " + std::to_string(A.size()) + " images");
      for (const auto& x : img)
        if (!A.is_normal(x)) throw NotAutomorphism("image under " + C.name(c) + " is not a fiber element");
      if (auto bad = homomorphism_violations(A, A, img); !bad.empty())
        throw NotAutomorphism("action of " + C.name(c) + " violates the " + bad.front());
      std::string why;
      auto inv = invert_endomorphism(e.fiber_, img, &why);
      if (!inv) throw NotAutomorphism("action of " + C.name(c) + " is not bijective: " + why);
      e.action_.images.push_back(img);
      e.action_.inverse_images.push_back(std::move(*inv));
    }
    e.check_action();
    e.assemble();
    return e;
  }

  const GroupPtr& fiber() const { return fiber_; }
  const GroupPtr& base() const { return base_; }
  const GroupPtr& total() const { return total_; }
  const GroupAction& action() const { return action_; }
  const std::string& name() const { return name_; }
  int offset() const { return base_->size(); }

  PcElement alpha(const PcElement& a) const { return a.shifted(offset()); }
  PcElement sigma(const PcElement& c) const { return c; }
  PcElement beta(const PcElement& b) const {
    std::vector<Syllable> s;
    for (const auto& x : b.syllables())
      if (x.gen < offset()) s.push_back(x);
    return PcElement(std::move(s));
  }
  /// Fiber element of a total-group element lying in alpha(A).
  PcElement to_fiber(const PcElement& b) const {
    if (!b.is_identity() && b.depth() < offset()) throw Error("element is not in the fiber");
    return b.shifted(-offset());
  }

  Subgroup alpha(const Subgroup& h) const { return transport(h, total_, offset()); }
  Subgroup sigma(const Subgroup& h) const { return transport(h, total_, 0); }
  Subgroup beta(const Subgroup& h) const {
    std::vector<PcElement> gens;
    for (const auto& x : h.igs())
      if (x.depth() < offset()) gens.push_back(beta(x));
    return subgroup_closure(base_, gens, false);
  }
  Subgroup to_fiber(const Subgroup& h) const { return transport(intersect_tail(h, offset()), fiber_, -offset()); }

  Subgroup fiber_subgroup() const { return alpha(Subgroup::whole(fiber_)); }
  Subgroup base_subgroup() const { return sigma(Subgroup::whole(base_)); }

  /// phi(c)(a) for c in C, a in A.
  PcElement act(const PcElement& c, const PcElement& a) const {
    return to_fiber(total_->conjugate_left(alpha(a), sigma(c)));
  }

 private:
  std::vector<PcElement> map_of_word(const PcElement& w) const {
    std::vector<PcElement> acc = identity_map(*fiber_);
    for (const auto& s : w.syllables()) {
      const auto& f = action_.images[static_cast<std::size_t>(s.gen)];
      const auto& fi = action_.inverse_images[static_cast<std::size_t>(s.gen)];
      acc = compose_maps(*fiber_, acc, map_power(*fiber_, f, fi, s.exp));
    }
    return acc;
  }

  void check_action() const {
    const PcGroup& A = *fiber_;
    const PcGroup& C = *base_;
    auto phi = [&](int c) { return action_.images[static_cast<std::size_t>(c)]; };
    auto phi_inv = [&](int c) { return action_.inverse_images[static_cast<std::size_t>(c)]; };
    for (int i = 0; i < C.size(); ++i) {
      if (C.is_finite_gen(i) && !(map_power(A, phi(i), phi_inv(i), C.rel_order(i)) == map_of_word(C.power_relation(i))))
        throw NotAction("power relation of " + C.name(i) + " acts nontrivially");
      for (int j = i + 1; j < C.size(); ++j) {
        auto lhs = compose_maps(A, compose_maps(A, phi_inv(i), phi(j)), phi(i));
        if (!(lhs == map_of_word(C.conj_relation(j, i))))
          throw NotAction("relation " + C.name(j) + "^" + C.name(i) + " is not respected");
        if (!C.is_finite_gen(i)) {
          auto lhs2 = compose_maps(A, compose_maps(A, phi(i), phi(j)), phi_inv(i));
          if (!(lhs2 == map_of_word(C.conj_inv_relation(j, i))))
            throw NotAction("relation " + C.name(j) + "^(" + C.name(i) + "^-1) is not respected");
        }
      }
    }
  }

  void assemble() {
    const PcGroup& A = *fiber_;
    const PcGroup& C = *base_;
    std::set<std::string> seen;
    for (int i = 0; i < C.size(); ++i) seen.insert(C.name(i));
    for (int i = 0; i < A.size(); ++i)
      if (seen.count(A.name(i)))
        throw InvalidPresentation("fiber and base share the generator name " + A.name(i));
    PcPresentation p = direct_product_presentation(C, A, "", "");
    const int m = C.size();
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < A.size(); ++j) {
        PcElement down = action_.inverse_images[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].shifted(m);
        PcElement up = action_.images[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].shifted(m);
        if (!(down == PcElement::generator(j + m))) p.conj[{j + m, i}] = down;
        if (!C.is_finite_gen(i) && !(up == PcElement::generator(j + m))) p.conj_inv[{j + m, i}] = up;
      }
    for (auto& d : p.definitions) d.reset();
    total_ = PcGroup::create(std::move(p));
    auto bad = consistency_check(*total_);
    if (!bad.empty())
      throw Inconsistent("assembled group fails overlap " + bad.front().description);
  }

  GroupPtr fiber_, base_, total_;
  GroupAction action_;
  std::string name_;
};

enum class SeriesMode { integral, rational, mod_p };

struct ModeSpec {
  SeriesMode mode = SeriesMode::integral;
  Integer p = 0;
  std::string str() const {
    switch (mode) {
      case SeriesMode::integral: return "int";
      case SeriesMode::rational: return "rat";
      case SeriesMode::mod_p: return "p=" + to_string(p);
    }
    return "int";
  }
  static ModeSpec parse(const std::string& s) {
    if (s == "int" || s == "integral") return {SeriesMode::integral, 0};
    if (s == "rat" || s == "rational") return {SeriesMode::rational, 0};
    if (s.rfind("p=", 0) == 0) {
      Integer p(s.substr(2));
      if (!is_prime(p)) throw Error("mode " + s + " needs a prime");
      return {SeriesMode::mod_p, p};
    }
    throw Error("unknown mode '" + s + "' (expected int, rat or p=P)");
  }
};

/// Intrinsic series of a group in the given mode (gamma, gamma^rat, gamma^p).
inline SubgroupSeries intrinsic_series(const GroupPtr& g, int c, const ModeSpec& m) {
  switch (m.mode) {
    case SeriesMode::integral: return lower_central_series(g, c);
    case SeriesMode::rational: return rational_lcs(g, c);
    case SeriesMode::mod_p: return mod_p_lcs(g, c, m.p);
  }
  return lower_central_series(g, c);
}

/// Guaschi-Pereiro series on the fiber, with terms inside the total group:
///   L_1 = A, L_{n+1} = <[A, L_n], [A, gamma_n(C)], [L_n, C]>;
///   rational: isolators in A of the integral terms;
///   mod p: L^p_{n+1} = <(L^p_n)^p, [A, L^p_n], [A, gamma^p_n(C)], [L^p_n, C]>.
inline SubgroupSeries gp_series(const SplitExtension& e, int c, const ModeSpec& m) {
  const GroupPtr& b = e.total();
  Subgroup a = e.fiber_subgroup();
  Subgroup cc = e.base_subgroup();
  if (m.mode == SeriesMode::rational) {
    SubgroupSeries integral = gp_series(e, c, {SeriesMode::integral, 0});
    SubgroupSeries s;
    s.kind = SeriesKind::gp_sqrtL;
    s.class_bound = c;
    IsolatorOptions opt;
    opt.class_hint = c;
    for (const auto& t : integral.terms) {
      IsolatorResult r = torsion_free_radical(a, t, opt);
      s.terms.push_back(r.radical);
      s.isolators.push_back(std::move(r));
    }
    detail::finish(s);
    return s;
  }
  const bool modp = m.mode == SeriesMode::mod_p;
  SubgroupSeries base_series = modp ? mod_p_lcs(e.base(), c, m.p) : lower_central_series(e.base(), c);
  SubgroupSeries s;
  s.kind = modp ? SeriesKind::gp_Lp : SeriesKind::gp_L;
  s.class_bound = c;
  s.terms.push_back(a);
  for (int n = 1; n <= c; ++n) {
    const Subgroup& l = s.term(n);
    std::vector<Subgroup> parts{commutator_subgroup(a, l), commutator_subgroup(a, e.sigma(base_series.term(n))),
                                commutator_subgroup(l, cc)};
    Subgroup next = join_all(b, parts);
    // [L, L] <= [A, L], so L / next is abelian and its p-th powers come from the igs.
    s.terms.push_back(modp ? power_join(l, next, m.p) : next);
  }
  detail::finish(s);
  if (modp) s.prime = m.p;
  return s;
}

struct TrivialityFlags {
  bool on_ab = false;
  bool on_abf = false;
  std::map<Integer, bool> on_mod_p;
};

/// Whether [A, C] lies in gamma_2(A), its isolator, and gamma^p_2(A).
inline TrivialityFlags action_triviality(const SplitExtension& e, const std::vector<Integer>& primes = {}) {
  Subgroup a = e.fiber_subgroup();
  Subgroup ac = commutator_subgroup(a, e.base_subgroup());
  Subgroup d = commutator_subgroup(a, a);
  TrivialityFlags f;
  f.on_ab = ac.is_subgroup_of(d);
  f.on_abf = ac.is_subgroup_of(torsion_free_radical(a, d).radical);
  for (const auto& p : primes) f.on_mod_p[p] = ac.is_subgroup_of(power_join(a, d, p));
  return f;
}

inline bool triviality_flag(const TrivialityFlags& f, const ModeSpec& m) {
  switch (m.mode) {
    case SeriesMode::integral: return f.on_ab;
    case SeriesMode::rational: return f.on_abf;
    case SeriesMode::mod_p: return f.on_mod_p.at(m.p);
  }
  return false;
}

namespace detail {

inline std::string missing_witness(const Subgroup& small, const Subgroup& big) {
  for (const auto& x : small.igs())
    if (!big.contains(x)) return small.group()->format(x);
  return "";
}

inline void equality_check(DegreeReport& r, const std::string& name, const Subgroup& lhs, const Subgroup& rhs) {
  if (lhs == rhs) {
    r.check(name, true);
    return;
  }
  std::string w = missing_witness(lhs, rhs);
  if (!w.empty())
    w = w + " lies only on the left";
  else
    w = missing_witness(rhs, lhs) + " lies only on the right";
  r.check(name, false, w);
}

inline std::vector<std::string> certificate_lines(const PcGroup& g, const IsolatorResult& r) {
  std::vector<std::string> out;
  for (const auto& c : r.certificates)
    out.push_back(g.format(c.element) + "^" + (c.exponent ? to_string(*c.exponent) : std::string("?")) +
                  (r.exact ? " (exact)" : " (certified)"));
  return out;
}

}  // namespace detail

/// gamma-variant of B against L-variant x| gamma-variant of C, degree by degree.
inline TheoremReport verify_split_series(const SplitExtension& e, int c, const ModeSpec& m) {
  TheoremReport rep;
  rep.theorem = "split";
  rep.mode = m.str();
  rep.class_bound = c;
  const GroupPtr& b = e.total();
  SubgroupSeries lhs = intrinsic_series(b, c, m);
  SubgroupSeries fib = gp_series(e, c, m);
  SubgroupSeries bas = intrinsic_series(e.base(), c, m);
  rep.exactness_note = truncation_note(c) + "; fiber terms of index <= " + std::to_string(c) +
                       " contain A intersected with gamma_" + std::to_string(c + 1) + "(B)";
  for (const auto& f : lhs.verification_failures) rep.global_checks.push_back({"total series recursion", false, f});
  for (int n = 1; n <= c; ++n) {
    DegreeReport r;
    r.degree = n;
    Subgroup ta = fib.term(n);
    Subgroup tc = e.sigma(bas.term(n));
    Subgroup s = join(ta, tc);
    r.terms = {{"total", lhs.term(n).format()}, {"fiber", e.to_fiber(ta).format()}, {"base", bas.term(n).format()}};
    detail::equality_check(r, "equality", lhs.term(n), s);
    detail::equality_check(r, "fiber_intersection", intersect_tail(s, e.offset()), ta);
    detail::equality_check(r, "base_projection", e.beta(s), bas.term(n));
    Check inv{"invariance", true, ""};
    for (const auto& y : tc.igs()) {
      for (const auto& x : ta.igs()) {
        PcElement z = b->conjugate_left(x, y);
        if (!ta.contains(z)) {
          inv = {"invariance", false, b->format(y) + " moves " + b->format(x) + " to " + b->format(z)};
          break;
        }
      }
      if (!inv.holds) break;
    }
    r.checks.push_back(inv);
    if (m.mode == SeriesMode::rational) {
      const auto& iso = fib.isolators[static_cast<std::size_t>(n - 1)];
      r.certificates = detail::certificate_lines(*b, iso);
      r.check("certificates", iso.exact, iso.exact ? "" : "fiber isolator only certified");
    }
    rep.degrees.push_back(std::move(r));
  }
  return rep;
}

/// L-variant against the intrinsic fiber series, plus the resulting
/// decomposition of the total series; both sides are always computed.
inline TheoremReport verify_collapse(const SplitExtension& e, int c, const ModeSpec& m) {
  TheoremReport rep;
  rep.theorem = "collapse";
  rep.mode = m.str();
  rep.class_bound = c;
  rep.exactness_note = truncation_note(c);
  std::vector<Integer> primes;
  if (m.mode == SeriesMode::mod_p) primes.push_back(m.p);
  TrivialityFlags flags = action_triviality(e, primes);
  const bool hyp = triviality_flag(flags, m);
  rep.global_checks.push_back({"hypothesis", hyp, hyp ? "" : "base acts nontrivially on the relevant abelianization"});
  if (!hyp) rep.notes.push_back("hypothesis not met; both sides reported for inspection");
  SubgroupSeries fib = gp_series(e, c, m);
  SubgroupSeries own = intrinsic_series(e.fiber(), c, m);
  SubgroupSeries lhs = intrinsic_series(e.total(), c, m);
  SubgroupSeries bas = intrinsic_series(e.base(), c, m);
  for (int n = 1; n <= c; ++n) {
    DegreeReport r;
    r.degree = n;
    Subgroup l = e.to_fiber(fib.term(n));
    r.terms = {{"gp", l.format()}, {"fiber", own.term(n).format()}};
    detail::equality_check(r, "collapse", l, own.term(n));
    if (l == own.term(n))
      detail::equality_check(r, "decomposition", lhs.term(n), join(e.alpha(own.term(n)), e.sigma(bas.term(n))));
    rep.degrees.push_back(std::move(r));
  }
  return rep;
}

struct OmegaEntry {
  std::string series;
  std::string term;
  bool trivial = false;
};

/// Depth-c terms of each series (a bounded look at residual properties).
inline std::vector<OmegaEntry> omega_report(const SplitExtension& e, int c, const std::vector<Integer>& primes = {}) {
  std::vector<OmegaEntry> out;
  auto add = [&](const std::string& name, const Subgroup& t, const PcGroup& g) {
    (void)g;
    out.push_back({name, t.format(), t.is_trivial()});
  };
  add("gamma(B)", lower_central_series(e.total(), c).term(c), *e.total());
  add("gamma(A)", lower_central_series(e.fiber(), c).term(c), *e.fiber());
  add("L", e.to_fiber(gp_series(e, c, {SeriesMode::integral, 0}).term(c)), *e.fiber());
  for (const auto& p : primes) {
    add("gamma^" + to_string(p) + "(B)", mod_p_lcs(e.total(), c, p).term(c), *e.total());
    add("L^" + to_string(p), e.to_fiber(gp_series(e, c, {SeriesMode::mod_p, p}).term(c)), *e.fiber());
  }
  return out;
}

}  // namespace lcs
