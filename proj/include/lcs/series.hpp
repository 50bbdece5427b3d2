#pragma once

#include "lcs/errors.hpp"
#include "lcs/subgroup.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lcs {

enum class SeriesKind { gamma, gamma_rat, gamma_p, zassenhaus, gp_L, gp_sqrtL, gp_Lp, custom };

inline std::string kind_name(SeriesKind k) {
  switch (k) {
    case SeriesKind::gamma: return "gamma";
    case SeriesKind::gamma_rat: return "gamma_rat";
    case SeriesKind::gamma_p: return "gamma_p";
    case SeriesKind::zassenhaus: return "zassenhaus";
    case SeriesKind::gp_L: return "gp_L";
    case SeriesKind::gp_sqrtL: return "gp_sqrtL";
    case SeriesKind::gp_Lp: return "gp_Lp";
    case SeriesKind::custom: return "custom";
  }
  return "custom";
}

/// Least k with x^k in N for one igs generator of an isolator; empty when
/// uncertified.
struct PowerCertificate {
  PcElement element;
  std::optional<Integer> exponent;
};

struct IsolatorResult {
  Subgroup radical;
  std::vector<PowerCertificate> certificates;
  /// True when the quotient was nilpotent (or the residual finite) and the
  /// result is exactly the isolator.
  bool exact = false;
};

/// Labeled descending chain K_1 >= K_2 >= ... >= K_{c+1}.
struct SubgroupSeries {
  SeriesKind kind = SeriesKind::custom;
  Integer prime = 0;
  int class_bound = 0;
  std::vector<Subgroup> terms;
  std::string exactness_note;
  /// First n with K_{n+1} = K_n, if reached within the bound.
  std::optional<int> stabilized_at;
  /// Per-term isolator certificates (rational kinds).
  std::vector<IsolatorResult> isolators;
  std::vector<std::string> verification_failures;

  const Subgroup& term(int n) const {
    if (n < 1 || n > static_cast<int>(terms.size())) throw Error("series term " + std::to_string(n) + " out of range");
    return terms[static_cast<std::size_t>(n - 1)];
  }
  int length() const { return static_cast<int>(terms.size()); }
  std::string label() const {
    std::string s = kind_name(kind);
    if (prime != 0) s += "(" + to_string(prime) + ")";
    return s;
  }
};

inline std::string truncation_note(int c) {
  return "terms computed in the presented group up to index " + std::to_string(c + 1) + "; layers 1.." +
         std::to_string(c > 1 ? c - 1 : 0) + " are truncation-exact";
}

namespace detail {

inline void finish(SubgroupSeries& s) {
  for (std::size_t i = 1; i < s.terms.size(); ++i) {
    if (!s.terms[i].is_subgroup_of(s.terms[i - 1]))
      s.verification_failures.push_back("term " + std::to_string(i + 1) + " is not contained in term " +
                                        std::to_string(i));
    if (!s.stabilized_at && s.terms[i] == s.terms[i - 1]) s.stabilized_at = static_cast<int>(i);
  }
  if (s.exactness_note.empty()) s.exactness_note = truncation_note(s.class_bound);
}

/// Builds terms 1..c+1 from `next`, padding by repetition once stable.
template <class Next>
SubgroupSeries iterate(const GroupPtr& g, SeriesKind kind, int c, Subgroup first, Next next) {
  if (c < 1) throw Error("class bound must be at least 1");
  SubgroupSeries s;
  s.kind = kind;
  s.class_bound = c;
  s.terms.push_back(std::move(first));
  while (static_cast<int>(s.terms.size()) < c + 1) {
    const Subgroup& last = s.terms.back();
    if (s.terms.size() >= 2 && last == s.terms[s.terms.size() - 2]) {
      s.terms.push_back(last);
      continue;
    }
    s.terms.push_back(next(last, static_cast<int>(s.terms.size())));
  }
  (void)g;
  finish(s);
  return s;
}

}  // namespace detail

/// gamma_1 = G, gamma_{n+1} = [G, gamma_n].
inline SubgroupSeries lower_central_series(const GroupPtr& g, int c) {
  Subgroup whole = Subgroup::whole(g);
  return detail::iterate(g, SeriesKind::gamma, c, whole,
                         [&](const Subgroup& k, int) { return commutator_subgroup(whole, k); });
}

/// Lower central series of a subgroup H (terms inside the ambient pc group).
inline SubgroupSeries lower_central_series(const Subgroup& h, int c) {
  return detail::iterate(h.group(), SeriesKind::gamma, c, h,
                         [&](const Subgroup& k, int) { return commutator_subgroup(h, k); });
}

struct IsolatorOptions {
  /// Largest exponent tried when certifying generators of a non-nilpotent
  /// quotient; 0 selects 2^c * lcm(layer exponents).
  Integer power_bound = 0;
  int class_hint = 4;
  std::size_t max_relative_class = 256;
};

namespace detail {

inline std::optional<Integer> least_power_in(const GroupPtr& g, const PcElement& x, const Subgroup& n,
                                             const Integer& multiple) {
  if (!n.contains(g->power(x, multiple))) return std::nullopt;
  Integer m = multiple;
  for (const auto& q : prime_factors(multiple))
    while (m % q == 0 && n.contains(g->power(x, m / q))) m /= q;
  return m;
}

/// Exact isolator of N in H when H/N is nilpotent, using the relative lower
/// central series refined into free and finite central layers. Top-down,
/// P >= X with [P : X] = k finite for each free layer X/Y; x -> x^k is the
/// transfer P -> X/Y, and its kernel contains the isolator.
inline Subgroup nilpotent_isolator(const Subgroup& h, const std::vector<Subgroup>& lcs) {
  const GroupPtr& g = h.group();
  Subgroup p = h;
  for (std::size_t i = 0; i + 1 < lcs.size(); ++i) {
    const Subgroup& x = lcs[i];
    LayerQuotient lq = layer_quotient(x, lcs[i + 1]);
    std::vector<PcElement> tors = lcs[i + 1].igs();
    bool any_free = false;
    for (std::size_t k = 0; k < lq.dimension(); ++k) {
      if (lq.divisors()[k] != 0)
        tors.push_back(lq.lifts()[k]);
      else
        any_free = true;
    }
    if (!any_free) continue;
    Subgroup y = subgroup_closure(g, tors, false);
    LayerQuotient free_layer = layer_quotient(x, y);
    auto k = subgroup_index(p, x);
    if (!k) throw Error("internal: isolator descent lost finite index");
    IntMatrix v(0, free_layer.dimension());
    for (const auto& gen : p.igs()) v.append_row(free_layer.coordinates(g->power(gen, *k)));
    std::vector<PcElement> gens = y.igs();
    Subgroup derived = commutator_subgroup(p, p);
    gens.insert(gens.end(), derived.igs().begin(), derived.igs().end());
    IntMatrix ker = integer_kernel(v);
    for (std::size_t r = 0; r < ker.rows(); ++r) {
      PcElement w;
      for (std::size_t c = 0; c < p.size(); ++c)
        if (ker(r, c) != 0) w = g->multiply(w, g->power(p.igs()[c], ker(r, c)));
      gens.push_back(std::move(w));
    }
    p = subgroup_closure(g, gens, false);
  }
  return p;
}

}  // namespace detail

/// Isolator (torsion-free radical) of a normal subgroup N of H, with power
/// certificates for every igs generator of the result.
inline IsolatorResult torsion_free_radical(const Subgroup& h, const Subgroup& n, const IsolatorOptions& opt = {}) {
  require_same_group(h, n);
  if (!n.is_subgroup_of(h) || !is_normal_in(n, h)) throw NotNormal(n.format() + " is not normal in " + h.format());
  const GroupPtr& g = h.group();
  IsolatorResult res;
  auto lcs = relative_lower_central_series(h, n, opt.max_relative_class);
  const Subgroup& bottom = lcs.back();
  if (bottom == n) {
    res.radical = detail::nilpotent_isolator(h, lcs);
    res.exact = true;
  } else {
    // H/N is not nilpotent: isolate the nilpotent residual M exactly, then
    // certify; exact when M/N is finite.
    auto lcs_m = relative_lower_central_series(h, bottom, opt.max_relative_class);
    res.radical = detail::nilpotent_isolator(h, lcs_m);
    res.exact = subgroup_index(bottom, n).has_value();
  }
  auto index = subgroup_index(res.radical, n);
  Integer bound = opt.power_bound;
  if (bound == 0) {
    Integer e = 1;
    for (std::size_t i = 0; i + 1 < lcs.size(); ++i) {
      LayerQuotient lq = layer_quotient(lcs[i], lcs[i + 1]);
      for (const auto& d : lq.divisors())
        if (d != 0) e = lcm(e, d);
    }
    bound = (Integer(1) << std::max(opt.class_hint, 1)) * e;
  }
  for (const auto& x : res.radical.igs()) {
    PowerCertificate cert{x, std::nullopt};
    if (index) {
      cert.exponent = detail::least_power_in(g, x, n, *index);
    } else {
      for (Integer k = 1; k <= bound; ++k)
        if (n.contains(g->power(x, k))) {
          cert.exponent = k;
          break;
        }
    }
    res.certificates.push_back(std::move(cert));
  }
  if (!res.exact)
    for (const auto& c : res.certificates)
      if (!c.exponent)
        throw AmbiguousIsolator("no power of " + g->format(c.element) + " up to " + to_string(bound) + " lies in " +
                                n.format());
  return res;
}

inline IsolatorResult torsion_free_radical(const GroupPtr& g, const Subgroup& n, const IsolatorOptions& opt = {}) {
  return torsion_free_radical(Subgroup::whole(g), n, opt);
}

/// gamma^rat_n = isolator of gamma_n, cross-checked against the recursion
/// gamma^rat_{n+1} = isolator of [G, gamma^rat_n].
inline SubgroupSeries rational_lcs(const GroupPtr& g, int c, const IsolatorOptions& opt_in = {}) {
  IsolatorOptions opt = opt_in;
  opt.class_hint = c;
  SubgroupSeries gamma = lower_central_series(g, c);
  SubgroupSeries s;
  s.kind = SeriesKind::gamma_rat;
  s.class_bound = c;
  Subgroup whole = Subgroup::whole(g);
  for (const auto& t : gamma.terms) {
    IsolatorResult r = torsion_free_radical(whole, t, opt);
    s.terms.push_back(r.radical);
    s.isolators.push_back(std::move(r));
  }
  for (int n = 1; n <= c; ++n) {
    Subgroup rec = torsion_free_radical(whole, commutator_subgroup(whole, s.term(n)), opt).radical;
    if (!(rec == s.term(n + 1)))
      s.verification_failures.push_back("isolator of [G, term " + std::to_string(n) + "] = " + rec.format() +
                                        " differs from isolator of gamma_" + std::to_string(n + 1) + " = " +
                                        s.term(n + 1).format());
  }
  detail::finish(s);
  return s;
}

/// gamma^p_1 = G, gamma^p_{n+1} = (gamma^p_n)^p [G, gamma^p_n].
inline SubgroupSeries mod_p_lcs(const GroupPtr& g, int c, const Integer& p) {
  if (!is_prime(p)) throw Error("mod-p series needs a prime, got " + to_string(p));
  Subgroup whole = Subgroup::whole(g);
  SubgroupSeries s = detail::iterate(g, SeriesKind::gamma_p, c, whole, [&](const Subgroup& k, int) {
    return power_join(k, commutator_subgroup(whole, k), p);
  });
  s.prime = p;
  return s;
}

/// Iterated power subgroup (...((H^p)^p)...)^p, j times.
inline Subgroup iterated_power(Subgroup h, const Integer& p, int j) {
  for (int i = 0; i < j && !h.is_trivial(); ++i) h = power_subgroup(h, p);
  return h;
}

/// Zassenhaus (fastest N_p) series: term n joins iterated p-power subgroups
/// (gamma_m)^{p^j} over m p^j >= n, i.e. m = ceil(n / p^j).
inline SubgroupSeries zassenhaus_series(const GroupPtr& g, int c, const Integer& p) {
  if (!is_prime(p)) throw Error("Zassenhaus series needs a prime, got " + to_string(p));
  SubgroupSeries gamma = lower_central_series(g, c);
  SubgroupSeries s;
  s.kind = SeriesKind::zassenhaus;
  s.prime = p;
  s.class_bound = c;
  for (int n = 1; n <= c + 1; ++n) {
    std::vector<Subgroup> parts;
    Integer pj = 1;
    for (int j = 0;; ++j) {
      Integer m = (n + pj - 1) / pj;
      parts.push_back(iterated_power(gamma.term(static_cast<int>(to_ll(m))), p, j));
      if (m == 1) break;
      pj *= p;
    }
    s.terms.push_back(join_all(g, parts));
  }
  detail::finish(s);
  return s;
}

enum class AxiomMode { N, N0, p_torsion, Np };

inline std::string axiom_mode_name(AxiomMode m) {
  switch (m) {
    case AxiomMode::N: return "N";
    case AxiomMode::N0: return "N0";
    case AxiomMode::p_torsion: return "p_torsion";
    case AxiomMode::Np: return "Np";
  }
  return "N";
}

struct AxiomCheck {
  std::string what;
  int m = 0;
  int n = 0;
  bool holds = true;
  std::string witness;
};

struct AxiomReport {
  AxiomMode mode = AxiomMode::N;
  std::vector<AxiomCheck> checks;
  bool holds() const {
    for (const auto& c : checks)
      if (!c.holds) return false;
    return true;
  }
  std::vector<AxiomCheck> failures() const {
    std::vector<AxiomCheck> out;
    for (const auto& c : checks)
      if (!c.holds) out.push_back(c);
    return out;
  }
};

/// Checks the series axioms on K_1..K_{c+1}:
///   N: every term normal in K_1 and [K_m, K_n] <= K_{m+n} for m + n <= c + 1;
///   N0: N plus torsion-free layers K_n / K_{n+1}, n <= c;
///   p_torsion: N plus K_n^p <= K_{n+1}, n <= c (generator powers suffice since layers are abelian);
///   Np: N plus K_n^p <= K_{pn} for pn <= c + 1.
inline AxiomReport verify_series_axioms(const SubgroupSeries& s, AxiomMode mode, const Integer& p = 0) {
  AxiomReport rep;
  rep.mode = mode;
  if (s.terms.empty()) return rep;
  const GroupPtr& g = s.terms.front().group();
  const Subgroup& top = s.terms.front();
  const int last = s.length();
  for (int n = 2; n <= last; ++n) {
    AxiomCheck chk{"term normal", n, 0, true, ""};
    for (const auto& y : s.term(n).igs()) {
      for (const auto& x : top.igs()) {
        PcElement c = g->conjugate(y, x);
        if (!s.term(n).contains(c)) {
          chk.holds = false;
          chk.witness = g->format(y) + " conjugated by " + g->format(x) + " = " + g->format(c);
          break;
        }
      }
      if (!chk.holds) break;
    }
    if (!chk.holds) rep.checks.push_back(chk);
  }
  for (int m = 1; m < last; ++m)
    for (int n = m; m + n <= last; ++n) {
      AxiomCheck chk{"[K_m, K_n] <= K_{m+n}", m, n, true, ""};
      for (const auto& x : s.term(m).igs()) {
        for (const auto& y : s.term(n).igs()) {
          PcElement c = g->commutator(x, y);
          if (!s.term(m + n).contains(c)) {
            chk.holds = false;
            chk.witness = "[" + g->format(x) + ", " + g->format(y) + "] = " + g->format(c);
            break;
          }
        }
        if (!chk.holds) break;
      }
      rep.checks.push_back(chk);
    }
  if (mode == AxiomMode::N0) {
    for (int n = 1; n < last; ++n) {
      auto lq = layer_quotient(s.term(n), s.term(n + 1));
      AxiomCheck chk{"torsion-free layer", n, 0, true, ""};
      for (std::size_t i = 0; i < lq.dimension(); ++i)
        if (lq.divisors()[i] != 0) {
          chk.holds = false;
          chk.witness = g->format(lq.lifts()[i]) + " has order " + to_string(lq.divisors()[i]) + " in the layer";
          break;
        }
      rep.checks.push_back(chk);
    }
  }
  if (mode == AxiomMode::p_torsion || mode == AxiomMode::Np) {
    if (!is_prime(p)) throw Error("axiom mode " + axiom_mode_name(mode) + " needs a prime");
  }
  if (mode == AxiomMode::p_torsion) {
    for (int n = 1; n < last; ++n) {
      AxiomCheck chk{"K_n^p <= K_{n+1}", n, 0, true, ""};
      for (const auto& x : s.term(n).igs()) {
        PcElement y = g->power(x, p);
        if (!s.term(n + 1).contains(y)) {
          chk.holds = false;
          chk.witness = "(" + g->format(x) + ")^" + to_string(p) + " = " + g->format(y);
          break;
        }
      }
      rep.checks.push_back(chk);
    }
  }
  if (mode == AxiomMode::Np) {
    const long long pp = to_ll(p);
    for (int n = 1; pp * n <= last; ++n) {
      AxiomCheck chk{"K_n^p <= K_{pn}", n, static_cast<int>(pp * n), true, ""};
      Subgroup pw = power_subgroup(s.term(n), p);
      for (const auto& y : pw.igs())
        if (!s.term(static_cast<int>(pp * n)).contains(y)) {
          chk.holds = false;
          chk.witness = g->format(y) + " lies in K_" + std::to_string(n) + "^p";
          break;
        }
      rep.checks.push_back(chk);
    }
  }
  return rep;
}

/// Custom series from explicit terms.
inline SubgroupSeries custom_series(std::vector<Subgroup> terms) {
  SubgroupSeries s;
  s.kind = SeriesKind::custom;
  s.class_bound = static_cast<int>(terms.size()) - 1;
  s.terms = std::move(terms);
  detail::finish(s);
  return s;
}

}  // namespace lcs
