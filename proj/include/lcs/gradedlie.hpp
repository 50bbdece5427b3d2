#pragma once

#include "lcs/errors.hpp"
#include "lcs/extension.hpp"
#include "lcs/homomorphism.hpp"
#include "lcs/intlinalg.hpp"
#include "lcs/report.hpp"
#include "lcs/series.hpp"
#include "lcs/subgroup.hpp"

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace lcs {

/// Rows generating a sublattice, reduced to a canonical basis.
inline IntMatrix lattice_basis(const IntMatrix& rows) {
  if (rows.rows() == 0) return IntMatrix(0, rows.cols());
  HermiteForm hf = hermite_normal_form(rows);
  IntMatrix out(0, rows.cols());
  for (std::size_t r = 0; r < hf.pivot_cols.size(); ++r) out.append_row(hf.h.row(r));
  return out;
}

/// Invariants of L / S for lattices S <= L given by generating rows.
inline AbelianInvariants quotient_invariants(const IntMatrix& lattice, const IntMatrix& sub) {
  IntMatrix basis = lattice_basis(lattice);
  if (basis.rows() == 0) return {};
  LeftSolver solver(basis);
  IntMatrix rel(0, basis.rows());
  for (std::size_t r = 0; r < sub.rows(); ++r) {
    auto x = solver.solve(sub.row(r));
    if (!x) throw Error("internal: sublattice not contained in lattice");
    rel.append_row(*x);
  }
  return abelian_invariants(rel, basis.rows());
}

/// Diagonal relation rows of a layer Z^k / (d_1, ..., d_k).
inline IntMatrix divisor_rows(const std::vector<Integer>& divisors) {
  IntMatrix d(0, divisors.size());
  for (std::size_t i = 0; i < divisors.size(); ++i) {
    if (divisors[i] == 0) continue;
    std::vector<Integer> r(divisors.size());
    r[i] = divisors[i];
    d.append_row(r);
  }
  return d;
}

inline IntMatrix stack(const IntMatrix& a, const IntMatrix& b) {
  IntMatrix out(0, a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) out.append_row(a.row(r));
  for (std::size_t r = 0; r < b.rows(); ++r) out.append_row(b.row(r));
  return out;
}

/// Associated graded Lie algebra of an N-series, layers 1..c-1.
class GradedLieAlgebra {
 public:
  GradedLieAlgebra() = default;

  const SubgroupSeries& series() const { return series_; }
  const GroupPtr& group() const { return series_.terms.front().group(); }
  int top_degree() const { return static_cast<int>(layers_.size()); }
  const LayerQuotient& layer(int n) const {
    if (n < 1 || n > top_degree()) throw Error("graded degree " + std::to_string(n) + " outside 1.." + std::to_string(top_degree()));
    return layers_[static_cast<std::size_t>(n - 1)];
  }
  std::size_t dimension(int n) const { return layer(n).dimension(); }

  /// Structure constants: coordinates of [x_i, y_j] (x_i basis of degree m,
  /// y_j basis of degree n) in degree m + n; absent beyond the exact zone.
  const std::vector<Integer>& bracket(int m, std::size_t i, int n, std::size_t j) const {
    auto it = bracket_.find({m, i, n, j});
    if (it == bracket_.end()) throw Error("bracket outside the truncation-exact zone");
    return it->second;
  }
  bool has_bracket(int m, int n) const { return m >= 1 && n >= 1 && m + n <= top_degree(); }

  /// Bracket of coordinate vectors (bilinear extension of the structure constants).
  std::vector<Integer> bracket_coords(int m, const std::vector<Integer>& u, int n, const std::vector<Integer>& v) const {
    std::vector<Integer> out(dimension(m + n));
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (u[i] == 0) continue;
      for (std::size_t j = 0; j < v.size(); ++j) {
        if (v[j] == 0) continue;
        const auto& b = bracket(m, i, n, j);
        for (std::size_t k = 0; k < out.size(); ++k) out[k] += u[i] * v[j] * b[k];
      }
    }
    return layer(m + n).normalize(out);
  }

  /// Per-degree matrix of x -> x^p from degree n to degree n + 1 (when computed).
  const std::map<int, IntMatrix>& p_power() const { return p_power_; }

  std::vector<std::vector<std::string>> divisor_table() const {
    std::vector<std::vector<std::string>> out;
    for (const auto& l : layers_) {
      std::vector<std::string> d;
      for (const auto& v : l.divisors()) d.push_back(to_string(v));
      out.push_back(d);
    }
    return out;
  }

  /// Recomputes the structure constants with every lift multiplied by the given
  /// elements of the next term (perturb(n, i) must lie in K_{n+1}).
  template <class Perturb>
  std::map<std::tuple<int, std::size_t, int, std::size_t>, std::vector<Integer>> brackets_with_lifts(Perturb perturb) const {
    const GroupPtr& g = group();
    std::map<std::tuple<int, std::size_t, int, std::size_t>, std::vector<Integer>> out;
    for (int m = 1; m <= top_degree(); ++m)
      for (int n = 1; m + n <= top_degree(); ++n)
        for (std::size_t i = 0; i < dimension(m); ++i)
          for (std::size_t j = 0; j < dimension(n); ++j) {
            PcElement x = g->multiply(layer(m).lifts()[i], perturb(m, i));
            PcElement y = g->multiply(layer(n).lifts()[j], perturb(n, j));
            out[{m, i, n, j}] = layer(m + n).coordinates(g->commutator(x, y));
          }
    return out;
  }
  const std::map<std::tuple<int, std::size_t, int, std::size_t>, std::vector<Integer>>& structure_constants() const {
    return bracket_;
  }

 private:
  friend GradedLieAlgebra associated_graded(const SubgroupSeries& s, std::optional<int> top);
  friend std::map<int, IntMatrix> p_power_map(GradedLieAlgebra& gla, const Integer& p);
  SubgroupSeries series_;
  std::vector<LayerQuotient> layers_;
  std::map<std::tuple<int, std::size_t, int, std::size_t>, std::vector<Integer>> bracket_;
  std::map<int, IntMatrix> p_power_;
};

/// Layers K_n / K_{n+1} for n <= top (default c - 1) and brackets induced by
/// the group commutator for m + n <= top.
inline GradedLieAlgebra associated_graded(const SubgroupSeries& s, std::optional<int> top = std::nullopt) {
  AxiomReport ax = verify_series_axioms(s, AxiomMode::N);
  if (!ax.holds()) {
    auto f = ax.failures().front();
    throw NotNSeries(s.label() + ": " + f.what + " fails at (" + std::to_string(f.m) + ", " + std::to_string(f.n) +
                     "): " + f.witness);
  }
  GradedLieAlgebra gla;
  gla.series_ = s;
  const int t = top.value_or(s.class_bound - 1);
  if (t > s.length() - 1) throw Error("graded degree beyond the computed series");
  for (int n = 1; n <= t; ++n) gla.layers_.push_back(layer_quotient(s.term(n), s.term(n + 1)));
  const GroupPtr& g = gla.group();
  for (int m = 1; m <= t; ++m)
    for (int n = 1; m + n <= t; ++n)
      for (std::size_t i = 0; i < gla.dimension(m); ++i)
        for (std::size_t j = 0; j < gla.dimension(n); ++j)
          gla.bracket_[{m, i, n, j}] =
              gla.layer(m + n).coordinates(g->commutator(gla.layer(m).lifts()[i], gla.layer(n).lifts()[j]));
  return gla;
}

/// Tables of x -> x^p from degree n to n + 1; the series must be p-torsion.
inline std::map<int, IntMatrix> p_power_map(GradedLieAlgebra& gla, const Integer& p) {
  AxiomReport ax = verify_series_axioms(gla.series_, AxiomMode::p_torsion, p);
  if (!ax.holds()) {
    auto f = ax.failures().front();
    throw NotPTorsionSeries(gla.series_.label() + ": " + f.what + " fails at " + std::to_string(f.m) + ": " + f.witness);
  }
  const GroupPtr& g = gla.group();
  gla.p_power_.clear();
  for (int n = 1; n + 1 <= gla.top_degree(); ++n) {
    IntMatrix m(0, gla.dimension(n + 1));
    for (const auto& x : gla.layer(n).lifts()) m.append_row(gla.layer(n + 1).coordinates(g->power(x, p)));
    gla.p_power_[n] = m;
  }
  return gla.p_power_;
}

/// Degree-preserving map between graded algebras, one matrix per degree
/// (rows: source basis, columns: target coordinates).
struct GradedMorphism {
  std::vector<IntMatrix> maps;
  std::vector<AbelianInvariants> kernel;
  std::vector<AbelianInvariants> cokernel;
  std::vector<Check> bracket_checks;
};

namespace detail {

inline AbelianInvariants map_kernel(const IntMatrix& m, const std::vector<Integer>& src_div,
                                    const std::vector<Integer>& tgt_div) {
  const std::size_t a = m.rows();
  if (a == 0) return {};
  IntMatrix both = stack(m, divisor_rows(tgt_div));
  IntMatrix ker = integer_kernel(both);
  IntMatrix proj(0, a);
  for (std::size_t r = 0; r < ker.rows(); ++r) {
    std::vector<Integer> row = ker.row(r);
    row.resize(a);
    proj.append_row(row);
  }
  return quotient_invariants(proj, divisor_rows(src_div));
}

inline AbelianInvariants map_cokernel(const IntMatrix& m, const std::vector<Integer>& tgt_div) {
  IntMatrix rel = stack(m, divisor_rows(tgt_div));
  return abelian_invariants(rel, tgt_div.size());
}

}  // namespace detail

/// gr(f) for a filtered map f; requires f(K_n) <= K'_n on igs generators.
inline GradedMorphism induced_graded_morphism(const GroupHom& f, const GradedLieAlgebra& src, const GradedLieAlgebra& tgt) {
  const int top = std::min(src.top_degree(), tgt.top_degree());
  for (int n = 1; n <= top + 1; ++n)
    for (const auto& x : src.series().term(n).igs()) {
      PcElement y = f(x);
      if (!tgt.series().term(n).contains(y))
        throw NotFiltered("image of " + f.src->format(x) + " is " + f.tgt->format(y) + ", outside term " +
                          std::to_string(n));
    }
  GradedMorphism gm;
  for (int n = 1; n <= top; ++n) {
    IntMatrix m(0, tgt.dimension(n));
    for (const auto& x : src.layer(n).lifts()) m.append_row(tgt.layer(n).coordinates(f(x)));
    gm.kernel.push_back(detail::map_kernel(m, src.layer(n).divisors(), tgt.layer(n).divisors()));
    gm.cokernel.push_back(detail::map_cokernel(m, tgt.layer(n).divisors()));
    gm.maps.push_back(std::move(m));
  }
  for (int m = 1; m <= top; ++m)
    for (int n = m; m + n <= top; ++n) {
      Check c{"bracket compatibility (" + std::to_string(m) + "," + std::to_string(n) + ")", true, ""};
      for (std::size_t i = 0; i < src.dimension(m) && c.holds; ++i)
        for (std::size_t j = 0; j < src.dimension(n) && c.holds; ++j) {
          auto lhs = tgt.layer(m + n).normalize(row_times(src.bracket(m, i, n, j), gm.maps[static_cast<std::size_t>(m + n - 1)]));
          auto rhs = tgt.bracket_coords(m, gm.maps[static_cast<std::size_t>(m - 1)].row(i), n,
                                        gm.maps[static_cast<std::size_t>(n - 1)].row(j));
          if (lhs != rhs) {
            c.holds = false;
            c.witness = "basis pair (" + std::to_string(i) + ", " + std::to_string(j) + ")";
          }
        }
      gm.bracket_checks.push_back(c);
    }
  return gm;
}

/// gr_n(G) -> gr^rat_n(G) with kernel and cokernel invariants per degree.
struct RationalComparison {
  GradedLieAlgebra integral;
  GradedLieAlgebra rational;
  GradedMorphism morphism;
  /// Both kernel and cokernel finite in every degree.
  bool finite() const {
    for (const auto& k : morphism.kernel)
      if (!k.is_finite()) return false;
    for (const auto& k : morphism.cokernel)
      if (!k.is_finite()) return false;
    return true;
  }
};

inline RationalComparison comparison_to_rational(const GroupPtr& g, int c) {
  RationalComparison rc;
  rc.integral = associated_graded(lower_central_series(g, c));
  rc.rational = associated_graded(rational_lcs(g, c));
  GroupHom id{g, g, g->generators()};
  rc.morphism = induced_graded_morphism(id, rc.integral, rc.rational);
  return rc;
}

/// Degree-by-degree check of 0 -> gr(A) -> gr(B) -> gr(C) -> 0 (fiber graded
/// by the L-variant of the mode), its splitting via sigma, and the monodromy
/// derivation gr(C) -> Der(gr(A)) given by [sigma(y), alpha(x)].
inline TheoremReport verify_graded_split(const SplitExtension& e, int c, const ModeSpec& m) {
  TheoremReport rep;
  rep.theorem = "graded-split";
  rep.mode = m.str();
  rep.class_bound = c;
  rep.exactness_note = truncation_note(c) + "; graded degrees 1.." + std::to_string(c - 1);
  const GroupPtr& b = e.total();
  GradedLieAlgebra ga = associated_graded(gp_series(e, c, m));
  GradedLieAlgebra gb = associated_graded(intrinsic_series(b, c, m));
  GradedLieAlgebra gc = associated_graded(intrinsic_series(e.base(), c, m));
  const int top = c - 1;
  auto div = [](const GradedLieAlgebra& g, int n) { return g.layer(n).divisors(); };
  for (int n = 1; n <= top; ++n) {
    DegreeReport r;
    r.degree = n;
    auto fmt = [](const std::vector<Integer>& d) {
      std::vector<std::string> s;
      for (const auto& v : d) s.push_back(to_string(v));
      return s;
    };
    r.divisors = {{"fiber", fmt(div(ga, n))}, {"total", fmt(div(gb, n))}, {"base", fmt(div(gc, n))}};
    // alpha: fiber layer -> total layer; beta: total layer -> base layer; sigma: base -> total.
    IntMatrix ma(0, gb.dimension(n)), mb(0, gc.dimension(n)), ms(0, gb.dimension(n));
    for (const auto& x : ga.layer(n).lifts()) {
      if (!gb.series().term(n).contains(x)) throw NotFiltered("fiber term not inside the total term");
      ma.append_row(gb.layer(n).coordinates(x));
    }
    for (const auto& x : gb.layer(n).lifts()) mb.append_row(gc.layer(n).coordinates(e.beta(x)));
    for (const auto& x : gc.layer(n).lifts()) ms.append_row(gb.layer(n).coordinates(e.sigma(x)));
    AbelianInvariants ker_a = detail::map_kernel(ma, div(ga, n), div(gb, n));
    r.check("injective", ker_a.is_trivial(), ker_a.is_trivial() ? "" : "kernel " + ker_a.str());
    AbelianInvariants cok_b = detail::map_cokernel(mb, div(gc, n));
    r.check("surjective", cok_b.is_trivial(), cok_b.is_trivial() ? "" : "cokernel " + cok_b.str());
    // kernel of beta (as lattice in Z^k containing the relations) vs image of alpha + relations.
    {
      IntMatrix both = stack(mb, divisor_rows(div(gc, n)));
      IntMatrix ker = integer_kernel(both);
      IntMatrix kb(0, gb.dimension(n));
      for (std::size_t i = 0; i < ker.rows(); ++i) {
        auto row = ker.row(i);
        row.resize(gb.dimension(n));
        kb.append_row(row);
      }
      IntMatrix rel = divisor_rows(div(gb, n));
      bool exact = lattice_basis(stack(kb, rel)) == lattice_basis(stack(ma, rel));
      r.check("exact", exact, exact ? "" : "image of the fiber differs from the kernel of the projection");
    }
    {
      bool split = true;
      for (std::size_t i = 0; i < ms.rows(); ++i) {
        auto back = gc.layer(n).normalize(row_times(ms.row(i), mb));
        std::vector<Integer> unit(gc.dimension(n));
        unit[i] = 1;
        if (back != gc.layer(n).normalize(unit)) split = false;
      }
      r.check("splitting", split, split ? "" : "beta o sigma is not the identity");
    }
    rep.degrees.push_back(std::move(r));
  }
  // Monodromy: theta(y)(x) = [sigma(y), alpha(x)] in the fiber layer m + n.
  Check lands{"monodromy lands in fiber", true, ""};
  Check deriv{"monodromy is a derivation", true, ""};
  std::map<std::tuple<int, std::size_t, int, std::size_t>, std::vector<Integer>> theta;
  for (int mdeg = 1; mdeg < top; ++mdeg)
    for (int n = 1; mdeg + n <= top; ++n)
      for (std::size_t i = 0; i < gc.dimension(mdeg); ++i)
        for (std::size_t j = 0; j < ga.dimension(n); ++j) {
          PcElement z = b->commutator(e.sigma(gc.layer(mdeg).lifts()[i]), ga.layer(n).lifts()[j]);
          if (!ga.series().term(mdeg + n).contains(z)) {
            lands = {lands.name, false, b->format(z) + " leaves fiber term " + std::to_string(mdeg + n)};
            continue;
          }
          theta[{mdeg, i, n, j}] = ga.layer(mdeg + n).coordinates(z);
        }
  auto apply_theta = [&](int mdeg, std::size_t i, int n, const std::vector<Integer>& x) {
    std::vector<Integer> out(ga.dimension(mdeg + n));
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (x[j] == 0) continue;
      const auto& t = theta.at({mdeg, i, n, j});
      for (std::size_t k = 0; k < out.size(); ++k) out[k] += x[j] * t[k];
    }
    return ga.layer(mdeg + n).normalize(out);
  };
  if (lands.holds)
    for (int mdeg = 1; mdeg < top; ++mdeg)
      for (int n1 = 1; mdeg + n1 < top; ++n1)
        for (int n2 = 1; mdeg + n1 + n2 <= top; ++n2)
          for (std::size_t i = 0; i < gc.dimension(mdeg); ++i)
            for (std::size_t j1 = 0; j1 < ga.dimension(n1); ++j1)
              for (std::size_t j2 = 0; j2 < ga.dimension(n2); ++j2) {
                std::vector<Integer> x1(ga.dimension(n1)), x2(ga.dimension(n2));
                x1[j1] = 1;
                x2[j2] = 1;
                auto lhs = apply_theta(mdeg, i, n1 + n2, ga.bracket(n1, j1, n2, j2));
                auto a = ga.bracket_coords(mdeg + n1, apply_theta(mdeg, i, n1, x1), n2, x2);
                auto bb = ga.bracket_coords(n1, x1, mdeg + n2, apply_theta(mdeg, i, n2, x2));
                std::vector<Integer> rhs(a.size());
                for (std::size_t k = 0; k < a.size(); ++k) rhs[k] = a[k] + bb[k];
                rhs = ga.layer(mdeg + n1 + n2).normalize(rhs);
                if (lhs != rhs && deriv.holds)
                  deriv = {deriv.name, false,
                           "degrees (" + std::to_string(mdeg) + "; " + std::to_string(n1) + ", " + std::to_string(n2) + ")"};
              }
  rep.global_checks.push_back(lands);
  rep.global_checks.push_back(deriv);
  return rep;
}

}  // namespace lcs
