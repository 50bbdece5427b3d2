#pragma once

#include "lcs/errors.hpp"
#include "lcs/intlinalg.hpp"
#include "lcs/pcgroup.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace lcs {

/// A subgroup of a pc group held by its canonical induced generating sequence:
/// strictly increasing depths, positive leading exponents (dividing the relative
/// order at finite depths), and every entry at a later pivot depth reduced into
/// [0, pivot exponent). Two subgroups are equal iff their sequences are equal.
class Subgroup {
 public:
  Subgroup() = default;
  /// `igs` must already be canonical; use subgroup_closure() otherwise.
  Subgroup(GroupPtr g, std::vector<PcElement> igs) : group_(std::move(g)), igs_(std::move(igs)) {}

  static Subgroup trivial(GroupPtr g) { return {std::move(g), {}}; }
  static Subgroup whole(GroupPtr g) {
    std::vector<PcElement> gens = g->generators();
    return {std::move(g), std::move(gens)};
  }

  const GroupPtr& group() const { return group_; }
  const std::vector<PcElement>& igs() const { return igs_; }
  std::size_t size() const { return igs_.size(); }
  bool is_trivial() const { return igs_.empty(); }

  /// igs element with leading generator `depth`, if any.
  const PcElement* pivot(int depth) const {
    for (const auto& x : igs_)
      if (x.depth() == depth) return &x;
    return nullptr;
  }

  /// Exponents a with g = x_1^{a_1} ... x_s^{a_s}, or nullopt if g is not in the subgroup.
  std::optional<std::vector<Integer>> coordinates(const PcElement& g) const {
    std::vector<Integer> a(igs_.size());
    PcElement r = g;
    std::size_t k = 0;
    while (!r.is_identity()) {
      const int d = r.depth();
      while (k < igs_.size() && igs_[k].depth() < d) ++k;
      if (k == igs_.size() || igs_[k].depth() != d) return std::nullopt;
      const Integer& f = igs_[k].leading_exponent();
      if (r.leading_exponent() % f != 0) return std::nullopt;
      a[k] = r.leading_exponent() / f;
      r = group_->multiply(group_->power(igs_[k], -a[k]), r);
      ++k;
    }
    return a;
  }

  bool contains(const PcElement& g) const { return coordinates(g).has_value(); }

  bool is_subgroup_of(const Subgroup& other) const {
    return std::all_of(igs_.begin(), igs_.end(), [&](const PcElement& x) { return other.contains(x); });
  }

  std::string format() const {
    if (igs_.empty()) return "<>";
    std::string s = "<";
    for (std::size_t i = 0; i < igs_.size(); ++i) s += (i ? ", " : "") + group_->format(igs_[i]);
    return s + ">";
  }

  std::vector<std::string> formatted_igs() const {
    std::vector<std::string> out;
    for (const auto& x : igs_) out.push_back(group_->format(x));
    return out;
  }

  friend bool operator==(const Subgroup& a, const Subgroup& b) {
    return a.group_ == b.group_ && a.igs_ == b.igs_;
  }

 private:
  GroupPtr group_;
  std::vector<PcElement> igs_;
};

struct ClosureOptions {
  std::size_t pass_budget = 10'000;
};

namespace detail {

/// Incremental induced-generating-sequence builder.
class IgsBuilder {
 public:
  explicit IgsBuilder(const PcGroup& g) : g_(g), slot_(static_cast<std::size_t>(g.size())), id_(slot_.size(), 0) {}

  /// Sifts x into the sequence; returns true if the sequence changed.
  bool add(const PcElement& x) {
    bool changed = false;
    std::deque<PcElement> queue{x};
    while (!queue.empty()) {
      PcElement h = std::move(queue.front());
      queue.pop_front();
      changed |= insert(std::move(h), queue);
    }
    return changed;
  }

  bool contains(PcElement r) const {
    while (!r.is_identity()) {
      const auto& s = slot_[static_cast<std::size_t>(r.depth())];
      if (!s) return false;
      const Integer& f = s->leading_exponent();
      if (r.leading_exponent() % f != 0) return false;
      r = g_.multiply(g_.power(*s, -(r.leading_exponent() / f)), r);
    }
    return true;
  }

  /// (id, element) for every filled slot, in depth order.
  std::vector<std::pair<std::uint64_t, PcElement>> entries() const {
    std::vector<std::pair<std::uint64_t, PcElement>> out;
    for (std::size_t d = 0; d < slot_.size(); ++d)
      if (slot_[d]) out.emplace_back(id_[d], *slot_[d]);
    return out;
  }

  /// Canonical (fully reduced) sequence.
  std::vector<PcElement> canonical() const {
    std::vector<PcElement> xs;
    for (const auto& s : slot_)
      if (s) xs.push_back(*s);
    for (std::size_t i = 0; i < xs.size(); ++i)
      for (std::size_t j = i + 1; j < xs.size(); ++j) {
        const int d = xs[j].depth();
        Integer c = xs[i].exponent(d);
        Integer q = floor_div(c, xs[j].leading_exponent());
        if (q != 0) xs[i] = g_.multiply(xs[i], g_.power(xs[j], -q));
      }
    return xs;
  }

 private:
  bool insert(PcElement h, std::deque<PcElement>& queue) {
    while (!h.is_identity()) {
      const int d = h.depth();
      const auto ud = static_cast<std::size_t>(d);
      const bool finite = g_.is_finite_gen(d);
      const Integer& o = g_.rel_order(d);
      Integer e = h.leading_exponent();
      auto& s = slot_[ud];
      if (!s) {
        if (finite) {
          auto [gg, k, unused] = xgcd(e, o);
          (void)unused;
          if (gg != e) {
            queue.push_back(h);
            h = g_.power(h, k);
          }
          queue.push_back(g_.power(h, o / gg));
        } else if (e < 0) {
          h = g_.invert(h);
        }
        s = std::move(h);
        id_[ud] = ++next_id_;
        return true;
      }
      const Integer f = s->leading_exponent();
      if (e % f == 0) {
        h = g_.multiply(g_.power(*s, -(e / f)), h);
        continue;
      }
      auto [gg, a, b] = xgcd(f, e);
      PcElement combined = g_.multiply(g_.power(*s, a), g_.power(h, b));
      queue.push_back(*s);
      queue.push_back(h);
      if (finite) queue.push_back(g_.power(combined, o / gg));
      s = std::move(combined);
      id_[ud] = ++next_id_;
      return true;
    }
    return false;
  }

  const PcGroup& g_;
  std::vector<std::optional<PcElement>> slot_;
  std::vector<std::uint64_t> id_;
  std::uint64_t next_id_ = 0;
};

/// Closes `gens` into a subgroup, additionally closed under conjugation by
/// every element of `conjugators`.
inline Subgroup close(const GroupPtr& g, const std::vector<PcElement>& gens,
                      const std::vector<PcElement>& conjugators, const ClosureOptions& opt) {
  IgsBuilder b(*g);
  for (const auto& x : gens) b.add(x);
  std::set<std::pair<std::uint64_t, std::uint64_t>> done_pairs;
  std::set<std::pair<std::uint64_t, std::size_t>> done_conj;
  std::size_t passes = 0;
  while (true) {
    if (++passes > opt.pass_budget)
      throw BudgetExceeded("subgroup closure exceeded " + std::to_string(opt.pass_budget) + " passes");
    bool changed = false;
    auto snap = b.entries();
    for (std::size_t i = 0; i < snap.size(); ++i) {
      for (std::size_t j = i + 1; j < snap.size(); ++j) {
        if (!done_pairs.insert({snap[i].first, snap[j].first}).second) continue;
        changed |= b.add(g->conjugate(snap[j].second, snap[i].second));
      }
      for (std::size_t c = 0; c < conjugators.size(); ++c) {
        if (!done_conj.insert({snap[i].first, c}).second) continue;
        changed |= b.add(g->conjugate(snap[i].second, conjugators[c]));
      }
    }
    if (!changed) break;
  }
  return Subgroup(g, b.canonical());
}

}  // namespace detail

/// Canonical igs of <gens>, or of its normal closure in the whole group when `normal`.
inline Subgroup subgroup_closure(const GroupPtr& g, const std::vector<PcElement>& gens, bool normal,
                                 const ClosureOptions& opt = {}) {
  std::vector<PcElement> conj;
  if (normal) conj = g->generators();
  return detail::close(g, gens, conj, opt);
}

/// Normal closure of `gens` inside the subgroup generated by `conjugators` (plus gens).
inline Subgroup normal_closure_under(const GroupPtr& g, const std::vector<PcElement>& gens,
                                     const std::vector<PcElement>& conjugators, const ClosureOptions& opt = {}) {
  return detail::close(g, gens, conjugators, opt);
}

inline void require_same_group(const Subgroup& h, const Subgroup& k) {
  if (h.group() != k.group()) throw Error("subgroups live in different groups");
}

inline Subgroup join(const Subgroup& h, const Subgroup& k, const ClosureOptions& opt = {}) {
  require_same_group(h, k);
  if (h.is_subgroup_of(k)) return k;
  if (k.is_subgroup_of(h)) return h;
  std::vector<PcElement> gens = h.igs();
  gens.insert(gens.end(), k.igs().begin(), k.igs().end());
  return subgroup_closure(h.group(), gens, false, opt);
}

inline Subgroup join_all(const GroupPtr& g, const std::vector<Subgroup>& parts, const ClosureOptions& opt = {}) {
  std::vector<PcElement> gens;
  for (const auto& p : parts) {
    if (p.group() != g) throw Error("subgroups live in different groups");
    gens.insert(gens.end(), p.igs().begin(), p.igs().end());
  }
  return subgroup_closure(g, gens, false, opt);
}

/// [H, K]: generator commutators closed under conjugation by generators of <H, K>.
inline Subgroup commutator_subgroup(const Subgroup& h, const Subgroup& k, const ClosureOptions& opt = {}) {
  require_same_group(h, k);
  const GroupPtr& g = h.group();
  std::vector<PcElement> gens;
  for (const auto& x : h.igs())
    for (const auto& y : k.igs()) {
      PcElement c = g->commutator(x, y);
      if (!c.is_identity()) gens.push_back(std::move(c));
    }
  if (gens.empty()) return Subgroup::trivial(g);
  std::vector<PcElement> conj = h.igs();
  conj.insert(conj.end(), k.igs().begin(), k.igs().end());
  return normal_closure_under(g, gens, conj, opt);
}

inline bool is_normal_in(const Subgroup& k, const Subgroup& h) {
  const GroupPtr& g = h.group();
  for (const auto& y : k.igs())
    for (const auto& x : h.igs())
      if (!k.contains(g->conjugate(y, x))) return false;
  return true;
}

/// Relative order of each igs element of H modulo K (K a subgroup of H):
/// 0 = infinite, 1 = not part of the factor.
inline std::vector<Integer> factor_orders(const Subgroup& h, const Subgroup& k) {
  std::vector<Integer> out;
  const PcGroup& g = *h.group();
  for (const auto& x : h.igs()) {
    const int d = x.depth();
    const Integer& f = x.leading_exponent();
    if (const PcElement* y = k.pivot(d))
      out.push_back(y->leading_exponent() / f);
    else if (g.is_finite_gen(d))
      out.push_back(g.rel_order(d) / f);
    else
      out.push_back(0);
  }
  return out;
}

/// [H : K] for K a subgroup of H; nullopt when infinite.
inline std::optional<Integer> subgroup_index(const Subgroup& h, const Subgroup& k) {
  Integer n = 1;
  for (const auto& r : factor_orders(h, k)) {
    if (r == 0) return std::nullopt;
    n *= r;
  }
  return n;
}

/// Terms S_1 = H, S_{i+1} = [H, S_i] N of H modulo a normal subgroup N, until
/// S_i = N or `max_len` terms. Returns the terms; the last equals N iff H/N is
/// nilpotent of class < max_len.
inline std::vector<Subgroup> relative_lower_central_series(const Subgroup& h, const Subgroup& n, std::size_t max_len,
                                                           const ClosureOptions& opt = {}) {
  std::vector<Subgroup> s{h};
  while (s.size() < max_len && !(s.back() == n)) {
    Subgroup next = join(commutator_subgroup(h, s.back(), opt), n, opt);
    if (next == s.back()) break;
    s.push_back(std::move(next));
  }
  return s;
}

namespace detail {

inline PcElement factor_word(const GroupPtr& g, const std::vector<PcElement>& ys, const std::vector<Integer>& e) {
  PcElement r;
  for (std::size_t i = 0; i < ys.size(); ++i)
    if (e[i] != 0) r = g->multiply(r, g->power(ys[i], e[i]));
  return r;
}

}  // namespace detail

struct PowerSubgroupOptions {
  /// Largest quotient H/N enumerated element by element.
  std::uint64_t enumeration_limit = 1u << 18;
  ClosureOptions closure;
};

/// H^p = <x^p : x in H>, exact. Starts from the normal closure of the p-th powers
/// of the igs of H and saturates until H/N has exponent p: factor generators of
/// infinite or non-p relative order and pairwise products contribute their p-th
/// powers; for p = 2 this already forces an elementary abelian quotient, for odd
/// p a quotient of class < p is regular (hence exponent p), otherwise the finite
/// quotient is enumerated.
inline Subgroup power_subgroup(const Subgroup& h, const Integer& p, const PowerSubgroupOptions& opt = {}) {
  const GroupPtr& g = h.group();
  if (!is_prime(p)) throw Error("power_subgroup needs a prime, got " + to_string(p));
  if (h.is_trivial()) return h;
  std::vector<PcElement> gens;
  for (const auto& x : h.igs()) gens.push_back(g->power(x, p));
  Subgroup n = normal_closure_under(g, gens, h.igs(), opt.closure);
  auto grow = [&](std::vector<PcElement> extra) {
    std::vector<PcElement> all = n.igs();
    all.insert(all.end(), extra.begin(), extra.end());
    n = normal_closure_under(g, all, h.igs(), opt.closure);
  };
  while (true) {
    std::vector<PcElement> ys;
    std::vector<Integer> rs;
    auto orders = factor_orders(h, n);
    for (std::size_t i = 0; i < orders.size(); ++i)
      if (orders[i] != 1) {
        ys.push_back(h.igs()[i]);
        rs.push_back(orders[i]);
      }
    std::vector<PcElement> missing;
    for (const auto& y : ys) {
      PcElement yp = g->power(y, p);
      if (!n.contains(yp)) missing.push_back(yp);
    }
    if (missing.empty())
      for (std::size_t i = 0; i < ys.size(); ++i)
        for (std::size_t j = i + 1; j < ys.size(); ++j) {
          PcElement t = g->power(g->multiply(ys[i], ys[j]), p);
          if (!n.contains(t)) missing.push_back(t);
        }
    if (!missing.empty()) {
      grow(std::move(missing));
      continue;
    }
    // Every factor generator and pairwise product has p-th power in N.
    if (p == 2 || ys.empty()) return n;
    auto lcs = relative_lower_central_series(h, n, static_cast<std::size_t>(to_ll(p)) + 1, opt.closure);
    if (lcs.back() == n && lcs.size() <= static_cast<std::size_t>(to_ll(p))) return n;  // class < p
    Integer order = 1;
    for (const auto& r : rs) order *= r;
    if (order > opt.enumeration_limit)
      throw BudgetExceeded("power subgroup quotient of order " + to_string(order) + " too large to enumerate");
    std::vector<Integer> e(ys.size());
    while (true) {
      PcElement t = g->power(detail::factor_word(g, ys, e), p);
      if (!n.contains(t)) missing.push_back(t);
      std::size_t i = 0;
      for (; i < e.size(); ++i) {
        if (++e[i] < rs[i]) break;
        e[i] = 0;
      }
      if (i == e.size()) break;
    }
    if (missing.empty()) return n;
    grow(std::move(missing));
  }
}

/// H^p N for N normal in H with H/N abelian: N together with the p-th powers
/// of the igs of H.
inline Subgroup power_join(const Subgroup& h, const Subgroup& n, const Integer& p) {
  require_same_group(h, n);
  const GroupPtr& g = h.group();
  const auto& gens = h.igs();
  for (std::size_t i = 0; i < gens.size(); ++i)
    for (std::size_t j = i + 1; j < gens.size(); ++j)
      if (!n.contains(g->commutator(gens[i], gens[j])))
        throw NotAbelianQuotient(h.format() + " modulo " + n.format() + " is not abelian");
  std::vector<PcElement> out = n.igs();
  for (const auto& x : gens) out.push_back(g->power(x, p));
  return subgroup_closure(g, out, false);
}

/// Abelian section H/K with a basis of lifts and a coordinate map.
class LayerQuotient {
 public:
  LayerQuotient() = default;

  const AbelianInvariants& invariants() const { return inv_; }
  const std::vector<Integer>& divisors() const { return inv_.divisors; }
  const std::vector<PcElement>& lifts() const { return lifts_; }
  std::size_t dimension() const { return lifts_.size(); }
  const Subgroup& top() const { return top_; }
  const Subgroup& bottom() const { return bottom_; }

  /// Coordinates of x (an element of H) in the lift basis, reduced modulo the divisors.
  std::vector<Integer> coordinates(const PcElement& x) const {
    auto a = top_.coordinates(x);
    if (!a) throw Error("element " + top_.group()->format(x) + " is not in the layer's top subgroup");
    return reduce(row_times(*a, q_));
  }

  /// Coordinates reduced modulo the divisors (taking only kept positions).
  std::vector<Integer> reduce(const std::vector<Integer>& full) const {
    std::vector<Integer> out;
    for (std::size_t i = 0; i < kept_.size(); ++i) {
      const Integer& d = inv_.divisors[i];
      const Integer& v = full[kept_[i]];
      out.push_back(d == 0 ? v : floor_mod(v, d));
    }
    return out;
  }

  /// Layer coordinates brought into the canonical range.
  std::vector<Integer> normalize(std::vector<Integer> c) const {
    for (std::size_t i = 0; i < c.size(); ++i)
      if (inv_.divisors[i] != 0) c[i] = floor_mod(c[i], inv_.divisors[i]);
    return c;
  }

  /// Lift of a coordinate vector.
  PcElement lift(const std::vector<Integer>& c) const {
    const GroupPtr& g = top_.group();
    PcElement r;
    for (std::size_t i = 0; i < c.size(); ++i)
      if (c[i] != 0) r = g->multiply(r, g->power(lifts_[i], c[i]));
    return r;
  }

  bool is_zero(const std::vector<Integer>& c) const {
    return std::all_of(c.begin(), c.end(), [](const Integer& v) { return v == 0; });
  }

 private:
  friend LayerQuotient layer_quotient(const Subgroup& h, const Subgroup& k);
  Subgroup top_, bottom_;
  AbelianInvariants inv_;
  std::vector<PcElement> lifts_;
  IntMatrix q_;
  std::vector<std::size_t> kept_;
};

/// H/K for K normal in H with abelian quotient: invariant factors plus lifts.
inline LayerQuotient layer_quotient(const Subgroup& h, const Subgroup& k) {
  require_same_group(h, k);
  const GroupPtr& g = h.group();
  if (!k.is_subgroup_of(h)) throw NotNormal("bottom " + k.format() + " is not contained in top " + h.format());
  if (!is_normal_in(k, h)) throw NotNormal(k.format() + " is not normal in " + h.format());
  const auto& xs = h.igs();
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j)
      if (!k.contains(g->commutator(xs[i], xs[j])))
        throw NotAbelianQuotient(h.format() + " / " + k.format() + " is not abelian");

  const std::size_t s = xs.size();
  IntMatrix rel(0, s);
  for (const auto& y : k.igs()) rel.append_row(*h.coordinates(y));
  for (std::size_t i = 0; i < s; ++i) {
    const int d = xs[i].depth();
    if (!g->is_finite_gen(d)) continue;
    Integer r = g->rel_order(d) / xs[i].leading_exponent();
    std::vector<Integer> v = *h.coordinates(g->power(xs[i], r));
    v[i] -= r;
    rel.append_row(v);
  }

  LayerQuotient lq;
  lq.top_ = h;
  lq.bottom_ = k;
  if (s == 0) {
    lq.q_ = IntMatrix(0, 0);
    return lq;
  }
  if (rel.rows() == 0) rel = IntMatrix(0, s);
  SmithForm sf = rel.rows() ? smith_normal_form(rel) : SmithForm{IntMatrix(0, s), IntMatrix(0, 0), IntMatrix::identity(s), IntMatrix::identity(s)};
  lq.q_ = sf.q;
  std::size_t nonzero = 0;
  const std::size_t diag = std::min(rel.rows(), s);
  for (std::size_t i = 0; i < diag; ++i) {
    const Integer& v = sf.d(i, i);
    if (v == 0) continue;
    ++nonzero;
    if (v != 1) {
      lq.kept_.push_back(i);
      lq.inv_.divisors.push_back(v);
    }
  }
  for (std::size_t i = nonzero; i < s; ++i) {
    lq.kept_.push_back(i);
    lq.inv_.divisors.push_back(0);
  }
  for (std::size_t pos : lq.kept_) {
    std::vector<Integer> v = sf.q_inv.row(pos);
    PcElement r;
    for (std::size_t i = 0; i < s; ++i)
      if (v[i] != 0) r = g->multiply(r, g->power(xs[i], v[i]));
    lq.lifts_.push_back(std::move(r));
  }
  return lq;
}

/// H intersected with G_from (generators of index >= from).
inline Subgroup intersect_tail(const Subgroup& h, int from) {
  std::vector<PcElement> out;
  for (const auto& x : h.igs())
    if (x.depth() >= from) out.push_back(x);
  return Subgroup(h.group(), std::move(out));
}

}  // namespace lcs
