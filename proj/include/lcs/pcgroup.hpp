#pragma once

#include "lcs/errors.hpp"
#include "lcs/integer.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace lcs {

struct Syllable {
  int gen;
  Integer exp;
  friend bool operator==(const Syllable&, const Syllable&) = default;
};

/// Group element in collected normal form g_{i1}^{e1} ... g_{ik}^{ek}, i1 < ... < ik,
/// every e nonzero and reduced into [0, rel_order) for finite-order generators.
class PcElement {
 public:
  PcElement() = default;
  explicit PcElement(std::vector<Syllable> s) : syl_(std::move(s)) {}

  static PcElement generator(int g, Integer e = 1) {
    PcElement x;
    if (e != 0) x.syl_.push_back({g, std::move(e)});
    return x;
  }

  bool is_identity() const { return syl_.empty(); }
  /// Index of the first generator with nonzero exponent; -1 for the identity.
  int depth() const { return syl_.empty() ? -1 : syl_.front().gen; }
  const Integer& leading_exponent() const { return syl_.front().exp; }
  const std::vector<Syllable>& syllables() const { return syl_; }

  Integer exponent(int gen) const {
    for (const auto& s : syl_)
      if (s.gen == gen) return s.exp;
    return 0;
  }

  /// Dense exponent vector of length n.
  std::vector<Integer> exponents(std::size_t n) const {
    std::vector<Integer> out(n);
    for (const auto& s : syl_) out[static_cast<std::size_t>(s.gen)] = s.exp;
    return out;
  }

  static PcElement from_exponents(const std::vector<Integer>& v, int offset = 0) {
    PcElement x;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] != 0) x.syl_.push_back({static_cast<int>(i) + offset, v[i]});
    return x;
  }

  /// Same element with every generator index shifted by `delta`.
  PcElement shifted(int delta) const {
    PcElement x = *this;
    for (auto& s : x.syl_) s.gen += delta;
    return x;
  }

  friend bool operator==(const PcElement&, const PcElement&) = default;
  friend bool operator<(const PcElement& a, const PcElement& b) {
    const auto& x = a.syl_;
    const auto& y = b.syl_;
    for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
      if (x[i].gen != y[i].gen) return x[i].gen < y[i].gen;
      if (x[i].exp != y[i].exp) return x[i].exp < y[i].exp;
    }
    return x.size() < y.size();
  }

 private:
  std::vector<Syllable> syl_;
};

/// Raw polycyclic presentation data. Conjugation relations are stored in the
/// right-action convention: conj[{j,i}] = g_i^-1 g_j g_i (i < j), and
/// conj_inv[{j,i}] = g_i g_j g_i^-1. Missing entries mean g_i and g_j commute.
struct PcPresentation {
  std::vector<std::string> names;
  std::vector<int> weights;
  bool weights_declared = false;
  std::vector<Integer> rel_orders;  ///< 0 = infinite
  std::map<int, PcElement> power_rhs;
  std::map<std::pair<int, int>, PcElement> conj;
  std::map<std::pair<int, int>, PcElement> conj_inv;
  /// Optional commutator definitions g = [g_l, g_r] (used to extend maps).
  std::vector<std::optional<std::pair<int, int>>> definitions;

  int size() const { return static_cast<int>(names.size()); }

  int add_generator(std::string name, Integer order = 0, int weight = 1) {
    names.push_back(std::move(name));
    rel_orders.push_back(std::move(order));
    weights.push_back(weight);
    definitions.emplace_back();
    return size() - 1;
  }

  std::optional<int> find(const std::string& name) const {
    for (int i = 0; i < size(); ++i)
      if (names[static_cast<std::size_t>(i)] == name) return i;
    return std::nullopt;
  }
};

/// Immutable group defined by a complete polycyclic presentation, with the
/// collector. Shared between threads through std::shared_ptr<const PcGroup>.
class PcGroup : public std::enable_shared_from_this<PcGroup> {
 public:
  static constexpr std::uint64_t kDefaultStepBudget = 10'000'000;

  /// Every infinite-order generator must have its inverse conjugation relations;
  /// use complete_presentation() (builder.hpp) to derive missing ones.
  static std::shared_ptr<const PcGroup> create(PcPresentation pres) {
    return std::shared_ptr<const PcGroup>(new PcGroup(std::move(pres), false));
  }

  /// Creates a group whose inverse conjugation tables may still be partial.
  /// Only for presentation completion: products inside G_{i+1} are valid once
  /// all relations among generators > i are present.
  static std::shared_ptr<PcGroup> create_partial(PcPresentation pres) {
    return std::shared_ptr<PcGroup>(new PcGroup(std::move(pres), true));
  }

  int size() const { return n_; }
  const PcPresentation& presentation() const { return pres_; }
  const std::string& name(int g) const { return pres_.names[static_cast<std::size_t>(g)]; }
  const Integer& rel_order(int g) const { return pres_.rel_orders[static_cast<std::size_t>(g)]; }
  bool is_finite_gen(int g) const { return rel_order(g) != 0; }
  const PcElement& power_relation(int g) const { return power_[static_cast<std::size_t>(g)]; }
  /// g_j^{g_i} for i < j.
  const PcElement& conj_relation(int j, int i) const { return conj_[idx(i, j)]; }
  /// g_j^{g_i^-1} for i < j (infinite-order g_i only).
  const PcElement& conj_inv_relation(int j, int i) const { return conj_inv_[idx(i, j)]; }

  std::uint64_t step_budget() const { return budget_limit_; }
  void set_step_budget(std::uint64_t b) { budget_limit_ = b; }

  PcElement identity() const { return {}; }
  PcElement gen(int g) const {
    check_gen(g);
    return PcElement::generator(g, 1);
  }
  std::vector<PcElement> generators() const {
    std::vector<PcElement> out;
    for (int g = 0; g < n_; ++g) out.push_back(gen(g));
    return out;
  }

  /// Collects an arbitrary word (list of generator/exponent pairs, any order).
  PcElement collect(const std::vector<std::pair<int, Integer>>& word) const {
    Budget b(budget_limit_);
    Dense d(static_cast<std::size_t>(n_));
    for (const auto& [g, e] : word) {
      check_gen(g);
      mul_gen(d, g, e, b);
    }
    return to_element(d, 0);
  }

  PcElement multiply(const PcElement& x, const PcElement& y) const {
    Budget b(budget_limit_);
    return mul(x, y, b);
  }
  PcElement invert(const PcElement& x) const {
    Budget b(budget_limit_);
    return inv(x, b);
  }
  PcElement power(const PcElement& x, const Integer& k) const {
    Budget b(budget_limit_);
    return pow(x, k, b);
  }
  /// [x, y] = x y x^-1 y^-1
  PcElement commutator(const PcElement& x, const PcElement& y) const {
    Budget b(budget_limit_);
    PcElement xy = mul(x, y, b);
    PcElement yx = mul(y, x, b);
    return mul(xy, inv(yx, b), b);
  }
  /// x^y = y^-1 x y
  PcElement conjugate(const PcElement& x, const PcElement& y) const {
    Budget b(budget_limit_);
    return mul(inv(y, b), mul(x, y, b), b);
  }
  /// ^y x = y x y^-1
  PcElement conjugate_left(const PcElement& x, const PcElement& y) const {
    Budget b(budget_limit_);
    return mul(mul(y, x, b), inv(y, b), b);
  }
  PcElement product(std::initializer_list<PcElement> xs) const {
    Budget b(budget_limit_);
    PcElement r;
    for (const auto& x : xs) r = mul(r, x, b);
    return r;
  }

  /// Whether x is a valid normal form for this presentation.
  bool is_normal(const PcElement& x) const {
    int last = -1;
    for (const auto& s : x.syllables()) {
      if (s.gen <= last || s.gen >= n_ || s.exp == 0) return false;
      if (is_finite_gen(s.gen) && (s.exp < 0 || s.exp >= rel_order(s.gen))) return false;
      last = s.gen;
    }
    return true;
  }

  std::string format(const PcElement& x) const {
    if (x.is_identity()) return "1";
    std::ostringstream os;
    bool first = true;
    for (const auto& s : x.syllables()) {
      if (!first) os << ' ';
      first = false;
      os << name(s.gen);
      if (s.exp != 1) os << '^' << s.exp;
    }
    return os.str();
  }

  /// Fills an inverse conjugation table entry (presentation completion only).
  void set_conj_inv_(int j, int i, PcElement v) {
    conj_inv_[idx(i, j)] = std::move(v);
    pres_.conj_inv[{j, i}] = conj_inv_[idx(i, j)];
    auto_cache_.clear();
  }

 private:
  using Dense = std::vector<Integer>;

  struct Budget {
    explicit Budget(std::uint64_t limit) : limit(limit) {}
    std::uint64_t limit;
    std::uint64_t used = 0;
    void tick() {
      if (++used > limit)
        throw BudgetExceeded("collection exceeded " + std::to_string(limit) +
                             " rewrite steps (inconsistent presentation?)");
    }
  };

  PcGroup(PcPresentation pres, bool partial) : pres_(std::move(pres)) {
    n_ = pres_.size();
    if (pres_.weights.size() != static_cast<std::size_t>(n_)) pres_.weights.assign(static_cast<std::size_t>(n_), 1);
    if (pres_.definitions.size() != static_cast<std::size_t>(n_)) pres_.definitions.resize(static_cast<std::size_t>(n_));
    if (pres_.rel_orders.size() != static_cast<std::size_t>(n_))
      throw InvalidPresentation("relative order list has wrong length");
    power_.assign(static_cast<std::size_t>(n_), PcElement{});
    conj_.assign(static_cast<std::size_t>(n_ * n_), PcElement{});
    conj_inv_.assign(static_cast<std::size_t>(n_ * n_), PcElement{});
    for (int i = 0; i < n_; ++i) {
      if (rel_order(i) < 0) throw InvalidPresentation("negative relative order for " + name(i));
      if (rel_order(i) == 1) throw InvalidPresentation("relative order 1 for " + name(i));
    }
    for (const auto& [g, w] : pres_.power_rhs) {
      check_gen(g);
      if (!is_finite_gen(g))
        throw InvalidPresentation("power relation given for infinite-order generator " + name(g));
      require_tail(w, g + 1, "power relation of " + name(g));
      power_[static_cast<std::size_t>(g)] = w;
    }
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j) {
        conj_[idx(i, j)] = PcElement::generator(j);
        conj_inv_[idx(i, j)] = PcElement::generator(j);
      }
    for (const auto& [key, w] : pres_.conj) {
      auto [j, i] = key;
      check_pair(j, i);
      require_tail(w, i + 1, "conjugate " + name(j) + "^" + name(i));
      conj_[idx(i, j)] = w;
    }
    for (const auto& [key, w] : pres_.conj_inv) {
      auto [j, i] = key;
      check_pair(j, i);
      require_tail(w, i + 1, "conjugate " + name(j) + "^(" + name(i) + "^-1)");
      conj_inv_[idx(i, j)] = w;
    }
    if (!partial) {
      for (int i = 0; i < n_; ++i) {
        if (is_finite_gen(i)) continue;
        for (int j = i + 1; j < n_; ++j)
          if (pres_.conj.count({j, i}) && !pres_.conj_inv.count({j, i}))
            throw InvalidPresentation("missing inverse conjugation relation for " + name(j) + " by " + name(i));
      }
    }
  }

  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i * n_ + j); }

  void check_gen(int g) const {
    if (g < 0 || g >= n_) throw UnknownGenerator("generator index " + std::to_string(g) + " out of range");
  }
  void check_pair(int j, int i) const {
    check_gen(i);
    check_gen(j);
    if (!(i < j)) throw InvalidPresentation("conjugation relation needs i < j");
  }
  void require_tail(const PcElement& w, int from, const std::string& what) const {
    if (!is_normal(w)) throw InvalidPresentation(what + " is not in normal form");
    if (!w.is_identity() && w.depth() < from)
      throw InvalidPresentation(what + " mentions a generator of too small an index");
  }

  PcElement to_element(const Dense& d, int from) const {
    std::vector<Syllable> s;
    for (int g = from; g < n_; ++g)
      if (d[static_cast<std::size_t>(g)] != 0) s.push_back({g, d[static_cast<std::size_t>(g)]});
    return PcElement(std::move(s));
  }

  PcElement mul(const PcElement& x, const PcElement& y, Budget& b) const {
    if (y.is_identity()) return x;
    if (x.is_identity() && is_normal(y)) return y;
    // Fast path: every syllable of y sits beyond x's support.
    if (!x.is_identity() && y.depth() > x.syllables().back().gen && is_normal(y)) {
      std::vector<Syllable> s = x.syllables();
      s.insert(s.end(), y.syllables().begin(), y.syllables().end());
      return PcElement(std::move(s));
    }
    Dense d = x.exponents(static_cast<std::size_t>(n_));
    for (const auto& s : y.syllables()) mul_gen(d, s.gen, s.exp, b);
    return to_element(d, 0);
  }

  PcElement inv(const PcElement& x, Budget& b) const {
    Dense d(static_cast<std::size_t>(n_));
    const auto& s = x.syllables();
    for (auto it = s.rbegin(); it != s.rend(); ++it) mul_gen(d, it->gen, -it->exp, b);
    return to_element(d, 0);
  }

  PcElement pow(const PcElement& x, Integer k, Budget& b) const {
    if (k == 0 || x.is_identity()) return {};
    PcElement base = x;
    if (k < 0) {
      base = inv(x, b);
      k = -k;
    }
    if (base.syllables().size() == 1) {
      const auto& s = base.syllables().front();
      if (!is_finite_gen(s.gen)) return PcElement::generator(s.gen, s.exp * k);
    }
    PcElement acc;
    while (k > 0) {
      if (k & 1) acc = mul(acc, base, b);
      k >>= 1;
      if (k > 0) base = mul(base, base, b);
    }
    return acc;
  }

  /// d := d * g_i^e. Collection from the left: the uncollected syllable g_i^e
  /// moves past the collected tail beyond i, which is conjugated by g_i^e.
  void mul_gen(Dense& d, int i, const Integer& e, Budget& b) const {
    if (e == 0) return;
    b.tick();
    const auto ui = static_cast<std::size_t>(i);
    PcElement tail = to_element(d, i + 1);
    for (std::size_t g = ui + 1; g < d.size(); ++g) d[g] = 0;

    PcElement rest;
    if (is_finite_gen(i)) {
      const Integer& o = rel_order(i);
      Integer e_mod = floor_mod(e, o);
      Integer q = floor_div(e, o);
      PcElement t = conj_by_power(tail, i, e_mod, b);
      Integer s = d[ui] + e_mod;
      PcElement head;
      if (s >= o) {
        s -= o;
        head = power_[ui];
      }
      d[ui] = s;
      rest = mul(head, t, b);
      if (q != 0) rest = mul(rest, pow(power_[ui], q, b), b);
    } else {
      rest = conj_by_power(tail, i, e, b);
      d[ui] += e;
    }
    for (const auto& syl : rest.syllables()) d[static_cast<std::size_t>(syl.gen)] = syl.exp;
  }

  using Images = std::shared_ptr<const std::vector<PcElement>>;

  /// Images of g_{i+1..n} under conjugation by g_i^{sign * 2^k}.
  Images automorphism_power(int i, int sign, int k, Budget& b) const {
    const auto key = std::make_tuple(i, sign, k);
    {
      std::lock_guard<std::mutex> lock(cache_mutex_);
      auto it = auto_cache_.find(key);
      if (it != auto_cache_.end()) return it->second;
    }
    auto out = std::make_shared<std::vector<PcElement>>(static_cast<std::size_t>(n_));
    if (k == 0) {
      for (int j = i + 1; j < n_; ++j)
        (*out)[static_cast<std::size_t>(j)] = sign > 0 ? conj_[idx(i, j)] : conj_inv_[idx(i, j)];
    } else {
      Images half = automorphism_power(i, sign, k - 1, b);
      for (int j = i + 1; j < n_; ++j)
        (*out)[static_cast<std::size_t>(j)] = apply(*half, (*half)[static_cast<std::size_t>(j)], b);
    }
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto [it, inserted] = auto_cache_.emplace(key, std::move(out));
    return it->second;
  }

  PcElement apply(const std::vector<PcElement>& images, const PcElement& t, Budget& b) const {
    PcElement r;
    for (const auto& s : t.syllables()) r = mul(r, pow(images[static_cast<std::size_t>(s.gen)], s.exp, b), b);
    return r;
  }

  /// t^{g_i^e} for t supported beyond i.
  PcElement conj_by_power(const PcElement& t, int i, Integer e, Budget& b) const {
    if (t.is_identity() || e == 0) return t;
    int sign = 1;
    if (e < 0) {
      sign = -1;
      e = -e;
    }
    PcElement r = t;
    int k = 0;
    while (e > 0) {
      if (e & 1) r = apply(*automorphism_power(i, sign, k, b), r, b);
      e >>= 1;
      ++k;
    }
    return r;
  }

  PcPresentation pres_;
  int n_ = 0;
  std::vector<PcElement> power_;
  std::vector<PcElement> conj_;
  std::vector<PcElement> conj_inv_;
  std::uint64_t budget_limit_ = kDefaultStepBudget;
  mutable std::mutex cache_mutex_;
  mutable std::map<std::tuple<int, int, int>, Images> auto_cache_;
};

using GroupPtr = std::shared_ptr<const PcGroup>;

/// One failed overlap: the two evaluation orders of `description` disagree.
struct ConsistencyViolation {
  std::string description;
  PcElement left;
  PcElement right;
};

/// Overlap test of the presentation: empty iff it is consistent.
inline std::vector<ConsistencyViolation> consistency_check(const PcGroup& g) {
  std::vector<ConsistencyViolation> out;
  const int n = g.size();
  auto note = [&](const std::string& what, const PcElement& l, const PcElement& r) {
    if (!(l == r)) out.push_back({what, l, r});
  };
  auto G = [&](int i) { return g.gen(i); };
  try {
    for (int k = n - 1; k >= 0; --k)
      for (int j = k - 1; j >= 0; --j)
        for (int i = j - 1; i >= 0; --i) {
          PcElement l = g.multiply(g.multiply(G(k), G(j)), G(i));
          PcElement r = g.multiply(G(k), g.multiply(G(j), G(i)));
          note("(" + g.name(k) + " " + g.name(j) + ") " + g.name(i), l, r);
        }
    for (int j = 0; j < n; ++j) {
      if (!g.is_finite_gen(j)) continue;
      const Integer& o = g.rel_order(j);
      for (int i = 0; i < j; ++i) {
        // (g_j^o) g_i = g_j^(o-1) (g_j g_i)
        PcElement l = g.multiply(g.power_relation(j), G(i));
        PcElement r = g.multiply(g.power(G(j), o - 1), g.multiply(G(j), G(i)));
        note(g.name(j) + "^" + to_string(o) + " " + g.name(i), l, r);
      }
    }
    for (int i = 0; i < n; ++i) {
      if (!g.is_finite_gen(i)) continue;
      const Integer& o = g.rel_order(i);
      for (int j = i + 1; j < n; ++j) {
        // g_j (g_i^o) = (g_j g_i) g_i^(o-1)
        PcElement l = g.multiply(G(j), g.power_relation(i));
        PcElement r = g.multiply(g.multiply(G(j), G(i)), g.power(G(i), o - 1));
        note(g.name(j) + " " + g.name(i) + "^" + to_string(o), l, r);
      }
      // g_i (g_i^o) = (g_i^o) g_i
      note(g.name(i) + "^" + to_string(o + 1), g.multiply(G(i), g.power_relation(i)),
           g.multiply(g.power_relation(i), G(i)));
    }
    for (int i = 0; i < n; ++i) {
      if (g.is_finite_gen(i)) continue;
      for (int j = i + 1; j < n; ++j) {
        // g_j = (g_j g_i^-1) g_i
        PcElement l = g.multiply(g.multiply(G(j), g.invert(G(i))), G(i));
        note(g.name(j) + " " + g.name(i) + "^-1 " + g.name(i), l, G(j));
        PcElement r = g.multiply(g.multiply(G(j), G(i)), g.invert(G(i)));
        note(g.name(j) + " " + g.name(i) + " " + g.name(i) + "^-1", r, G(j));
      }
    }
  } catch (const BudgetExceeded& e) {
    out.push_back({std::string("collection diverged: ") + e.what(), {}, {}});
  }
  return out;
}

/// Presentation of G x H: generators of G, then generators of H.
inline PcPresentation direct_product_presentation(const PcGroup& g, const PcGroup& h,
                                                  const std::string& suffix_g = "",
                                                  const std::string& suffix_h = "'") {
  PcPresentation p;
  const int m = g.size();
  for (int i = 0; i < m; ++i) p.add_generator(g.name(i) + suffix_g, g.rel_order(i), g.presentation().weights[static_cast<std::size_t>(i)]);
  for (int i = 0; i < h.size(); ++i) p.add_generator(h.name(i) + suffix_h, h.rel_order(i), h.presentation().weights[static_cast<std::size_t>(i)]);
  auto copy = [&](const PcGroup& src, int off) {
    for (int i = 0; i < src.size(); ++i) {
      if (src.is_finite_gen(i) && !src.power_relation(i).is_identity())
        p.power_rhs[i + off] = src.power_relation(i).shifted(off);
      for (int j = i + 1; j < src.size(); ++j) {
        const PcElement& c = src.conj_relation(j, i);
        if (!(c == PcElement::generator(j))) p.conj[{j + off, i + off}] = c.shifted(off);
        if (!src.is_finite_gen(i)) {
          const PcElement& ci = src.conj_inv_relation(j, i);
          if (!(ci == PcElement::generator(j))) p.conj_inv[{j + off, i + off}] = ci.shifted(off);
        }
      }
      const auto& def = src.presentation().definitions[static_cast<std::size_t>(i)];
      if (def) p.definitions[static_cast<std::size_t>(i + off)] = std::make_pair(def->first + off, def->second + off);
    }
  };
  copy(g, 0);
  copy(h, m);
  return p;
}

/// Sub-presentation on generators from..n-1 (the subgroup G_from), indices shifted to 0.
inline PcPresentation tail_presentation(const PcGroup& g, int from) {
  PcPresentation p;
  for (int i = from; i < g.size(); ++i) p.add_generator(g.name(i), g.rel_order(i), g.presentation().weights[static_cast<std::size_t>(i)]);
  for (int i = from; i < g.size(); ++i) {
    if (g.is_finite_gen(i) && !g.power_relation(i).is_identity())
      p.power_rhs[i - from] = g.power_relation(i).shifted(-from);
    for (int j = i + 1; j < g.size(); ++j) {
      const PcElement& c = g.conj_relation(j, i);
      if (!(c == PcElement::generator(j))) p.conj[{j - from, i - from}] = c.shifted(-from);
      if (!g.is_finite_gen(i)) {
        const PcElement& ci = g.conj_inv_relation(j, i);
        if (!(ci == PcElement::generator(j))) p.conj_inv[{j - from, i - from}] = ci.shifted(-from);
      }
    }
  }
  return p;
}

}  // namespace lcs
