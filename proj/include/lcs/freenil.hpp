#pragma once

#include "lcs/errors.hpp"
#include "lcs/intlinalg.hpp"
#include "lcs/pcgroup.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace lcs {

/// Free-group word over generators 0..k-1 as (generator, exponent) pairs.
using FreeWord = std::vector<std::pair<int, Integer>>;

/// Leaf (generator) or bracket [left, right] of two earlier trees.
struct HallTree {
  int leaf = -1;
  int left = -1;
  int right = -1;
  int degree = 1;
  bool is_leaf() const { return leaf >= 0; }
};

/// Hall set on k letters up to degree c, ordered by degree and then by
/// generation order. [L, R] belongs to the set iff L < R and, when R = [R1, R2],
/// R1 <= L.
class HallBasis {
 public:
  HallBasis(int k, int c) : k_(k), c_(c) {
    if (k < 1 || c < 1) throw Error("Hall basis needs rank and degree at least 1");
    by_degree_.assign(static_cast<std::size_t>(c) + 1, {});
    for (int i = 0; i < k; ++i) push({i, -1, -1, 1});
    for (int d = 2; d <= c; ++d) {
      const int known = static_cast<int>(trees_.size());
      for (int l = 0; l < known; ++l)
        for (int r = l + 1; r < known; ++r) {
          const HallTree& L = trees_[static_cast<std::size_t>(l)];
          const HallTree& R = trees_[static_cast<std::size_t>(r)];
          if (L.degree + R.degree != d) continue;
          if (!R.is_leaf() && R.left > l) continue;
          push({-1, l, r, d});
        }
    }
  }

  int rank() const { return k_; }
  int max_degree() const { return c_; }
  int size() const { return static_cast<int>(trees_.size()); }
  const HallTree& tree(int t) const { return trees_[static_cast<std::size_t>(t)]; }
  const std::vector<HallTree>& trees() const { return trees_; }
  const std::vector<int>& of_degree(int d) const { return by_degree_[static_cast<std::size_t>(d)]; }

  std::optional<int> find(int left, int right) const {
    auto it = index_.find({left, right});
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::string format(int t, const std::string& prefix = "x") const {
    const HallTree& h = tree(t);
    if (h.is_leaf()) return prefix + std::to_string(h.leaf + 1);
    return "[" + format(h.left, prefix) + "," + format(h.right, prefix) + "]";
  }

 private:
  void push(HallTree t) {
    const int id = static_cast<int>(trees_.size());
    if (!t.is_leaf()) index_[{t.left, t.right}] = id;
    by_degree_[static_cast<std::size_t>(t.degree)].push_back(id);
    trees_.push_back(t);
  }

  int k_, c_;
  std::vector<HallTree> trees_;
  std::vector<std::vector<int>> by_degree_;
  std::map<std::pair<int, int>, int> index_;
};

/// Per-degree Hall trees of the free Lie ring on k generators up to degree c.
inline std::vector<std::vector<int>> hall_basis(int k, int c) {
  HallBasis b(k, c);
  std::vector<std::vector<int>> out;
  for (int d = 1; d <= c; ++d) out.push_back(b.of_degree(d));
  return out;
}

inline int mobius(int n) {
  int m = 1;
  for (int p = 2; p * p <= n; ++p)
    if (n % p == 0) {
      n /= p;
      if (n % p == 0) return 0;
      m = -m;
    }
  if (n > 1) m = -m;
  return m;
}

/// Rank of the degree-n part of the free Lie ring on k generators:
/// (1/n) sum_{d | n} mu(d) k^{n/d}.
inline Integer witt_rank(int k, int n) {
  if (k < 1 || n < 1) throw Error("witt_rank needs k, n >= 1");
  Integer s = 0;
  for (int d = 1; d <= n; ++d)
    if (n % d == 0) {
      Integer kp = 1;
      for (int i = 0; i < n / d; ++i) kp *= k;
      s += mobius(d) * kp;
    }
  return s / n;
}

/// Integer combination of Hall trees (all of one degree).
using FreeLieElement = std::map<int, Integer>;

namespace detail {

inline void add_scaled(FreeLieElement& acc, const FreeLieElement& x, const Integer& k) {
  for (const auto& [t, v] : x) {
    Integer& slot = acc[t];
    slot += k * v;
    if (slot == 0) acc.erase(t);
  }
}

inline FreeLieElement bracket_trees(const HallBasis& b, int s, int t) {
  if (s == t) return {};
  if (s > t) {
    FreeLieElement out;
    add_scaled(out, bracket_trees(b, t, s), -1);
    return out;
  }
  const HallTree& T = b.tree(t);
  if (b.tree(s).degree + T.degree > b.max_degree())
    throw Error("bracket degree exceeds the Hall basis truncation");
  if (T.is_leaf() || T.left <= s) {
    auto id = b.find(s, t);
    if (!id) throw Error("internal: Hall tree [" + b.format(s) + "," + b.format(t) + "] missing");
    return {{*id, 1}};
  }
  // [s, [t1, t2]] = [[s, t1], t2] + [t1, [s, t2]]
  FreeLieElement out;
  for (const auto& [u, cu] : bracket_trees(b, s, T.left)) add_scaled(out, bracket_trees(b, u, T.right), cu);
  for (const auto& [u, cu] : bracket_trees(b, s, T.right)) add_scaled(out, bracket_trees(b, T.left, u), cu);
  return out;
}

}  // namespace detail

/// Bracket of two Lie elements, rewritten into the Hall basis by antisymmetry
/// and the Jacobi identity.
inline FreeLieElement lie_bracket(const HallBasis& b, const FreeLieElement& x, const FreeLieElement& y) {
  FreeLieElement out;
  for (const auto& [s, cs] : x)
    for (const auto& [t, ct] : y) detail::add_scaled(out, detail::bracket_trees(b, s, t), cs * ct);
  return out;
}

/// Truncated power series in non-commuting variables X_1..X_k: one dense
/// coefficient array per degree d (k^d monomials, word w_1..w_d at index
/// sum w_i k^{d-i}).
class MagnusSeries {
 public:
  static constexpr int kMaxDegree = 6;

  MagnusSeries(int k, int c) : k_(k), c_(c) {
    if (c > kMaxDegree) throw Error("Magnus series support degree at most " + std::to_string(kMaxDegree));
    if (k < 1 || c < 0) throw Error("invalid Magnus series shape");
    std::size_t len = 1;
    for (int d = 0; d <= c; ++d) {
      deg_.emplace_back(len);
      len *= static_cast<std::size_t>(k);
    }
  }

  static MagnusSeries one(int k, int c) {
    MagnusSeries s(k, c);
    s.deg_[0][0] = 1;
    return s;
  }

  /// 1 + X_i
  static MagnusSeries generator(int k, int c, int i) {
    MagnusSeries s = one(k, c);
    if (c >= 1) s.deg_[1][static_cast<std::size_t>(i)] = 1;
    return s;
  }

  int rank() const { return k_; }
  int truncation() const { return c_; }
  const std::vector<Integer>& degree(int d) const { return deg_[static_cast<std::size_t>(d)]; }
  std::vector<Integer>& degree(int d) { return deg_[static_cast<std::size_t>(d)]; }

  friend MagnusSeries operator*(const MagnusSeries& x, const MagnusSeries& y) {
    MagnusSeries out(x.k_, x.c_);
    for (int a = 0; a <= x.c_; ++a) {
      const auto& xa = x.deg_[static_cast<std::size_t>(a)];
      for (int bdeg = 0; a + bdeg <= x.c_; ++bdeg) {
        const auto& yb = y.deg_[static_cast<std::size_t>(bdeg)];
        auto& o = out.deg_[static_cast<std::size_t>(a + bdeg)];
        const std::size_t span = yb.size();
        for (std::size_t i = 0; i < xa.size(); ++i) {
          if (xa[i] == 0) continue;
          for (std::size_t j = 0; j < span; ++j)
            if (yb[j] != 0) o[i * span + j] += xa[i] * yb[j];
        }
      }
    }
    return out;
  }

  /// Inverse of a series with constant term 1: sum_m (1 - s)^m.
  MagnusSeries inverse() const {
    if (deg_[0][0] != 1) throw Error("Magnus series inverse needs constant term 1");
    MagnusSeries minus_y(k_, c_);
    for (int d = 1; d <= c_; ++d)
      for (std::size_t i = 0; i < deg_[static_cast<std::size_t>(d)].size(); ++i)
        minus_y.deg_[static_cast<std::size_t>(d)][i] = -deg_[static_cast<std::size_t>(d)][i];
    MagnusSeries acc = one(k_, c_), term = one(k_, c_);
    for (int m = 1; m <= c_; ++m) {
      term = term * minus_y;
      for (int d = 1; d <= c_; ++d)
        for (std::size_t i = 0; i < term.deg_[static_cast<std::size_t>(d)].size(); ++i)
          acc.deg_[static_cast<std::size_t>(d)][i] += term.deg_[static_cast<std::size_t>(d)][i];
    }
    return acc;
  }

  MagnusSeries power(Integer e) const {
    MagnusSeries base = e < 0 ? inverse() : *this;
    if (e < 0) e = -e;
    MagnusSeries acc = one(k_, c_);
    while (e > 0) {
      if (e & 1) acc = acc * base;
      e >>= 1;
      if (e > 0) base = base * base;
    }
    return acc;
  }

  /// Least degree d >= 1 with a nonzero coefficient, or c + 1.
  int depth() const {
    for (int d = 1; d <= c_; ++d)
      for (const auto& v : deg_[static_cast<std::size_t>(d)])
        if (v != 0) return d;
    return c_ + 1;
  }

  bool is_one() const { return deg_[0][0] == 1 && depth() == c_ + 1; }

  friend bool operator==(const MagnusSeries& a, const MagnusSeries& b) = default;

 private:
  int k_, c_;
  std::vector<std::vector<Integer>> deg_;
};

/// Multiplicative expansion x_i -> 1 + X_i truncated at degree c.
inline MagnusSeries magnus_expand(const FreeWord& w, int k, int c) {
  MagnusSeries s = MagnusSeries::one(k, c);
  for (const auto& [g, e] : w) {
    if (g < 0 || g >= k) throw UnknownGenerator("free generator index " + std::to_string(g));
    s = s * MagnusSeries::generator(k, c, g).power(e);
  }
  return s;
}

/// Least n with a nonzero degree-n term of magnus_expand(w) - 1; c + 1 means ">= c + 1".
inline int magnus_depth(const FreeWord& w, int k, int c) { return magnus_expand(w, k, c).depth(); }

/// Degree-d coefficient array of the Lie polynomial of a Hall tree ([u, v] = uv - vu).
inline std::vector<Integer> lie_polynomial(const HallBasis& b, int t) {
  const int k = b.rank();
  const HallTree& h = b.tree(t);
  if (h.is_leaf()) {
    std::vector<Integer> v(static_cast<std::size_t>(k));
    v[static_cast<std::size_t>(h.leaf)] = 1;
    return v;
  }
  auto l = lie_polynomial(b, h.left);
  auto r = lie_polynomial(b, h.right);
  std::vector<Integer> out(l.size() * r.size());
  for (std::size_t i = 0; i < l.size(); ++i)
    for (std::size_t j = 0; j < r.size(); ++j) {
      out[i * r.size() + j] += l[i] * r[j];
      out[j * l.size() + i] -= r[j] * l[i];
    }
  return out;
}

inline std::vector<Integer> lie_polynomial(const HallBasis& b, const FreeLieElement& x, int degree) {
  std::size_t len = 1;
  for (int i = 0; i < degree; ++i) len *= static_cast<std::size_t>(b.rank());
  std::vector<Integer> out(len);
  for (const auto& [t, c] : x) {
    if (b.tree(t).degree != degree) throw Error("Lie element is not homogeneous of degree " + std::to_string(degree));
    auto p = lie_polynomial(b, t);
    for (std::size_t i = 0; i < len; ++i) out[i] += c * p[i];
  }
  return out;
}

/// Free nilpotent group F_k / gamma_{c+1}(F_k) with its Magnus data.
class FreeNilpotent {
 public:
  FreeNilpotent(int k, int c, std::string prefix = "g") : basis_(k, c), k_(k), c_(c) {
    const int n = basis_.size();
    for (int t = 0; t < n; ++t) {
      const HallTree& h = basis_.tree(t);
      MagnusSeries m = h.is_leaf() ? MagnusSeries::generator(k, c, h.leaf)
                                   : commutator(magnus_[static_cast<std::size_t>(h.left)],
                                                magnus_inv_[static_cast<std::size_t>(h.left)],
                                                magnus_[static_cast<std::size_t>(h.right)],
                                                magnus_inv_[static_cast<std::size_t>(h.right)]);
      magnus_inv_.push_back(m.inverse());
      magnus_.push_back(std::move(m));
    }
    for (int d = 1; d <= c; ++d) {
      IntMatrix m(0, 1);
      const auto& ts = basis_.of_degree(d);
      if (!ts.empty()) {
        m = IntMatrix(0, lie_polynomial(basis_, ts.front()).size());
        for (int t : ts) m.append_row(lie_polynomial(basis_, t));
      }
      solvers_.emplace_back(m);
    }

    PcPresentation p;
    p.weights_declared = true;
    for (int t = 0; t < n; ++t) {
      p.add_generator(prefix + std::to_string(t + 1), 0, basis_.tree(t).degree);
      const HallTree& h = basis_.tree(t);
      if (!h.is_leaf()) p.definitions[static_cast<std::size_t>(t)] = std::make_pair(h.left, h.right);
    }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        if (basis_.tree(i).degree + basis_.tree(j).degree > c) continue;
        MagnusSeries conj = magnus_inv_[static_cast<std::size_t>(i)] * magnus_[static_cast<std::size_t>(j)] *
                            magnus_[static_cast<std::size_t>(i)];
        PcElement w = peel(conj);
        if (!(w == PcElement::generator(j))) p.conj[{j, i}] = w;
        MagnusSeries conj_inv = magnus_[static_cast<std::size_t>(i)] * magnus_[static_cast<std::size_t>(j)] *
                                magnus_inv_[static_cast<std::size_t>(i)];
        PcElement v = peel(conj_inv);
        if (!(v == PcElement::generator(j))) p.conj_inv[{j, i}] = v;
      }
    group_ = PcGroup::create(std::move(p));
  }

  const HallBasis& basis() const { return basis_; }
  const GroupPtr& group() const { return group_; }
  int rank() const { return k_; }
  int class_bound() const { return c_; }

  /// Magnus image of a pc element.
  MagnusSeries magnus(const PcElement& x) const {
    MagnusSeries s = MagnusSeries::one(k_, c_);
    for (const auto& syl : x.syllables())
      s = s * (syl.exp == 1 ? magnus_[static_cast<std::size_t>(syl.gen)]
                            : magnus_[static_cast<std::size_t>(syl.gen)].power(syl.exp));
    return s;
  }

  /// Normal form of the element with Magnus image `s`: degree by degree, the
  /// lowest term of the residual is a Lie element; its Hall coordinates are the
  /// exponents of that degree, which are then divided off on the left.
  PcElement peel(MagnusSeries s) const {
    std::vector<Syllable> out;
    for (int d = 1; d <= c_; ++d) {
      for (int e = 1; e < d; ++e)
        for (const auto& v : s.degree(e))
          if (v != 0) throw PeelFailure("residual has a nonzero term below degree " + std::to_string(d));
      const auto& ts = basis_.of_degree(d);
      bool zero = true;
      for (const auto& v : s.degree(d))
        if (v != 0) zero = false;
      if (zero) continue;
      auto x = ts.empty() ? std::nullopt : solvers_[static_cast<std::size_t>(d - 1)].solve(s.degree(d));
      if (!x) throw PeelFailure("degree-" + std::to_string(d) + " term is not an integral Lie element");
      MagnusSeries prefix = MagnusSeries::one(k_, c_);
      for (std::size_t i = 0; i < ts.size(); ++i) {
        if ((*x)[i] == 0) continue;
        out.push_back({ts[i], (*x)[i]});
        prefix = prefix * magnus_[static_cast<std::size_t>(ts[i])].power((*x)[i]);
      }
      s = prefix.inverse() * s;
    }
    return PcElement(std::move(out));
  }

  /// Image of a free word (letters are the degree-1 generators).
  PcElement image(const FreeWord& w) const {
    std::vector<std::pair<int, Integer>> word;
    for (const auto& [g, e] : w) {
      if (g < 0 || g >= k_) throw UnknownGenerator("free generator index " + std::to_string(g));
      word.emplace_back(g, e);
    }
    return group_->collect(word);
  }

 private:
  static MagnusSeries commutator(const MagnusSeries& x, const MagnusSeries& xi, const MagnusSeries& y,
                                 const MagnusSeries& yi) {
    return x * y * xi * yi;
  }

  HallBasis basis_;
  int k_, c_;
  std::vector<MagnusSeries> magnus_, magnus_inv_;
  std::vector<LeftSolver> solvers_;
  GroupPtr group_;
};

/// Presentation of F_k / gamma_{c+1}(F_k) on Hall-tree generators (weight =
/// degree, all relative orders infinite, definitions g_[L,R] = [g_L, g_R]).
inline PcPresentation free_nilpotent_pcp(int k, int c, const std::string& prefix = "g") {
  return FreeNilpotent(k, c, prefix).group()->presentation();
}

}  // namespace lcs
