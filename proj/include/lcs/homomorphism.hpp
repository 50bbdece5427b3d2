#pragma once

#include "lcs/errors.hpp"
#include "lcs/pcgroup.hpp"
#include "lcs/subgroup.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lcs {

/// Map between pc groups determined by the images of the source pc generators.
struct GroupHom {
  GroupPtr src;
  GroupPtr tgt;
  std::vector<PcElement> images;

  PcElement operator()(const PcElement& x) const {
    PcElement r;
    for (const auto& s : x.syllables())
      r = tgt->multiply(r, tgt->power(images[static_cast<std::size_t>(s.gen)], s.exp));
    return r;
  }

  Subgroup image(const Subgroup& h) const {
    std::vector<PcElement> gens;
    for (const auto& x : h.igs()) gens.push_back((*this)(x));
    return subgroup_closure(tgt, gens, false);
  }
};

/// Evaluates a generator-image map on x (images indexed by source generator).
inline PcElement evaluate_images(const PcGroup& tgt, const std::vector<PcElement>& images, const PcElement& x) {
  PcElement r;
  for (const auto& s : x.syllables())
    r = tgt.multiply(r, tgt.power(images[static_cast<std::size_t>(s.gen)], s.exp));
  return r;
}

/// Relations of `src` not respected by the generator images (empty iff the
/// images define a homomorphism).
inline std::vector<std::string> homomorphism_violations(const PcGroup& src, const PcGroup& tgt,
                                                        const std::vector<PcElement>& images) {
  std::vector<std::string> out;
  if (images.size() != static_cast<std::size_t>(src.size())) {
    out.push_back("expected " + std::to_string(src.size()) + " images");
    return out;
  }
  auto img = [&](int g) { return images[static_cast<std::size_t>(g)]; };
  auto ev = [&](const PcElement& w) { return evaluate_images(tgt, images, w); };
  for (int i = 0; i < src.size(); ++i) {
    if (src.is_finite_gen(i) && !(tgt.power(img(i), src.rel_order(i)) == ev(src.power_relation(i))))
      out.push_back("power relation of " + src.name(i));
    for (int j = i + 1; j < src.size(); ++j) {
      if (!(tgt.conjugate(img(j), img(i)) == ev(src.conj_relation(j, i))))
        out.push_back("conjugation relation " + src.name(j) + "^" + src.name(i));
      if (!src.is_finite_gen(i) &&
          !(tgt.conjugate_left(img(j), img(i)) == ev(src.conj_inv_relation(j, i))))
        out.push_back("conjugation relation " + src.name(j) + "^(" + src.name(i) + "^-1)");
    }
  }
  return out;
}

/// Inverse of an endomorphism of `a` given by generator images, or nullopt with
/// `why` set when it is not bijective. Works in a x a with the graph
/// {(f(x), x)}: f is onto iff the first-factor pivots cover every depth with
/// leading exponent 1, one-to-one iff the graph meets 1 x a trivially, and
/// sifting (g, 1) through the first-factor pivots leaves (1, f^-1(g)^-1).
inline std::optional<std::vector<PcElement>> invert_endomorphism(const GroupPtr& a, const std::vector<PcElement>& images,
                                                                 std::string* why = nullptr) {
  const int n = a->size();
  auto fail = [&](const std::string& msg) -> std::optional<std::vector<PcElement>> {
    if (why) *why = msg;
    return std::nullopt;
  };
  if (n == 0) return std::vector<PcElement>{};
  GroupPtr d = PcGroup::create(direct_product_presentation(*a, *a, "", "'"));
  std::vector<PcElement> gens;
  for (int i = 0; i < n; ++i) gens.push_back(d->multiply(images[static_cast<std::size_t>(i)], a->gen(i).shifted(n)));
  Subgroup graph = subgroup_closure(d, gens, false);
  for (int i = 0; i < n; ++i) {
    const PcElement* p = graph.pivot(i);
    if (!p || p->leading_exponent() != 1) return fail("image misses generator " + a->name(i));
  }
  for (const auto& x : graph.igs())
    if (x.depth() >= n) return fail("kernel contains " + a->format(x.shifted(-n)));
  std::vector<PcElement> inv;
  for (int j = 0; j < n; ++j) {
    PcElement r = a->gen(j);
    for (int i = 0; i < n && !r.is_identity() && r.depth() < n; ++i) {
      Integer e = r.exponent(i);
      if (e != 0) r = d->multiply(d->power(*graph.pivot(i), -e), r);
    }
    inv.push_back(a->invert(r.shifted(-n)));
  }
  return inv;
}

/// Automorphism helpers over images of a's generators.
inline std::vector<PcElement> compose_maps(const PcGroup& a, const std::vector<PcElement>& f,
                                           const std::vector<PcElement>& g) {
  std::vector<PcElement> out;
  for (const auto& x : g) out.push_back(evaluate_images(a, f, x));
  return out;
}

inline std::vector<PcElement> identity_map(const PcGroup& a) { return a.generators(); }

inline std::vector<PcElement> map_power(const PcGroup& a, const std::vector<PcElement>& f,
                                        const std::vector<PcElement>& f_inv, Integer k) {
  std::vector<PcElement> base = k < 0 ? f_inv : f;
  if (k < 0) k = -k;
  std::vector<PcElement> acc = identity_map(a);
  while (k > 0) {
    if (k & 1) acc = compose_maps(a, acc, base);
    k >>= 1;
    if (k > 0) base = compose_maps(a, base, base);
  }
  return acc;
}

}  // namespace lcs
