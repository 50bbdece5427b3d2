#pragma once

#include "lcs/errors.hpp"
#include "lcs/homomorphism.hpp"
#include "lcs/pcgroup.hpp"

#include <string>
#include <vector>

namespace lcs {

/// Builds a group from a presentation whose inverse conjugation relations may be
/// missing, deriving each g_j^{g_i^-1} by inverting conjugation by g_i on G_{i+1}
/// (bottom-up, so G_{i+1} is already complete), then runs the consistency check.
inline GroupPtr complete_presentation(PcPresentation pres, bool check = true) {
  std::shared_ptr<PcGroup> partial = PcGroup::create_partial(pres);
  const int n = partial->size();
  for (int i = n - 1; i >= 0; --i) {
    if (partial->is_finite_gen(i)) continue;
    bool needed = false;
    for (int j = i + 1; j < n; ++j)
      if (!pres.conj_inv.count({j, i}) && pres.conj.count({j, i})) needed = true;
    if (!needed) continue;
    GroupPtr tail = PcGroup::create(tail_presentation(*partial, i + 1));
    std::vector<PcElement> images;
    for (int j = i + 1; j < n; ++j) images.push_back(partial->conj_relation(j, i).shifted(-(i + 1)));
    if (auto bad = homomorphism_violations(*tail, *tail, images); !bad.empty())
      throw Inconsistent("conjugation by " + partial->name(i) + " violates " + bad.front());
    std::string why;
    auto inv = invert_endomorphism(tail, images, &why);
    if (!inv) throw Inconsistent("conjugation by " + partial->name(i) + " is not an automorphism: " + why);
    for (int j = i + 1; j < n; ++j) {
      if (pres.conj_inv.count({j, i})) continue;
      PcElement v = (*inv)[static_cast<std::size_t>(j - i - 1)].shifted(i + 1);
      if (!(v == PcElement::generator(j))) partial->set_conj_inv_(j, i, v);
    }
  }
  GroupPtr g = PcGroup::create(partial->presentation());
  if (check) {
    auto bad = consistency_check(*g);
    if (!bad.empty()) {
      const auto& v = bad.front();
      throw Inconsistent("overlap " + v.description + " gives " + g->format(v.left) + " vs " + g->format(v.right));
    }
  }
  return g;
}

/// Declared-weight violations: pairs i < j whose commutator g_j^-1 g_j^{g_i} leaves
/// the subgroup generated by generators of weight >= w_i + w_j.
inline std::vector<std::string> weight_violations(const GroupPtr& g) {
  std::vector<std::string> out;
  const auto& w = g->presentation().weights;
  const int n = g->size();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const int need = w[static_cast<std::size_t>(i)] + w[static_cast<std::size_t>(j)];
      std::vector<PcElement> gens;
      for (int k = 0; k < n; ++k)
        if (w[static_cast<std::size_t>(k)] >= need) gens.push_back(g->gen(k));
      Subgroup deep = subgroup_closure(g, gens, false);
      auto bad = [&](const PcElement& c) { return !deep.contains(g->multiply(g->invert(g->gen(j)), c)); };
      if (bad(g->conj_relation(j, i)) || (!g->is_finite_gen(i) && bad(g->conj_inv_relation(j, i))))
        out.push_back("[" + g->name(j) + ", " + g->name(i) + "] has weight below " + std::to_string(need));
    }
  return out;
}

}  // namespace lcs
