#pragma once

#include "lcs.hpp"

#include <fstream>
#include <sstream>
#include <string>

namespace fixtures {

using namespace lcs;

inline GroupPtr cyclic(const std::string& name, Integer order = 0) {
  PcPresentation p;
  p.add_generator(name, order);
  return complete_presentation(p);
}

inline GroupPtr free_abelian(int n) {
  PcPresentation p;
  for (int i = 0; i < n; ++i) p.add_generator("x" + std::to_string(i + 1));
  return complete_presentation(p);
}

/// a, b, c with a^{-1} b a = b c, c central.
inline GroupPtr heisenberg() {
  PcPresentation p;
  p.add_generator("a");
  p.add_generator("b");
  p.add_generator("c");
  p.conj[{1, 0}] = PcElement({{1, 1}, {2, 1}});
  return complete_presentation(p);
}

/// t, a with t^{-1} a t = a^{-1}.
inline GroupPtr klein() {
  PcPresentation p;
  p.add_generator("t");
  p.add_generator("a");
  p.conj[{1, 0}] = PcElement::generator(1, -1);
  return complete_presentation(p);
}

inline PcElement g(int i, Integer e = 1) { return PcElement::generator(i, e); }

inline PcElement word(const GroupPtr& grp, std::vector<std::pair<int, Integer>> w) { return grp->collect(w); }

inline Subgroup sub(const GroupPtr& grp, std::vector<PcElement> gens) { return subgroup_closure(grp, gens, false); }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Document sample(const std::string& name) { return load_document(read_file(std::string(LCS_SAMPLES_DIR) + "/" + name)); }

inline std::vector<long long> ll(const std::vector<Integer>& v) {
  std::vector<long long> out;
  for (const auto& x : v) out.push_back(to_ll(x));
  return out;
}

inline std::vector<long long> divisors(const Subgroup& top, const Subgroup& bottom) {
  return ll(layer_quotient(top, bottom).divisors());
}

}  // namespace fixtures
