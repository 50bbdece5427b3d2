#pragma once

#include "lcs/document.hpp"
#include "lcs/extension.hpp"
#include "lcs/freenil.hpp"
#include "lcs/gradedlie.hpp"
#include "lcs/report.hpp"
#include "lcs/series.hpp"

#include "json.hpp"

#include <cstdint>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace lcs {

using Json = nlohmann::ordered_json;

/// Parsed command line of one request.
struct Command {
  std::string name;  ///< series, gp-series, verify, triviality, graded, oracle
  std::string group;
  std::string ext;
  std::string kind = "gamma";
  std::string mode = "int";
  std::string theorem = "split";
  std::optional<int> class_bound;
  std::vector<Integer> primes;
  int free_rank = 2;
  int free_class = 5;
  int samples = 100;
  std::uint64_t seed = 1;
};

/// Result of a command: JSON body plus overall verdict.
struct Report {
  Json body;
  bool holds = true;
};

/// Series kind as typed on the command line: gamma, rat, p=P, zass=P.
struct KindSpec {
  std::string text;
  SeriesKind kind = SeriesKind::gamma;
  Integer p = 0;

  static KindSpec parse(const std::string& s) {
    KindSpec k;
    k.text = s;
    if (s == "gamma") return k;
    if (s == "rat") {
      k.kind = SeriesKind::gamma_rat;
      return k;
    }
    auto prime_after = [&](std::size_t at) {
      Integer p;
      try {
        p = Integer(s.substr(at));
      } catch (...) {
        throw Error("kind " + s + " needs an integer prime");
      }
      if (!is_prime(p)) throw Error("kind " + s + " needs a prime");
      return p;
    };
    if (s.rfind("p=", 0) == 0) {
      k.kind = SeriesKind::gamma_p;
      k.p = prime_after(2);
      return k;
    }
    if (s.rfind("zass=", 0) == 0) {
      k.kind = SeriesKind::zassenhaus;
      k.p = prime_after(5);
      return k;
    }
    throw Error("unknown series kind '" + s + "' (expected gamma, rat, p=P or zass=P)");
  }

  SubgroupSeries compute(const GroupPtr& g, int c) const {
    switch (kind) {
      case SeriesKind::gamma_rat: return rational_lcs(g, c);
      case SeriesKind::gamma_p: return mod_p_lcs(g, c, p);
      case SeriesKind::zassenhaus: return zassenhaus_series(g, c, p);
      default: return lower_central_series(g, c);
    }
  }

  AxiomMode axiom() const {
    switch (kind) {
      case SeriesKind::gamma_rat: return AxiomMode::N0;
      case SeriesKind::gamma_p: return AxiomMode::p_torsion;
      case SeriesKind::zassenhaus: return AxiomMode::Np;
      default: return AxiomMode::N;
    }
  }
};

namespace detail {

inline Json integer_json(const Integer& v) {
  if (abs(v) < Integer(1) << 62) return Json(to_ll(v));
  return Json(to_string(v));
}

inline Json divisors_json(const std::vector<Integer>& d) {
  Json a = Json::array();
  for (const auto& v : d) a.push_back(integer_json(v));
  return a;
}

inline Json check_json(const std::string& name, bool holds, const std::string& witness) {
  Json j;
  j["name"] = name;
  j["holds"] = holds;
  j["witness"] = witness;
  return j;
}

inline Json checks_json(const std::vector<Check>& cs) {
  Json a = Json::array();
  for (const auto& c : cs) a.push_back(check_json(c.name, c.holds, c.witness));
  return a;
}

inline Json axiom_json(const AxiomReport& r) {
  Json a = Json::array();
  for (const auto& c : r.checks) {
    std::string name = c.what + " (" + std::to_string(c.m) + (c.n ? ", " + std::to_string(c.n) : std::string()) + ")";
    a.push_back(check_json(name, c.holds, c.witness));
  }
  return a;
}

inline bool all_hold(const Json& checks) {
  for (const auto& c : checks)
    if (!c["holds"].get<bool>()) return false;
  return true;
}

inline int class_of(const Command& cmd, const Document* doc, int fallback) {
  if (cmd.class_bound) return *cmd.class_bound;
  if (doc && doc->defaults().class_bound) return *doc->defaults().class_bound;
  return fallback;
}

inline Json certificate_json(const PcGroup& g, const IsolatorResult& r) {
  Json a = Json::array();
  for (const auto& s : certificate_lines(g, r)) a.push_back(s);
  return a;
}

}  // namespace detail

/// TheoremReport as JSON (field names are part of the output contract).
inline Json theorem_json(const TheoremReport& r) {
  Json j;
  j["theorem"] = r.theorem;
  j["mode"] = r.mode;
  j["class_bound"] = r.class_bound;
  j["exactness_note"] = r.exactness_note;
  j["notes"] = r.notes;
  j["checks"] = detail::checks_json(r.global_checks);
  Json ds = Json::array();
  for (const auto& d : r.degrees) {
    Json dj;
    dj["degree"] = d.degree;
    Json terms = Json::object();
    for (const auto& [k, v] : d.terms) terms[k] = v;
    dj["terms"] = terms;
    Json divs = Json::object();
    for (const auto& [k, v] : d.divisors) {
      Json a = Json::array();
      for (const auto& s : v) a.push_back(detail::integer_json(Integer(s)));
      divs[k] = a;
    }
    dj["divisors"] = divs;
    dj["checks"] = detail::checks_json(d.checks);
    dj["certificate"] = d.certificates;
    dj["holds"] = d.holds();
    ds.push_back(dj);
  }
  j["degrees"] = ds;
  j["holds"] = r.holds();
  return j;
}

inline Report run_series(const Document& doc, const Command& cmd) {
  const GroupPtr& g = doc.group(cmd.group);
  KindSpec k = KindSpec::parse(cmd.kind);
  const int c = detail::class_of(cmd, &doc, 4);
  SubgroupSeries s = k.compute(g, c);
  Report rep;
  Json& j = rep.body;
  j["command"] = "series";
  j["group"] = cmd.group;
  j["kind"] = k.text;
  j["class_bound"] = c;
  j["exactness_note"] = s.exactness_note;
  Json checks = detail::axiom_json(verify_series_axioms(s, AxiomMode::N));
  if (k.axiom() != AxiomMode::N) {
    std::set<std::string> seen;
    for (const auto& x : checks) seen.insert(x["name"].get<std::string>());
    for (auto& x : detail::axiom_json(verify_series_axioms(s, k.axiom(), k.p)))
      if (!seen.count(x["name"].get<std::string>())) checks.push_back(x);
  }
  if (k.kind == SeriesKind::gamma_rat) {
    std::string w;
    for (const auto& f : s.verification_failures) w += (w.empty() ? "" : "; ") + f;
    checks.push_back(detail::check_json("isolator recursion agrees with isolated gamma", w.empty(), w));
  }
  j["checks"] = checks;
  Json ds = Json::array();
  for (int n = 1; n <= c; ++n) {
    Json d;
    d["degree"] = n;
    d["term"] = s.term(n).format();
    d["divisors"] = detail::divisors_json(layer_quotient(s.term(n), s.term(n + 1)).divisors());
    d["certificate"] = static_cast<std::size_t>(n) <= s.isolators.size()
                           ? detail::certificate_json(*g, s.isolators[static_cast<std::size_t>(n - 1)])
                           : Json::array();
    d["exact"] = n <= c - 1;
    ds.push_back(d);
  }
  j["degrees"] = ds;
  j["next_term"] = s.term(c + 1).format();
  rep.holds = detail::all_hold(checks);
  j["holds"] = rep.holds;
  return rep;
}

inline Report run_gp_series(const Document& doc, const Command& cmd) {
  const SplitExtension& e = doc.extension(cmd.ext);
  ModeSpec m = ModeSpec::parse(cmd.mode);
  const int c = detail::class_of(cmd, &doc, 4);
  SubgroupSeries s = gp_series(e, c, m);
  Report rep;
  Json& j = rep.body;
  j["command"] = "gp-series";
  j["extension"] = cmd.ext;
  j["mode"] = m.str();
  j["class_bound"] = c;
  j["exactness_note"] = s.exactness_note;
  Json checks = detail::axiom_json(verify_series_axioms(s, AxiomMode::N));
  if (m.mode == SeriesMode::mod_p)
    for (auto& x : detail::axiom_json(verify_series_axioms(s, AxiomMode::p_torsion, m.p))) checks.push_back(x);
  j["checks"] = checks;
  Json ds = Json::array();
  for (int n = 1; n <= c; ++n) {
    Json d;
    d["degree"] = n;
    d["term"] = e.to_fiber(s.term(n)).format();
    d["divisors"] = detail::divisors_json(layer_quotient(s.term(n), s.term(n + 1)).divisors());
    d["certificate"] = static_cast<std::size_t>(n) <= s.isolators.size()
                           ? detail::certificate_json(*e.total(), s.isolators[static_cast<std::size_t>(n - 1)])
                           : Json::array();
    d["exact"] = n <= c - 1;
    ds.push_back(d);
  }
  j["degrees"] = ds;
  rep.holds = detail::all_hold(checks);
  j["holds"] = rep.holds;
  return rep;
}

inline Report run_verify(const Document& doc, const Command& cmd) {
  const SplitExtension& e = doc.extension(cmd.ext);
  ModeSpec m = ModeSpec::parse(cmd.mode);
  const int c = detail::class_of(cmd, &doc, 4);
  TheoremReport tr;
  if (cmd.theorem == "split")
    tr = verify_split_series(e, c, m);
  else if (cmd.theorem == "collapse")
    tr = verify_collapse(e, c, m);
  else if (cmd.theorem == "graded-split")
    tr = verify_graded_split(e, c, m);
  else
    throw Error("unknown theorem '" + cmd.theorem + "' (expected split, collapse or graded-split)");
  Report rep;
  rep.body["command"] = "verify";
  rep.body["extension"] = cmd.ext;
  Json body = theorem_json(tr);
  for (auto& [k, v] : body.items()) rep.body[k] = v;
  rep.holds = tr.holds();
  return rep;
}

inline Report run_triviality(const Document& doc, const Command& cmd) {
  const SplitExtension& e = doc.extension(cmd.ext);
  std::vector<Integer> primes = cmd.primes.empty() ? doc.defaults().primes : cmd.primes;
  TrivialityFlags f = action_triviality(e, primes);
  Report rep;
  Json& j = rep.body;
  j["command"] = "triviality";
  j["extension"] = cmd.ext;
  j["on_abelianization"] = f.on_ab;
  j["on_torsion_free_abelianization"] = f.on_abf;
  Json mp = Json::array();
  for (const auto& [p, v] : f.on_mod_p) {
    Json x;
    x["prime"] = detail::integer_json(p);
    x["holds"] = v;
    mp.push_back(x);
  }
  j["on_mod_p"] = mp;
  const int c = detail::class_of(cmd, &doc, 4);
  Json om = Json::array();
  for (const auto& o : omega_report(e, c, primes)) {
    Json x;
    x["series"] = o.series;
    x["term"] = o.term;
    x["index"] = c;
    x["trivial"] = o.trivial;
    om.push_back(x);
  }
  j["depth_terms"] = om;
  j["holds"] = true;
  return rep;
}

namespace detail {

/// A random element of a subgroup: product of random igs powers.
inline PcElement random_element(const Subgroup& h, std::mt19937_64& rng) {
  const GroupPtr& g = h.group();
  PcElement r;
  std::uniform_int_distribution<int> e(-2, 2);
  for (const auto& x : h.igs()) r = g->multiply(r, g->power(x, e(rng)));
  return r;
}

}  // namespace detail

inline Report run_graded(const Document& doc, const Command& cmd) {
  const GroupPtr& g = doc.group(cmd.group);
  KindSpec k = KindSpec::parse(cmd.kind);
  const int c = detail::class_of(cmd, &doc, 4);
  GradedLieAlgebra gla = associated_graded(k.compute(g, c));
  Report rep;
  Json& j = rep.body;
  j["command"] = "graded";
  j["group"] = cmd.group;
  j["kind"] = k.text;
  j["class_bound"] = c;
  j["exactness_note"] = gla.series().exactness_note + "; brackets for m+n <= " + std::to_string(c - 1);
  Json checks = Json::array();
  std::mt19937_64 rng(cmd.seed);
  auto other = gla.brackets_with_lifts([&](int n, std::size_t) { return detail::random_element(gla.series().term(n + 1), rng); });
  {
    std::string w;
    for (const auto& [key, v] : gla.structure_constants())
      if (other.at(key) != v && w.empty())
        w = "degrees (" + std::to_string(std::get<0>(key)) + ", " + std::to_string(std::get<2>(key)) + ")";
    checks.push_back(detail::check_json("bracket independent of lifts", w.empty(), w));
  }
  if (k.p != 0) p_power_map(gla, k.p);
  j["checks"] = checks;
  Json ds = Json::array();
  for (int n = 1; n <= gla.top_degree(); ++n) {
    Json d;
    d["degree"] = n;
    d["divisors"] = detail::divisors_json(gla.layer(n).divisors());
    Json basis = Json::array();
    for (const auto& x : gla.layer(n).lifts()) basis.push_back(g->format(x));
    d["basis"] = basis;
    Json br = Json::array();
    // brackets landing in this degree: [x_{m,i}, x_{n-m,j}] for m <= n - m
    for (int m = 1; 2 * m <= n; ++m)
      for (std::size_t i = 0; i < gla.dimension(m); ++i)
        for (std::size_t jx = 0; jx < gla.dimension(n - m); ++jx) {
          if (m == n - m && jx <= i) continue;
          Json b;
          b["left"] = Json::array({m, i});
          b["right"] = Json::array({n - m, jx});
          b["value"] = detail::divisors_json(gla.bracket(m, i, n - m, jx));
          br.push_back(b);
        }
    d["brackets"] = br;
    if (gla.p_power().count(n)) {
      Json pm = Json::array();
      const IntMatrix& mm = gla.p_power().at(n);
      for (std::size_t r = 0; r < mm.rows(); ++r) pm.push_back(detail::divisors_json(mm.row(r)));
      d["p_power"] = pm;
    }
    ds.push_back(d);
  }
  j["degrees"] = ds;
  rep.holds = detail::all_hold(checks);
  j["holds"] = rep.holds;
  return rep;
}

/// Random reduced word in k free generators.
inline FreeWord random_free_word(int k, int max_len, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> len(1, max_len), gen(0, k - 1), ex(-2, 2);
  FreeWord w;
  const int n = len(rng);
  for (int i = 0; i < n; ++i) {
    int e = 0;
    while (e == 0) e = ex(rng);
    w.emplace_back(gen(rng), e);
  }
  return w;
}

inline FreeWord word_inverse(const FreeWord& w) {
  FreeWord r;
  for (auto it = w.rbegin(); it != w.rend(); ++it) r.emplace_back(it->first, -it->second);
  return r;
}

inline FreeWord word_commutator(const FreeWord& x, const FreeWord& y) {
  FreeWord r = x;
  r.insert(r.end(), y.begin(), y.end());
  FreeWord xi = word_inverse(x), yi = word_inverse(y);
  r.insert(r.end(), xi.begin(), xi.end());
  r.insert(r.end(), yi.begin(), yi.end());
  return r;
}

/// Random words of mixed depth: plain words, products of commutators and nested
/// commutators, so that every depth 1..c+1 is exercised.
inline std::vector<FreeWord> oracle_words(int k, int c, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<FreeWord> out;
  std::uniform_int_distribution<int> nest(0, c);
  for (int s = 0; s < samples; ++s) {
    FreeWord w = random_free_word(k, 6, rng);
    for (int d = nest(rng); d > 0; --d) w = word_commutator(w, random_free_word(k, 4, rng));
    if (s % 3 == 1) {
      FreeWord x = random_free_word(k, 3, rng);
      w.insert(w.end(), x.begin(), x.end());
      FreeWord xi = word_inverse(x);
      w.insert(w.begin(), xi.begin(), xi.end());
    }
    out.push_back(std::move(w));
  }
  return out;
}

inline std::string format_free_word(const FreeWord& w, const std::string& prefix = "x") {
  std::string s;
  for (const auto& [g, e] : w) {
    if (!s.empty()) s += ' ';
    s += prefix + std::to_string(g + 1);
    if (e != 1) s += "^" + to_string(e);
  }
  return s.empty() ? "1" : s;
}

/// Magnus depth of random words against gamma-membership of their pc images.
inline Report run_oracle(const Command& cmd) {
  const int k = cmd.free_rank, c = cmd.free_class;
  FreeNilpotent f(k, c);
  SubgroupSeries gamma = lower_central_series(f.group(), c);
  Report rep;
  Json& j = rep.body;
  j["command"] = "oracle";
  j["rank"] = k;
  j["class_bound"] = c;
  j["seed"] = cmd.seed;
  int agree = 0;
  Json mism = Json::array();
  Json hist = Json::array();
  std::vector<int> counts(static_cast<std::size_t>(c + 2));
  for (const auto& w : oracle_words(k, c, cmd.samples, cmd.seed)) {
    int md = magnus_depth(w, k, c);
    PcElement x = f.image(w);
    int pd = 1;
    while (pd <= c && gamma.term(pd + 1).contains(x)) ++pd;
    counts[static_cast<std::size_t>(md)]++;
    if (md == pd) {
      ++agree;
    } else {
      Json m;
      m["word"] = format_free_word(w);
      m["magnus_depth"] = md;
      m["pc_depth"] = pd;
      mism.push_back(m);
    }
  }
  for (int d = 1; d <= c + 1; ++d) hist.push_back(counts[static_cast<std::size_t>(d)]);
  j["samples"] = cmd.samples;
  j["agreements"] = agree;
  j["depth_histogram"] = hist;
  j["mismatches"] = mism;
  rep.holds = agree == cmd.samples;
  j["holds"] = rep.holds;
  return rep;
}

/// Dispatches one command against a document.
inline Report run(const Document& doc, const Command& cmd) {
  if (cmd.name == "series") return run_series(doc, cmd);
  if (cmd.name == "gp-series") return run_gp_series(doc, cmd);
  if (cmd.name == "verify") return run_verify(doc, cmd);
  if (cmd.name == "triviality") return run_triviality(doc, cmd);
  if (cmd.name == "graded") return run_graded(doc, cmd);
  if (cmd.name == "oracle") return run_oracle(cmd);
  throw Error("unknown command '" + cmd.name + "'");
}

namespace detail {

inline std::string json_scalar(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

inline void render_checks(std::ostringstream& os, const Json& checks, const std::string& indent) {
  for (const auto& c : checks) {
    os << indent << (c["holds"].get<bool>() ? "ok   " : "FAIL ") << c["name"].get<std::string>();
    const std::string w = c["witness"].get<std::string>();
    if (!w.empty()) os << "  [" << w << "]";
    os << '\n';
  }
}

}  // namespace detail

/// Human-readable rendering of a report body.
inline std::string render_text(const Report& r) {
  std::ostringstream os;
  const Json& j = r.body;
  for (const auto& [k, v] : j.items()) {
    if (k == "degrees" || k == "checks" || k == "holds" || k == "mismatches" || k == "depth_terms" || k == "on_mod_p" ||
        k == "notes")
      continue;
    os << k << ": " << detail::json_scalar(v) << '\n';
  }
  if (j.contains("notes"))
    for (const auto& n : j["notes"]) os << "note: " << n.get<std::string>() << '\n';
  if (j.contains("on_mod_p"))
    for (const auto& x : j["on_mod_p"]) os << "on_mod_p(" << x["prime"].dump() << "): " << x["holds"].dump() << '\n';
  if (j.contains("depth_terms"))
    for (const auto& x : j["depth_terms"])
      os << "  " << x["series"].get<std::string>() << " term " << x["index"].dump() << ": " << x["term"].get<std::string>()
         << '\n';
  if (j.contains("checks")) detail::render_checks(os, j["checks"], "");
  if (j.contains("degrees"))
    for (const auto& d : j["degrees"]) {
      os << "degree " << d["degree"].dump();
      if (d.contains("term")) os << ": " << d["term"].get<std::string>();
      os << '\n';
      if (d.contains("terms"))
        for (const auto& [k, v] : d["terms"].items()) os << "  " << k << ": " << v.get<std::string>() << '\n';
      if (d.contains("divisors")) os << "  divisors: " << d["divisors"].dump() << '\n';
      if (d.contains("basis")) os << "  basis: " << d["basis"].dump() << '\n';
      if (d.contains("brackets"))
        for (const auto& b : d["brackets"])
          os << "  [" << b["left"].dump() << ", " << b["right"].dump() << "] = " << b["value"].dump() << '\n';
      if (d.contains("p_power")) os << "  p-power: " << d["p_power"].dump() << '\n';
      if (d.contains("certificate"))
        for (const auto& c : d["certificate"]) os << "  certificate: " << c.get<std::string>() << '\n';
      if (d.contains("checks")) detail::render_checks(os, d["checks"], "  ");
    }
  if (j.contains("mismatches"))
    for (const auto& m : j["mismatches"])
      os << "mismatch: " << m["word"].get<std::string>() << " magnus " << m["magnus_depth"].dump() << " pc "
         << m["pc_depth"].dump() << '\n';
  os << (r.holds ? "PASS" : "FAIL") << '\n';
  return os.str();
}

}  // namespace lcs
