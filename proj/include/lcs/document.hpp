#pragma once

#include "lcs/builder.hpp"
#include "lcs/errors.hpp"
#include "lcs/extension.hpp"
#include "lcs/freenil.hpp"
#include "lcs/integer.hpp"

#include <cctype>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace lcs {

/// A word as written: factors g^e in order.
struct WordSyntax {
  std::vector<std::pair<std::string, Integer>> factors;
  friend bool operator==(const WordSyntax&, const WordSyntax&) = default;
};

struct PcGroupSyntax {
  // Source lines are kept for diagnostics and ignored by equality.
  struct Gen {
    std::string name;
    std::optional<int> weight;
    int line = 0;
    friend bool operator==(const Gen& a, const Gen& b) { return a.name == b.name && a.weight == b.weight; }
  };
  struct Order {
    std::string gen;
    Integer order;
    int line = 0;
    friend bool operator==(const Order& a, const Order& b) { return a.gen == b.gen && a.order == b.order; }
  };
  struct Conj {
    std::string gj, gi;
    WordSyntax rhs;
    int line = 0;
    friend bool operator==(const Conj& a, const Conj& b) { return a.gj == b.gj && a.gi == b.gi && a.rhs == b.rhs; }
  };
  struct Pow {
    std::string gen;
    WordSyntax rhs;
    int line = 0;
    friend bool operator==(const Pow& a, const Pow& b) { return a.gen == b.gen && a.rhs == b.rhs; }
  };
  std::vector<Gen> gens;
  std::vector<Order> orders;
  std::vector<Conj> conjs;
  std::vector<Pow> pows;
  friend bool operator==(const PcGroupSyntax&, const PcGroupSyntax&) = default;
};

struct FreeSyntax {
  int rank = 0;
  int cls = 0;
  std::string prefix;
  friend bool operator==(const FreeSyntax&, const FreeSyntax&) = default;
};

struct ExtensionSyntax {
  std::string fiber, base;
  /// act t: a -> w, ...
  struct Act {
    std::string base_gen;
    std::vector<std::pair<std::string, WordSyntax>> images;
    int line = 0;
    friend bool operator==(const Act& a, const Act& b) { return a.base_gen == b.base_gen && a.images == b.images; }
  };
  std::vector<Act> acts;
  int fiber_line = 0;
  int base_line = 0;
  friend bool operator==(const ExtensionSyntax& a, const ExtensionSyntax& b) {
    return a.fiber == b.fiber && a.base == b.base && a.acts == b.acts;
  }
};

struct Defaults {
  std::optional<int> class_bound;
  std::vector<Integer> primes;
  std::optional<Integer> power_bound;
  friend bool operator==(const Defaults&, const Defaults&) = default;
};

/// One top-level definition, in source order.
struct Definition {
  enum class Kind { pcgroup, free, extension };
  Kind kind = Kind::pcgroup;
  std::string name;
  int line = 0;
  PcGroupSyntax pc;
  FreeSyntax free;
  ExtensionSyntax ext;
  friend bool operator==(const Definition& a, const Definition& b) {
    return a.kind == b.kind && a.name == b.name && a.pc == b.pc && a.free == b.free && a.ext == b.ext;
  }
};

struct Diagnostic {
  int line = 0;
  int column = 0;
  std::string kind;
  std::string message;
  std::string str() const {
    return std::to_string(line) + ":" + std::to_string(column) + ": " + kind + ": " + message;
  }
};

/// Parsed and resolved input document.
class Document {
 public:
  const std::vector<Definition>& definitions() const { return defs_; }
  const Defaults& defaults() const { return defaults_; }
  bool empty() const { return defs_.empty(); }

  /// Groups by name; extension E also defines E_total.
  const GroupPtr& group(const std::string& name) const {
    auto it = groups_.find(name);
    if (it == groups_.end()) throw UnknownName("no group named '" + name + "'");
    return it->second;
  }
  const SplitExtension& extension(const std::string& name) const {
    auto it = extensions_.find(name);
    if (it == extensions_.end()) throw UnknownName("no extension named '" + name + "'");
    return it->second;
  }
  bool has_group(const std::string& name) const { return groups_.count(name) > 0; }
  bool has_extension(const std::string& name) const { return extensions_.count(name) > 0; }
  std::vector<std::string> group_names() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : groups_) out.push_back(k);
    return out;
  }
  std::vector<std::string> extension_names() const {
    std::vector<std::string> out;
    for (const auto& d : defs_)
      if (d.kind == Definition::Kind::extension) out.push_back(d.name);
    return out;
  }

  /// Syntactic model equality (used by the round-trip property).
  friend bool operator==(const Document& a, const Document& b) {
    return a.defs_ == b.defs_ && a.defaults_ == b.defaults_;
  }

 private:
  friend struct DocumentParser;
  std::vector<Definition> defs_;
  Defaults defaults_;
  std::map<std::string, GroupPtr> groups_;
  std::map<std::string, SplitExtension> extensions_;
};

struct ParseResult {
  std::optional<Document> document;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return document.has_value(); }
};

namespace detail {

struct Token {
  enum class Kind { ident, integer, symbol, end };
  Kind kind = Kind::end;
  std::string text;
  int line = 1;
  int column = 1;
};

inline std::vector<Token> tokenize(const std::string& text, std::vector<Diagnostic>& diags) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t k) {
    for (std::size_t j = 0; j < k; ++j, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < text.size()) {
    char ch = text[i];
    if (ch == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::size_t j = i;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
      t.kind = Token::Kind::ident;
      t.text = text.substr(i, j - i);
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(ch)) ||
               (ch == '-' && i + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
      std::size_t j = i + 1;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      t.kind = Token::Kind::integer;
      t.text = text.substr(i, j - i);
      advance(j - i);
    } else if (ch == '-' && i + 1 < text.size() && text[i + 1] == '>') {
      t.kind = Token::Kind::symbol;
      t.text = "->";
      advance(2);
    } else if (std::string("{};:,=^").find(ch) != std::string::npos) {
      t.kind = Token::Kind::symbol;
      t.text = std::string(1, ch);
      advance(1);
    } else {
      diags.push_back({line, col, "SyntaxError", std::string("unexpected character '") + ch + "'"});
      advance(1);
      continue;
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

struct ParseAbort {};

}  // namespace detail

struct DocumentParser {
  std::vector<detail::Token> toks;
  std::size_t pos = 0;
  std::vector<Diagnostic> diags;

  const detail::Token& peek() const { return toks[pos]; }
  bool at_symbol(const std::string& s) const {
    return peek().kind == detail::Token::Kind::symbol && peek().text == s;
  }
  bool at_ident(const std::string& s) const { return peek().kind == detail::Token::Kind::ident && peek().text == s; }
  [[noreturn]] void fail(const std::string& expected) {
    const auto& t = peek();
    std::string found = t.kind == detail::Token::Kind::end ? "end of input" : "'" + t.text + "'";
    diags.push_back({t.line, t.column, "SyntaxError", "expected " + expected + ", found " + found});
    throw detail::ParseAbort{};
  }
  void expect_symbol(const std::string& s) {
    if (!at_symbol(s)) fail("'" + s + "'");
    ++pos;
  }
  std::string ident(const std::string& what) {
    if (peek().kind != detail::Token::Kind::ident) fail(what);
    return toks[pos++].text;
  }
  Integer integer(const std::string& what) {
    if (peek().kind != detail::Token::Kind::integer) fail(what);
    return Integer(toks[pos++].text);
  }
  void keyword(const std::string& k) {
    if (!at_ident(k)) fail("'" + k + "'");
    ++pos;
  }

  WordSyntax word(const std::vector<std::string>& terminators) {
    WordSyntax w;
    auto done = [&] {
      for (const auto& t : terminators)
        if (at_symbol(t)) return true;
      return false;
    };
    while (!done()) {
      std::string g = ident("generator name");
      Integer e = 1;
      if (at_symbol("^")) {
        ++pos;
        e = integer("integer exponent");
      }
      w.factors.emplace_back(g, e);
    }
    return w;
  }

  void parse_pcgroup(Definition& d) {
    expect_symbol("{");
    while (!at_symbol("}")) {
      const int line = peek().line;
      if (at_ident("gen")) {
        ++pos;
        PcGroupSyntax::Gen g{ident("generator name"), std::nullopt, line};
        if (peek().kind == detail::Token::Kind::integer) g.weight = static_cast<int>(to_ll(integer("weight")));
        d.pc.gens.push_back(g);
      } else if (at_ident("order")) {
        ++pos;
        std::string g = ident("generator name");
        d.pc.orders.push_back({g, integer("relative order"), line});
      } else if (at_ident("conj")) {
        ++pos;
        PcGroupSyntax::Conj c;
        c.line = line;
        c.gj = ident("generator name");
        c.gi = ident("generator name");
        expect_symbol("=");
        c.rhs = word({";"});
        d.pc.conjs.push_back(c);
      } else if (at_ident("pow")) {
        ++pos;
        std::string g = ident("generator name");
        expect_symbol("=");
        d.pc.pows.push_back({g, word({";"}), line});
      } else {
        fail("'gen', 'order', 'conj', 'pow' or '}'");
      }
      expect_symbol(";");
    }
    ++pos;
  }

  void parse_free(Definition& d) {
    d.free.prefix = "g";
    bool rank = false, cls = false;
    while (!at_symbol(";")) {
      std::string key = ident("'rank', 'class' or 'prefix'");
      expect_symbol("=");
      if (key == "rank") {
        d.free.rank = static_cast<int>(to_ll(integer("rank")));
        rank = true;
      } else if (key == "class") {
        d.free.cls = static_cast<int>(to_ll(integer("class")));
        cls = true;
      } else if (key == "prefix") {
        d.free.prefix = ident("prefix");
      } else {
        --pos;
        --pos;
        fail("'rank', 'class' or 'prefix'");
      }
    }
    if (!rank || !cls) fail("rank=K and class=C");
    ++pos;
  }

  void parse_extension(Definition& d) {
    expect_symbol("{");
    while (!at_symbol("}")) {
      const int line = peek().line;
      if (at_ident("fiber")) {
        ++pos;
        d.ext.fiber_line = line;
        d.ext.fiber = ident("group name");
      } else if (at_ident("base")) {
        ++pos;
        d.ext.base_line = line;
        d.ext.base = ident("group name");
      } else if (at_ident("act")) {
        ++pos;
        std::string t = ident("base generator");
        expect_symbol(":");
        std::vector<std::pair<std::string, WordSyntax>> imgs;
        while (true) {
          std::string a = ident("fiber generator");
          expect_symbol("->");
          imgs.emplace_back(a, word({",", ";"}));
          if (!at_symbol(",")) break;
          ++pos;
        }
        d.ext.acts.push_back({t, imgs, line});
      } else {
        fail("'fiber', 'base', 'act' or '}'");
      }
      expect_symbol(";");
    }
    ++pos;
  }

  void parse_defaults(Defaults& out) {
    while (!at_symbol(";")) {
      std::string key = ident("'class', 'primes' or 'power_bound'");
      expect_symbol("=");
      if (key == "class") {
        out.class_bound = static_cast<int>(to_ll(integer("class")));
      } else if (key == "primes") {
        out.primes.push_back(integer("prime"));
        while (at_symbol(",")) {
          ++pos;
          out.primes.push_back(integer("prime"));
        }
      } else if (key == "power_bound") {
        out.power_bound = integer("power bound");
      } else {
        --pos;
        --pos;
        fail("'class', 'primes' or 'power_bound'");
      }
    }
    ++pos;
  }

  void parse(Document& doc) {
    while (peek().kind != detail::Token::Kind::end) {
      Definition d;
      d.line = peek().line;
      if (at_ident("pcgroup")) {
        ++pos;
        d.kind = Definition::Kind::pcgroup;
        d.name = ident("group name");
        parse_pcgroup(d);
      } else if (at_ident("free")) {
        ++pos;
        d.kind = Definition::Kind::free;
        d.name = ident("group name");
        parse_free(d);
      } else if (at_ident("extension")) {
        ++pos;
        d.kind = Definition::Kind::extension;
        d.name = ident("extension name");
        parse_extension(d);
      } else if (at_ident("defaults")) {
        ++pos;
        parse_defaults(doc.defaults_);
        continue;
      } else {
        fail("'pcgroup', 'free', 'extension' or 'defaults'");
      }
      doc.defs_.push_back(std::move(d));
    }
  }

  // Resolution ------------------------------------------------------------

  void diag(int line, const std::string& kind, const std::string& msg) { diags.push_back({line, 1, kind, msg}); }

  static int gen_index(const PcPresentation& p, const std::string& g, int line, std::vector<Diagnostic>& diags,
                       const std::string& group) {
    auto i = p.find(g);
    if (!i) {
      diags.push_back({line, 1, "UnknownName", "generator '" + g + "' is not declared in " + group});
      throw detail::ParseAbort{};
    }
    return *i;
  }

  /// Normal-form tail word of a relation; must be in collected order.
  PcElement relation_word(const PcPresentation& p, const WordSyntax& w, int line, const std::string& group) {
    std::vector<Syllable> s;
    for (const auto& [g, e] : w.factors) {
      int i = gen_index(p, g, line, diags, group);
      if (e == 0) continue;
      if (!s.empty() && s.back().gen >= i) {
        diags.push_back({line, 1, "InvalidPresentation",
                         "relation word in " + group + " must list generators in increasing order"});
        throw detail::ParseAbort{};
      }
      s.push_back({i, e});
    }
    return PcElement(std::move(s));
  }

  GroupPtr build_pc(const Definition& d) {
    PcPresentation p;
    bool weights = false;
    for (const auto& g : d.pc.gens) {
      if (p.find(g.name)) {
        diag(g.line, "DuplicateName", "generator '" + g.name + "' declared twice in " + d.name);
        throw detail::ParseAbort{};
      }
      p.add_generator(g.name, 0, g.weight.value_or(1));
      weights = weights || g.weight.has_value();
    }
    p.weights_declared = weights;
    for (const auto& o : d.pc.orders) {
      int i = gen_index(p, o.gen, o.line, diags, d.name);
      if (o.order < 0) {
        diag(o.line, "InvalidPresentation", "negative relative order for '" + o.gen + "'");
        throw detail::ParseAbort{};
      }
      p.rel_orders[static_cast<std::size_t>(i)] = o.order;
    }
    for (const auto& w : d.pc.pows) {
      int i = gen_index(p, w.gen, w.line, diags, d.name);
      p.power_rhs[i] = relation_word(p, w.rhs, w.line, d.name);
    }
    for (const auto& c : d.pc.conjs) {
      int j = gen_index(p, c.gj, c.line, diags, d.name);
      int i = gen_index(p, c.gi, c.line, diags, d.name);
      if (j <= i) {
        diag(c.line, "InvalidPresentation", "conj " + c.gj + " " + c.gi + ": first generator must come later");
        throw detail::ParseAbort{};
      }
      p.conj[{j, i}] = relation_word(p, c.rhs, c.line, d.name);
    }
    try {
      return complete_presentation(std::move(p));
    } catch (const Error& e) {
      diag(d.line, "Inconsistent", d.name + ": " + e.what());
      throw detail::ParseAbort{};
    }
  }

  static PcElement evaluate(const GroupPtr& g, const WordSyntax& w, int line, std::vector<Diagnostic>& diags,
                            const std::string& where) {
    PcElement r;
    for (const auto& [name, e] : w.factors) {
      auto i = g->presentation().find(name);
      if (!i) {
        diags.push_back({line, 1, "UnknownName", "generator '" + name + "' is not in " + where});
        throw detail::ParseAbort{};
      }
      r = g->multiply(r, g->power(g->gen(*i), e));
    }
    return r;
  }

  void resolve(Document& doc) {
    auto claim = [&](const std::string& name, int line) {
      if (doc.groups_.count(name) || doc.extensions_.count(name)) {
        diag(line, "DuplicateName", "'" + name + "' is already defined");
        throw detail::ParseAbort{};
      }
    };
    for (const auto& d : doc.defs_) {
      claim(d.name, d.line);
      if (d.kind == Definition::Kind::pcgroup) {
        doc.groups_[d.name] = build_pc(d);
      } else if (d.kind == Definition::Kind::free) {
        if (d.free.rank < 1 || d.free.cls < 1) {
          diag(d.line, "InvalidPresentation", "free group needs rank >= 1 and class >= 1");
          throw detail::ParseAbort{};
        }
        doc.groups_[d.name] = FreeNilpotent(d.free.rank, d.free.cls, d.free.prefix).group();
      } else {
        auto get = [&](const std::string& n, const std::string& role, int line) {
          if (n.empty()) {
            diag(d.line, "SyntaxError", "extension " + d.name + " has no " + role);
            throw detail::ParseAbort{};
          }
          auto it = doc.groups_.find(n);
          if (it == doc.groups_.end()) {
            diag(line, "UnknownName", role + " group '" + n + "' is not defined");
            throw detail::ParseAbort{};
          }
          return it->second;
        };
        GroupPtr a = get(d.ext.fiber, "fiber", d.ext.fiber_line), c = get(d.ext.base, "base", d.ext.base_line);
        std::map<int, std::map<int, PcElement>> given;
        for (const auto& act : d.ext.acts) {
          auto ti = c->presentation().find(act.base_gen);
          if (!ti) {
            diag(act.line, "UnknownName", "generator '" + act.base_gen + "' is not in base " + d.ext.base);
            throw detail::ParseAbort{};
          }
          for (const auto& [x, w] : act.images) {
            auto xi = a->presentation().find(x);
            if (!xi) {
              diag(act.line, "UnknownName", "generator '" + x + "' is not in fiber " + d.ext.fiber);
              throw detail::ParseAbort{};
            }
            given[*ti][*xi] = evaluate(a, w, act.line, diags, "fiber " + d.ext.fiber);
          }
        }
        try {
          auto images = complete_action_images(a, c, given);
          SplitExtension e = SplitExtension::build(a, c, std::move(images), d.name);
          claim(d.name + "_total", d.line);
          doc.groups_[d.name + "_total"] = e.total();
          doc.extensions_.emplace(d.name, std::move(e));
        } catch (const Error& e) {
          std::string what = e.what();
          std::string kind = what.substr(0, what.find(':'));
          diag(d.line, kind.empty() ? "Error" : kind, d.name + ": " + what);
          throw detail::ParseAbort{};
        }
      }
    }
  }
};

/// Parses and resolves a document; on failure returns diagnostics instead.
inline ParseResult parse_document(const std::string& text) {
  ParseResult res;
  DocumentParser p;
  p.toks = detail::tokenize(text, p.diags);
  if (!p.diags.empty()) {
    res.diagnostics = p.diags;
    return res;
  }
  Document doc;
  try {
    p.parse(doc);
    p.resolve(doc);
  } catch (const detail::ParseAbort&) {
    res.diagnostics = p.diags;
    return res;
  }
  res.document = std::move(doc);
  return res;
}

/// Like parse_document but throws the first diagnostic as its error type.
inline Document load_document(const std::string& text) {
  ParseResult r = parse_document(text);
  if (r.ok()) return std::move(*r.document);
  const Diagnostic& d = r.diagnostics.front();
  std::string msg = "line " + std::to_string(d.line) + ", column " + std::to_string(d.column) + ": " + d.message;
  if (d.kind == "UnknownName") throw UnknownName(msg);
  if (d.kind == "DuplicateName") throw DuplicateName(msg);
  if (d.kind == "Inconsistent") throw Inconsistent(msg);
  if (d.kind == "SyntaxError") throw SyntaxError(msg);
  if (d.kind == "NotAutomorphism") throw NotAutomorphism(msg);
  if (d.kind == "NotAction") throw NotAction(msg);
  throw InvalidPresentation(msg);
}

namespace detail {

inline std::string format_word(const WordSyntax& w) {
  std::string s;
  for (const auto& [g, e] : w.factors) {
    if (!s.empty()) s += ' ';
    s += g;
    if (e != 1) s += "^" + to_string(e);
  }
  return s;
}

}  // namespace detail

/// Canonical text of a document; reparsing yields an equal model.
inline std::string pretty_print(const Document& doc) {
  std::ostringstream os;
  const Defaults& df = doc.defaults();
  if (df.class_bound || !df.primes.empty() || df.power_bound) {
    os << "defaults";
    if (df.class_bound) os << " class=" << *df.class_bound;
    if (!df.primes.empty()) {
      os << " primes=";
      for (std::size_t i = 0; i < df.primes.size(); ++i) os << (i ? "," : "") << df.primes[i];
    }
    if (df.power_bound) os << " power_bound=" << *df.power_bound;
    os << ";\n\n";
  }
  for (const auto& d : doc.definitions()) {
    switch (d.kind) {
      case Definition::Kind::pcgroup:
        os << "pcgroup " << d.name << " {\n";
        for (const auto& g : d.pc.gens) {
          os << "  gen " << g.name;
          if (g.weight) os << ' ' << *g.weight;
          os << ";\n";
        }
        for (const auto& o : d.pc.orders) os << "  order " << o.gen << ' ' << o.order << ";\n";
        for (const auto& c : d.pc.conjs) os << "  conj " << c.gj << ' ' << c.gi << " = " << detail::format_word(c.rhs) << ";\n";
        for (const auto& w : d.pc.pows) os << "  pow " << w.gen << " = " << detail::format_word(w.rhs) << ";\n";
        os << "}\n\n";
        break;
      case Definition::Kind::free:
        os << "free " << d.name << " rank=" << d.free.rank << " class=" << d.free.cls;
        if (d.free.prefix != "g") os << " prefix=" << d.free.prefix;
        os << ";\n\n";
        break;
      case Definition::Kind::extension:
        os << "extension " << d.name << " {\n  fiber " << d.ext.fiber << ";\n  base " << d.ext.base << ";\n";
        for (const auto& act : d.ext.acts) {
          os << "  act " << act.base_gen << ":";
          for (std::size_t i = 0; i < act.images.size(); ++i)
            os << (i ? ", " : " ") << act.images[i].first << " -> " << detail::format_word(act.images[i].second);
          os << ";\n";
        }
        os << "}\n\n";
        break;
    }
  }
  return os.str();
}

}  // namespace lcs
