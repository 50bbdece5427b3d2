#include "lcs.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::vector<lcs::Integer> parse_primes(const std::string& s) {
  std::vector<lcs::Integer> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.emplace_back(item);
  return out;
}

// "rank=K class=C" (either order, comma or space separated)
void parse_free_spec(const std::vector<std::string>& parts, lcs::Command& cmd) {
  for (const auto& part : parts) {
    std::stringstream ss(part);
    std::string kv;
    while (std::getline(ss, kv, ',')) {
      auto eq = kv.find('=');
      if (eq == std::string::npos) throw lcs::Error("expected key=value in --free, got '" + kv + "'");
      std::string k = kv.substr(0, eq), v = kv.substr(eq + 1);
      if (k == "rank")
        cmd.free_rank = std::stoi(v);
      else if (k == "class")
        cmd.free_class = std::stoi(v);
      else
        throw lcs::Error("unknown --free key '" + k + "'");
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lower central series and split extensions of polycyclic groups"};
  app.require_subcommand(1);
  std::string format = "text", input;
  std::uint64_t seed = 1;
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));
  app.add_option("--seed", seed, "Seed for randomized commands");
  app.add_option("--input,-i", input, "Input document");

  lcs::Command cmd;
  int cls = 0;
  std::string primes;
  std::vector<std::string> free_spec;

  auto* series = app.add_subcommand("series", "Compute a series of a group");
  series->add_option("--group", cmd.group)->required();
  series->add_option("--kind", cmd.kind, "gamma, rat, p=P or zass=P");
  series->add_option("--class", cls, "Class bound c");

  auto* gp = app.add_subcommand("gp-series", "Fiber series L_n of a split extension");
  gp->add_option("--ext", cmd.ext)->required();
  gp->add_option("--mode", cmd.mode, "int, rat or p=P");
  gp->add_option("--class", cls, "Class bound c");

  auto* verify = app.add_subcommand("verify", "Verify a decomposition theorem degree by degree");
  verify->add_option("--ext", cmd.ext)->required();
  verify->add_option("--theorem", cmd.theorem)->check(CLI::IsMember({"split", "collapse", "graded-split"}));
  verify->add_option("--mode", cmd.mode, "int, rat or p=P");
  verify->add_option("--class", cls, "Class bound c");

  auto* triv = app.add_subcommand("triviality", "Triviality flags of the action");
  triv->add_option("--ext", cmd.ext)->required();
  triv->add_option("--primes", primes, "Comma separated primes");
  triv->add_option("--class", cls, "Depth of the reported terms");

  auto* graded = app.add_subcommand("graded", "Associated graded Lie algebra");
  graded->add_option("--group", cmd.group)->required();
  graded->add_option("--kind", cmd.kind, "gamma, rat, p=P or zass=P");
  graded->add_option("--class", cls, "Class bound c");

  auto* oracle = app.add_subcommand("oracle", "Magnus depth against pc membership on random words");
  oracle->add_option("--free", free_spec, "rank=K class=C")->expected(1, 2);
  oracle->add_option("--samples", cmd.samples, "Number of random words");

  for (auto* sub : {series, gp, verify, triv, graded, oracle}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    cmd.name = app.get_subcommands().front()->get_name();
    cmd.seed = seed;
    if (cls > 0) cmd.class_bound = cls;
    if (!primes.empty()) cmd.primes = parse_primes(primes);
    parse_free_spec(free_spec, cmd);

    lcs::Report rep;
    if (cmd.name == "oracle") {
      rep = lcs::run_oracle(cmd);
    } else {
      if (input.empty()) throw lcs::Error("--input is required for " + cmd.name);
      std::ifstream in(input);
      if (!in) throw lcs::Error("cannot read " + input);
      std::stringstream ss;
      ss << in.rdbuf();
      lcs::ParseResult parsed = lcs::parse_document(ss.str());
      if (!parsed.ok()) {
        for (const auto& d : parsed.diagnostics) std::cerr << input << ":" << d.str() << '\n';
        return 2;
      }
      rep = lcs::run(*parsed.document, cmd);
    }
    if (format == "json")
      std::cout << rep.body.dump(2) << '\n';
    else
      std::cout << lcs::render_text(rep);
    return rep.holds ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
