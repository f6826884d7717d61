// Command-line front end: bspaa <subcommand> --config <file> [options]

#include <CLI11.hpp>
#include <iostream>
#include <map>
#include <string>

#include "bspaa/reports.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Bayesian acceptance sampling plans under an adaptive step-stress life test"};
  app.require_subcommand(1, 1);

  bspaa::RunFlags flags;
  std::uint64_t seed = 0;
  long long replicates = 0;
  int n_cap = 0;
  int threads = 0;
  std::string ed;

  const std::map<std::string, std::string> commands = {
      {"optimize", "optimal adaptive plan and its CSV row"},
      {"risk", "Bayes risk and components of the [plan]"},
      {"decide", "accept/reject for each dataset in [run] dataset"},
      {"simulate", "simulate test outcomes under the [plan]"},
      {"compare", "adaptive plan against the two baselines"},
      {"sweep", "compare over the cartesian product of [sweep]"},
      {"oracle", "Monte-Carlo cross-check of the [plan]"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", flags.config_path, "configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", flags.out, "output file (stdout if omitted)");
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--replicates", replicates, "Monte-Carlo replicates")->check(CLI::PositiveNumber);
    sub->add_option("--n-cap", n_cap, "largest sample size searched")->check(CLI::NonNegativeNumber);
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--ed-coefficient", ed, "coefficient on E[D] in the risk")->check(CLI::IsMember({"vs", "unit"}));
  }

  CLI11_PARSE(app, argc, argv);

  const CLI::App* chosen = app.get_subcommands().front();
  if (chosen->count("--seed")) flags.seed = seed;
  if (chosen->count("--replicates")) flags.replicates = replicates;
  if (chosen->count("--n-cap")) flags.n_cap = n_cap;
  if (chosen->count("--threads")) flags.threads = threads;
  if (chosen->count("--ed-coefficient")) {
    flags.ed_coefficient = ed == "unit" ? bspaa::EdCoefficient::kUnit : bspaa::EdCoefficient::kSalvage;
  }
  return bspaa::run(chosen->get_name(), flags, std::cout, std::cerr);
}
