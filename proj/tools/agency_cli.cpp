#include "agency/cli.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>

namespace {

std::optional<std::string> slurp(const std::string& path) {
  if (path == "-") return std::string(std::istreambuf_iterator<char>(std::cin), {});
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int emit(const agency::cli::CommandResult& r, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << r.output;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
      std::cerr << "cannot write " << out_path << "\n";
      return agency::cli::kInvalidInstance;
    }
    out << r.output;
  }
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace agency::cli;
  CLI::App app{"Coordinated bidding for a media agency in GSP/VCG position auctions"};
  app.require_subcommand(1);

  std::string path;
  std::string out_path;

  auto* validate = app.add_subcommand("validate", "Check an instance file");
  validate->add_option("instance", path, "Instance JSON, or - for stdin")->required();

  double p = 0.05;
  auto* discretize = app.add_subcommand("discretize", "Interval set and bid grid for a probability threshold");
  discretize->add_option("instance", path, "Instance JSON, or - for stdin")->required();
  discretize->add_option("--p", p, "Probability threshold in (0, 1]");

  SolveOptions solve_opt;
  std::string mode = "arbitrary";
  std::string format = "json";
  std::string mechanism;
  auto* solve = app.add_subcommand("solve", "Compute coordinated bids and transfers");
  solve->add_option("instance", path, "Instance JSON, or - for stdin")->required();
  solve->add_option("--mode", mode, "arbitrary | limited-liability")
      ->check(CLI::IsMember({"arbitrary", "limited-liability"}));
  solve->add_option("--epsilon", solve_opt.epsilon, "Approximation parameter in (0, 1]");
  solve->add_option("--out", out_path, "Write the report here instead of stdout");
  solve->add_option("--format", format, "json | text")->check(CLI::IsMember({"json", "text"}));
  solve->add_option("--mechanism", mechanism, "Override the instance mechanism (gsp | vcg)")
      ->check(CLI::IsMember({"gsp", "vcg"}));

  std::string weights_path;
  std::optional<std::size_t> external_index;
  bool expected = false;
  double wup_epsilon = 0.05;
  auto* wup = app.add_subcommand("wup", "Solve one weighted utility problem on the bid grid");
  wup->add_option("instance", path, "Instance JSON, or - for stdin")->required();
  wup->add_option("--weights-file", weights_path, "JSON {\"revenue\": [...], \"payment\": x}; unit weights if absent");
  auto* idx_opt = wup->add_option("--external-index", external_index, "Fix the external profile to this support point");
  wup->add_flag("--expected", expected, "Average over the external distribution (default)")->excludes(idx_opt);
  wup->add_option("--epsilon", wup_epsilon, "Grid threshold is epsilon / n_c");

  double baseline_epsilon = 0.05;
  auto* baseline = app.add_subcommand("baseline", "Individual bidding utilities against the agency");
  baseline->add_option("instance", path, "Instance JSON, or - for stdin")->required();
  baseline->add_option("--epsilon", baseline_epsilon, "Approximation parameter for the agency solve");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInvalidInstance;
  }

  const auto text = slurp(path);
  if (!text) {
    std::cerr << "cannot read " << path << "\n";
    return kInvalidInstance;
  }

  if (*validate) return emit(cmd_validate(*text), "");
  if (*discretize) return emit(cmd_discretize(*text, p), "");
  if (*solve) {
    solve_opt.mode = mode == "arbitrary" ? SolveOptions::Mode::Arbitrary : SolveOptions::Mode::LimitedLiability;
    solve_opt.format = format == "json" ? Format::Json : Format::Text;
    if (!mechanism.empty()) solve_opt.mechanism = mechanism == "gsp" ? agency::Mechanism::GSP : agency::Mechanism::VCG;
    return emit(cmd_solve(*text, solve_opt), out_path);
  }
  if (*wup) {
    std::optional<std::string> weights;
    if (!weights_path.empty()) {
      weights = slurp(weights_path);
      if (!weights) {
        std::cerr << "cannot read " << weights_path << "\n";
        return kInvalidInstance;
      }
    }
    return emit(cmd_wup(*text, weights, external_index, wup_epsilon), "");
  }
  return emit(cmd_baseline(*text, baseline_epsilon), "");
}
