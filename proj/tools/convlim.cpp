#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "convlim/commands.hpp"

namespace {

std::vector<std::string> split_labels(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact verification of convolution systems of finite probability spaces"};
  app.require_subcommand(1);
  int status = 0;

  std::string file;
  std::string suite = "all";
  std::string json_out;
  auto* verify = app.add_subcommand("verify", "Run verification suites on a description file");
  verify->add_option("file", file, "Description file (JSON)")->required()->check(CLI::ExistingFile);
  std::string suite_help = "Suite: all";
  for (const auto& s : convlim::suite_names()) suite_help += ", " + s;
  verify->add_option("--suite", suite, suite_help);
  verify->add_option("--json", json_out, "Write the machine-readable report here");
  verify->callback([&] {
    std::optional<std::filesystem::path> j;
    if (!json_out.empty()) j = json_out;
    status = convlim::cmd_verify(file, suite, j, std::cout, std::cerr);
  });

  convlim::ExportRequest req;
  std::string triple;
  std::string window;
  std::string out_path;
  auto* exp = app.add_subcommand("export", "Export matrices, flat spaces or flow laws");
  exp->add_option("file", file, "Description file (JSON)")->required()->check(CLI::ExistingFile);
  exp->add_option("--what", req.what, "koopman | theta | cpps-spaces | flow-laws")
      ->required()
      ->check(CLI::IsMember({"koopman", "theta", "cpps-spaces", "flow-laws"}));
  exp->add_option("--triple", triple, "r,s,t for koopman");
  exp->add_option("--window", window, "s,t for theta");
  exp->add_option("--out", out_path, "Output JSON file")->required();
  exp->callback([&] {
    req.labels = split_labels(req.what == "koopman" ? triple : window);
    req.out = out_path;
    status = convlim::cmd_export(file, req, std::cout, std::cerr);
  });

  std::string from;
  std::string to;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  auto* sample = app.add_subcommand("sample", "Sample flow trajectories over the full grid");
  sample->add_option("file", file, "Description file (JSON)")->required()->check(CLI::ExistingFile);
  sample->add_option("--from", from, "Left end of the summarized increment")->required();
  sample->add_option("--to", to, "Right end of the summarized increment")->required();
  sample->add_option("-n", n, "Number of draws")->required()->check(CLI::PositiveNumber);
  sample->add_option("--seed", seed, "Generator seed")->required();
  sample->add_option("--out", out_path, "Output CSV file")->required();
  sample->callback([&] { status = convlim::cmd_sample(file, from, to, n, seed, out_path, std::cout, std::cerr); });

  auto* tower = app.add_subcommand("tower", "Check cylinder-event consistency along a refinement tower");
  tower->add_option("file", file, "Description file (JSON)")->required()->check(CLI::ExistingFile);
  tower->callback([&] { status = convlim::cmd_tower(file, std::cout, std::cerr); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  return status;
}
