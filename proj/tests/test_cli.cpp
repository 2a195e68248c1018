#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "convlim/commands.hpp"
#include "convlim/description.hpp"
#include "support.hpp"

using namespace convlim;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {

struct Run {
  int status;
  std::string output;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(CONVLIM_BINARY) + " " + args + " 2>&1";
  std::FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string out;
  char buf[4096];
  while (std::size_t k = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, k);
  const int raw = pclose(pipe);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / "convlim-tests";
  fs::create_directories(dir);
  return dir / (std::to_string(::getpid()) + "-" + name);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

const char* kFiles[] = {"fixture_a.json", "fixture_b.json", "explicit_coin.json", "explicit_broken.json", "fixture_a_mutated.json",
                        "per_interval_nonassoc.json"};

}  // namespace

TEST(Description, ParseSerializeRoundTrip) {
  for (const char* f : kFiles) {
    auto d = load_description(data_path(f));
    auto again = parse_description(serialize(d));
    EXPECT_EQ(d, again) << f;
    EXPECT_EQ(serialize(again), serialize(d)) << f;
  }
}

TEST(Description, NormalizationErrorNamesTheInterval) {
  try {
    load_description(data_path("bad_normalization.json"));
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.path(), "measures.per_interval[0].weights");
    EXPECT_NE(std::string(e.what()).find("(0,1)"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("9/10"), std::string::npos);
  }
}

TEST(Description, AssociativityErrorNamesTheTriple) {
  try {
    load_description(data_path("bad_associativity.json"));
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.path(), "semigroup.table");
    EXPECT_NE(std::string(e.what()).find("(x,x,y)"), std::string::npos);
  }
}

TEST(Description, SchemaErrorsCarryPaths) {
  struct Case {
    const char* text;
    const char* path;
  } cases[] = {
      {R"({"format": 2, "times": ["0","1"]})", "format"},
      {R"({"format": 1, "times": ["0"]})", "times"},
      {R"({"format": 1, "times": ["0","1"], "mode": "x"})", "mode"},
      {R"({"format": 1, "times": ["0","1"], "positions": [3, 1], "mode": "semigroup",
           "semigroup": {"elements": ["0"], "table": [["0"]]}, "measures": {"idempotent": {"0": "1"}}})",
       "positions[1]"},
      {R"({"format": 1, "times": ["0","1"], "mode": "semigroup",
           "semigroup": {"elements": ["0"], "table": [["0"]]}, "measures": {"idempotent": {"0": "2/4"}}})",
       "measures.idempotent.0"},
      {R"({"format": 1, "times": ["0","1"], "mode": "semigroup",
           "semigroup": {"elements": ["0"], "table": [["1"]]}, "measures": {"idempotent": {"0": "1"}}})",
       "semigroup.table[0][0]"},
      {"{", "<root>"},
  };
  for (const auto& c : cases) {
    try {
      parse_description_text(c.text);
      ADD_FAILURE() << "accepted: " << c.text;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.path(), c.path) << e.what();
    }
  }
}

TEST(Description, PositionsRule) {
  EXPECT_EQ(effective_positions({"0", "2", "5"}, std::nullopt), (std::vector<long long>{0, 2, 5}));
  EXPECT_EQ(effective_positions({"a", "b"}, std::nullopt), (std::vector<long long>{0, 1}));
  EXPECT_EQ(effective_positions({"3", "1"}, std::nullopt), (std::vector<long long>{0, 1}));
  EXPECT_EQ(effective_positions({"a", "b"}, std::vector<long long>{4, 9}), (std::vector<long long>{4, 9}));
}

TEST(Description, NonIdempotentMeasureIsRejectedAtBuild) {
  auto d = parse_description_text(R"({"format": 1, "times": ["0","1","2"], "mode": "semigroup",
      "semigroup": {"elements": ["0","1"], "table": [["0","1"],["1","0"]]},
      "measures": {"idempotent": {"0": "1/3", "1": "2/3"}}})");
  try {
    build_system(d);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.path(), "measures.idempotent");
  }
}

TEST(Verify, ExitCodes) {
  std::ostringstream out, err;
  EXPECT_EQ(cmd_verify(data_path("fixture_a.json"), "all", std::nullopt, out, err), 0) << out.str();
  EXPECT_EQ(cmd_verify(data_path("fixture_b.json"), "all", std::nullopt, out, err), 0) << out.str();
  EXPECT_EQ(cmd_verify(data_path("explicit_coin.json"), "all", std::nullopt, out, err), 0) << out.str();
  EXPECT_EQ(cmd_verify(data_path("explicit_broken.json"), "axioms", std::nullopt, out, err), 1);
  EXPECT_EQ(cmd_verify(data_path("per_interval_nonassoc.json"), "axioms", std::nullopt, out, err), 1);
  EXPECT_EQ(cmd_verify(data_path("bad_normalization.json"), "all", std::nullopt, out, err), 2);
  EXPECT_THROW(run_suite(load_description(data_path("fixture_a.json")), "nope"), std::invalid_argument);
}

TEST(Verify, JsonIsDeterministic) {
  const auto a = scratch("a.json");
  const auto b = scratch("b.json");
  std::ostringstream out, err;
  ASSERT_EQ(cmd_verify(data_path("fixture_b.json"), "all", a, out, err), 0);
  ASSERT_EQ(cmd_verify(data_path("fixture_b.json"), "all", b, out, err), 0);
  EXPECT_EQ(slurp(a), slurp(b));
  auto doc = nlohmann::json::parse(slurp(a));
  ASSERT_TRUE(doc.is_object() || doc.is_array());
}

TEST(Verify, FailingSuiteReportsWitness) {
  auto reports = run_suite(load_description(data_path("explicit_broken.json")), "axioms");
  ASSERT_EQ(reports.size(), 1u);
  ASSERT_NE(reports[0].first_failure(), nullptr);
  EXPECT_NE(reports[0].first_failure()->witness.find("T(a,b,c)"), std::string::npos);
}

TEST(Verify, AllSuitesIncludeTowerOnlyWhenPresent) {
  auto with = run_suite(load_description(data_path("fixture_a.json")), "all");
  auto without = run_suite(load_description(data_path("fixture_b.json")), "all");
  EXPECT_EQ(with.size(), suite_names().size());
  EXPECT_EQ(without.size() + 1, suite_names().size());
  EXPECT_EQ(with.back().suite(), "tower");
}

TEST(Export, KoopmanShape) {
  auto j = export_koopman(build_system(load_description(data_path("fixture_a.json"))), 0, 1, 2);
  EXPECT_EQ(j["rows"], 4);
  EXPECT_EQ(j["cols"], 2);
  EXPECT_EQ(j["matrix"][1][1], "1");
  EXPECT_EQ(j["matrix"][1][0], "0");
  EXPECT_EQ(j["row_labels"].size(), 4u);
}

TEST(Export, FlowLawsOfFixtureB) {
  auto j = export_flow_laws(build_system(load_description(data_path("fixture_b.json"))));
  const auto text = j.dump();
  EXPECT_NE(text.find("1/4"), std::string::npos);
}

TEST(Export, ThetaOnTwoPoints) {
  // With a single cell the flat space is the base space, so theta is a permutation of the basis.
  auto times = make_time_set({"a", "b"});
  auto trivial = from_idempotent(cyclic(1), {q(1)}, times);
  auto j1 = export_theta(trivial, 0, 1);
  EXPECT_EQ(j1["rows"], 1);
  EXPECT_EQ(j1["cols"], 1);
  EXPECT_EQ(j1["matrix"][0][0], "1");

  auto z3 = from_idempotent(cyclic(3), std::vector<Rational>(3, q(1, 3)), times);
  auto j3 = export_theta(z3, 0, 1);
  ASSERT_EQ(j3["rows"], 3);
  ASSERT_EQ(j3["cols"], 3);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) EXPECT_EQ(j3["matrix"][r][c], r == c ? "1" : "0") << r << "," << c;
  EXPECT_THROW(export_theta(z3, 1, 1), std::invalid_argument);
}

TEST(Sample, ReproducibleAndComposes) {
  auto sys = build_system(load_description(data_path("fixture_b.json")));
  std::ostringstream a, b, c;
  auto r1 = sample_flow(sys, 0, 2, 500, 42, &a);
  auto r2 = sample_flow(sys, 0, 2, 500, 42, &b);
  sample_flow(sys, 0, 2, 500, 43, &c);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_NE(a.str(), c.str());
  EXPECT_EQ(r1.counts, r2.counts);

  std::istringstream lines(a.str());
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, std::string("# sampler=") + kSamplerId + " seed=42 n=500");
  std::getline(lines, line);
  EXPECT_EQ(line, "thread_index,w(0,1),w(1,2),X(0,1),X(0,2),X(1,2)");
  std::size_t rows = 0;
  while (std::getline(lines, line)) {
    auto f = split(line, ',');
    ASSERT_EQ(f.size(), 6u);
    EXPECT_EQ(f[0], std::to_string(rows));
    EXPECT_EQ(f[1], f[3]);
    EXPECT_EQ(f[2], f[5]);
    // X(0,2) = X(0,1) + X(1,2) mod 3, row by row.
    EXPECT_EQ(std::stoi(f[4]), (std::stoi(f[3]) + std::stoi(f[5])) % 3) << line;
    EXPECT_NE(f[3], "2");  // null outcome never drawn
    ++rows;
  }
  EXPECT_EQ(rows, 500u);
}

TEST(Sample, FixtureAParityOfTheGrid) {
  auto sys = build_system(load_description(data_path("fixture_a.json")));
  std::ostringstream csv;
  sample_flow(sys, 0, 3, 8, 1, &csv);
  std::istringstream lines(csv.str());
  std::string line;
  std::getline(lines, line);
  std::getline(lines, line);
  ASSERT_EQ(line, "thread_index,w(0,1),w(1,2),w(2,3),X(0,1),X(0,2),X(0,3),X(1,2),X(1,3),X(2,3)");
  std::size_t rows = 0;
  while (std::getline(lines, line)) {
    auto f = split(line, ',');
    ASSERT_EQ(f.size(), 10u);
    const int bits = std::stoi(f[1]) + std::stoi(f[2]) + std::stoi(f[3]);
    EXPECT_EQ(std::stoi(f[6]), bits % 2) << line;
    ++rows;
  }
  EXPECT_EQ(rows, 8u);
}

TEST(Sample, SingleDrawAndBadArguments) {
  auto sys = build_system(load_description(data_path("fixture_b.json")));
  auto r = sample_flow(sys, 1, 2, 1, 0, nullptr);
  EXPECT_EQ(r.n, 1u);
  std::size_t total = 0;
  for (auto k : r.counts) total += k;
  EXPECT_EQ(total, 1u);
  EXPECT_THROW(sample_flow(sys, 2, 1, 5, 0, nullptr), std::invalid_argument);
  EXPECT_THROW(sample_flow(sys, 0, 1, 0, 0, nullptr), std::invalid_argument);
}

TEST(Binary, VerifyAndExitStatus) {
  auto ok = run("verify " + data_path("fixture_b.json"));
  EXPECT_EQ(ok.status, 0) << ok.output;
  EXPECT_NE(ok.output.find("all suites passed"), std::string::npos);
  auto bad = run("verify " + data_path("explicit_broken.json") + " --suite axioms");
  EXPECT_EQ(bad.status, 1);
  EXPECT_NE(bad.output.find("witness"), std::string::npos);
  auto err = run("verify " + data_path("bad_normalization.json"));
  EXPECT_EQ(err.status, 2);
  EXPECT_NE(err.output.find("9/10"), std::string::npos);
  EXPECT_EQ(run("verify " + data_path("fixture_b.json") + " --suite nonsense").status, 2);
  EXPECT_EQ(run("verify /nonexistent.json").status, 2);
  EXPECT_EQ(run("").status, 2);
}

TEST(Binary, ExportWritesMatrix) {
  const auto out = scratch("koop.json");
  auto r = run("export " + data_path("fixture_a.json") + " --what koopman --triple 0,1,2 --out " + out.string());
  ASSERT_EQ(r.status, 0) << r.output;
  auto doc = nlohmann::json::parse(slurp(out));
  EXPECT_EQ(doc["rows"], 4);
  EXPECT_EQ(run("export " + data_path("fixture_a.json") + " --what koopman --triple 0,1 --out " + out.string()).status,
            2);
  EXPECT_EQ(run("export " + data_path("fixture_a.json") + " --what koopman --triple 2,1,0 --out " + out.string()).status,
            2);
}

TEST(Binary, SampleIsReproducible) {
  const auto a = scratch("s1.csv");
  const auto b = scratch("s2.csv");
  const std::string base = "sample " + data_path("fixture_b.json") + " --from 0 --to 2 -n 200 --seed 5 --out ";
  ASSERT_EQ(run(base + a.string()).status, 0);
  ASSERT_EQ(run(base + b.string()).status, 0);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_EQ(run("sample " + data_path("fixture_b.json") + " --from 2 --to 0 -n 5 --seed 1 --out " + a.string()).status,
            2);
}

TEST(Binary, Tower) {
  auto r = run("tower " + data_path("fixture_a.json"));
  EXPECT_EQ(r.status, 0) << r.output;
  EXPECT_EQ(run("tower " + data_path("fixture_b.json")).status, 2);
}

TEST(Binary, MutatedFixtureFailsPartitionsWithChainWitness) {
  auto r = run("verify " + data_path("fixture_a_mutated.json") + " --suite partitions");
  EXPECT_EQ(r.status, 1) << r.output;
  EXPECT_NE(r.output.find("witness: chain {0,3} <- "), std::string::npos) << r.output;
  auto axioms = run("verify " + data_path("fixture_a_mutated.json") + " --suite axioms");
  EXPECT_EQ(axioms.status, 1);
  EXPECT_NE(axioms.output.find("associativity"), std::string::npos);
}

TEST(Binary, FixtureBProductSystemSuitePasses) {
  auto r = run("verify " + data_path("fixture_b.json") + " --suite ps");
  EXPECT_EQ(r.status, 0) << r.output;
}
