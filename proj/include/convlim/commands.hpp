#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "convlim/convsys.hpp"
#include "convlim/description.hpp"
#include "convlim/report.hpp"

namespace convlim {

/// Suite names accepted by run_suite, in the order "all" runs them.
const std::vector<std::string>& suite_names();

/// Runs one named suite ("all" expands to every suite; "tower" is only
/// included in "all" when the description has a tower block). Exceptions
/// raised while building objects become a failed "error" check. Throws
/// std::invalid_argument on an unknown suite name.
std::vector<Report> run_suite(const SystemDescription& desc, const std::string& suite);

/// Deterministic JSON rendering of reports (timings are left out).
nlohmann::json reports_json(const std::vector<Report>& reports);

/// The exit status used by the CLI: 0 all passed, 1 a check failed, 2 bad input.
int cmd_verify(const std::filesystem::path& file, const std::string& suite,
               const std::optional<std::filesystem::path>& json_out, std::ostream& out, std::ostream& err);

/// Row-major matrix export with basis labels; entries are rational strings.
nlohmann::json export_koopman(const SystemPtr& sys, std::size_t r, std::size_t s, std::size_t t);
nlohmann::json export_theta(const SystemPtr& sys, std::size_t s, std::size_t t);
nlohmann::json export_cpps_spaces(const SystemPtr& sys);
nlohmann::json export_flow_laws(const SystemPtr& sys);

struct ExportRequest {
  std::string what;                  ///< koopman | theta | cpps-spaces | flow-laws
  std::vector<std::string> labels;   ///< r,s,t for koopman; s,t for theta
  std::filesystem::path out;
};

int cmd_export(const std::filesystem::path& file, const ExportRequest& req, std::ostream& out, std::ostream& err);

/// Identifier of the sampling algorithm: mt19937_64 draws compared with
/// 64-bit cumulative thresholds floor(F(k) * 2^64) per grid cell.
inline constexpr const char* kSamplerId = "mt19937_64/threshold64";

struct SampleResult {
  std::vector<std::string> outcomes;  ///< outcomes of X_{s,t}
  std::vector<Rational> exact;        ///< law of X_{s,t}
  std::vector<std::size_t> counts;    ///< empirical counts
  std::size_t n = 0;
};

/// Draws n threads of the full grid with the product measure, writes one CSV
/// row per thread to `csv` (when non-null) and tallies X_{s,t}.
SampleResult sample_flow(const SystemPtr& sys, std::size_t s, std::size_t t, std::size_t n, std::uint64_t seed,
                         std::ostream* csv);

std::string sample_summary(const SystemPtr& sys, std::size_t s, std::size_t t, std::uint64_t seed,
                           const SampleResult& result);

int cmd_sample(const std::filesystem::path& file, const std::string& from, const std::string& to, std::size_t n,
               std::uint64_t seed, const std::filesystem::path& out_csv, std::ostream& out, std::ostream& err);

int cmd_tower(const std::filesystem::path& file, std::ostream& out, std::ostream& err);

}  // namespace convlim
