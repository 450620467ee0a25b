#pragma once

/*!
  \file verify.hpp
  \brief Verification suite: sweeps the closed-form field formulas against
         their map-calculus oracles over sampled points of a configured
         doubly warped product and reports match / corrected-match / mismatch
         verdicts per case, with a ledger of the corrections that were needed.

  A configuration describes the two factors, the squared warpings, an optional
  factor self-map, the cases to run, and the sampling parameters. It can be
  loaded from JSON or taken from a named builtin. Reports serialize to JSON,
  CSV, or plain text and are byte-identical across runs with the same
  configuration and seed (modulo the generated-at stamp).

  Point sweeps run in parallel when OpenMP is enabled; a serial reference
  path is kept for testing and produces identical reports.
*/

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "warpcheck/closed_forms.hpp"

namespace warpcheck {

/// How a factor chart and metric are described in a configuration.
struct FactorConfig {
  int dim = 1;
  std::vector<std::pair<double, double>> chart;  ///< per-coordinate open interval
  std::vector<std::string> coords;               ///< empty: x1.. / y1.. defaults
  /// Row-major metric component expressions; empty means Euclidean.
  std::vector<std::string> metric;
};

/// Optional factor self-map in a configuration.
struct MapConfig {
  FactorSide side = FactorSide::fiber;
  std::vector<std::string> components;
};

/// Full description of one verification run.
struct VerifyConfig {
  std::string name = "unnamed";
  FactorConfig base;
  FactorConfig fiber;
  std::string b2;  ///< squared base warping, in base coordinates
  std::string f2;  ///< squared fiber warping, in fiber coordinates
  std::optional<MapConfig> phi;
  std::vector<std::string> cases = {"all"};
  int samples = 100;
  std::uint64_t seed = 42;
  double tol = 1e-6;
  int jet_order = 4;
  bool printed_forms_only = false;  ///< evaluate transcribed forms, skip the ladder
};

/// One applied correction (or reading diagnostic) in a case report.
struct LedgerEntry {
  std::string equation;  ///< formula id from the correction catalog
  std::string term;
  std::string printed;
  std::string corrected;
  double err_before = 0.0;
  double err_after = 0.0;
};

/// Outcome of one verification case.
struct FieldReport {
  std::string case_id;
  std::string verdict;  ///< "match" | "corrected-match" | "mismatch" | "error"
  double max_abs_err = 0.0;
  double max_rel_err = 0.0;
  int points = 0;
  std::vector<LedgerEntry> ledger;
  std::vector<std::string> notes;  ///< human-readable diagnostics (deterministic)
};

/// Parallel or serial point sweeps; reports are identical either way.
enum class RunMode { parallel, serial };

/// Identifiers accepted by run_suite / the command line.
std::vector<std::string> case_ids();

/// Named builtin configurations (cfg-a, cfg-b, cfg-c, cfg-swap, cfg-r22,
/// cfg-prod).
std::vector<std::string> builtin_config_names();
VerifyConfig builtin_config(const std::string& name);

/// Parse a configuration from JSON text / load it from a file. The loader
/// accepts builtin names as well as filesystem paths.
VerifyConfig parse_config(const std::string& json_text);
VerifyConfig load_config(const std::string& path_or_builtin);

/// Deterministic sample of points inside a chart box, shrunk by the given
/// margin fraction on every side.
std::vector<Vec> sample_points(const std::vector<std::pair<double, double>>& chart,
                               int count, std::uint64_t seed, double margin = 0.01);

/// Build the doubly warped product described by a configuration.
DwpSpace space_from_config(const VerifyConfig& cfg);

/// Run one case / a list of cases ("all" expands to every case).
FieldReport run_case(const VerifyConfig& cfg, const std::string& case_id,
                     RunMode mode = RunMode::parallel);
std::vector<FieldReport> run_suite(const VerifyConfig& cfg, RunMode mode = RunMode::parallel);

/// True when no report in the list is a mismatch or an error.
bool all_passed(const std::vector<FieldReport>& reports);

/// Serializations. The timestamp parameter is echoed verbatim so callers can
/// pin it for byte-identical comparisons.
std::string to_json(const std::vector<FieldReport>& reports, const VerifyConfig& cfg,
                    const std::string& timestamp);
std::string to_csv(const std::vector<FieldReport>& reports);
std::string to_text(const std::vector<FieldReport>& reports, const VerifyConfig& cfg,
                    const std::string& timestamp);

}  // namespace warpcheck
