#pragma once

// CSV rows, reference-table checks and the subcommand dispatcher used by the
// command-line tool.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bspaa/comparison.hpp"
#include "bspaa/config.hpp"

namespace bspaa {

/// Fixed column order of every CSV written by the tool.
const std::vector<std::string>& csv_columns();
std::string csv_header();

/// printf "%.6g".
std::string format_number(double v);

/// One row; baseline columns are left empty when `report` carries only the
/// adaptive plan.
std::string csv_row(const std::string& scenario_id, const PriorSpec& prior, const CostModel& cost,
                    const OptimalPlan& bspaa, const ComparisonReport* report = nullptr);

using CsvRecord = std::map<std::string, std::string>;
std::vector<CsvRecord> read_csv(std::istream& in);

struct Deviation {
  std::string scenario_id;
  std::string reference_id;
  std::string column;
  double computed;
  double reference;
  double relative;  // |computed - reference| / |reference|
};

/// Matches computed rows to reference rows on the input columns (alpha..a2)
/// and lists every result cell off by more than `threshold` (relative).
/// Reference cells left empty are not compared.
std::vector<Deviation> flag_deviations(const std::vector<CsvRecord>& computed,
                                       const std::vector<CsvRecord>& reference, double threshold = 0.01);

struct RunFlags {
  std::string config_path;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<long long> replicates;
  std::optional<int> n_cap;
  std::optional<int> threads;
  std::optional<EdCoefficient> ed_coefficient;
};

/// Runs one subcommand (optimize, risk, decide, simulate, compare, sweep,
/// oracle). Returns the process exit status; diagnostics go to `err`.
int run(const std::string& subcommand, const RunFlags& flags, std::ostream& out, std::ostream& err);

}  // namespace bspaa
