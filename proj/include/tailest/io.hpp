#pragma once

#include "tailest/adaptive_select.hpp"
#include "tailest/dist_models.hpp"
#include "tailest/mc_harness.hpp"
#include "tailest/minimax_lb.hpp"
#include "tailest/tail_estimators.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace tailest {

/// Formats a scalar with 17 significant digits ('.' decimal separator), the
/// precision all CSV output uses so reruns compare bit-stable.
std::string fmt_g17(scalar_t value);

/// Dataset text format: optional "# seed=<u64|external> model=<canonical>"
/// header, then one value per line.
void write_dataset(std::ostream& os, const Dataset& data);
void write_dataset_file(const std::string& path, const Dataset& data);

/// Parses a dataset file. Values must be positive finite numbers; violations
/// raise std::runtime_error naming the line.
Dataset read_dataset(std::istream& is, const std::string& origin = "<stream>");
Dataset read_dataset_file(const std::string& path);

// CSV serialization. Each writer emits a header row.
std::string report_csv_header();
std::string report_csv_row(const EstimateReport& report);

std::string trace_csv_header();
std::string trace_csv_row(const ComparisonRecord& rec);
void write_trace_csv(std::ostream& os, const std::vector<ComparisonRecord>& trace);

std::string trials_csv_header();
std::string trials_csv_row(const TrialRecord& rec);
void write_trials_csv(std::ostream& os, const std::vector<TrialRecord>& records);
std::vector<TrialRecord> read_trials_csv(std::istream& is);
std::vector<TrialRecord> read_trials_csv_file(const std::string& path);

std::string summary_csv_header();
void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows);

std::string rates_csv_header();
void write_rates_csv(std::ostream& os,
                     const std::vector<std::pair<std::string, RateFit>>& fits);

void write_family_csv(std::ostream& os, const LowerBoundFamily& family);
void write_fano_csv(std::ostream& os, const FanoReport& report);

/// Writes a whole file at once, creating parent directories.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace tailest
