#ifndef CONSIST_REPORT_HPP
#define CONSIST_REPORT_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "consist/linear.hpp"
#include "consist/tradeoff.hpp"
#include "consist/vector.hpp"

namespace consist {

/// Shortest round-trip decimal form; "inf", "-inf" and "nan" for non-finite values.
std::string format_double(double v);

/// RFC 4180 field quoting.
std::string csv_field(const std::string& text);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add(std::vector<std::string> row);
  std::size_t size() const { return rows_.size(); }
  std::string str() const;  // CRLF line endings

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Numbers become JSON numbers; non-finite values become null.
nlohmann::json number(double v);
nlohmann::json vector_json(const Vector& v);

nlohmann::json scm_json(const Dataset& dataset, const ScmResult& result);
nlohmann::json sensitivity_json(const SensitivityReport& report);
nlohmann::json vcm_json(const Dataset& dataset, const VcmResult& result);
nlohmann::json trace_json(const IterationTrace& trace);
nlohmann::json tradeoff_json(const Dataset& dataset, const TradeoffScan& scan);
nlohmann::json trial_summary_json(const TrialConfig& config, const TrialStats& stats);

CsvTable sensitivity_csv(const SensitivityReport& report);
/// Nonzero relaxations only.
CsvTable relaxation_csv(const Dataset& dataset, const VcmResult& result);
CsvTable trials_csv(const TrialStats& stats);
CsvTable histogram_csv(const Histogram& histogram);
CsvTable tradeoff_csv(const TradeoffScan& scan);

/// Writes bytes verbatim; throws Error on failure.
void write_file(const std::filesystem::path& path, const std::string& content);
/// Two-space indented JSON with a trailing newline.
std::string dump_json(const nlohmann::json& doc);

}  // namespace consist

#endif  // CONSIST_REPORT_HPP
