#pragma once

// Per-epoch run metrics.
//
// The JSON-lines file holds one deterministic record per epoch, so two runs
// with the same config and seed produce identical bytes. Wall-clock time goes
// to a sidecar "<metrics>.timing.jsonl". The final summary is a one-row CSV
// "<metrics stem>.csv" with the columns network, score, tau, eta.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace gradprop {

struct EpochRecord {
  std::size_t epoch = 0;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  double mean_output_cost = 0.0;
  std::vector<double> mean_layer_costs;
  double seconds = 0.0;

  bool operator==(const EpochRecord&) const = default;
};

struct RunMetrics {
  std::vector<EpochRecord> epochs;

  double final_test_accuracy() const { return epochs.empty() ? 0.0 : epochs.back().test_accuracy; }
  double total_seconds() const;
};

/// Deterministic JSON line (no wall time).
std::string to_json_line(const EpochRecord& record);
/// Inverse of to_json_line; seconds is left at 0. Throws ConfigError on bad input.
EpochRecord parse_json_line(const std::string& line);
/// Reads every record of a JSON-lines metrics file.
std::vector<EpochRecord> read_metrics_file(const std::filesystem::path& path);

struct RunSummary {
  std::string network;
  double score = 0.0;  // final test accuracy in [0, 1]
  double tau = 0.0;
  double eta = 0.0;
  std::size_t epochs = 0;
  std::uint64_t seed = 0;
  std::string updater;
};

std::filesystem::path summary_path_for(const std::filesystem::path& metrics_path);
std::filesystem::path timing_path_for(const std::filesystem::path& metrics_path);

/// Appends epoch records as they complete and writes the summary CSV at the end.
class MetricsWriter {
 public:
  /// Truncates both the metrics file and its timing sidecar.
  explicit MetricsWriter(std::filesystem::path metrics_path);

  void append(const EpochRecord& record);
  void write_summary(const RunSummary& summary) const;

 private:
  std::filesystem::path path_;
  std::ofstream metrics_;
  std::ofstream timing_;
};

}  // namespace gradprop
