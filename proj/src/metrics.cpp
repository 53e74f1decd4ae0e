#include "gradprop/metrics.hpp"

#include <cstdio>
#include <json.hpp>

#include "gradprop/error.hpp"

namespace gradprop {

double RunMetrics::total_seconds() const {
  double s = 0.0;
  for (const auto& e : epochs) s += e.seconds;
  return s;
}

std::string to_json_line(const EpochRecord& record) {
  nlohmann::ordered_json j;
  j["epoch"] = record.epoch;
  j["train_accuracy"] = record.train_accuracy;
  j["test_accuracy"] = record.test_accuracy;
  j["mean_output_cost"] = record.mean_output_cost;
  j["mean_layer_costs"] = record.mean_layer_costs;
  return j.dump();
}

EpochRecord parse_json_line(const std::string& line) {
  try {
    const auto j = nlohmann::json::parse(line);
    EpochRecord r;
    r.epoch = j.at("epoch").get<std::size_t>();
    r.train_accuracy = j.at("train_accuracy").get<double>();
    r.test_accuracy = j.at("test_accuracy").get<double>();
    r.mean_output_cost = j.at("mean_output_cost").get<double>();
    r.mean_layer_costs = j.at("mean_layer_costs").get<std::vector<double>>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad metrics record: ") + e.what());
  }
}

std::vector<EpochRecord> read_metrics_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open metrics file " + path.string());
  std::vector<EpochRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(parse_json_line(line));
  }
  return out;
}

std::filesystem::path summary_path_for(const std::filesystem::path& metrics_path) {
  auto p = metrics_path;
  return p.replace_extension(".csv");
}

std::filesystem::path timing_path_for(const std::filesystem::path& metrics_path) {
  auto p = metrics_path;
  p += ".timing.jsonl";
  return p;
}

MetricsWriter::MetricsWriter(std::filesystem::path metrics_path)
    : path_(std::move(metrics_path)),
      metrics_(path_, std::ios::trunc),
      timing_(timing_path_for(path_), std::ios::trunc) {
  if (!metrics_ || !timing_) throw ConfigError("cannot write metrics file " + path_.string());
}

void MetricsWriter::append(const EpochRecord& record) {
  metrics_ << to_json_line(record) << '\n';
  metrics_.flush();
  nlohmann::ordered_json t;
  t["epoch"] = record.epoch;
  t["seconds"] = record.seconds;
  timing_ << t.dump() << '\n';
  timing_.flush();
}

void MetricsWriter::write_summary(const RunSummary& s) const {
  std::ofstream out(summary_path_for(path_), std::ios::trunc);
  if (!out) throw ConfigError("cannot write summary " + summary_path_for(path_).string());
  char score[32];
  std::snprintf(score, sizeof score, "%.2f%%", 100.0 * s.score);
  nlohmann::json tau = s.tau;
  nlohmann::json eta = s.eta;
  out << "network,score,tau,eta,epochs,seed,updater\n";
  out << s.network << ',' << score << ',' << tau.dump() << ',' << eta.dump() << ',' << s.epochs << ',' << s.seed << ','
      << s.updater << '\n';
}

}  // namespace gradprop
