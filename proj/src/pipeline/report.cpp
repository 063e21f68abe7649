#include "lle/pipeline/report.hpp"

#include <fstream>

#include <json.hpp>

#include "lle/core/errors.hpp"

namespace lle {

void make_aggregate(MetricReport& report) {
  report.aggregate.clear();
  if (report.per_image.empty())
    throw DataError("report: no per-image entries");
  const auto& first_keys = report.per_image.begin()->second;
  for (const auto& [id, metrics] : report.per_image) {
    if (metrics.size() != first_keys.size())
      throw DataError("report: metric key set differs for image '" + id + "'");
    for (const auto& [key, value] : metrics) {
      if (!first_keys.count(key))
        throw DataError("report: metric key set differs for image '" + id +
                        "'");
      report.aggregate[key] += value;
    }
  }
  for (auto& [key, value] : report.aggregate)
    value /= double(report.per_image.size());
}

void write_report(const MetricReport& report,
                  const std::filesystem::path& path) {
  nlohmann::json doc;
  for (const auto& [id, metrics] : report.per_image)
    doc["per_image"][id] = metrics;
  doc["aggregate"] = report.aggregate;
  if (!report.notes.empty()) doc["notes"] = report.notes;
  std::ofstream out(path);
  if (!out) throw IoError("write_report: cannot open " + path.string());
  out << doc.dump(2) << "\n";
  if (!out) throw IoError("write_report: write failed for " + path.string());
}

MetricReport read_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("read_report: cannot open " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("read_report: bad JSON: ") + e.what());
  }
  MetricReport report;
  for (const auto& [id, metrics] : doc.at("per_image").items())
    report.per_image[id] = metrics.get<std::map<std::string, double>>();
  report.aggregate = doc.at("aggregate").get<std::map<std::string, double>>();
  if (doc.contains("notes"))
    report.notes = doc["notes"].get<std::map<std::string, std::string>>();
  return report;
}

}  // namespace lle
