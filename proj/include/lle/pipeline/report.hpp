#pragma once

#include <filesystem>
#include <map>
#include <string>

namespace lle {

// Per-image metric values keyed by image id, plus per-metric means. Every
// per-image map must share one key set; make_aggregate enforces it.
struct MetricReport {
  std::map<std::string, std::map<std::string, double>> per_image;
  std::map<std::string, double> aggregate;
  std::map<std::string, std::string> notes;
};

void make_aggregate(MetricReport& report);
void write_report(const MetricReport& report,
                  const std::filesystem::path& path);
MetricReport read_report(const std::filesystem::path& path);

}  // namespace lle
