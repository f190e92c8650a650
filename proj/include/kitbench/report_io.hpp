#pragma once

// Report serialization. The structured format is JSON; the CSV format is one
// row per grid point, ROC point, sample or sweep point. Both carry
// schema_version = eval::kReportSchemaVersion.

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"
#include "kitbench/evaluation.hpp"

namespace kitbench::report {

enum class Format { structured, csv };

/// "structured" (or "json") and "csv". Throws ConfigError otherwise.
Format parse_format(std::string_view name);
std::string format_name(Format f);

struct ReportManifest {
  std::string path;
  Format format = Format::structured;
  std::size_t bytes = 0;
  std::string checksum;  // sha256 hex
};

nlohmann::json to_json(const eval::ThresholdSweepReport& r);
nlohmann::json to_json(const eval::AttackCampaignReport& r);
nlohmann::json to_json(const eval::SweepReport& r);

/// Throw DataError on a missing field, wrong kind or unsupported schema version.
eval::ThresholdSweepReport threshold_sweep_from_json(const nlohmann::json& j);
eval::AttackCampaignReport campaign_from_json(const nlohmann::json& j);
eval::SweepReport sweep_from_json(const nlohmann::json& j);

/// schema_version,threshold,fpr,fnr,accuracy
std::string grid_csv(const eval::ThresholdSweepReport& r);
/// schema_version,fpr,tpr
std::string roc_csv(const eval::ThresholdSweepReport& r);
/// schema_version,sample,row,success,iterations,l0,l1,l2,linf
std::string campaign_csv(const eval::AttackCampaignReport& r);
/// schema_version,parameter,value,success_rate,successes,l0,l1,l2,linf
std::string sweep_csv(const eval::SweepReport& r);

/// The CSV form of a threshold sweep is its grid; write the ROC with write_roc_csv.
ReportManifest write_report(const eval::ThresholdSweepReport& r, const std::filesystem::path& path,
                            Format format);
ReportManifest write_report(const eval::AttackCampaignReport& r, const std::filesystem::path& path,
                            Format format);
ReportManifest write_report(const eval::SweepReport& r, const std::filesystem::path& path,
                            Format format);
ReportManifest write_roc_csv(const eval::ThresholdSweepReport& r, const std::filesystem::path& path);

eval::ThresholdSweepReport read_threshold_sweep(const std::filesystem::path& path);
eval::AttackCampaignReport read_campaign(const std::filesystem::path& path);
eval::SweepReport read_sweep(const std::filesystem::path& path);

}  // namespace kitbench::report
