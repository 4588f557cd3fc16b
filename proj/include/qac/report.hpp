#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "qac/config.hpp"
#include "qac/criteria.hpp"
#include "qac/inequality.hpp"
#include "qac/leeyang.hpp"
#include "qac/pimc.hpp"

namespace qac {

inline constexpr const char* kVersion = "1.0.0";

// 17 significant digits; round-trips doubles exactly
std::string format_g17(double v);

nlohmann::json to_json(const ValidationReport& r);
nlohmann::json to_json(const CriterionReport& r);
nlohmann::json to_json(const InequalityReport& r);
nlohmann::json to_json(const Estimate& e);
nlohmann::json to_json(const ZeroClassification& z);
nlohmann::json to_json(const LaguerreCheck& c);
nlohmann::json to_json(const VanHoveReport& v);

// every run writes this next to its results: config digest, seed, version
nlohmann::json run_manifest(const Config& cfg, std::uint64_t seed);

// RFC-4180 CSV with g17 numbers
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

// JSON schemas for the emitted reports (--schema)
nlohmann::json output_schemas();

}  // namespace qac
