#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

namespace icuharm {

struct DemoOptions {
    std::uint64_t seed = 42;
    int patients = 20;
};

struct DemoSummary {
    std::filesystem::path out_dir;
    /// Rows written per `<source>/<file>`.
    std::map<std::string, std::size_t> rows;
    nlohmann::ordered_json ground_truth;
};

/// Source configurations of the two demo sources: `demo_long` (long item
/// tables, absolute timestamps, patient < hadm < icustay) and `demo_wide`
/// (wide vitals, minute offsets, a single stay ID).
nlohmann::ordered_json demo_source_configs();

/// Concept dictionary wiring every shipped concept to both demo sources.
nlohmann::ordered_json demo_dictionary();

/// Writes `<out>/demo_long/*.csv`, `<out>/demo_wide/*.csv`,
/// `<out>/config/{data-sources,concept-dict}.json` and `<out>/ground_truth.json`.
/// The same seed always produces byte-identical files.
DemoSummary generate_demo(const DemoOptions& opts, const std::filesystem::path& out_dir);

}  // namespace icuharm
