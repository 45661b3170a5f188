#pragma once

#include "icuharm/config.hpp"
#include "icuharm/session.hpp"
#include "icuharm/table.hpp"

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace icuharm {

/// Concepts of the session dictionary, restricted to those available for at
/// least one of `sources` (when given) and to `names` (when given).
Dictionary load_dictionary(const Session& session, const std::vector<std::string>& sources = {},
                           const std::vector<std::string>& names = {});

struct ExplainRow {
    std::string name;
    std::string category;
    std::string description;
};

std::vector<ExplainRow> explain_dictionary(const Dictionary& dict);

/// True iff the concept has an item for the source, or is recursive with
/// every sub-concept available.
bool concept_available(const Dictionary& dict, const std::string& concept_name, const std::string& source);

struct Availability {
    std::vector<std::string> concepts;
    std::vector<std::string> sources;
    /// available[concept][source]
    std::map<std::string, std::map<std::string, bool>> available;
};

Availability concept_availability(const Dictionary& dict, const std::vector<std::string>& sources);

struct ConceptLoadOptions {
    std::chrono::minutes interval{60};
    std::optional<Aggregation> aggregate;
    std::optional<std::vector<Cell>> patient_ids;
    bool keep_components = false;
    /// Extra named arguments forwarded to every recursive-concept callback.
    nlohmann::json extra = nlohmann::json::object();
};

/// Name of the stay ID column of concept results for a source, `<label>_id`.
std::string result_id_column(const SourceDescriptor& src);
inline constexpr std::string_view kTimeColumn = "time_min";
inline constexpr std::string_view kSourceColumn = "source";

/// One item's rows keyed by the source's finest ID, with the value column
/// named after the concept (plus `unit` when the item has a unit column).
Table load_item(Session& session, const ItemDef& item, const ConceptDef& def, const std::string& source,
                const ConceptLoadOptions& opts = {});

/// One concept from one source: preprocessed and aggregated.
Table load_concept(Session& session, const std::string& name, const std::string& source,
                   const ConceptLoadOptions& opts = {});

/// Concepts merged per source; several sources are stacked under a leading
/// `source` ID column.
Table load_concepts(Session& session, const std::vector<std::string>& names,
                    const std::vector<std::string>& sources, const ConceptLoadOptions& opts = {});

// Built-in recursive-concept callbacks.

/// Systemic inflammatory response: one point each for temperature < 36 or
/// > 38, heart rate > 90, respiration > 20 or PaCO2 < 32, and white cells
/// < 4 or > 12. A criterion with no inputs is null and counts as 0.
Table sirs_score(const std::map<std::string, Table>& subs, const RecContext& ctx);

/// PaO2 / FiO2 with FiO2 in percent, each side carried forward for up to
/// `match_win` minutes (default 120).
Table pafi_ratio(const std::map<std::string, Table>& subs, const RecContext& ctx);

/// Parses `30`, `30m`, `2h` or `1d` into minutes.
std::chrono::minutes parse_interval(std::string_view text);

}  // namespace icuharm
