#pragma once

#include "icuharm/diagnostics.hpp"
#include "icuharm/table.hpp"
#include "icuharm/value.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace icuharm {

using Env = std::map<std::string, std::string>;

/// Reads ICU_CONFIG_PATH, ICU_DATA_PATH and ICU_SRC_LOAD from the process environment.
Env process_env();

// ---------------------------------------------------------------------------
// Source configuration
// ---------------------------------------------------------------------------

/// One patient ID system. `table`/`start`/`end` name the table and columns
/// defining each ID's time window; a missing `start` means offset 0.
struct IdSystemEntry {
    std::string label;
    std::string column;
    int position = 0;
    std::optional<std::string> table;
    std::optional<std::string> start;
    std::optional<std::string> end;

    bool operator==(const IdSystemEntry&) const = default;
};

/// ID systems ordered by cardinality: coarsest (patient) first, finest last.
struct IdSystemSpec {
    std::vector<IdSystemEntry> entries;

    const IdSystemEntry* by_label(std::string_view label) const noexcept;
    const IdSystemEntry* by_column(std::string_view column) const noexcept;
    /// Looks up by label first, then by column name.
    const IdSystemEntry* find(std::string_view label_or_column) const noexcept;
    const IdSystemEntry& finest() const { return entries.back(); }
    const IdSystemEntry& coarsest() const { return entries.front(); }
    std::size_t rank(const IdSystemEntry& e) const noexcept;

    bool operator==(const IdSystemSpec&) const = default;
};

struct ColumnDefaults {
    std::optional<std::string> id_var;
    std::optional<std::string> index_var;
    std::vector<std::string> time_vars;
    std::optional<std::string> unit_var;
    std::optional<std::string> val_var;
    std::map<std::string, std::string> extra_defaults;

    bool operator==(const ColumnDefaults&) const = default;
};

struct ColumnSpec {
    std::string raw_name;
    std::string name;
    ValueType type = ValueType::string;

    bool operator==(const ColumnSpec&) const = default;
};

struct PartitionSpec {
    std::string column;
    std::vector<double> breakpoints;

    bool operator==(const PartitionSpec&) const = default;
};

struct TableDescriptor {
    std::string name;
    std::vector<std::string> files;
    std::vector<ColumnSpec> columns;
    std::optional<std::int64_t> expected_rows;
    std::optional<PartitionSpec> partition;
    ColumnDefaults defaults;
    nlohmann::ordered_json extra = nlohmann::ordered_json::object();

    const ColumnSpec* find_column(std::string_view internal_name) const noexcept;
    bool operator==(const TableDescriptor&) const = default;
};

struct SourceDescriptor {
    std::string name;
    std::vector<std::string> prefixes;
    IdSystemSpec id_systems;
    std::map<std::string, TableDescriptor> tables;
    nlohmann::ordered_json extra = nlohmann::ordered_json::object();

    const TableDescriptor& table(std::string_view name) const;
    bool operator==(const SourceDescriptor&) const = default;
};

SourceDescriptor parse_source_config(std::string_view json_text);
SourceDescriptor parse_source_config(const nlohmann::ordered_json& j);
nlohmann::ordered_json serialize_source(const SourceDescriptor& src);
/// Non-fatal findings, e.g. an id_var default outside the ID systems.
std::vector<std::string> validate_source(const SourceDescriptor& src);

/// Parses a `data-sources.json` document: a single source object or an array.
std::vector<SourceDescriptor> parse_source_configs(std::string_view json_text);

// ---------------------------------------------------------------------------
// Concept dictionary
// ---------------------------------------------------------------------------

enum class ConceptClass { num, fct, lgl, rec };
enum class TargetClass { id_tbl, ts_tbl };
enum class ItemVariant { sel, col, rgx, fun };

std::string_view to_string(ConceptClass c) noexcept;
std::string_view to_string(ItemVariant v) noexcept;

struct ItemDef {
    ItemVariant variant = ItemVariant::sel;
    std::string table;
    std::optional<std::string> sub_var;
    std::vector<Cell> ids;
    std::optional<std::string> regex;
    std::optional<std::string> val_var;
    std::optional<std::string> unit_var;
    std::optional<std::string> index_var;
    std::optional<std::string> callback;
    /// Registered native loader for fun items, in callback-call syntax.
    std::optional<std::string> function;
    nlohmann::ordered_json extra = nlohmann::ordered_json::object();

    bool operator==(const ItemDef&) const = default;
};

struct ConceptDef {
    std::string name;
    ConceptClass cls = ConceptClass::num;
    TargetClass target = TargetClass::ts_tbl;
    std::optional<Aggregation> aggregate;
    std::optional<std::string> description;
    std::optional<std::string> category;
    std::vector<std::string> units;
    std::optional<double> min;
    std::optional<double> max;
    std::vector<std::string> levels;
    std::vector<std::string> sub_concepts;
    std::optional<std::string> callback;
    std::map<std::string, std::vector<ItemDef>> sources;
    nlohmann::ordered_json extra = nlohmann::ordered_json::object();

    bool operator==(const ConceptDef&) const = default;
};

struct Dictionary {
    std::map<std::string, ConceptDef> concepts;
    /// Which configuration origins supplied or extended each concept.
    std::map<std::string, std::vector<std::string>> provenance;

    const ConceptDef* find(std::string_view name) const noexcept;
    bool operator==(const Dictionary&) const = default;
};

/// Parses a dictionary document and overlays it onto `base`. Concepts already
/// in `base` keep their metadata and only take over `sources` entries.
Dictionary parse_dictionary(std::string_view json_text, const Dictionary* base = nullptr,
                            std::string_view origin = "inline");
Dictionary parse_dictionary(const nlohmann::ordered_json& j, const Dictionary* base = nullptr,
                            std::string_view origin = "inline");
nlohmann::ordered_json serialize_dictionary(const Dictionary& dict);

// ---------------------------------------------------------------------------
// Configuration discovery
// ---------------------------------------------------------------------------

std::filesystem::path builtin_config_dir();

/// Built-in directory, then each ICU_CONFIG_PATH entry (trimmed, deduplicated,
/// in order). Directories are not checked for existence here.
std::vector<std::filesystem::path> discover_config_paths(const Env& env);

inline constexpr std::string_view kSourceConfigFile = "data-sources.json";
inline constexpr std::string_view kDictionaryFile = "concept-dict.json";

/// Source configs from every directory; later directories replace earlier
/// sources of the same name. Missing directories are reported and skipped.
std::map<std::string, SourceDescriptor> load_source_catalog(
    const std::vector<std::filesystem::path>& dirs, Diagnostics* diag = nullptr);

/// Dictionary overlaid across every directory's concept-dict.json.
Dictionary load_dictionary_files(const std::vector<std::filesystem::path>& dirs,
                                 Diagnostics* diag = nullptr);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace icuharm
