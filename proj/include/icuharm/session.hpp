#pragma once

#include "icuharm/callback.hpp"
#include "icuharm/config.hpp"
#include "icuharm/diagnostics.hpp"
#include "icuharm/query.hpp"
#include "icuharm/store.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace icuharm {

// ---------------------------------------------------------------------------
// Native callbacks for recursive concepts and function items
// ---------------------------------------------------------------------------

struct ConceptLoadOptions;
struct ConceptDef;

struct RecContext {
    const ConceptDef& def;
    /// Key columns of every sub-concept table.
    std::string id_var;
    std::string index_var;
    std::chrono::minutes interval;
    bool keep_components = false;
    /// Forwarded extra arguments, identical for every callback of one call.
    const nlohmann::json& args;
    Diagnostics* diag = nullptr;
};

/// Combines sub-concept tables (keyed by name) into the concept's table.
using RecCallback = std::function<Table(const std::map<std::string, Table>&, const RecContext&)>;

struct FunContext {
    const DataSource& src;
    const ItemDef& item;
    const CallbackExpr& call;
    Diagnostics* diag = nullptr;
};

struct FunResult {
    /// Keyed by an ID-system column; a ts table carries a 1-minute index.
    Table table;
    ItemMeta meta;
};

using FunLoader = std::function<FunResult(const FunContext&)>;

class ConceptRegistry {
public:
    /// sirs_score, pafi_ratio and the age_at_stay loader.
    static ConceptRegistry with_builtins();

    void add_rec(std::string name, RecCallback cb) { rec_[std::move(name)] = std::move(cb); }
    void add_fun(std::string name, FunLoader f) { fun_[std::move(name)] = std::move(f); }
    bool has_rec(std::string_view name) const { return rec_.find(name) != rec_.end(); }
    const RecCallback& rec(std::string_view name) const;
    const FunLoader& fun(std::string_view name) const;

private:
    std::map<std::string, RecCallback, std::less<>> rec_;
    std::map<std::string, FunLoader, std::less<>> fun_;
};

/// Name of the registered callback a rec concept's `callback` field refers
/// to; accepts both `name` and `name()`.
std::string rec_callback_name(const std::string& spec);

// ---------------------------------------------------------------------------
// Session
// ---------------------------------------------------------------------------

/// Configuration, dictionary, attached sources and callback registries for
/// one process. Sources named in ICU_SRC_LOAD are attached on construction
/// when imported.
class Session {
public:
    explicit Session(Env env = process_env());

    const Env& env() const noexcept { return env_; }
    const std::vector<std::filesystem::path>& config_dirs() const noexcept { return config_dirs_; }
    /// ICU_DATA_PATH, or `icu-data` under the working directory.
    const std::filesystem::path& data_path() const noexcept { return data_path_; }

    const std::map<std::string, SourceDescriptor>& catalog() const noexcept { return catalog_; }
    const SourceDescriptor& source_config(std::string_view name) const;
    const Dictionary& dictionary() const noexcept { return dict_; }

    CallbackRegistry& callbacks() noexcept { return callbacks_; }
    const CallbackRegistry& callbacks() const noexcept { return callbacks_; }
    ConceptRegistry& concept_registry() noexcept { return concepts_; }
    const ConceptRegistry& concept_registry() const noexcept { return concepts_; }
    Diagnostics& diagnostics() noexcept { return diag_; }
    SourceRegistry& registry() noexcept { return registry_; }

    /// Imports every table of `name` from `<data_path>/<name>/` and re-attaches it.
    std::vector<PartitionManifest> import_source(std::string_view name, const ImportOptions& opts = {});

    /// Attached source with its ID-window memo; attaches on first use.
    std::shared_ptr<const DataSource> source(std::string_view name);
    std::shared_ptr<const DataSource> attach(std::string_view name, bool refresh = false);

private:
    Env env_;
    std::vector<std::filesystem::path> config_dirs_;
    std::filesystem::path data_path_;
    std::map<std::string, SourceDescriptor> catalog_;
    Dictionary dict_;
    CallbackRegistry callbacks_;
    ConceptRegistry concepts_;
    Diagnostics diag_;
    SourceRegistry registry_;
    std::mutex mu_;
    std::map<std::string, std::shared_ptr<const DataSource>, std::less<>> sources_;
};

}  // namespace icuharm
