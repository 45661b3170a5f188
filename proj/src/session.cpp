#include "icuharm/session.hpp"

#include "icuharm/error.hpp"

#include <sstream>

namespace icuharm {

namespace fs = std::filesystem;

const RecCallback& ConceptRegistry::rec(std::string_view name) const {
    auto it = rec_.find(name);
    if (it == rec_.end()) throw Error(Errc::rec_without_callback, std::string(name) + " is not registered");
    return it->second;
}

const FunLoader& ConceptRegistry::fun(std::string_view name) const {
    auto it = fun_.find(name);
    if (it == fun_.end()) throw Error(Errc::unknown_factory, std::string(name) + " is not a registered item loader");
    return it->second;
}

std::string rec_callback_name(const std::string& spec) {
    if (spec.find('(') == std::string::npos) {
        auto b = spec.find_first_not_of(" \t");
        auto e = spec.find_last_not_of(" \t");
        return b == std::string::npos ? std::string{} : spec.substr(b, e - b + 1);
    }
    return parse_callback(spec).head;
}

Session::Session(Env env)
    : env_(std::move(env)),
      config_dirs_(discover_config_paths(env_)),
      callbacks_(CallbackRegistry::with_builtins()),
      concepts_(ConceptRegistry::with_builtins()) {
    auto it = env_.find("ICU_DATA_PATH");
    data_path_ = it != env_.end() && !it->second.empty() ? fs::path(it->second) : fs::path("icu-data");
    catalog_ = load_source_catalog(config_dirs_, &diag_);
    dict_ = load_dictionary_files(config_dirs_, &diag_);
    if (auto load = env_.find("ICU_SRC_LOAD"); load != env_.end()) {
        std::stringstream ss(load->second);
        std::string name;
        while (std::getline(ss, name, ',')) {
            auto b = name.find_first_not_of(" \t");
            if (b == std::string::npos) continue;
            name = name.substr(b, name.find_last_not_of(" \t") - b + 1);
            try {
                attach(name);
            } catch (const Error& e) {
                diag_.report("attach", e.what());
            }
        }
    }
}

const SourceDescriptor& Session::source_config(std::string_view name) const {
    auto it = catalog_.find(std::string(name));
    if (it == catalog_.end()) {
        throw Error(Errc::unknown_source, "no configuration for source '" + std::string(name) + "'");
    }
    return it->second;
}

std::vector<PartitionManifest> Session::import_source(std::string_view name, const ImportOptions& opts) {
    const auto& desc = source_config(name);
    auto out = icuharm::import_source(desc, data_path_ / desc.name, data_path_, opts, &diag_);
    attach(name, true);
    return out;
}

std::shared_ptr<const DataSource> Session::attach(std::string_view name, bool refresh) {
    const auto& desc = source_config(name);
    auto attached = registry_.attach(desc, data_path_, refresh);
    std::lock_guard lock(mu_);
    auto it = sources_.find(name);
    if (it != sources_.end() && &it->second->attached() == attached.get()) return it->second;
    auto ds = std::make_shared<const DataSource>(attached);
    sources_.insert_or_assign(std::string(name), ds);
    return ds;
}

std::shared_ptr<const DataSource> Session::source(std::string_view name) {
    {
        std::lock_guard lock(mu_);
        if (auto it = sources_.find(name); it != sources_.end()) return it->second;
    }
    return attach(name);
}

}  // namespace icuharm
