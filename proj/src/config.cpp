#include "icuharm/config.hpp"

#include "icuharm/callback.hpp"
#include "icuharm/error.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace icuharm {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

json parse_json(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw Error(Errc::malformed_json, e.what());
    }
}

const json& require(const json& obj, const char* key, const std::string& ctx) {
    if (!obj.is_object() || !obj.contains(key) || obj.at(key).is_null()) {
        throw Error(Errc::missing_field, ctx + "." + key);
    }
    return obj.at(key);
}

std::string as_string(const json& v, const std::string& ctx) {
    if (!v.is_string()) throw Error(Errc::invalid_config, ctx + " must be a string");
    return v.get<std::string>();
}

std::optional<std::string> opt_string(const json& obj, const char* key, const std::string& ctx) {
    if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
    return as_string(obj.at(key), ctx + "." + key);
}

std::vector<std::string> string_list(const json& v, const std::string& ctx) {
    std::vector<std::string> out;
    if (v.is_string()) {
        out.push_back(v.get<std::string>());
    } else if (v.is_array()) {
        for (const auto& e : v) out.push_back(as_string(e, ctx));
    } else if (!v.is_null()) {
        throw Error(Errc::invalid_config, ctx + " must be a string or list of strings");
    }
    return out;
}

Cell json_to_cell(const json& v, const std::string& ctx) {
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>();
    throw Error(Errc::invalid_config, ctx + " must hold numbers or strings");
}

json cell_to_json(const Cell& c) {
    if (auto i = std::get_if<std::int64_t>(&c)) return *i;
    if (auto d = std::get_if<double>(&c)) return *d;
    if (auto b = std::get_if<bool>(&c)) return *b;
    if (auto s = std::get_if<std::string>(&c)) return *s;
    return nullptr;
}

json without(const json& obj, std::initializer_list<const char*> known) {
    json extra = json::object();
    if (!obj.is_object()) return extra;
    for (const auto& [k, v] : obj.items()) {
        if (std::none_of(known.begin(), known.end(), [&](const char* n) { return k == n; })) {
            extra[k] = v;
        }
    }
    return extra;
}

void check_ref(const TableDescriptor& t, const std::optional<std::string>& col, const char* role) {
    if (col && !t.find_column(*col)) {
        throw Error(Errc::dangling_column_ref,
                    "table '" + t.name + "': " + role + " '" + *col + "' is not a declared column");
    }
}

ColumnDefaults parse_defaults(const json& j, const std::string& ctx) {
    static const std::set<std::string> known = {"id_var", "index_var", "time_vars", "unit_var",
                                                "val_var"};
    ColumnDefaults d;
    d.id_var = opt_string(j, "id_var", ctx);
    d.index_var = opt_string(j, "index_var", ctx);
    d.unit_var = opt_string(j, "unit_var", ctx);
    d.val_var = opt_string(j, "val_var", ctx);
    if (j.contains("time_vars")) d.time_vars = string_list(j.at("time_vars"), ctx + ".time_vars");
    for (const auto& [k, v] : j.items()) {
        if (!known.count(k)) d.extra_defaults[k] = as_string(v, ctx + "." + k);
    }
    if (d.index_var &&
        std::find(d.time_vars.begin(), d.time_vars.end(), *d.index_var) == d.time_vars.end()) {
        d.time_vars.insert(d.time_vars.begin(), *d.index_var);
    }
    return d;
}

TableDescriptor parse_table(const std::string& name, const json& j) {
    const std::string ctx = "tbl_cfg." + name;
    TableDescriptor t;
    t.name = name;
    if (j.contains("files")) t.files = string_list(j.at("files"), ctx + ".files");
    if (t.files.empty()) t.files.push_back(name + ".csv");

    const json& cols = require(j, "cols", ctx);
    if (!cols.is_object() || cols.empty()) {
        throw Error(Errc::invalid_config, ctx + ".cols must declare at least one column");
    }
    std::set<std::string> seen;
    for (const auto& [raw, spec] : cols.items()) {
        ColumnSpec c;
        c.raw_name = raw;
        c.name = spec.contains("name") ? as_string(spec.at("name"), ctx + ".cols." + raw) : raw;
        const auto type_name = as_string(require(spec, "spec", ctx + ".cols." + raw), ctx);
        auto type = parse_value_type(type_name);
        if (!type) {
            throw Error(Errc::invalid_config, ctx + ".cols." + raw + ": unknown type '" + type_name + "'");
        }
        c.type = *type;
        if (!seen.insert(c.name).second) {
            throw Error(Errc::invalid_config, ctx + ": duplicate column name '" + c.name + "'");
        }
        t.columns.push_back(std::move(c));
    }

    if (j.contains("num_rows") && !j.at("num_rows").is_null()) {
        const auto& n = j.at("num_rows");
        if (!n.is_number_integer() || n.get<std::int64_t>() < 0) {
            throw Error(Errc::invalid_config, ctx + ".num_rows must be a non-negative integer");
        }
        t.expected_rows = n.get<std::int64_t>();
    }

    if (j.contains("partitioning") && !j.at("partitioning").is_null()) {
        const auto& p = j.at("partitioning");
        PartitionSpec spec;
        spec.column = as_string(require(p, "col", ctx + ".partitioning"), ctx);
        const auto& breaks = require(p, "breaks", ctx + ".partitioning");
        if (breaks.is_number()) {
            spec.breakpoints.push_back(breaks.get<double>());
        } else if (breaks.is_array()) {
            for (const auto& b : breaks) {
                if (!b.is_number()) throw Error(Errc::bad_partition, ctx + ": breakpoints must be numeric");
                spec.breakpoints.push_back(b.get<double>());
            }
        } else {
            throw Error(Errc::bad_partition, ctx + ": breakpoints must be numeric");
        }
        if (spec.breakpoints.empty()) throw Error(Errc::bad_partition, ctx + ": no breakpoints");
        for (std::size_t i = 1; i < spec.breakpoints.size(); ++i) {
            if (!(spec.breakpoints[i - 1] < spec.breakpoints[i])) {
                throw Error(Errc::bad_partition, ctx + ": breakpoints must be strictly ascending");
            }
        }
        const auto* col = t.find_column(spec.column);
        if (!col) throw Error(Errc::bad_partition, ctx + ": unknown partition column '" + spec.column + "'");
        if (!is_numeric(col->type)) {
            throw Error(Errc::bad_partition, ctx + ": partition column '" + spec.column + "' is not numeric");
        }
        t.partition = std::move(spec);
    }
    t.extra = without(j, {"files", "cols", "num_rows", "partitioning"});
    return t;
}

}  // namespace

Env process_env() {
    Env env;
    for (const char* key : {"ICU_CONFIG_PATH", "ICU_DATA_PATH", "ICU_SRC_LOAD"}) {
        if (const char* v = std::getenv(key)) env[key] = v;
    }
    return env;
}

const IdSystemEntry* IdSystemSpec::by_label(std::string_view label) const noexcept {
    for (const auto& e : entries) {
        if (e.label == label) return &e;
    }
    return nullptr;
}

const IdSystemEntry* IdSystemSpec::by_column(std::string_view column) const noexcept {
    for (const auto& e : entries) {
        if (e.column == column) return &e;
    }
    return nullptr;
}

const IdSystemEntry* IdSystemSpec::find(std::string_view key) const noexcept {
    if (const auto* e = by_label(key)) return e;
    return by_column(key);
}

std::size_t IdSystemSpec::rank(const IdSystemEntry& e) const noexcept {
    return static_cast<std::size_t>(&e - entries.data());
}

const ColumnSpec* TableDescriptor::find_column(std::string_view internal_name) const noexcept {
    for (const auto& c : columns) {
        if (c.name == internal_name) return &c;
    }
    return nullptr;
}

const TableDescriptor& SourceDescriptor::table(std::string_view table_name) const {
    auto it = tables.find(std::string(table_name));
    if (it == tables.end()) {
        throw Error(Errc::unknown_table, "source '" + name + "' has no table '" + std::string(table_name) + "'");
    }
    return it->second;
}

SourceDescriptor parse_source_config(std::string_view json_text) {
    return parse_source_config(parse_json(json_text));
}

SourceDescriptor parse_source_config(const json& j) {
    if (!j.is_object()) throw Error(Errc::invalid_config, "source config must be an object");
    SourceDescriptor src;
    src.name = as_string(require(j, "name", "source"), "source.name");
    if (src.name.empty()) throw Error(Errc::invalid_config, "source name must be nonempty");
    const std::string ctx = src.name;
    src.prefixes = j.contains("prefix") ? string_list(j.at("prefix"), ctx + ".prefix")
                                        : std::vector<std::string>{src.name};

    const json& ids = require(j, "id_cfg", ctx);
    if (!ids.is_object() || ids.empty()) {
        throw Error(Errc::invalid_config, ctx + ".id_cfg must declare at least one ID system");
    }
    for (const auto& [label, e] : ids.items()) {
        IdSystemEntry entry;
        entry.label = label;
        entry.column = as_string(require(e, "id", ctx + ".id_cfg." + label), ctx);
        const auto& pos = require(e, "position", ctx + ".id_cfg." + label);
        if (!pos.is_number_integer()) {
            throw Error(Errc::invalid_config, ctx + ".id_cfg." + label + ".position must be an integer");
        }
        entry.position = pos.get<int>();
        entry.table = opt_string(e, "table", ctx + ".id_cfg." + label);
        entry.start = opt_string(e, "start", ctx + ".id_cfg." + label);
        entry.end = opt_string(e, "end", ctx + ".id_cfg." + label);
        src.id_systems.entries.push_back(std::move(entry));
    }
    auto& entries = src.id_systems.entries;
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.position < b.position; });
    std::set<std::string> id_cols;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (i > 0 && entries[i - 1].position == entries[i].position) {
            throw Error(Errc::invalid_config, ctx + ".id_cfg: positions must be distinct");
        }
        if (!id_cols.insert(entries[i].column).second) {
            throw Error(Errc::invalid_config, ctx + ".id_cfg: duplicate id column '" + entries[i].column + "'");
        }
    }

    const json& tbls = require(j, "tbl_cfg", ctx);
    if (!tbls.is_object()) throw Error(Errc::invalid_config, ctx + ".tbl_cfg must be an object");
    for (const auto& [name, tj] : tbls.items()) src.tables.emplace(name, parse_table(name, tj));

    if (j.contains("col_cfg") && !j.at("col_cfg").is_null()) {
        for (const auto& [name, cj] : j.at("col_cfg").items()) {
            auto it = src.tables.find(name);
            if (it == src.tables.end()) {
                throw Error(Errc::dangling_column_ref, ctx + ".col_cfg names unknown table '" + name + "'");
            }
            auto& t = it->second;
            t.defaults = parse_defaults(cj, ctx + ".col_cfg." + name);
            check_ref(t, t.defaults.id_var, "id_var");
            check_ref(t, t.defaults.index_var, "index_var");
            check_ref(t, t.defaults.unit_var, "unit_var");
            check_ref(t, t.defaults.val_var, "val_var");
            for (const auto& tv : t.defaults.time_vars) check_ref(t, tv, "time_var");
            for (const auto& [k, v] : t.defaults.extra_defaults) check_ref(t, v, k.c_str());
        }
    }

    for (const auto& e : entries) {
        if (!e.table) continue;
        auto it = src.tables.find(*e.table);
        if (it == src.tables.end()) {
            throw Error(Errc::dangling_column_ref,
                        ctx + ".id_cfg." + e.label + " names unknown table '" + *e.table + "'");
        }
        check_ref(it->second, e.column, "id column");
        check_ref(it->second, e.start, "window start");
        check_ref(it->second, e.end, "window end");
    }

    src.extra = without(j, {"name", "prefix", "id_cfg", "col_cfg", "tbl_cfg"});
    return src;
}

std::vector<SourceDescriptor> parse_source_configs(std::string_view json_text) {
    json j = parse_json(json_text);
    std::vector<SourceDescriptor> out;
    if (j.is_array()) {
        for (const auto& e : j) out.push_back(parse_source_config(e));
    } else {
        out.push_back(parse_source_config(j));
    }
    return out;
}

json serialize_source(const SourceDescriptor& src) {
    json j = json::object();
    j["name"] = src.name;
    j["prefix"] = src.prefixes;
    json ids = json::object();
    for (const auto& e : src.id_systems.entries) {
        json ej = {{"id", e.column}, {"position", e.position}};
        if (e.table) ej["table"] = *e.table;
        if (e.start) ej["start"] = *e.start;
        if (e.end) ej["end"] = *e.end;
        ids[e.label] = ej;
    }
    j["id_cfg"] = ids;
    json cols = json::object();
    json tbls = json::object();
    for (const auto& [name, t] : src.tables) {
        const auto& d = t.defaults;
        json dj = json::object();
        if (d.id_var) dj["id_var"] = *d.id_var;
        if (d.index_var) dj["index_var"] = *d.index_var;
        if (!d.time_vars.empty()) dj["time_vars"] = d.time_vars;
        if (d.unit_var) dj["unit_var"] = *d.unit_var;
        if (d.val_var) dj["val_var"] = *d.val_var;
        for (const auto& [k, v] : d.extra_defaults) dj[k] = v;
        if (!dj.empty()) cols[name] = dj;

        json cj = json::object();
        for (const auto& c : t.columns) {
            cj[c.raw_name] = {{"name", c.name}, {"spec", std::string(to_string(c.type))}};
        }
        json tj = t.extra;
        tj["files"] = t.files;
        tj["cols"] = cj;
        if (t.expected_rows) tj["num_rows"] = *t.expected_rows;
        if (t.partition) {
            tj["partitioning"] = {{"col", t.partition->column}, {"breaks", t.partition->breakpoints}};
        }
        tbls[name] = tj;
    }
    j["col_cfg"] = cols;
    j["tbl_cfg"] = tbls;
    for (const auto& [k, v] : src.extra.items()) j[k] = v;
    return j;
}

std::vector<std::string> validate_source(const SourceDescriptor& src) {
    std::vector<std::string> issues;
    for (const auto& [name, t] : src.tables) {
        if (t.defaults.id_var && !src.id_systems.by_column(*t.defaults.id_var)) {
            issues.push_back("table '" + name + "': id_var '" + *t.defaults.id_var +
                             "' is not part of any ID system");
        }
        bool has_id = std::any_of(t.columns.begin(), t.columns.end(), [&](const ColumnSpec& c) {
            return src.id_systems.by_column(c.name) != nullptr;
        });
        if (!has_id && !t.defaults.id_var) {
            issues.push_back("table '" + name + "': no ID column and no id_var default");
        }
    }
    for (const auto& e : src.id_systems.entries) {
        if (!e.table) issues.push_back("ID system '" + e.label + "' has no window table");
    }
    return issues;
}

// ---------------------------------------------------------------------------

std::string_view to_string(ConceptClass c) noexcept {
    switch (c) {
        case ConceptClass::num: return "num_cncpt";
        case ConceptClass::fct: return "fct_cncpt";
        case ConceptClass::lgl: return "lgl_cncpt";
        case ConceptClass::rec: return "rec_cncpt";
    }
    return "num_cncpt";
}

std::string_view to_string(ItemVariant v) noexcept {
    switch (v) {
        case ItemVariant::sel: return "sel_itm";
        case ItemVariant::col: return "col_itm";
        case ItemVariant::rgx: return "rgx_itm";
        case ItemVariant::fun: return "fun_itm";
    }
    return "sel_itm";
}

namespace {

ConceptClass parse_concept_class(const std::string& s, const std::string& ctx) {
    if (s == "num_cncpt" || s == "num") return ConceptClass::num;
    if (s == "fct_cncpt" || s == "fct") return ConceptClass::fct;
    if (s == "lgl_cncpt" || s == "lgl") return ConceptClass::lgl;
    if (s == "rec_cncpt" || s == "rec") return ConceptClass::rec;
    throw Error(Errc::unknown_concept_class, ctx + ": '" + s + "'");
}

ItemVariant parse_item_variant(const std::string& s, const std::string& ctx) {
    if (s == "sel_itm" || s == "sel") return ItemVariant::sel;
    if (s == "col_itm" || s == "col") return ItemVariant::col;
    if (s == "rgx_itm" || s == "rgx") return ItemVariant::rgx;
    if (s == "fun_itm" || s == "fun") return ItemVariant::fun;
    throw Error(Errc::invalid_config, ctx + ": unknown item class '" + s + "'");
}

ItemDef parse_item(const json& j, const std::string& ctx) {
    if (!j.is_object()) throw Error(Errc::invalid_config, ctx + " must be an object");
    ItemDef item;
    item.variant = j.contains("class") ? parse_item_variant(as_string(j.at("class"), ctx), ctx)
                                       : ItemVariant::sel;
    item.table = as_string(require(j, "table", ctx), ctx + ".table");
    item.sub_var = opt_string(j, "sub_var", ctx);
    item.regex = opt_string(j, "regex", ctx);
    item.val_var = opt_string(j, "val_var", ctx);
    item.unit_var = opt_string(j, "unit_var", ctx);
    item.index_var = opt_string(j, "index_var", ctx);
    item.callback = opt_string(j, "callback", ctx);
    item.function = opt_string(j, "fun", ctx);
    if (j.contains("ids")) {
        const auto& ids = j.at("ids");
        if (ids.is_array()) {
            for (const auto& v : ids) item.ids.push_back(json_to_cell(v, ctx + ".ids"));
        } else {
            item.ids.push_back(json_to_cell(ids, ctx + ".ids"));
        }
    }
    switch (item.variant) {
        case ItemVariant::sel:
            if (item.ids.empty()) throw Error(Errc::missing_field, ctx + ".ids");
            if (!item.sub_var) throw Error(Errc::missing_field, ctx + ".sub_var");
            break;
        case ItemVariant::rgx:
            if (!item.regex) throw Error(Errc::missing_field, ctx + ".regex");
            if (!item.sub_var) throw Error(Errc::missing_field, ctx + ".sub_var");
            break;
        case ItemVariant::fun:
            if (!item.function) throw Error(Errc::missing_field, ctx + ".fun");
            parse_callback(*item.function);
            break;
        case ItemVariant::col: break;
    }
    if (item.callback) parse_callback(*item.callback);
    item.extra = without(j, {"class", "table", "sub_var", "regex", "val_var", "unit_var",
                             "index_var", "callback", "fun", "ids"});
    return item;
}

std::map<std::string, std::vector<ItemDef>> parse_sources(const json& j, const std::string& ctx) {
    std::map<std::string, std::vector<ItemDef>> out;
    if (j.is_null()) return out;
    if (!j.is_object()) throw Error(Errc::invalid_config, ctx + ".sources must be an object");
    for (const auto& [src, items] : j.items()) {
        auto& list = out[src];
        const std::string ictx = ctx + ".sources." + src;
        if (items.is_array()) {
            for (std::size_t i = 0; i < items.size(); ++i) {
                list.push_back(parse_item(items[i], ictx + "[" + std::to_string(i) + "]"));
            }
        } else {
            list.push_back(parse_item(items, ictx));
        }
    }
    return out;
}

ConceptDef parse_concept(const std::string& name, const json& j) {
    const std::string ctx = "concept '" + name + "'";
    if (!j.is_object()) throw Error(Errc::invalid_config, ctx + " must be an object");
    ConceptDef c;
    c.name = name;
    if (j.contains("class")) c.cls = parse_concept_class(as_string(j.at("class"), ctx), ctx);
    if (j.contains("target")) {
        const auto t = as_string(j.at("target"), ctx + ".target");
        if (t == "id_tbl") {
            c.target = TargetClass::id_tbl;
        } else if (t == "ts_tbl") {
            c.target = TargetClass::ts_tbl;
        } else {
            throw Error(Errc::invalid_config, ctx + ": unknown target '" + t + "'");
        }
    }
    if (j.contains("aggregate") && !j.at("aggregate").is_null()) {
        const auto a = as_string(j.at("aggregate"), ctx + ".aggregate");
        c.aggregate = parse_aggregation(a);
        if (!c.aggregate) throw Error(Errc::bad_aggregate, ctx + ": unknown aggregation '" + a + "'");
    }
    c.description = opt_string(j, "description", ctx);
    c.category = opt_string(j, "category", ctx);
    if (j.contains("unit")) c.units = string_list(j.at("unit"), ctx + ".unit");
    auto number = [&](const char* key) -> std::optional<double> {
        if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
        if (!j.at(key).is_number()) throw Error(Errc::invalid_config, ctx + "." + key + " must be numeric");
        return j.at(key).get<double>();
    };
    c.min = number("min");
    c.max = number("max");
    if (c.min && c.max && *c.min > *c.max) {
        throw Error(Errc::invalid_config, ctx + ": min exceeds max");
    }
    if (j.contains("levels")) {
        for (const auto& l : j.at("levels")) {
            c.levels.push_back(l.is_string() ? l.get<std::string>() : l.dump());
        }
    }
    if (j.contains("concepts")) c.sub_concepts = string_list(j.at("concepts"), ctx + ".concepts");
    c.callback = opt_string(j, "callback", ctx);
    if (c.cls == ConceptClass::rec) {
        if (c.sub_concepts.empty()) throw Error(Errc::invalid_config, ctx + ": rec concept needs sub-concepts");
        if (!c.callback || c.callback->empty()) throw Error(Errc::rec_without_callback, ctx);
    }
    if (j.contains("sources")) c.sources = parse_sources(j.at("sources"), ctx);
    c.extra = without(j, {"class", "target", "aggregate", "description", "category", "unit", "min",
                          "max", "levels", "concepts", "callback", "sources"});
    return c;
}

json serialize_item(const ItemDef& item) {
    json j = item.extra;
    j["class"] = std::string(to_string(item.variant));
    j["table"] = item.table;
    if (item.sub_var) j["sub_var"] = *item.sub_var;
    if (!item.ids.empty()) {
        json ids = json::array();
        for (const auto& c : item.ids) ids.push_back(cell_to_json(c));
        j["ids"] = ids;
    }
    if (item.regex) j["regex"] = *item.regex;
    if (item.val_var) j["val_var"] = *item.val_var;
    if (item.unit_var) j["unit_var"] = *item.unit_var;
    if (item.index_var) j["index_var"] = *item.index_var;
    if (item.callback) j["callback"] = *item.callback;
    if (item.function) j["fun"] = *item.function;
    return j;
}

}  // namespace

const ConceptDef* Dictionary::find(std::string_view name) const noexcept {
    auto it = concepts.find(std::string(name));
    return it == concepts.end() ? nullptr : &it->second;
}

Dictionary parse_dictionary(std::string_view json_text, const Dictionary* base, std::string_view origin) {
    return parse_dictionary(parse_json(json_text), base, origin);
}

Dictionary parse_dictionary(const json& j, const Dictionary* base, std::string_view origin) {
    if (!j.is_object()) throw Error(Errc::invalid_config, "dictionary must be a JSON object");
    Dictionary out = base ? *base : Dictionary{};
    for (const auto& [name, cj] : j.items()) {
        auto& prov = out.provenance[name];
        if (std::find(prov.begin(), prov.end(), origin) == prov.end()) prov.emplace_back(origin);
        auto it = out.concepts.find(name);
        if (it == out.concepts.end()) {
            out.concepts.emplace(name, parse_concept(name, cj));
            continue;
        }
        if (!cj.is_object() || !cj.contains("sources")) continue;
        for (auto& [src, items] : parse_sources(cj.at("sources"), "concept '" + name + "'")) {
            it->second.sources[src] = std::move(items);
        }
    }
    return out;
}

json serialize_dictionary(const Dictionary& dict) {
    json j = json::object();
    for (const auto& [name, c] : dict.concepts) {
        json cj = c.extra;
        cj["class"] = std::string(to_string(c.cls));
        cj["target"] = c.target == TargetClass::id_tbl ? "id_tbl" : "ts_tbl";
        if (c.aggregate) cj["aggregate"] = std::string(to_string(*c.aggregate));
        if (c.description) cj["description"] = *c.description;
        if (c.category) cj["category"] = *c.category;
        if (!c.units.empty()) cj["unit"] = c.units;
        if (c.min) cj["min"] = *c.min;
        if (c.max) cj["max"] = *c.max;
        if (!c.levels.empty()) cj["levels"] = c.levels;
        if (!c.sub_concepts.empty()) cj["concepts"] = c.sub_concepts;
        if (c.callback) cj["callback"] = *c.callback;
        json sj = json::object();
        for (const auto& [src, items] : c.sources) {
            json list = json::array();
            for (const auto& item : items) list.push_back(serialize_item(item));
            sj[src] = list;
        }
        cj["sources"] = sj;
        j[name] = cj;
    }
    return j;
}

// ---------------------------------------------------------------------------

fs::path builtin_config_dir() {
#ifdef ICUHARM_BUILTIN_CONFIG_DIR
    return fs::path(ICUHARM_BUILTIN_CONFIG_DIR);
#else
    return fs::path("config");
#endif
}

std::vector<fs::path> discover_config_paths(const Env& env) {
    std::vector<fs::path> out{builtin_config_dir()};
    auto it = env.find("ICU_CONFIG_PATH");
    if (it == env.end()) return out;
    std::set<std::string> seen{out.front().string()};
    std::stringstream ss(it->second);
    std::string part;
    while (std::getline(ss, part, ',')) {
        auto b = part.find_first_not_of(" \t");
        auto e = part.find_last_not_of(" \t");
        if (b == std::string::npos) continue;
        part = part.substr(b, e - b + 1);
        if (seen.insert(part).second) out.emplace_back(part);
    }
    return out;
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::missing_file, path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::map<std::string, SourceDescriptor> load_source_catalog(const std::vector<fs::path>& dirs,
                                                            Diagnostics* diag) {
    std::map<std::string, SourceDescriptor> out;
    for (const auto& dir : dirs) {
        if (!fs::is_directory(dir)) {
            if (diag) diag->report("config", "skipping missing config directory " + dir.string());
            continue;
        }
        const auto file = dir / kSourceConfigFile;
        if (!fs::exists(file)) continue;
        for (auto& src : parse_source_configs(read_text_file(file))) {
            auto name = src.name;
            out.insert_or_assign(name, std::move(src));
        }
    }
    return out;
}

Dictionary load_dictionary_files(const std::vector<fs::path>& dirs, Diagnostics* diag) {
    Dictionary dict;
    for (const auto& dir : dirs) {
        if (!fs::is_directory(dir)) {
            if (diag) diag->report("config", "skipping missing config directory " + dir.string());
            continue;
        }
        const auto file = dir / kDictionaryFile;
        if (!fs::exists(file)) continue;
        dict = parse_dictionary(std::string_view(read_text_file(file)), &dict, dir.string());
    }
    return dict;
}

}  // namespace icuharm
