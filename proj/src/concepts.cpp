#include "icuharm/concepts.hpp"

#include "icuharm/callback.hpp"
#include "icuharm/error.hpp"
#include "icuharm/query.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace icuharm {

namespace {

ValueType class_type(ConceptClass c) {
    switch (c) {
        case ConceptClass::fct: return ValueType::string;
        case ConceptClass::lgl: return ValueType::boolean;
        default: return ValueType::floating;
    }
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

bool available_impl(const Dictionary& dict, const std::string& name, const std::string& source,
                    std::set<std::string>& visiting) {
    const auto* def = dict.find(name);
    if (!def || !visiting.insert(name).second) return false;
    bool ok;
    if (def->cls == ConceptClass::rec) {
        ok = std::all_of(def->sub_concepts.begin(), def->sub_concepts.end(), [&](const std::string& s) {
            return available_impl(dict, s, source, visiting);
        });
    } else {
        auto it = def->sources.find(source);
        ok = it != def->sources.end() && !it->second.empty();
    }
    visiting.erase(name);
    return ok;
}

const ConceptDef& find_concept(const Session& session, const std::string& name) {
    const auto* def = session.dictionary().find(name);
    if (!def) throw Error(Errc::unknown_concept_name, name);
    return *def;
}

/// Rows whose mask entry is set.
Table keep_rows(const Table& t, const std::vector<char>& keep) {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < keep.size(); ++r) {
        if (keep[r]) rows.push_back(r);
    }
    if (rows.size() == t.rows()) return t;
    return validate_or_downcast(t.take(rows));
}

Table empty_result(const std::string& id_col, ValueType id_type, bool ts, const std::string& value,
                   ValueType type, std::chrono::minutes interval) {
    std::vector<Column> cols{{id_col, id_type, {}}};
    if (ts) cols.push_back({std::string(kTimeColumn), ValueType::duration, {}});
    cols.push_back({value, type, {}});
    if (ts) return make_ts_tbl(std::move(cols), {id_col}, std::string(kTimeColumn), interval);
    return make_id_tbl(std::move(cols), {id_col});
}

}  // namespace

Dictionary load_dictionary(const Session& session, const std::vector<std::string>& sources,
                           const std::vector<std::string>& names) {
    const auto& full = session.dictionary();
    for (const auto& [name, def] : full.concepts) {
        if (def.cls != ConceptClass::rec) continue;
        if (!session.concept_registry().has_rec(rec_callback_name(*def.callback))) {
            throw Error(Errc::rec_without_callback,
                        "concept '" + name + "' names unregistered callback '" + *def.callback + "'");
        }
        for (const auto& sub : def.sub_concepts) {
            if (!full.find(sub)) {
                throw Error(Errc::invalid_config, "concept '" + name + "' needs unknown concept '" + sub + "'");
            }
        }
    }
    Dictionary out;
    auto copy = [&](const std::string& name) {
        out.concepts.emplace(name, full.concepts.at(name));
        if (auto p = full.provenance.find(name); p != full.provenance.end()) out.provenance[name] = p->second;
    };
    if (!names.empty()) {
        for (const auto& n : names) {
            if (!full.find(n)) throw Error(Errc::unknown_concept_name, n);
            copy(n);
        }
    } else {
        for (const auto& [n, _] : full.concepts) copy(n);
    }
    if (!sources.empty()) {
        for (auto it = out.concepts.begin(); it != out.concepts.end();) {
            const bool any = std::any_of(sources.begin(), sources.end(), [&](const std::string& s) {
                return concept_available(full, it->first, s);
            });
            if (any) {
                ++it;
            } else {
                out.provenance.erase(it->first);
                it = out.concepts.erase(it);
            }
        }
    }
    return out;
}

std::vector<ExplainRow> explain_dictionary(const Dictionary& dict) {
    std::vector<ExplainRow> rows;
    for (const auto& [name, def] : dict.concepts) {
        rows.push_back({name, def.category.value_or(""), def.description.value_or("")});
    }
    return rows;
}

bool concept_available(const Dictionary& dict, const std::string& concept_name, const std::string& source) {
    std::set<std::string> visiting;
    return available_impl(dict, concept_name, source, visiting);
}

Availability concept_availability(const Dictionary& dict, const std::vector<std::string>& sources) {
    Availability a;
    a.sources = sources;
    for (const auto& [name, _] : dict.concepts) {
        a.concepts.push_back(name);
        for (const auto& s : sources) a.available[name][s] = concept_available(dict, name, s);
    }
    return a;
}

std::string result_id_column(const SourceDescriptor& src) {
    return src.id_systems.finest().label + "_id";
}

Table load_item(Session& session, const ItemDef& item, const ConceptDef& def, const std::string& source,
                const ConceptLoadOptions& opts) {
    auto ds = session.source(source);
    Diagnostics* diag = &session.diagnostics();
    const auto& finest = ds->descriptor().id_systems.finest();
    const bool ts = def.target == TargetClass::ts_tbl;
    const std::string ctx = source + "." + item.table + " (" + def.name + ")";

    Table t;
    ItemMeta meta;
    if (item.variant == ItemVariant::fun) {
        const auto call = parse_callback(*item.function);
        auto res = session.concept_registry().fun(call.head)(FunContext{*ds, item, call, diag});
        t = std::move(res.table);
        meta = std::move(res.meta);
    } else {
        const auto& h = ds->table(item.table);
        const auto& d = h.defaults();
        meta.val_var = item.val_var ? *item.val_var : d.val_var.value_or("");
        if (meta.val_var.empty()) throw Error(Errc::invalid_config, ctx + ": item has no value column");
        if (!h.has_column(meta.val_var)) throw Error(Errc::unknown_column, ctx + ": '" + meta.val_var + "'");
        meta.unit_var = item.unit_var ? item.unit_var : d.unit_var;
        if (meta.unit_var && !h.has_column(*meta.unit_var)) {
            throw Error(Errc::unknown_column, ctx + ": unit column '" + *meta.unit_var + "'");
        }
        meta.index_var = item.index_var ? item.index_var : d.index_var;

        Predicate where;
        if (item.variant == ItemVariant::sel || item.variant == ItemVariant::rgx) {
            if (!item.sub_var || !h.has_column(*item.sub_var)) {
                throw Error(Errc::unknown_sub_var, ctx + ": '" + item.sub_var.value_or("") + "'");
            }
            where = item.variant == ItemVariant::sel ? pred::in(*item.sub_var, item.ids)
                                                     : pred::regex(*item.sub_var, *item.regex);
        } else {
            where = pred::not_null(meta.val_var);
        }
        std::vector<std::string> cols{meta.val_var};
        if (meta.unit_var) cols.push_back(*meta.unit_var);
        if (ts) {
            if (!meta.index_var) throw Error(Errc::invalid_config, ctx + ": no index column for a time series");
            cols.push_back(*meta.index_var);
            where = where && pred::not_null(*meta.index_var);
        }
        t = load_difftime(*ds, item.table, where, cols, finest.column, diag);
        if (ts) {
            auto keep = pred::not_null(*meta.index_var).filter(t);
            if (keep.size() != t.rows()) t = t.take(keep);
            t.set_meta(t.id_vars(), *meta.index_var, std::chrono::minutes{1});
            t = validate_or_downcast(std::move(t));
            if (t.kind() != TableKind::ts) {
                throw Error(Errc::invalid_config, ctx + ": '" + *meta.index_var + "' is not a time column");
            }
        }
        if (ts && meta.val_var == *meta.index_var) {
            Column copy = t.column(meta.val_var);
            copy.name = meta.val_var + "_value";
            meta.val_var = copy.name;
            t.add_column(std::move(copy));
        }
        meta.id_vars = t.id_vars();
    }

    if (item.callback) {
        t = validate_or_downcast(evaluate(parse_callback(*item.callback), session.callbacks())(std::move(t), meta));
    }
    t = change_id(t, *ds, finest.column, diag);
    t = change_interval(t, opts.interval);

    const std::string id_col = result_id_column(ds->descriptor());
    std::vector<std::string> keep{finest.column};
    if (ts) keep.push_back(*t.index_var());
    keep.push_back(meta.val_var);
    if (meta.unit_var) keep.push_back(*meta.unit_var);
    t.select(keep);
    t.rename_column(meta.val_var, def.name);
    if (meta.unit_var) t.rename_column(*meta.unit_var, "unit");
    if (ts) t.rename_column(*t.index_var(), std::string(kTimeColumn));
    t.rename_column(finest.column, id_col);

    if (opts.patient_ids) {
        std::set<Cell, CellLess> wanted(opts.patient_ids->begin(), opts.patient_ids->end());
        const auto& ids = t.column(id_col).cells;
        std::vector<char> mask(t.rows());
        for (std::size_t r = 0; r < mask.size(); ++r) mask[r] = wanted.count(ids[r]) > 0;
        t = keep_rows(t, mask);
    }
    return validate_or_downcast(std::move(t));
}

Table load_concept(Session& session, const std::string& name, const std::string& source,
                   const ConceptLoadOptions& opts) {
    const auto& def = find_concept(session, name);
    auto ds = session.source(source);
    Diagnostics* diag = &session.diagnostics();
    const std::string id_col = result_id_column(ds->descriptor());
    const std::string ctx = source + ": concept '" + name + "'";

    if (def.cls == ConceptClass::rec) {
        if (!concept_available(session.dictionary(), name, source)) throw Error(Errc::concept_unavailable, ctx);
        std::map<std::string, Table> subs;
        for (const auto& sub : def.sub_concepts) subs.emplace(sub, load_concept(session, sub, source, opts));
        RecContext rc{def, id_col, std::string(kTimeColumn), opts.interval, opts.keep_components, opts.extra, diag};
        Table out = session.concept_registry().rec(rec_callback_name(*def.callback))(subs, rc);
        if (!def.units.empty()) out.set_unit(name, def.units.front());
        return sort_by_keys(out);
    }

    auto items = def.sources.find(source);
    if (items == def.sources.end() || items->second.empty()) throw Error(Errc::concept_unavailable, ctx);

    const ValueType vtype = class_type(def.cls);
    const bool ts = def.target == TargetClass::ts_tbl;
    std::vector<Table> parts;
    bool any_unit = false;
    for (const auto& item : items->second) {
        Table p = load_item(session, item, def, source, opts);
        auto& v = p.column(name);
        for (auto& c : v.cells) c = cast_cell(c, vtype);
        v.type = vtype;
        any_unit |= p.has_column("unit");
        parts.push_back(std::move(p));
    }
    for (auto& p : parts) {
        if (any_unit && !p.has_column("unit")) {
            p.add_column(Column{"unit", ValueType::string, std::vector<Cell>(p.rows())});
        }
    }
    Table t = concat_rows(parts);

    const auto& vals = t.column(name).cells;
    std::vector<char> keep(t.rows(), 1);
    for (std::size_t r = 0; r < keep.size(); ++r) keep[r] = !is_null(vals[r]);
    if (def.cls == ConceptClass::num) {
        if (any_unit && !def.units.empty()) {
            std::set<std::string> allowed;
            for (const auto& u : def.units) allowed.insert(lower(u));
            std::map<std::string, std::size_t> odd;
            const auto& units = t.column("unit").cells;
            for (std::size_t r = 0; r < units.size(); ++r) {
                const auto* u = std::get_if<std::string>(&units[r]);
                if (keep[r] && u && !allowed.count(lower(*u))) ++odd[*u];
            }
            for (const auto& [u, n] : odd) {
                diag->report("unit", ctx + ": " + std::to_string(n) + " rows with unit '" + u +
                                         "' (expected " + def.units.front() + ")");
            }
        }
        std::size_t implausible = 0;
        for (std::size_t r = 0; r < keep.size(); ++r) {
            if (!keep[r]) continue;
            const double v = std::get<double>(vals[r]);
            if ((def.min && v < *def.min) || (def.max && v > *def.max)) {
                keep[r] = 0;
                ++implausible;
            }
        }
        if (implausible > 0) {
            diag->report("plausibility", ctx + ": " + std::to_string(implausible) + " values outside [" +
                                             (def.min ? format_double(*def.min) : "-inf") + ", " +
                                             (def.max ? format_double(*def.max) : "inf") + "] removed");
        }
    } else if (def.cls == ConceptClass::fct && !def.levels.empty()) {
        std::set<std::string> levels(def.levels.begin(), def.levels.end());
        std::size_t bad = 0;
        for (std::size_t r = 0; r < keep.size(); ++r) {
            if (keep[r] && !levels.count(std::get<std::string>(vals[r]))) {
                keep[r] = 0;
                ++bad;
            }
        }
        if (bad > 0) diag->report("levels", ctx + ": " + std::to_string(bad) + " values outside the levels removed");
    }
    t = keep_rows(t, keep);
    if (t.has_column("unit")) t.drop_column("unit");
    if (t.kind() == TableKind::plain) {
        ValueType id_type = parts.empty() ? ValueType::integer : parts.front().column(id_col).type;
        t = empty_result(id_col, id_type, ts, name, vtype, opts.interval);
    }
    t = aggregate(t, opts.aggregate ? opts.aggregate : def.aggregate);
    if (!def.units.empty()) t.set_unit(name, def.units.front());
    return t;
}

Table load_concepts(Session& session, const std::vector<std::string>& names,
                    const std::vector<std::string>& sources, const ConceptLoadOptions& opts) {
    if (names.empty()) throw Error(Errc::invalid_argument, "no concepts requested");
    if (sources.empty()) throw Error(Errc::invalid_argument, "no sources requested");
    for (const auto& n : names) find_concept(session, n);

    std::vector<Table> per_source;
    for (const auto& src : sources) {
        Table merged;
        bool first = true;
        for (const auto& n : names) {
            Table c = load_concept(session, n, src, opts);
            merged = first ? std::move(c) : merge_tables(merged, c);
            first = false;
        }
        if (sources.size() > 1) {
            Column sc{std::string(kSourceColumn), ValueType::string, std::vector<Cell>(merged.rows(), Cell{src})};
            auto ids = merged.id_vars();
            ids.insert(ids.begin(), std::string(kSourceColumn));
            merged.add_column(std::move(sc));
            merged.set_meta(std::move(ids), merged.index_var(), merged.interval());
            merged = validate_or_downcast(std::move(merged));
        }
        per_source.push_back(std::move(merged));
    }
    if (per_source.size() == 1) return sort_by_keys(per_source.front());
    for (const auto& p : per_source) {
        if (p.column_names() != per_source.front().column_names()) {
            throw Error(Errc::incompatible_ids, "sources disagree on result columns; their stay ID labels differ");
        }
    }
    return sort_by_keys(concat_rows(per_source));
}

}  // namespace icuharm
