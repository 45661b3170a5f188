#include "icuharm/query.hpp"

#include "icuharm/error.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace icuharm {

namespace {

constexpr std::int64_t kMidDaySeconds = 12 * 3600;

struct OriginInfo {
    Cell start;
    ValueType start_type = ValueType::duration;
    Cell end;
    ValueType end_type = ValueType::duration;
    std::map<std::size_t, Cell> parents;
};

/// Absolute seconds for timestamp/date cells; nullopt for anything else.
std::optional<std::int64_t> absolute_seconds(const Cell& c, ValueType type) {
    if (is_null(c) || !is_time(type) || type == ValueType::duration) return std::nullopt;
    return as_int(c);
}

std::optional<std::int64_t> relative_minutes(const Cell& c, ValueType type) {
    if (is_null(c) || type != ValueType::duration) return std::nullopt;
    return as_int(c);
}

std::optional<std::int64_t> opt_int(const Cell& c) { return is_null(c) ? std::nullopt : as_int(c); }

Cell opt_cell(const std::optional<std::int64_t>& v) { return v ? Cell{*v} : Cell{}; }

const IdSystemEntry& resolve_system(const IdSystemSpec& spec, std::string_view key) {
    const auto* e = spec.find(key);
    if (!e) throw Error(Errc::unknown_id_system, std::string(key));
    return *e;
}

}  // namespace

const IdWindow* IdWindows::find(std::size_t rank, const Cell& value) const {
    if (rank >= lookup.size()) return nullptr;
    auto it = lookup[rank].find(value);
    return it == lookup[rank].end() ? nullptr : &it->second;
}

std::size_t IdWindows::rank_of(std::string_view key) const {
    return systems.rank(resolve_system(systems, key));
}

IdWindows build_id_windows(const AttachedSource& src, Diagnostics* diag) {
    const auto& spec = src.desc.id_systems;
    const std::size_t n = spec.entries.size();
    std::vector<std::map<Cell, OriginInfo, CellLess>> infos(n);
    std::vector<ValueType> id_types(n, ValueType::integer);

    for (std::size_t i = 0; i < n; ++i) {
        const auto& e = spec.entries[i];
        if (!e.table || src.tables.find(*e.table) == src.tables.end()) {
            throw Error(Errc::missing_origin_table,
                        src.desc.name + ": ID system '" + e.label + "' has no attached origin table");
        }
        const auto& h = src.table(*e.table);
        std::vector<std::string> cols{e.column};
        if (e.start) cols.push_back(*e.start);
        if (e.end) cols.push_back(*e.end);
        std::vector<std::size_t> parent_ranks;
        for (std::size_t j = 0; j < i; ++j) {
            if (h.has_column(spec.entries[j].column)) {
                cols.push_back(spec.entries[j].column);
                parent_ranks.push_back(j);
            }
        }
        Table t = h.scan({}, cols);
        id_types[i] = t.column(0).type;
        const auto* start_col = e.start ? &t.column(*e.start) : nullptr;
        const auto* end_col = e.end ? &t.column(*e.end) : nullptr;
        for (std::size_t r = 0; r < t.rows(); ++r) {
            const Cell& id = t.column(0).cells[r];
            if (is_null(id)) continue;
            OriginInfo info;
            if (start_col) {
                info.start = start_col->cells[r];
                info.start_type = start_col->type;
            }
            if (end_col) {
                info.end = end_col->cells[r];
                info.end_type = end_col->type;
            }
            for (auto j : parent_ranks) {
                const Cell& p = t.column(spec.entries[j].column).cells[r];
                if (!is_null(p)) info.parents[j] = p;
            }
            if (!infos[i].emplace(id, std::move(info)).second && diag) {
                diag->report("id_windows", src.desc.name + ": duplicate " + e.column + " " +
                                               format_cell(id, id_types[i]) + " in " + *e.table);
            }
        }
    }

    // One row per finest ID, coarser IDs resolved through the origin tables.
    const std::size_t finest = n - 1;
    std::vector<std::vector<Cell>> ids;
    for (const auto& [v, _] : infos[finest]) {
        std::vector<Cell> row(n);
        row[finest] = v;
        for (std::size_t i = finest; i > 0; --i) {
            for (std::size_t k = i; k <= finest && is_null(row[i - 1]); ++k) {
                if (is_null(row[k])) continue;
                auto it = infos[k].find(row[k]);
                if (it == infos[k].end()) continue;
                if (auto p = it->second.parents.find(i - 1); p != it->second.parents.end()) {
                    row[i - 1] = p->second;
                }
            }
        }
        ids.push_back(std::move(row));
    }
    const std::size_t nrows = ids.size();

    auto info_of = [&](std::size_t i, const Cell& v) -> const OriginInfo* {
        if (is_null(v)) return nullptr;
        auto it = infos[i].find(v);
        return it == infos[i].end() ? nullptr : &it->second;
    };

    // Absolute origin per coarsest ID: its own start, else the earliest
    // absolute start among its descendants.
    std::map<Cell, std::optional<std::int64_t>, CellLess> origin;
    for (const auto& row : ids) {
        auto& o = origin[row[0]];
        if (const auto* info = info_of(0, row[0])) {
            if (auto abs = absolute_seconds(info->start, info->start_type)) {
                o = abs;
                continue;
            }
        }
        for (std::size_t i = 1; i < n; ++i) {
            const auto* info = info_of(i, row[i]);
            if (!info) continue;
            if (auto abs = absolute_seconds(info->start, info->start_type)) {
                o = o ? std::min(*o, *abs) : *abs;
            }
        }
    }

    auto to_minutes = [&](const Cell& c, ValueType type,
                          const std::optional<std::int64_t>& o) -> std::optional<std::int64_t> {
        if (auto rel = relative_minutes(c, type)) return rel;
        auto abs = absolute_seconds(c, type);
        if (abs && o) return (*abs - *o) / 60;
        return std::nullopt;
    };

    std::vector<std::vector<std::optional<std::int64_t>>> starts(n), ends(n), abs_starts(n);
    for (std::size_t i = 0; i < n; ++i) {
        starts[i].resize(nrows);
        ends[i].resize(nrows);
        abs_starts[i].resize(nrows);
    }
    for (std::size_t r = 0; r < nrows; ++r) {
        const auto& o = origin[ids[r][0]];
        for (std::size_t i = 0; i < n; ++i) {
            const auto* info = info_of(i, ids[r][i]);
            const bool has_start = info && !is_null(info->start);
            if (has_start) {
                starts[i][r] = to_minutes(info->start, info->start_type, o);
                abs_starts[i][r] = absolute_seconds(info->start, info->start_type);
            } else if (i == 0) {
                starts[i][r] = std::int64_t{0};
            } else {
                starts[i][r] = starts[i - 1][r];
            }
            if (!abs_starts[i][r] && o && starts[i][r]) abs_starts[i][r] = *o + *starts[i][r] * 60;
            if (info && !is_null(info->end)) ends[i][r] = to_minutes(info->end, info->end_type, o);
        }
    }
    // Open-ended coarser windows close at their last finer window.
    for (std::size_t i = finest; i-- > 0;) {
        std::map<Cell, std::optional<std::int64_t>, CellLess> child_max;
        for (std::size_t r = 0; r < nrows; ++r) {
            if (ends[i][r] || !ends[i + 1][r]) continue;
            auto& m = child_max[ids[r][i]];
            m = m ? std::max(*m, *ends[i + 1][r]) : *ends[i + 1][r];
        }
        for (std::size_t r = 0; r < nrows; ++r) {
            if (!ends[i][r]) {
                if (auto it = child_max.find(ids[r][i]); it != child_max.end()) ends[i][r] = it->second;
            }
        }
    }

    IdWindows w;
    w.systems = spec;
    w.lookup.resize(n);
    std::vector<Column> cols;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& col = spec.entries[i].column;
        Column idc{col, id_types[i], {}};
        Column sc{col + "_start", ValueType::duration, {}};
        Column ec{col + "_end", ValueType::duration, {}};
        for (std::size_t r = 0; r < nrows; ++r) {
            idc.cells.push_back(ids[r][i]);
            sc.cells.push_back(opt_cell(starts[i][r]));
            ec.cells.push_back(opt_cell(ends[i][r]));
            if (is_null(ids[r][i])) continue;
            auto [it, fresh] = w.lookup[i].try_emplace(ids[r][i]);
            if (fresh) {
                it->second.start = starts[i][r];
                it->second.end = ends[i][r];
                it->second.abs_start = abs_starts[i][r];
            }
            it->second.rows.push_back(r);
        }
        cols.push_back(std::move(idc));
        cols.push_back(std::move(sc));
        cols.push_back(std::move(ec));
    }
    w.table = make_id_tbl(std::move(cols), {spec.finest().column});

    if (diag) {
        for (std::size_t r = 0; r < nrows; ++r) {
            for (std::size_t i = 0; i < n; ++i) {
                const auto& s = starts[i][r];
                const auto& e = ends[i][r];
                std::string what;
                if (is_null(ids[r][i])) {
                    what = "unresolved " + spec.entries[i].label + " ID";
                } else if (s && e && *s > *e) {
                    what = spec.entries[i].label + " window ends before it starts";
                } else if (i > 0 && !is_null(ids[r][i - 1]) &&
                           ((s && starts[i - 1][r] && *s < *starts[i - 1][r]) ||
                            (e && ends[i - 1][r] && *e > *ends[i - 1][r]))) {
                    what = spec.entries[i].label + " window not nested in " + spec.entries[i - 1].label;
                }
                if (!what.empty()) {
                    diag->report("id_windows", src.desc.name + ": " + spec.finest().column + " " +
                                                   format_cell(ids[r][finest], id_types[finest]) + ": " + what);
                }
            }
        }
    }
    return w;
}

DataSource::DataSource(std::shared_ptr<const AttachedSource> src) : src_(std::move(src)) {
    if (!src_) throw Error(Errc::invalid_argument, "null source");
}

const IdWindows& DataSource::id_windows(Diagnostics* diag) const {
    std::call_once(once_, [&] {
        windows_ = std::make_unique<IdWindows>(build_id_windows(*src_, diag));
        ++builds_;
    });
    return *windows_;
}

Table load_src(const DataSource& src, std::string_view table, const Predicate& where,
               const std::vector<std::string>& cols) {
    return src.table(table).scan(where, cols);
}

const IdSystemEntry& choose_id(const DataSource& src, const TableHandle& tbl,
                               const std::optional<std::string>& id_hint) {
    const auto& spec = src.descriptor().id_systems;
    if (id_hint) {
        const auto& e = resolve_system(spec, *id_hint);
        if (tbl.has_column(e.column)) return e;
    }
    for (auto it = spec.entries.rbegin(); it != spec.entries.rend(); ++it) {
        if (tbl.has_column(it->column)) return *it;
    }
    throw Error(Errc::no_id_available,
                src.name() + "." + tbl.manifest().table + " carries no column of any ID system");
}

Table load_difftime(const DataSource& src, std::string_view table, const Predicate& where,
                    std::vector<std::string> cols, const std::optional<std::string>& id_hint,
                    Diagnostics* diag) {
    const auto& h = src.table(table);
    const auto& id = choose_id(src, h, id_hint);
    if (cols.empty()) {
        for (const auto& c : h.manifest().columns) cols.push_back(c.name);
    }
    std::vector<std::string> scan_cols{id.column};
    for (const auto& c : cols) {
        if (std::find(scan_cols.begin(), scan_cols.end(), c) == scan_cols.end()) scan_cols.push_back(c);
    }
    Table raw = h.scan(where && pred::not_null(id.column), scan_cols);

    bool needs_origin = false;
    for (const auto& c : raw.columns()) {
        needs_origin |= c.type == ValueType::timestamp || c.type == ValueType::date;
    }
    if (needs_origin) {
        const auto& windows = src.id_windows(diag);
        const auto rank = windows.systems.rank(*windows.systems.by_column(id.column));
        const auto& ids = raw.column(id.column).cells;
        std::size_t unresolved = 0;
        for (std::size_t c = 0; c < raw.cols(); ++c) {
            auto& col = raw.column(c);
            if (col.type != ValueType::timestamp && col.type != ValueType::date) continue;
            const std::int64_t shift = col.type == ValueType::date ? kMidDaySeconds : 0;
            for (std::size_t r = 0; r < col.cells.size(); ++r) {
                if (is_null(col.cells[r])) continue;
                const auto* w = windows.find(rank, ids[r]);
                if (!w || !w->abs_start) {
                    col.cells[r] = Cell{};
                    ++unresolved;
                    continue;
                }
                const auto secs = std::get<std::int64_t>(col.cells[r]) + shift - *w->abs_start;
                col.cells[r] = secs / 60;
            }
            col.type = ValueType::duration;
        }
        if (unresolved > 0 && diag) {
            diag->report("difftime", src.name() + "." + std::string(table) + ": " +
                                         std::to_string(unresolved) + " time values without an " +
                                         id.label + " origin set to null");
        }
    }
    raw.set_meta({id.column});
    return sort_by_keys(validate_or_downcast(std::move(raw)));
}

Table change_id(const Table& t, const DataSource& src, std::string_view target, Diagnostics* diag,
                std::size_t* dropped) {
    const auto& spec = src.descriptor().id_systems;
    const auto& tgt = resolve_system(spec, target);
    const IdSystemEntry* cur = nullptr;
    for (const auto& v : t.id_vars()) {
        if (const auto* e = spec.by_column(v)) cur = e;
    }
    if (!cur) {
        throw Error(Errc::incompatible_ids, "table is not keyed by an ID system of " + src.name());
    }
    if (cur->column == tgt.column) return t;

    const auto& windows = src.id_windows(diag);
    const auto cur_rank = spec.rank(*cur);
    const auto tgt_rank = spec.rank(tgt);
    const auto& wt = windows.table;
    const auto& w_ids = wt.column(tgt.column).cells;
    const auto& w_start = wt.column(tgt.column + "_start").cells;
    const auto& w_end = wt.column(tgt.column + "_end").cells;
    const auto& ids = t.column(cur->column).cells;

    std::vector<std::size_t> durations;
    for (std::size_t c = 0; c < t.cols(); ++c) {
        if (t.column(c).type == ValueType::duration && t.column(c).name != cur->column) durations.push_back(c);
    }
    const bool timed = t.kind() == TableKind::ts;

    std::vector<std::size_t> rows;
    std::vector<Cell> new_ids;
    std::vector<std::int64_t> shifts;
    std::size_t lost = 0;
    for (std::size_t r = 0; r < t.rows(); ++r) {
        const auto* w = windows.find(cur_rank, ids[r]);
        if (!w || !w->start) {
            ++lost;
            continue;
        }
        const std::int64_t cur_start = *w->start;
        if (tgt_rank < cur_rank) {
            const std::size_t wr = w->rows.front();
            const auto s = opt_int(w_start[wr]);
            if (is_null(w_ids[wr]) || !s) {
                ++lost;
                continue;
            }
            rows.push_back(r);
            new_ids.push_back(w_ids[wr]);
            shifts.push_back(cur_start - *s);
            continue;
        }
        std::set<Cell, CellLess> seen;
        std::optional<std::int64_t> at;
        if (timed) {
            at = opt_int(t.column(*t.index_var()).cells[r]);
            if (!at) {
                ++lost;
                continue;
            }
            *at += cur_start;
        }
        bool placed = false;
        for (auto wr : w->rows) {
            if (is_null(w_ids[wr]) || !seen.insert(w_ids[wr]).second) continue;
            const auto s = opt_int(w_start[wr]);
            const auto e = opt_int(w_end[wr]);
            if (!s) continue;
            if (at && (*at < *s || (e && *at >= *e))) continue;
            rows.push_back(r);
            new_ids.push_back(w_ids[wr]);
            shifts.push_back(cur_start - *s);
            placed = true;
            if (timed) break;
        }
        if (!placed) ++lost;
    }

    Table out = t.take(rows);
    auto& idc = out.column(cur->column);
    idc.cells = std::move(new_ids);
    idc.type = wt.column(tgt.column).type;
    for (auto c : durations) {
        auto& cells = out.column(c).cells;
        for (std::size_t r = 0; r < cells.size(); ++r) {
            if (auto* v = std::get_if<std::int64_t>(&cells[r])) *v += shifts[r];
        }
    }
    auto id_vars = t.id_vars();
    auto index = t.index_var();
    auto interval = t.interval();
    if (out.has_column(tgt.column)) out.drop_column(tgt.column);
    out.rename_column(cur->column, tgt.column);
    for (auto& v : id_vars) {
        if (v == cur->column) v = tgt.column;
    }
    out.set_meta(std::move(id_vars), std::move(index), interval);

    if (lost > 0) {
        if (dropped) *dropped += lost;
        if (diag) {
            diag->report("change_id", src.name() + ": " + std::to_string(lost) + " rows dropped converting " +
                                          cur->label + " to " + tgt.label);
        }
    }
    return sort_by_keys(validate_or_downcast(std::move(out)));
}

Table change_interval(const Table& t, std::chrono::minutes interval) {
    const auto step = interval.count();
    if (step <= 0) throw Error(Errc::invalid_argument, "interval must be positive");
    Table out = t;
    for (std::size_t c = 0; c < out.cols(); ++c) {
        auto& col = out.column(c);
        if (col.type != ValueType::duration) continue;
        for (auto& cell : col.cells) {
            if (auto* v = std::get_if<std::int64_t>(&cell)) *v = *v / step * step;
        }
    }
    if (t.kind() == TableKind::ts) out.set_meta(t.id_vars(), t.index_var(), interval);
    return validate_or_downcast(std::move(out));
}

Table load_id(const DataSource& src, std::string_view table, const Predicate& where,
              std::vector<std::string> cols, const std::string& id_var, std::chrono::minutes interval,
              Diagnostics* diag) {
    Table t = load_difftime(src, table, where, std::move(cols), id_var, diag);
    t = change_id(t, src, id_var, diag);
    return change_interval(t, interval);
}

Table load_ts(const DataSource& src, std::string_view table, const Predicate& where,
              std::vector<std::string> cols, const std::string& id_var, std::chrono::minutes interval,
              std::optional<std::string> index_var, Diagnostics* diag) {
    const auto& h = src.table(table);
    if (!index_var) index_var = h.defaults().index_var;
    if (!index_var) {
        throw Error(Errc::invalid_argument,
                    src.name() + "." + std::string(table) + " has no index column configured");
    }
    if (!cols.empty() && std::find(cols.begin(), cols.end(), *index_var) == cols.end()) {
        cols.insert(cols.begin(), *index_var);
    }
    Table t = load_difftime(src, table, where && pred::not_null(*index_var), std::move(cols), id_var, diag);
    if (t.column(*index_var).type != ValueType::duration) {
        throw Error(Errc::invalid_argument, src.name() + "." + std::string(table) + ": index column '" +
                                                *index_var + "' is not a time column");
    }
    // Rows whose time could not be related to an origin carry no index.
    auto keep = pred::not_null(*index_var).filter(t);
    if (keep.size() != t.rows()) t = t.take(keep);
    t.set_meta(t.id_vars(), *index_var, std::chrono::minutes{1});
    t = validate_or_downcast(std::move(t));
    t = change_id(t, src, id_var, diag);
    return change_interval(t, interval);
}

}  // namespace icuharm
