#include "icuharm/table.hpp"

#include "icuharm/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_map>

namespace icuharm {

namespace {

using Key = std::vector<Cell>;

struct KeyLess {
    bool operator()(const Key& a, const Key& b) const noexcept {
        for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
            int c = compare_cells(a[i], b[i]);
            if (c != 0) return c < 0;
        }
        return a.size() < b.size();
    }
};

bool same_key(const std::vector<const Column*>& cols, std::size_t r1, std::size_t r2) {
    for (const auto* c : cols) {
        if (compare_cells(c->cells[r1], c->cells[r2]) != 0) return false;
    }
    return true;
}

std::vector<const Column*> resolve(const Table& t, std::span<const std::string> names) {
    std::vector<const Column*> out;
    out.reserve(names.size());
    for (const auto& n : names) out.push_back(&t.column(n));
    return out;
}

/// Splits an ordering into runs of equal keys.
std::vector<std::pair<std::size_t, std::size_t>> group_runs(const std::vector<const Column*>& keys,
                                                            const std::vector<std::size_t>& order) {
    std::vector<std::pair<std::size_t, std::size_t>> runs;
    std::size_t begin = 0;
    for (std::size_t i = 1; i <= order.size(); ++i) {
        if (i == order.size() || !same_key(keys, order[begin], order[i])) {
            runs.emplace_back(begin, i);
            begin = i;
        }
    }
    if (order.empty()) runs.clear();
    return runs;
}

Key row_key(const std::vector<const Column*>& cols, std::size_t row) {
    Key k;
    k.reserve(cols.size());
    for (const auto* c : cols) k.push_back(c->cells[row]);
    return k;
}

Cell aggregate_cells(const std::vector<const Cell*>& vals, Aggregation fun, ValueType type,
                     std::string_view column) {
    if (fun == Aggregation::count) return static_cast<std::int64_t>(vals.size());
    if (vals.empty()) return Cell{};
    switch (fun) {
        case Aggregation::first: return *vals.front();
        case Aggregation::last: return *vals.back();
        case Aggregation::min:
            return **std::min_element(vals.begin(), vals.end(), [](const Cell* a, const Cell* b) {
                return compare_cells(*a, *b) < 0;
            });
        case Aggregation::max:
            return **std::max_element(vals.begin(), vals.end(), [](const Cell* a, const Cell* b) {
                return compare_cells(*a, *b) < 0;
            });
        case Aggregation::any:
            return std::any_of(vals.begin(), vals.end(), [](const Cell* c) {
                return std::get<bool>(cast_cell(*c, ValueType::boolean));
            });
        case Aggregation::sum: {
            if (type == ValueType::boolean) {
                // The count of true values is read back as a logical.
                return std::any_of(vals.begin(), vals.end(),
                                   [](const Cell* c) { return std::get<bool>(*c); });
            }
            if (type == ValueType::floating) {
                double s = 0.0;
                for (const Cell* c : vals) s += *as_double(*c);
                return s;
            }
            std::int64_t s = 0;
            for (const Cell* c : vals) s += *as_int(*c);
            return s;
        }
        case Aggregation::median: {
            std::vector<double> xs;
            xs.reserve(vals.size());
            for (const Cell* c : vals) xs.push_back(*as_double(*c));
            std::sort(xs.begin(), xs.end());
            const std::size_t n = xs.size();
            if (n % 2 == 1) return xs[n / 2];
            return (xs[n / 2 - 1] + xs[n / 2]) / 2.0;
        }
        case Aggregation::count: break;
    }
    throw Error(Errc::bad_aggregate, std::string(column));
}

ValueType aggregate_type(Aggregation fun, ValueType in, std::string_view column) {
    switch (fun) {
        case Aggregation::count: return ValueType::integer;
        case Aggregation::any: return ValueType::boolean;
        case Aggregation::median:
            if (in == ValueType::string || in == ValueType::boolean) {
                throw Error(Errc::bad_aggregate,
                            "median is undefined for " + std::string(to_string(in)) + " column '" +
                                std::string(column) + "'");
            }
            return ValueType::floating;
        case Aggregation::sum:
            if (in == ValueType::string) {
                throw Error(Errc::bad_aggregate,
                            "sum is undefined for string column '" + std::string(column) + "'");
            }
            return in;
        default: return in;
    }
}

Column empty_like(const Column& c) { return Column{c.name, c.type, {}}; }

}  // namespace

std::string_view to_string(TableKind kind) noexcept {
    switch (kind) {
        case TableKind::plain: return "table";
        case TableKind::id: return "id_tbl";
        case TableKind::ts: return "ts_tbl";
    }
    return "table";
}

Table::Table(std::vector<Column> columns) {
    for (auto& c : columns) add_column(std::move(c));
}

std::size_t Table::rows() const noexcept {
    return columns_.empty() ? 0 : columns_.front().cells.size();
}

std::vector<std::string> Table::column_names() const {
    std::vector<std::string> out;
    out.reserve(columns_.size());
    for (const auto& c : columns_) out.push_back(c.name);
    return out;
}

bool Table::has_column(std::string_view name) const noexcept {
    return std::any_of(columns_.begin(), columns_.end(),
                       [&](const Column& c) { return c.name == name; });
}

std::size_t Table::column_index(std::string_view name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (columns_[i].name == name) return i;
    }
    throw Error(Errc::unknown_column, std::string(name));
}

const Column& Table::column(std::string_view name) const { return columns_[column_index(name)]; }
Column& Table::column(std::string_view name) { return columns_[column_index(name)]; }

void Table::add_column(Column c) {
    if (has_column(c.name)) {
        throw Error(Errc::invalid_argument, "duplicate column '" + c.name + "'");
    }
    if (!columns_.empty() && c.cells.size() != rows()) {
        throw Error(Errc::length_mismatch, "column '" + c.name + "' has " +
                                               std::to_string(c.cells.size()) + " rows, table has " +
                                               std::to_string(rows()));
    }
    columns_.push_back(std::move(c));
}

void Table::drop_column(std::string_view name) {
    columns_.erase(columns_.begin() + static_cast<std::ptrdiff_t>(column_index(name)));
    units_.erase(std::string(name));
}

void Table::rename_column(std::string_view from, const std::string& to) {
    if (from == to) return;
    if (has_column(to)) throw Error(Errc::invalid_argument, "duplicate column '" + to + "'");
    column(from).name = to;
    for (auto& v : id_vars_) {
        if (v == from) v = to;
    }
    if (index_var_ && *index_var_ == from) index_var_ = to;
    if (auto it = units_.find(std::string(from)); it != units_.end()) {
        auto unit = it->second;
        units_.erase(it);
        units_[to] = unit;
    }
}

void Table::select(std::span<const std::string> names) {
    std::vector<Column> kept;
    kept.reserve(names.size());
    for (const auto& n : names) kept.push_back(std::move(column(n)));
    columns_ = std::move(kept);
    for (auto it = units_.begin(); it != units_.end();) {
        it = has_column(it->first) ? std::next(it) : units_.erase(it);
    }
}

Table Table::take(std::span<const std::size_t> rows) const {
    Table out = *this;
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        std::vector<Cell> cells;
        cells.reserve(rows.size());
        for (std::size_t r : rows) cells.push_back(columns_[i].cells[r]);
        out.columns_[i].cells = std::move(cells);
    }
    return out;
}

void Table::append(const Table& other) {
    if (columns_.empty()) {
        auto meta_ids = id_vars_;
        auto meta_idx = index_var_;
        auto meta_iv = interval_;
        *this = other;
        if (!meta_ids.empty()) set_meta(meta_ids, meta_idx, meta_iv);
        return;
    }
    if (other.cols() != cols()) {
        throw Error(Errc::length_mismatch, "cannot append tables with different column counts");
    }
    for (auto& c : columns_) {
        const auto& src = other.column(c.name);
        c.cells.insert(c.cells.end(), src.cells.begin(), src.cells.end());
    }
}

std::vector<std::string> Table::key_vars() const {
    auto keys = id_vars_;
    if (kind_ == TableKind::ts && index_var_) keys.push_back(*index_var_);
    return keys;
}

std::vector<std::string> Table::value_vars() const {
    auto keys = key_vars();
    std::vector<std::string> out;
    for (const auto& c : columns_) {
        if (std::find(keys.begin(), keys.end(), c.name) == keys.end()) out.push_back(c.name);
    }
    return out;
}

void Table::set_meta(std::vector<std::string> id_vars, std::optional<std::string> index_var,
                     std::chrono::minutes interval) {
    id_vars_ = std::move(id_vars);
    index_var_ = std::move(index_var);
    interval_ = interval;
}

bool satisfies_id_invariants(const Table& t, std::span<const std::string> id_vars) {
    if (id_vars.empty()) return false;
    std::set<std::string> seen;
    for (const auto& v : id_vars) {
        if (!t.has_column(v) || !seen.insert(v).second) return false;
    }
    return true;
}

bool satisfies_ts_invariants(const Table& t, std::span<const std::string> id_vars,
                             std::string_view index_var, std::chrono::minutes interval) {
    if (!satisfies_id_invariants(t, id_vars)) return false;
    if (interval.count() <= 0 || !t.has_column(index_var)) return false;
    if (std::find(id_vars.begin(), id_vars.end(), index_var) != id_vars.end()) return false;
    const auto& idx = t.column(index_var);
    if (idx.type != ValueType::duration) return false;
    const auto step = interval.count();
    return std::all_of(idx.cells.begin(), idx.cells.end(), [step](const Cell& c) {
        const auto* v = std::get_if<std::int64_t>(&c);
        return v != nullptr && *v % step == 0;
    });
}

Table validate_or_downcast(Table t) {
    if (t.index_var_ && satisfies_ts_invariants(t, t.id_vars_, *t.index_var_, t.interval_)) {
        t.kind_ = TableKind::ts;
    } else if (satisfies_id_invariants(t, t.id_vars_)) {
        t.kind_ = TableKind::id;
        t.index_var_.reset();
        t.interval_ = std::chrono::minutes{0};
    } else {
        t.kind_ = TableKind::plain;
        t.id_vars_.clear();
        t.index_var_.reset();
        t.interval_ = std::chrono::minutes{0};
        return t;
    }
    auto keys = t.key_vars();
    std::vector<Column> ordered;
    ordered.reserve(t.columns_.size());
    std::vector<char> taken(t.columns_.size(), 0);
    for (const auto& k : keys) {
        const auto i = t.column_index(k);
        taken[i] = 1;
        ordered.push_back(std::move(t.columns_[i]));
    }
    for (std::size_t i = 0; i < t.columns_.size(); ++i) {
        if (!taken[i]) ordered.push_back(std::move(t.columns_[i]));
    }
    t.columns_ = std::move(ordered);
    return t;
}

Table make_id_tbl(std::vector<Column> columns, std::vector<std::string> id_vars) {
    Table t(std::move(columns));
    t.set_meta(std::move(id_vars));
    return validate_or_downcast(std::move(t));
}

Table make_ts_tbl(std::vector<Column> columns, std::vector<std::string> id_vars,
                  std::string index_var, std::chrono::minutes interval) {
    Table t(std::move(columns));
    t.set_meta(std::move(id_vars), std::move(index_var), interval);
    return validate_or_downcast(std::move(t));
}

std::optional<Aggregation> parse_aggregation(std::string_view name) noexcept {
    static const std::pair<std::string_view, Aggregation> names[] = {
        {"first", Aggregation::first}, {"last", Aggregation::last},
        {"min", Aggregation::min},     {"max", Aggregation::max},
        {"sum", Aggregation::sum},     {"median", Aggregation::median},
        {"any", Aggregation::any},     {"count", Aggregation::count},
    };
    for (const auto& [n, f] : names) {
        if (n == name) return f;
    }
    return std::nullopt;
}

std::string_view to_string(Aggregation fun) noexcept {
    switch (fun) {
        case Aggregation::first: return "first";
        case Aggregation::last: return "last";
        case Aggregation::min: return "min";
        case Aggregation::max: return "max";
        case Aggregation::sum: return "sum";
        case Aggregation::median: return "median";
        case Aggregation::any: return "any";
        case Aggregation::count: return "count";
    }
    return "first";
}

Aggregation default_aggregation(ValueType type) noexcept {
    switch (type) {
        case ValueType::string: return Aggregation::first;
        case ValueType::boolean: return Aggregation::sum;
        default: return Aggregation::median;
    }
}

std::vector<std::size_t> sorted_order(const Table& t, std::span<const std::string> keys) {
    std::vector<std::size_t> order(t.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto cols = resolve(t, keys);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        for (const auto* c : cols) {
            int r = compare_cells(c->cells[a], c->cells[b]);
            if (r != 0) return r < 0;
        }
        return false;
    });
    return order;
}

Table sort_by_keys(const Table& t) {
    auto keys = t.key_vars();
    if (keys.empty()) return t;
    auto order = sorted_order(t, keys);
    if (std::is_sorted(order.begin(), order.end())) return t;
    return t.take(order);
}

Table aggregate(const Table& t, std::optional<Aggregation> fun, std::vector<std::string> value_cols) {
    if (t.kind() == TableKind::plain) {
        throw Error(Errc::invalid_argument, "aggregate requires an id or ts table");
    }
    auto keys = t.key_vars();
    if (value_cols.empty()) value_cols = t.value_vars();
    for (const auto& v : value_cols) {
        if (std::find(keys.begin(), keys.end(), v) != keys.end()) {
            throw Error(Errc::bad_aggregate, "value column '" + v + "' is a key column");
        }
    }
    auto key_cols = resolve(t, keys);
    auto val_cols = resolve(t, value_cols);
    auto order = sorted_order(t, keys);
    auto runs = group_runs(key_cols, order);

    std::vector<Column> out;
    for (const auto* k : key_cols) out.push_back(empty_like(*k));
    std::vector<Aggregation> funs;
    for (const auto* v : val_cols) {
        const Aggregation f = fun.value_or(default_aggregation(v->type));
        funs.push_back(f);
        out.push_back(Column{v->name, aggregate_type(f, v->type, v->name), {}});
    }
    for (auto& c : out) c.cells.reserve(runs.size());

    std::vector<const Cell*> vals;
    for (const auto& [b, e] : runs) {
        for (std::size_t k = 0; k < key_cols.size(); ++k) {
            out[k].cells.push_back(key_cols[k]->cells[order[b]]);
        }
        for (std::size_t v = 0; v < val_cols.size(); ++v) {
            vals.clear();
            for (std::size_t i = b; i < e; ++i) {
                const Cell& c = val_cols[v]->cells[order[i]];
                if (!is_null(c)) vals.push_back(&c);
            }
            out[key_cols.size() + v].cells.push_back(
                aggregate_cells(vals, funs[v], val_cols[v]->type, val_cols[v]->name));
        }
    }
    Table res(std::move(out));
    res.set_meta(t.id_vars(), t.index_var(), t.interval());
    for (const auto& [col, unit] : t.units()) {
        if (res.has_column(col)) res.set_unit(col, unit);
    }
    return validate_or_downcast(std::move(res));
}

Table fill_gaps(const Table& t) {
    if (t.kind() != TableKind::ts) {
        throw Error(Errc::invalid_argument, "fill_gaps requires a ts table");
    }
    const auto& ids = t.id_vars();
    const std::string index = *t.index_var();
    const std::int64_t step = t.interval().count();
    auto id_cols = resolve(t, ids);
    auto keys = t.key_vars();
    auto order = sorted_order(t, keys);
    auto runs = group_runs(id_cols, order);
    const auto& idx = t.column(index);
    const std::size_t idx_pos = t.column_index(index);

    Table out = t.take({});
    for (const auto& [b, e] : runs) {
        const std::int64_t lo = std::get<std::int64_t>(idx.cells[order[b]]);
        const std::int64_t hi = std::get<std::int64_t>(idx.cells[order[e - 1]]);
        std::size_t i = b;
        for (std::int64_t tm = lo; tm <= hi; tm += step) {
            bool present = false;
            while (i < e && std::get<std::int64_t>(idx.cells[order[i]]) == tm) {
                for (std::size_t c = 0; c < t.cols(); ++c) {
                    out.column(c).cells.push_back(t.column(c).cells[order[i]]);
                }
                present = true;
                ++i;
            }
            if (present) continue;
            for (std::size_t c = 0; c < t.cols(); ++c) {
                auto& cells = out.column(c).cells;
                if (c == idx_pos) {
                    cells.emplace_back(tm);
                } else if (std::find(ids.begin(), ids.end(), t.column(c).name) != ids.end()) {
                    cells.push_back(t.column(c).cells[order[b]]);
                } else {
                    cells.emplace_back();
                }
            }
        }
    }
    return validate_or_downcast(std::move(out));
}

Table replace_na(const Table& t, std::span<const std::string> vars, std::span<const NaFill> types,
                 std::span<const Cell> values, std::vector<std::string> by) {
    if (types.size() != vars.size() && types.size() != 1) {
        throw Error(Errc::length_mismatch, "replace_na: " + std::to_string(vars.size()) +
                                               " vars but " + std::to_string(types.size()) +
                                               " fill types");
    }
    const bool needs_values = std::any_of(types.begin(), types.end(),
                                          [](NaFill f) { return f == NaFill::constant; });
    if (needs_values && values.size() != vars.size() && values.size() != 1) {
        throw Error(Errc::length_mismatch, "replace_na: " + std::to_string(vars.size()) +
                                               " vars but " + std::to_string(values.size()) +
                                               " fill values");
    }
    if (by.empty()) by = t.id_vars();

    std::vector<std::string> sort_keys = by;
    if (t.kind() == TableKind::ts) sort_keys.push_back(*t.index_var());
    Table out = sort_keys.empty() ? t : t.take(sorted_order(t, sort_keys));
    auto group_cols = resolve(out, by);

    for (std::size_t v = 0; v < vars.size(); ++v) {
        auto& col = out.column(vars[v]);
        const NaFill type = types.size() == 1 ? types[0] : types[v];
        if (type == NaFill::constant) {
            const Cell& fill = values.size() == 1 ? values[0] : values[v];
            for (auto& c : col.cells) {
                if (is_null(c)) c = cast_cell(fill, col.type);
            }
            continue;
        }
        Cell last;
        for (std::size_t r = 0; r < col.cells.size(); ++r) {
            if (r > 0 && !same_key(group_cols, r - 1, r)) last = Cell{};
            if (is_null(col.cells[r])) {
                col.cells[r] = last;
            } else {
                last = col.cells[r];
            }
        }
    }
    return validate_or_downcast(std::move(out));
}

Table merge_tables(const Table& a, const Table& b) {
    if (a.kind() == TableKind::plain || b.kind() == TableKind::plain) {
        throw Error(Errc::incompatible_ids, "merge requires id or ts tables");
    }
    if (a.id_vars() != b.id_vars()) {
        throw Error(Errc::incompatible_ids, "id columns differ between merge operands");
    }
    for (const auto& v : b.value_vars()) {
        if (a.has_column(v) && (!a.index_var() || *a.index_var() != v)) {
            throw Error(Errc::invalid_argument, "column '" + v + "' present in both merge operands");
        }
    }

    // id x ts: broadcast the static side over the time-series side.
    if (a.kind() != b.kind()) {
        const Table& ts = a.kind() == TableKind::ts ? a : b;
        const Table& st = a.kind() == TableKind::ts ? b : a;
        auto st_ids = resolve(st, st.id_vars());
        std::map<Key, std::vector<std::size_t>, KeyLess> lookup;
        for (std::size_t r = 0; r < st.rows(); ++r) lookup[row_key(st_ids, r)].push_back(r);
        auto ts_ids = resolve(ts, ts.id_vars());

        std::vector<std::size_t> ts_rows;
        std::vector<std::optional<std::size_t>> st_rows;
        for (std::size_t r = 0; r < ts.rows(); ++r) {
            auto it = lookup.find(row_key(ts_ids, r));
            if (it == lookup.end()) {
                ts_rows.push_back(r);
                st_rows.emplace_back();
                continue;
            }
            for (std::size_t s : it->second) {
                ts_rows.push_back(r);
                st_rows.emplace_back(s);
            }
        }
        Table out = ts.take(ts_rows);
        for (const auto& v : st.value_vars()) {
            const auto& src = st.column(v);
            Column c{src.name, src.type, {}};
            c.cells.reserve(st_rows.size());
            for (const auto& s : st_rows) c.cells.push_back(s ? src.cells[*s] : Cell{});
            out.add_column(std::move(c));
            if (auto u = st.units().find(v); u != st.units().end()) out.set_unit(v, u->second);
        }
        // Keep the operands' value-column order.
        if (&ts == &b) {
            std::vector<std::string> order = ts.key_vars();
            for (const auto& v : a.value_vars()) order.push_back(v);
            for (const auto& v : b.value_vars()) order.push_back(v);
            out.select(order);
        }
        return sort_by_keys(validate_or_downcast(std::move(out)));
    }

    std::vector<std::string> keys_a = a.key_vars();
    std::vector<std::string> keys_b = b.key_vars();
    std::chrono::minutes interval{0};
    if (a.kind() == TableKind::ts) {
        const auto ia = a.interval().count();
        const auto ib = b.interval().count();
        if (ib % ia == 0) {
            interval = a.interval();
        } else if (ia % ib == 0) {
            interval = b.interval();
        } else {
            throw Error(Errc::interval_mismatch, "intervals " + std::to_string(ia) + " and " +
                                                     std::to_string(ib) +
                                                     " min cannot be harmonized losslessly");
        }
    }
    auto ka = resolve(a, keys_a);
    auto kb = resolve(b, keys_b);
    std::map<Key, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>, KeyLess> groups;
    for (std::size_t r = 0; r < a.rows(); ++r) groups[row_key(ka, r)].first.push_back(r);
    for (std::size_t r = 0; r < b.rows(); ++r) groups[row_key(kb, r)].second.push_back(r);

    std::vector<Column> cols;
    for (const auto* k : ka) cols.push_back(empty_like(*k));
    auto va = a.value_vars();
    auto vb = b.value_vars();
    for (const auto& v : va) cols.push_back(empty_like(a.column(v)));
    for (const auto& v : vb) cols.push_back(empty_like(b.column(v)));

    auto emit = [&](const Key& key, std::optional<std::size_t> ra, std::optional<std::size_t> rb) {
        std::size_t c = 0;
        for (const auto& k : key) cols[c++].cells.push_back(k);
        for (const auto& v : va) cols[c++].cells.push_back(ra ? a.column(v).cells[*ra] : Cell{});
        for (const auto& v : vb) cols[c++].cells.push_back(rb ? b.column(v).cells[*rb] : Cell{});
    };
    for (const auto& [key, rows] : groups) {
        const auto& [ra, rb] = rows;
        if (ra.empty()) {
            for (auto r : rb) emit(key, std::nullopt, r);
        } else if (rb.empty()) {
            for (auto r : ra) emit(key, r, std::nullopt);
        } else {
            for (auto x : ra) {
                for (auto y : rb) emit(key, x, y);
            }
        }
    }
    Table out(std::move(cols));
    out.set_meta(a.id_vars(), a.index_var(), interval);
    for (const auto* t : {&a, &b}) {
        for (const auto& [col, unit] : t->units()) {
            if (out.has_column(col)) out.set_unit(col, unit);
        }
    }
    return validate_or_downcast(std::move(out));
}

Table slice_until_event(const Table& t, std::string_view flag_col) {
    if (t.kind() != TableKind::ts) {
        throw Error(Errc::invalid_argument, "slice_until_event requires a ts table");
    }
    const auto& flag = t.column(flag_col);
    auto keys = t.key_vars();
    auto order = sorted_order(t, keys);
    auto runs = group_runs(resolve(t, t.id_vars()), order);
    std::vector<std::size_t> keep;
    for (const auto& [b, e] : runs) {
        for (std::size_t i = b; i < e; ++i) {
            keep.push_back(order[i]);
            const auto* f = std::get_if<bool>(&flag.cells[order[i]]);
            if (f && *f) break;
        }
    }
    return validate_or_downcast(t.take(keep));
}

Table concat_rows(std::span<const Table> parts) {
    Table out;
    bool first = true;
    for (const auto& p : parts) {
        if (first) {
            out = p;
            first = false;
            continue;
        }
        if (p.column_names() != out.column_names()) {
            throw Error(Errc::invalid_argument, "cannot stack tables with different columns");
        }
        out.append(p);
    }
    return validate_or_downcast(std::move(out));
}

void write_csv(const Table& t, std::ostream& out) {
    auto quote = [](const std::string& s) {
        if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
        std::string q = "\"";
        for (char ch : s) {
            if (ch == '"') q += '"';
            q += ch;
        }
        return q + "\"";
    };
    const auto& cols = t.columns();
    for (std::size_t c = 0; c < cols.size(); ++c) {
        out << (c ? "," : "") << quote(cols[c].name);
    }
    out << '\n';
    for (std::size_t r = 0; r < t.rows(); ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            out << (c ? "," : "") << quote(format_cell(cols[c].cells[r], cols[c].type));
        }
        out << '\n';
    }
}

std::string metadata_json(const Table& t) {
    nlohmann::ordered_json j;
    j["class"] = std::string(to_string(t.kind()));
    j["id_vars"] = t.id_vars();
    j["index_var"] = t.index_var() ? nlohmann::ordered_json(*t.index_var()) : nullptr;
    j["interval_mins"] = t.kind() == TableKind::ts ? nlohmann::ordered_json(t.interval().count())
                                                    : nullptr;
    j["units"] = nlohmann::ordered_json::object();
    for (const auto& [c, u] : t.units()) j["units"][c] = u;
    j["columns"] = nlohmann::ordered_json::array();
    for (const auto& c : t.columns()) {
        j["columns"].push_back({{"name", c.name}, {"type", std::string(to_string(c.type))}});
    }
    j["rows"] = t.rows();
    return j.dump(2);
}

}  // namespace icuharm
