#include "icuharm/concepts.hpp"

#include "icuharm/error.hpp"

#include <array>
#include <cctype>
#include <charconv>

namespace icuharm {

namespace {

using Key = std::pair<Cell, std::int64_t>;

struct KeyLess {
    bool operator()(const Key& a, const Key& b) const noexcept {
        const int c = compare_cells(a.first, b.first);
        return c != 0 ? c < 0 : a.second < b.second;
    }
};

/// Values of `name` per (id, time) key, or nothing when the sub-concept is absent.
std::map<Key, double, KeyLess> series(const std::map<std::string, Table>& subs, const std::string& name,
                                      const RecContext& ctx) {
    std::map<Key, double, KeyLess> out;
    auto it = subs.find(name);
    if (it == subs.end()) return out;
    const Table& t = it->second;
    const auto& ids = t.column(ctx.id_var).cells;
    const auto& times = t.column(ctx.index_var).cells;
    const auto& vals = t.column(name).cells;
    for (std::size_t r = 0; r < t.rows(); ++r) {
        auto v = as_double(vals[r]);
        auto tm = as_int(times[r]);
        if (v && tm) out[{ids[r], *tm}] = *v;
    }
    return out;
}

ValueType id_type(const std::map<std::string, Table>& subs, const RecContext& ctx) {
    for (const auto& [_, t] : subs) {
        if (t.has_column(ctx.id_var)) return t.column(ctx.id_var).type;
    }
    return ValueType::integer;
}

std::chrono::minutes match_window(const RecContext& ctx) {
    if (!ctx.args.is_object() || !ctx.args.contains("match_win")) return std::chrono::minutes{120};
    const auto& v = ctx.args.at("match_win");
    if (v.is_number()) return std::chrono::minutes{v.get<std::int64_t>()};
    if (v.is_string()) return parse_interval(v.get<std::string>());
    throw Error(Errc::invalid_argument, "match_win must be a number of minutes or an interval string");
}

FunResult age_at_stay(const FunContext& f) {
    const auto& w = f.src.id_windows(f.diag);
    const auto& spec = f.src.descriptor().id_systems;
    const std::size_t finest = spec.entries.size() - 1;
    Column ids{spec.finest().column, w.table.column(spec.finest().column).type, {}};
    Column age{"age", ValueType::floating, {}};
    for (const auto& [id, win] : w.lookup[finest]) {
        const auto& coarse = w.table.column(spec.coarsest().column).cells[win.rows.front()];
        const auto* birth = w.find(0, coarse);
        if (!win.abs_start || !birth || !birth->abs_start) continue;
        const std::int64_t minutes = (*win.abs_start - *birth->abs_start) / 60;
        ids.cells.push_back(id);
        age.cells.push_back(static_cast<double>(minutes) / 525960.0);
    }
    FunResult r;
    r.table = make_id_tbl({std::move(ids), std::move(age)}, {spec.finest().column});
    r.meta.val_var = "age";
    r.meta.id_vars = r.table.id_vars();
    return r;
}

}  // namespace

std::chrono::minutes parse_interval(std::string_view text) {
    std::int64_t n = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
    if (ec != std::errc() || n <= 0) throw Error(Errc::invalid_argument, "bad interval '" + std::string(text) + "'");
    std::string_view unit(ptr, static_cast<std::size_t>(text.data() + text.size() - ptr));
    if (unit.empty() || unit == "m" || unit == "min" || unit == "mins") return std::chrono::minutes{n};
    if (unit == "h" || unit == "hour" || unit == "hours") return std::chrono::minutes{n * 60};
    if (unit == "d" || unit == "day" || unit == "days") return std::chrono::minutes{n * 1440};
    throw Error(Errc::invalid_argument, "bad interval unit in '" + std::string(text) + "'");
}

Table sirs_score(const std::map<std::string, Table>& subs, const RecContext& ctx) {
    const std::array<std::string, 5> names{"temp", "hr", "resp", "pco2", "wbc"};
    std::map<Key, std::array<std::optional<double>, 5>, KeyLess> rows;
    for (std::size_t i = 0; i < names.size(); ++i) {
        for (const auto& [k, v] : series(subs, names[i], ctx)) rows[k][i] = v;
    }

    Column id{ctx.id_var, id_type(subs, ctx), {}};
    Column tm{ctx.index_var, ValueType::duration, {}};
    Column score{ctx.def.name, ValueType::integer, {}};
    std::array<Column, 4> comps{Column{"temp_comp", ValueType::integer, {}},
                                Column{"hr_comp", ValueType::integer, {}},
                                Column{"resp_comp", ValueType::integer, {}},
                                Column{"wbc_comp", ValueType::integer, {}}};
    for (const auto& [k, v] : rows) {
        const auto& [temp, hr, resp, pco2, wbc] = v;
        std::array<Cell, 4> c;
        if (temp) c[0] = std::int64_t{*temp < 36.0 || *temp > 38.0};
        if (hr) c[1] = std::int64_t{*hr > 90.0};
        if (resp || pco2) c[2] = std::int64_t{(resp && *resp > 20.0) || (pco2 && *pco2 < 32.0)};
        if (wbc) c[3] = std::int64_t{*wbc < 4.0 || *wbc > 12.0};
        std::int64_t sum = 0;
        for (std::size_t i = 0; i < 4; ++i) {
            if (auto x = as_int(c[i])) sum += *x;
            comps[i].cells.push_back(c[i]);
        }
        id.cells.push_back(k.first);
        tm.cells.emplace_back(k.second);
        score.cells.emplace_back(sum);
    }
    std::vector<Column> cols{std::move(id), std::move(tm), std::move(score)};
    if (ctx.keep_components) {
        for (auto& c : comps) cols.push_back(std::move(c));
    }
    return make_ts_tbl(std::move(cols), {ctx.id_var}, ctx.index_var, ctx.interval);
}

Table pafi_ratio(const std::map<std::string, Table>& subs, const RecContext& ctx) {
    const auto win = match_window(ctx).count();
    auto pao2 = series(subs, "pao2", ctx);
    auto fio2 = series(subs, "fio2", ctx);
    std::map<Key, std::pair<std::optional<double>, std::optional<double>>, KeyLess> obs;
    for (const auto& [k, v] : pao2) obs[k].first = v;
    for (const auto& [k, v] : fio2) obs[k].second = v;

    Column id{ctx.id_var, id_type(subs, ctx), {}};
    Column tm{ctx.index_var, ValueType::duration, {}};
    Column ratio{ctx.def.name, ValueType::floating, {}};
    Column pc{"pao2", ValueType::floating, {}};
    Column fc{"fio2", ValueType::floating, {}};
    std::optional<std::pair<double, std::int64_t>> last_p, last_f;
    const Cell* group = nullptr;
    std::size_t zero = 0;
    for (const auto& [k, v] : obs) {
        if (!group || compare_cells(*group, k.first) != 0) {
            last_p.reset();
            last_f.reset();
            group = &k.first;
        }
        if (v.first) last_p = std::make_pair(*v.first, k.second);
        if (v.second) last_f = std::make_pair(*v.second, k.second);
        if (!last_p || !last_f || k.second - last_p->second > win || k.second - last_f->second > win) continue;
        if (last_f->first == 0.0) {
            ++zero;
            continue;
        }
        id.cells.push_back(k.first);
        tm.cells.emplace_back(k.second);
        ratio.cells.emplace_back(100.0 * last_p->first / last_f->first);
        pc.cells.emplace_back(last_p->first);
        fc.cells.emplace_back(last_f->first);
    }
    if (zero > 0 && ctx.diag) {
        ctx.diag->report("pafi", std::to_string(zero) + " rows with zero FiO2 dropped");
    }
    std::vector<Column> cols{std::move(id), std::move(tm), std::move(ratio)};
    if (ctx.keep_components) {
        cols.push_back(std::move(pc));
        cols.push_back(std::move(fc));
    }
    return make_ts_tbl(std::move(cols), {ctx.id_var}, ctx.index_var, ctx.interval);
}

ConceptRegistry ConceptRegistry::with_builtins() {
    ConceptRegistry reg;
    reg.add_rec("sirs_score", sirs_score);
    reg.add_rec("pafi_ratio", pafi_ratio);
    reg.add_fun("age_at_stay", age_at_stay);
    return reg;
}

}  // namespace icuharm
