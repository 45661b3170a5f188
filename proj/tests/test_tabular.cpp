#include "icuharm/error.hpp"
#include "icuharm/table.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace icuharm;
using std::chrono::minutes;

namespace {

Column ints(std::string name, std::vector<std::int64_t> vs, ValueType type = ValueType::integer) {
    Column c{std::move(name), type, {}};
    for (auto v : vs) c.cells.emplace_back(v);
    return c;
}

Column opt_doubles(std::string name, std::vector<std::optional<double>> vs) {
    Column c{std::move(name), ValueType::floating, {}};
    for (auto v : vs) c.cells.push_back(v ? Cell{*v} : Cell{});
    return c;
}

Table hourly(std::vector<std::int64_t> ids, std::vector<std::int64_t> hours, std::vector<std::optional<double>> vals,
             std::string value = "x") {
    for (auto& h : hours) h *= 60;
    return make_ts_tbl({ints("id", ids), ints("time", hours, ValueType::duration), opt_doubles(value, vals)}, {"id"},
                       "time", minutes{60});
}

std::vector<std::int64_t> int_column(const Table& t, std::string_view name) {
    std::vector<std::int64_t> out;
    for (const auto& c : t.column(name).cells) out.push_back(*as_int(c));
    return out;
}

Table random_ts(std::mt19937_64& rng) {
    auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    std::vector<std::int64_t> ids, hours;
    std::vector<std::optional<double>> vals;
    const int groups = uni(1, 4);
    for (int g = 0; g < groups; ++g) {
        std::set<int> ticks;
        for (int k = uni(1, 6); k > 0; --k) ticks.insert(uni(-5, 20));
        for (int t : ticks) {
            ids.push_back(g);
            hours.push_back(t);
            vals.push_back(uni(0, 3) ? std::optional<double>(uni(0, 50)) : std::nullopt);
        }
    }
    return hourly(ids, hours, vals);
}

bool keys_sorted(const Table& t) {
    const auto keys = t.key_vars();
    const auto order = sorted_order(t, keys);
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (order[i] != i) return false;
    }
    return true;
}

}  // namespace

TEST(Downcast, ShiftedIndexBecomesIdTable) {
    Table t = hourly({1, 1}, {0, 1}, {1.0, 2.0});
    ASSERT_EQ(t.kind(), TableKind::ts);
    for (auto& c : t.column("time").cells) c = *as_int(c) + 30;
    EXPECT_EQ(validate_or_downcast(t).kind(), TableKind::id);
}

TEST(Downcast, ValidTableIsUnchanged) {
    Table t = hourly({1, 1, 2}, {0, 1, 5}, {1.0, 2.0, 3.0});
    EXPECT_EQ(validate_or_downcast(t), t);
}

TEST(Downcast, DroppingOnlyIdColumnGivesPlainTable) {
    Table t = make_id_tbl({ints("id", {1, 2}), opt_doubles("x", {1.0, 2.0})}, {"id"});
    ASSERT_EQ(t.kind(), TableKind::id);
    t.drop_column("id");
    Table d = validate_or_downcast(t);
    EXPECT_EQ(d.kind(), TableKind::plain);
    EXPECT_FALSE(satisfies_id_invariants(t, std::vector<std::string>{"id"}));
}

TEST(Downcast, NullIndexIsNotATimeSeries) {
    Table t = hourly({1, 1}, {0, 1}, {1.0, 2.0});
    t.column("time").cells[1] = Cell{};
    EXPECT_EQ(validate_or_downcast(t).kind(), TableKind::id);
}

TEST(Downcast, KeysMoveToTheFront) {
    Table t({opt_doubles("x", {1.0}), ints("time", {60}, ValueType::duration), ints("id", {3})});
    t.set_meta({"id"}, "time", minutes{60});
    Table v = validate_or_downcast(t);
    EXPECT_EQ(v.kind(), TableKind::ts);
    EXPECT_EQ(v.column_names(), (std::vector<std::string>{"id", "time", "x"}));
}

TEST(Downcast, ResultIsTheMaximalClass) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 200; ++i) {
        Table t = random_ts(rng);
        if (i % 2) {
            for (auto& c : t.column("time").cells) c = *as_int(c) + (i % 7) * 10;
        }
        Table v = validate_or_downcast(t);
        const auto ids = std::vector<std::string>{"id"};
        const bool ts = satisfies_ts_invariants(t, ids, "time", minutes{60});
        EXPECT_EQ(v.kind() == TableKind::ts, ts);
        if (!ts) {
            EXPECT_EQ(v.kind(), TableKind::id);
            EXPECT_TRUE(satisfies_id_invariants(t, ids));
        }
    }
}

TEST(Aggregate, OddMedian) {
    Table t = hourly({1, 1, 1}, {0, 0, 0}, {1.0, 3.0, 10.0});
    Table a = aggregate(t, Aggregation::median);
    ASSERT_EQ(a.rows(), 1u);
    EXPECT_EQ(a.column("x").cells[0], Cell{3.0});
}

TEST(Aggregate, EvenMedianIsMeanOfCentralPair) {
    Table t = hourly({1, 1, 1, 1}, {0, 0, 0, 0}, {1.0, 3.0, 10.0, 4.0});
    EXPECT_EQ(aggregate(t).column("x").cells[0], Cell{3.5});
}

TEST(Aggregate, LogicalSumReadsAsAny) {
    Table t = make_id_tbl({ints("id", {1, 1}), Column{"f", ValueType::boolean, {true, false}}}, {"id"});
    Table a = aggregate(t, Aggregation::sum);
    EXPECT_EQ(a.column("f").cells[0], Cell{true});
    EXPECT_EQ(a.column("f").type, ValueType::boolean);
}

TEST(Aggregate, StringFirst) {
    Table t = make_id_tbl({ints("id", {1, 1}), Column{"s", ValueType::string, {std::string("a"), std::string("b")}}},
                          {"id"});
    EXPECT_EQ(aggregate(t, Aggregation::first).column("s").cells[0], Cell{std::string("a")});
    EXPECT_EQ(aggregate(t).column("s").cells[0], Cell{std::string("a")});
}

TEST(Aggregate, AllNullGroupStaysNull) {
    Table t = hourly({1, 1, 2}, {0, 0, 0}, {std::nullopt, std::nullopt, 2.0});
    Table a = aggregate(t);
    ASSERT_EQ(a.rows(), 2u);
    EXPECT_TRUE(is_null(a.column("x").cells[0]));
    EXPECT_EQ(a.column("x").cells[1], Cell{2.0});
}

TEST(Aggregate, OutputIsKeyUniqueAndSorted) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 100; ++i) {
        Table t = random_ts(rng);
        Table twice = t;
        twice.append(t);
        Table a = aggregate(validate_or_downcast(twice));
        std::set<std::pair<std::int64_t, std::int64_t>> keys;
        for (std::size_t r = 0; r < a.rows(); ++r) {
            EXPECT_TRUE(keys.insert({*as_int(a.column("id").cells[r]), *as_int(a.column("time").cells[r])}).second);
        }
        EXPECT_EQ(keys.size(), t.rows());
        EXPECT_TRUE(keys_sorted(a));
    }
}

TEST(Aggregate, UnknownNameIsRejected) {
    EXPECT_FALSE(parse_aggregation("mode").has_value());
    EXPECT_EQ(parse_aggregation("median"), Aggregation::median);
}

TEST(FillGaps, FillsInteriorGrid) {
    Table f = fill_gaps(hourly({1, 1}, {0, 3}, {1.0, 4.0}));
    EXPECT_EQ(int_column(f, "time"), (std::vector<std::int64_t>{0, 60, 120, 180}));
    EXPECT_TRUE(is_null(f.column("x").cells[1]));
    EXPECT_TRUE(is_null(f.column("x").cells[2]));
    EXPECT_EQ(f.column("x").cells[3], Cell{4.0});
}

TEST(FillGaps, SingleRowUnchanged) {
    Table t = hourly({1}, {2}, {1.0});
    EXPECT_EQ(fill_gaps(t), t);
}

TEST(FillGaps, GroupsExpandIndependently) {
    Table f = fill_gaps(hourly({1, 1, 2, 2}, {0, 2, 10, 11}, {1.0, 2.0, 3.0, 4.0}));
    EXPECT_EQ(int_column(f, "id"), (std::vector<std::int64_t>{1, 1, 1, 2, 2}));
    EXPECT_EQ(int_column(f, "time"), (std::vector<std::int64_t>{0, 60, 120, 600, 660}));
}

TEST(ReplaceNa, LocfCarriesForward) {
    Table t = hourly({1, 1, 1, 1}, {0, 1, 2, 3}, {2.1, std::nullopt, std::nullopt, 3.0}, "lact");
    const std::vector<std::string> vars{"lact"};
    const std::vector<NaFill> types{NaFill::locf};
    const std::vector<Cell> values{Cell{}};
    Table r = replace_na(t, vars, types, values);
    EXPECT_EQ(r.column("lact"), opt_doubles("lact", {2.1, 2.1, 2.1, 3.0}));
}

TEST(ReplaceNa, ConstantFalse) {
    Table t = make_ts_tbl({ints("id", {1, 1, 1}), ints("time", {0, 60, 120}, ValueType::duration),
                           Column{"death", ValueType::boolean, {Cell{}, Cell{}, true}}},
                          {"id"}, "time", minutes{60});
    const std::vector<std::string> vars{"death"};
    const std::vector<NaFill> types{NaFill::constant};
    const std::vector<Cell> values{Cell{false}};
    Table r = replace_na(t, vars, types, values);
    EXPECT_EQ(r.column("death").cells, (std::vector<Cell>{false, false, true}));
}

TEST(ReplaceNa, LeadingNullStaysNull) {
    Table t = hourly({1, 1, 2}, {0, 1, 0}, {std::nullopt, 1.0, std::nullopt});
    const std::vector<std::string> vars{"x"};
    const std::vector<NaFill> types{NaFill::locf};
    const std::vector<Cell> values{Cell{}};
    Table r = replace_na(t, vars, types, values);
    EXPECT_TRUE(is_null(r.column("x").cells[0]));
    EXPECT_EQ(r.column("x").cells[1], Cell{1.0});
    EXPECT_TRUE(is_null(r.column("x").cells[2]));
}

TEST(Merge, StaticColumnBroadcastsOverTimePoints) {
    Table age = make_id_tbl({ints("id", {201006, 7}), opt_doubles("age", {68.9, 40.0})}, {"id"});
    Table glu = hourly({201006, 201006, 201006}, {-45, 0, 5}, {123.0, 140.0, 99.0}, "glu");
    Table m = merge_tables(age, glu);
    EXPECT_EQ(m.kind(), TableKind::ts);
    ASSERT_EQ(m.rows(), 3u);
    for (const auto& c : m.column("age").cells) EXPECT_EQ(c, Cell{68.9});
    EXPECT_EQ(m.column("glu"), glu.column("glu"));
}

TEST(Merge, EmptyRightAddsNullColumn) {
    Table a = hourly({1, 1}, {0, 1}, {1.0, 2.0});
    Table b = hourly({}, {}, {}, "y");
    Table m = merge_tables(a, b);
    EXPECT_EQ(m.rows(), 2u);
    EXPECT_EQ(m.column("x"), a.column("x"));
    for (const auto& c : m.column("y").cells) EXPECT_TRUE(is_null(c));
}

TEST(Merge, OverlappingKeysJoinIntoOneRow) {
    Table a = hourly({1, 1, 2}, {0, 1, 0}, {1.0, 2.0, 3.0}, "a");
    Table b = hourly({1, 2, 2}, {1, 0, 4}, {10.0, 30.0, 40.0}, "b");
    Table m = merge_tables(a, b);
    // Nested-loop oracle over the union of keys.
    std::map<std::pair<std::int64_t, std::int64_t>, std::pair<Cell, Cell>> expected;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        expected[{*as_int(a.column("id").cells[i]), *as_int(a.column("time").cells[i])}].first = a.column("a").cells[i];
    }
    for (std::size_t i = 0; i < b.rows(); ++i) {
        expected[{*as_int(b.column("id").cells[i]), *as_int(b.column("time").cells[i])}].second = b.column("b").cells[i];
    }
    ASSERT_EQ(m.rows(), expected.size());
    std::size_t r = 0;
    for (const auto& [key, vals] : expected) {
        EXPECT_EQ(*as_int(m.column("id").cells[r]), key.first);
        EXPECT_EQ(*as_int(m.column("time").cells[r]), key.second);
        EXPECT_EQ(m.column("a").cells[r], vals.first);
        EXPECT_EQ(m.column("b").cells[r], vals.second);
        ++r;
    }
}

TEST(Merge, CommutativeUpToColumnOrder) {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 50; ++i) {
        Table a = random_ts(rng);
        Table b = random_ts(rng);
        b.rename_column("x", "y");
        Table ab = merge_tables(a, b);
        Table ba = merge_tables(b, a);
        const std::vector<std::string> order{"id", "time", "x", "y"};
        ba.select(order);
        ab.select(order);
        EXPECT_EQ(ab.columns(), ba.columns());
        EXPECT_TRUE(keys_sorted(ab));
    }
}

TEST(SliceUntilEvent, KeepsRowsThroughFirstFlag) {
    auto flags = [](std::vector<bool> fs) {
        std::vector<std::int64_t> ids(fs.size(), 1), hours;
        Column f{"death", ValueType::boolean, {}};
        for (std::size_t i = 0; i < fs.size(); ++i) {
            hours.push_back(static_cast<std::int64_t>(i) * 60);
            f.cells.emplace_back(static_cast<bool>(fs[i]));
        }
        return make_ts_tbl({ints("id", ids), ints("time", hours, ValueType::duration), f}, {"id"}, "time",
                           minutes{60});
    };
    EXPECT_EQ(slice_until_event(flags({false, false, true, false}), "death").rows(), 3u);
    EXPECT_EQ(slice_until_event(flags({false, false, false}), "death").rows(), 3u);
    EXPECT_EQ(slice_until_event(flags({true, false, false}), "death").rows(), 1u);
}

TEST(Utilities, PreserveKeyOrder) {
    std::mt19937_64 rng(12);
    for (int i = 0; i < 50; ++i) {
        Table t = random_ts(rng);
        EXPECT_TRUE(keys_sorted(fill_gaps(t)));
        const std::vector<std::string> vars{"x"};
        const std::vector<NaFill> types{NaFill::locf};
        const std::vector<Cell> values{Cell{}};
        EXPECT_TRUE(keys_sorted(replace_na(t, vars, types, values)));
    }
}

TEST(Table, ConcatRequiresMatchingColumns) {
    const std::vector<Table> parts{hourly({1}, {0}, {1.0}), hourly({2}, {0}, {2.0}, "y")};
    EXPECT_THROW(concat_rows(parts), Error);
}
