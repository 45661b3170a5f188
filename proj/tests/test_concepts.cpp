#include "support.hpp"

#include "icuharm/concepts.hpp"
#include "icuharm/error.hpp"
#include "icuharm/query.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace icuharm;
using std::chrono::minutes;

namespace {

const std::vector<std::string> kBoth{"demo_long", "demo_wide"};

Session demo_session() { return Session(fixtures::demo().env); }

Table series(const std::string& name, std::vector<std::tuple<std::int64_t, std::int64_t, double>> rows) {
    Column id{"icustay_id", ValueType::integer, {}};
    Column tm{"time_min", ValueType::duration, {}};
    Column v{name, ValueType::floating, {}};
    for (auto [i, t, x] : rows) {
        id.cells.emplace_back(i);
        tm.cells.emplace_back(t);
        v.cells.emplace_back(x);
    }
    return make_ts_tbl({id, tm, v}, {"icustay_id"}, "time_min", minutes{60});
}

Table pafi(const Table& pao2, const Table& fio2, nlohmann::json args = nlohmann::json::object(),
           bool keep = false) {
    ConceptDef def;
    def.name = "pafi";
    RecContext ctx{def, "icustay_id", "time_min", minutes{60}, keep, args, nullptr};
    return pafi_ratio({{"pao2", pao2}, {"fio2", fio2}}, ctx);
}

}  // namespace

TEST(Dictionary, DemoSourcesCoverShippedConcepts) {
    Session s = demo_session();
    const auto dict = load_dictionary(s, kBoth);
    for (const char* n : {"hr", "temp", "sirs", "pafi", "abx", "age"}) EXPECT_NE(dict.find(n), nullptr) << n;
    EXPECT_EQ(dict.concepts.size(), 16u);
}

TEST(Dictionary, NameFilter) {
    Session s = demo_session();
    const auto dict = load_dictionary(s, {}, {"hr"});
    ASSERT_EQ(dict.concepts.size(), 1u);
    EXPECT_EQ(dict.concepts.begin()->first, "hr");
    try {
        load_dictionary(s, {}, {"nonexistent"});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::unknown_concept_name);
    }
}

TEST(Explain, NameCategoryDescription) {
    Session s = demo_session();
    const auto rows = explain_dictionary(s.dictionary());
    auto find = [&](const std::string& n) {
        return *std::find_if(rows.begin(), rows.end(), [&](const ExplainRow& r) { return r.name == n; });
    };
    EXPECT_EQ(find("abx").category, "medications");
    EXPECT_EQ(find("abx").description, "antibiotics");
    EXPECT_EQ(find("age").category, "demographics");
    EXPECT_EQ(find("age").description, "patient age");
    EXPECT_TRUE(explain_dictionary(Dictionary{}).empty());
}

TEST(Availability, DirectAndRecursive) {
    Session s = demo_session();
    Dictionary dict = s.dictionary();
    EXPECT_TRUE(concept_available(dict, "hr", "demo_long"));
    EXPECT_FALSE(concept_available(dict, "hr", "elsewhere"));
    dict.concepts.at("hr").sources["elsewhere"] = {};
    EXPECT_FALSE(concept_available(dict, "hr", "elsewhere"));
    EXPECT_TRUE(concept_available(dict, "sirs", "demo_long"));
    dict.concepts.at("wbc").sources.erase("demo_long");
    EXPECT_FALSE(concept_available(dict, "sirs", "demo_long"));
    EXPECT_TRUE(concept_available(dict, "sirs", "demo_wide"));
}

TEST(Availability, MatrixMatchesSourcesMap) {
    Session s = demo_session();
    const auto av = concept_availability(s.dictionary(), kBoth);
    EXPECT_EQ(av.concepts.size(), 16u);
    for (const auto& [name, def] : s.dictionary().concepts) {
        for (const auto& src : kBoth) {
            const bool direct = def.sources.count(src) && !def.sources.at(src).empty();
            if (def.cls != ConceptClass::rec) EXPECT_EQ(av.available.at(name).at(src), direct) << name;
            EXPECT_TRUE(av.available.at(name).at(src)) << name << " " << src;
        }
    }
}

TEST(LoadItem, BothHeartRateItemSystems) {
    Session s = demo_session();
    const auto& def = *s.dictionary().find("hr");
    ConceptLoadOptions opts;
    opts.interval = minutes{1};
    Table t = load_item(s, def.sources.at("demo_long").front(), def, "demo_long", opts);
    Table raw = s.source("demo_long")->table("chartevents").scan(pred::in("itemid", {std::int64_t{211}, std::int64_t{220045}}));
    EXPECT_EQ(t.rows(), raw.rows());
    EXPECT_EQ(t.id_vars(), std::vector<std::string>{"icustay_id"});
    EXPECT_EQ(t.index_var(), "time_min");
    EXPECT_TRUE(t.has_column("unit"));
}

TEST(LoadItem, WideColumnDropsNulls) {
    Session s = demo_session();
    const auto& def = *s.dictionary().find("hr");
    ConceptLoadOptions opts;
    opts.interval = minutes{1};
    Table t = load_item(s, def.sources.at("demo_wide").front(), def, "demo_wide", opts);
    Table raw = s.source("demo_wide")->table("vitalperiodic").scan(pred::not_null("heartrate"));
    EXPECT_EQ(t.rows(), raw.rows());
    for (const auto& c : t.column("hr").cells) EXPECT_FALSE(is_null(c));
}

TEST(LoadItem, NoMatchingIdsGivesEmptyTableOfRightShape) {
    Session s = demo_session();
    ConceptDef def = *s.dictionary().find("hr");
    ItemDef item = def.sources.at("demo_long").front();
    item.ids = {std::int64_t{-1}};
    Table t = load_item(s, item, def, "demo_long");
    EXPECT_EQ(t.rows(), 0u);
    EXPECT_TRUE(t.has_column("icustay_id"));
    EXPECT_TRUE(t.has_column("time_min"));
    EXPECT_TRUE(t.has_column("hr"));
}

TEST(LoadConcepts, HeartRateStackedAcrossSources) {
    Session s = demo_session();
    Table t = load_concepts(s, {"hr"}, kBoth);
    EXPECT_EQ(t.column_names(), (std::vector<std::string>{"source", "icustay_id", "time_min", "hr"}));
    EXPECT_EQ(t.id_vars(), (std::vector<std::string>{"source", "icustay_id"}));
    EXPECT_EQ(t.kind(), TableKind::ts);
    EXPECT_EQ(t.units().at("hr"), "bpm");
    std::set<std::string> sources;
    for (std::size_t r = 0; r < t.rows(); ++r) {
        sources.insert(std::get<std::string>(t.column("source").cells[r]));
        const double v = *as_double(t.column("hr").cells[r]);
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 300.0);
    }
    EXPECT_EQ(sources, (std::set<std::string>{"demo_long", "demo_wide"}));
    EXPECT_GT(s.diagnostics().count("plausibility"), 0u);
}

TEST(LoadConcepts, AgeBroadcastOverGlucose) {
    Session s = demo_session();
    Table t = load_concepts(s, {"age", "glu"}, {"demo_long"});
    EXPECT_EQ(t.kind(), TableKind::ts);
    std::map<Cell, std::set<Cell, CellLess>, CellLess> ages;
    for (std::size_t r = 0; r < t.rows(); ++r) ages[t.column("icustay_id").cells[r]].insert(t.column("age").cells[r]);
    for (const auto& [id, a] : ages) EXPECT_EQ(a.size(), 1u);
}

TEST(LoadConcepts, SirsKeepsComponents) {
    Session s = demo_session();
    ConceptLoadOptions opts;
    opts.keep_components = true;
    Table t = load_concept(s, "sirs", "demo_long", opts);
    for (const char* c : {"sirs", "temp_comp", "hr_comp", "resp_comp", "wbc_comp"}) {
        EXPECT_TRUE(t.has_column(c)) << c;
    }
    ASSERT_GT(t.rows(), 0u);
    for (std::size_t r = 0; r < t.rows(); ++r) {
        std::int64_t sum = 0;
        for (const char* c : {"temp_comp", "hr_comp", "resp_comp", "wbc_comp"}) {
            sum += as_int(t.column(c).cells[r]).value_or(0);
        }
        EXPECT_EQ(*as_int(t.column("sirs").cells[r]), sum);
    }
    EXPECT_FALSE(load_concept(s, "sirs", "demo_long").has_column("hr_comp"));
}

TEST(LoadConcepts, ResultsAreKeyUniqueAndPlausible) {
    Session s = demo_session();
    for (const auto& [name, def] : s.dictionary().concepts) {
        Table t = load_concepts(s, {name}, kBoth);
        const auto keys = t.key_vars();
        std::set<std::string> seen;
        for (std::size_t r = 0; r < t.rows(); ++r) {
            std::string k;
            for (const auto& c : keys) k += format_cell(t.column(c).cells[r], t.column(c).type) + "|";
            EXPECT_TRUE(seen.insert(k).second) << name;
        }
        if (def.cls == ConceptClass::rec) continue;
        const auto& col = t.column(name);
        const ValueType expected = def.cls == ConceptClass::num   ? ValueType::floating
                                   : def.cls == ConceptClass::fct ? ValueType::string
                                                                  : ValueType::boolean;
        EXPECT_EQ(col.type, expected) << name;
        for (const auto& c : col.cells) {
            if (def.min) EXPECT_GE(*as_double(c), *def.min) << name;
            if (def.max) EXPECT_LE(*as_double(c), *def.max) << name;
            if (!def.levels.empty()) {
                EXPECT_NE(std::find(def.levels.begin(), def.levels.end(), std::get<std::string>(c)), def.levels.end());
            }
        }
    }
}

TEST(LoadConcepts, MinAggregationNeverExceedsMedian) {
    Session s = demo_session();
    ConceptLoadOptions coarse;
    coarse.interval = minutes{240};
    ConceptLoadOptions low = coarse;
    low.aggregate = Aggregation::min;
    for (const auto& [name, def] : s.dictionary().concepts) {
        if (def.cls != ConceptClass::num) continue;
        Table med = load_concept(s, name, "demo_long", coarse);
        Table mn = load_concept(s, name, "demo_long", low);
        ASSERT_EQ(med.rows(), mn.rows()) << name;
        for (std::size_t r = 0; r < med.rows(); ++r) {
            EXPECT_LE(*as_double(mn.column(name).cells[r]), *as_double(med.column(name).cells[r])) << name;
        }
    }
}

TEST(LoadConcepts, PatientIdFilter) {
    Session s = demo_session();
    const auto& stays = fixtures::demo().truth["stays"];
    ConceptLoadOptions opts;
    opts.patient_ids = std::vector<Cell>{stays[0]["icustay_id"].get<std::int64_t>(),
                                         stays[1]["icustay_id"].get<std::int64_t>()};
    for (const auto& src : kBoth) {
        Table t = load_concept(s, "hr", src, opts);
        std::set<Cell, CellLess> ids(t.column("icustay_id").cells.begin(), t.column("icustay_id").cells.end());
        const std::set<Cell, CellLess> wanted(opts.patient_ids->begin(), opts.patient_ids->end());
        EXPECT_EQ(ids, wanted);
    }
}

TEST(LoadConcepts, FahrenheitReportedAsUnitMismatchBeforeConversionOnly) {
    Session s = demo_session();
    load_concept(s, "temp", "demo_long");
    EXPECT_EQ(s.diagnostics().count("unit"), 0u);
    Session raw = demo_session();
    ConceptDef def = *raw.dictionary().find("temp");
    ItemDef item = def.sources.at("demo_long").front();
    item.callback.reset();
    Table t = load_item(raw, item, def, "demo_long");
    std::set<std::string> units;
    for (const auto& c : t.column("unit").cells) units.insert(std::get<std::string>(c));
    EXPECT_EQ(units, (std::set<std::string>{"degC", "degF"}));
}

TEST(LoadConcepts, Errors) {
    Session s = demo_session();
    EXPECT_THROW(load_concepts(s, {"nonexistent"}, {"demo_long"}), Error);
    EXPECT_THROW(load_concepts(s, {}, {"demo_long"}), Error);
    EXPECT_THROW(load_concept(s, "hr", "nowhere"), Error);
}

TEST(Sirs, AllComponentsMissingScoresZero) {
    ConceptDef def;
    def.name = "sirs";
    const auto args = nlohmann::json::object();
    RecContext ctx{def, "icustay_id", "time_min", minutes{60}, true, args, nullptr};
    std::map<std::string, Table> subs;
    for (const char* n : {"temp", "hr", "resp", "pco2"}) subs.emplace(n, series(n, {}));
    subs.emplace("wbc", series("wbc", {{1, 0, 8.0}}));
    Table t = sirs_score(subs, ctx);
    ASSERT_EQ(t.rows(), 1u);
    EXPECT_EQ(t.column("sirs").cells[0], Cell{std::int64_t{0}});
    EXPECT_TRUE(is_null(t.column("temp_comp").cells[0]));
    EXPECT_EQ(t.column("wbc_comp").cells[0], Cell{std::int64_t{0}});
}

TEST(Pafi, SameStepRatio) {
    Table t = pafi(series("pao2", {{1, 0, 80.0}}), series("fio2", {{1, 0, 40.0}}), nlohmann::json::object(), true);
    ASSERT_EQ(t.rows(), 1u);
    EXPECT_EQ(t.column("pafi").cells[0], Cell{200.0});
    EXPECT_EQ(t.column("pao2").cells[0], Cell{80.0});
    EXPECT_EQ(t.column("fio2").cells[0], Cell{40.0});
}

TEST(Pafi, CarriesForwardWithinWindow) {
    Table t = pafi(series("pao2", {{1, 60, 90.0}}), series("fio2", {{1, 0, 50.0}}), {{"match_win", "2h"}});
    ASSERT_EQ(t.rows(), 1u);
    EXPECT_EQ(t.column("time_min").cells[0], Cell{std::int64_t{60}});
    EXPECT_EQ(t.column("pafi").cells[0], Cell{180.0});
    EXPECT_EQ(pafi(series("pao2", {{1, 180, 90.0}}), series("fio2", {{1, 0, 50.0}}), {{"match_win", 120}}).rows(), 0u);
}

TEST(Pafi, IsolatedMeasurementGivesNoRow) {
    EXPECT_EQ(pafi(series("pao2", {{1, 0, 80.0}}), series("fio2", {{2, 0, 40.0}})).rows(), 0u);
    EXPECT_EQ(pafi(series("pao2", {{1, 0, 80.0}}), series("fio2", {})).rows(), 0u);
}

TEST(Intervals, Parse) {
    EXPECT_EQ(parse_interval("30"), minutes{30});
    EXPECT_EQ(parse_interval("30m"), minutes{30});
    EXPECT_EQ(parse_interval("2h"), minutes{120});
    EXPECT_EQ(parse_interval("1d"), minutes{1440});
    EXPECT_THROW(parse_interval("0h"), Error);
    EXPECT_THROW(parse_interval("h"), Error);
}
