#include "support.hpp"

#include "icuharm/config.hpp"
#include "icuharm/demo.hpp"
#include "icuharm/error.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace icuharm;
using nlohmann::ordered_json;

namespace {

ordered_json events_source(const ordered_json& partitioning) {
    ordered_json j = ordered_json::parse(R"({
      "name": "tiny",
      "id_cfg": {"icustay": {"id": "stay_id", "position": 1}},
      "col_cfg": {"events": {"id_var": "stay_id", "index_var": "t", "val_var": "value"}},
      "tbl_cfg": {"events": {"files": ["events.csv"],
                             "cols": {"STAY": {"name": "stay_id", "spec": "int"},
                                      "ITEM": {"name": "itemid", "spec": "int"},
                                      "T": {"name": "t", "spec": "duration"},
                                      "VALUE": {"name": "value", "spec": "double"}}}}
    })");
    if (!partitioning.is_null()) j["tbl_cfg"]["events"]["partitioning"] = partitioning;
    return j;
}

Errc error_code(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return Errc::invalid_argument;
}

Dictionary demo_dict() { return parse_dictionary(demo_dictionary(), nullptr, "builtin"); }

}  // namespace

TEST(SourceConfig, MimicStyleIdSystemsOrderedByPosition) {
    const auto sources = parse_source_configs(demo_source_configs().dump());
    const auto& ids = sources.at(0).id_systems.entries;
    ASSERT_EQ(ids.size(), 3u);
    EXPECT_EQ(ids[0].column, "subject_id");
    EXPECT_EQ(ids[0].label, "patient");
    EXPECT_EQ(ids[1].column, "hadm_id");
    EXPECT_EQ(ids[1].label, "hadm");
    EXPECT_EQ(ids[2].column, "icustay_id");
    EXPECT_EQ(ids[2].label, "icustay");
}

TEST(SourceConfig, NoPartitionFieldMeansNoPartitioning) {
    const auto src = parse_source_config(events_source(nullptr));
    EXPECT_FALSE(src.table("events").partition.has_value());
}

TEST(SourceConfig, BreakpointsMustAscend) {
    const auto ok = parse_source_config(events_source({{"col", "itemid"}, {"breaks", {50, 100}}}));
    EXPECT_EQ(ok.table("events").partition->breakpoints, (std::vector<double>{50, 100}));
    EXPECT_EQ(error_code([] { parse_source_config(events_source({{"col", "itemid"}, {"breaks", {100, 50}}})); }),
              Errc::bad_partition);
    EXPECT_EQ(error_code([] { parse_source_config(events_source({{"col", "itemid"}, {"breaks", {5, 5}}})); }),
              Errc::bad_partition);
}

TEST(SourceConfig, PartitionColumnMustExist) {
    EXPECT_EQ(error_code([] { parse_source_config(events_source({{"col", "nope"}, {"breaks", {1}}})); }),
              Errc::bad_partition);
}

TEST(SourceConfig, IndexVarJoinsTimeVars) {
    const auto src = parse_source_config(events_source(nullptr));
    const auto& tv = src.table("events").defaults.time_vars;
    EXPECT_NE(std::find(tv.begin(), tv.end(), "t"), tv.end());
}

TEST(SourceConfig, DanglingColumnReference) {
    auto j = events_source(nullptr);
    j["col_cfg"]["events"]["unit_var"] = "unit";
    EXPECT_EQ(error_code([&] { parse_source_config(j); }), Errc::dangling_column_ref);
    j = events_source(nullptr);
    j["col_cfg"]["ghost"] = {{"id_var", "stay_id"}};
    EXPECT_EQ(error_code([&] { parse_source_config(j); }), Errc::dangling_column_ref);
}

TEST(SourceConfig, MissingNameIsReported) {
    auto j = events_source(nullptr);
    j.erase("name");
    EXPECT_EQ(error_code([&] { parse_source_config(j); }), Errc::missing_field);
    EXPECT_EQ(error_code([] { parse_source_config(std::string_view("{not json")); }), Errc::malformed_json);
}

TEST(SourceConfig, UnknownKeysArePreserved) {
    auto j = events_source(nullptr);
    j["url"] = "https://example.org/data";
    const auto src = parse_source_config(j);
    EXPECT_EQ(src.extra.at("url"), "https://example.org/data");
    EXPECT_EQ(serialize_source(src).at("url"), "https://example.org/data");
}

TEST(SourceConfig, RoundTrip) {
    for (const auto& j : demo_source_configs()) {
        const auto src = parse_source_config(j);
        EXPECT_EQ(parse_source_config(serialize_source(src)), src) << src.name;
    }
    const auto mini = parse_source_configs(fixtures::mini_config()).at(0);
    EXPECT_EQ(parse_source_config(serialize_source(mini)), mini);
}

TEST(SourceConfig, EveryReferencedColumnResolves) {
    for (const auto& j : demo_source_configs()) {
        const auto src = parse_source_config(j);
        for (const auto& [name, t] : src.tables) {
            auto declared = [&](const std::optional<std::string>& c) {
                return !c || t.find_column(*c) != nullptr;
            };
            EXPECT_TRUE(declared(t.defaults.id_var)) << name;
            EXPECT_TRUE(declared(t.defaults.index_var)) << name;
            EXPECT_TRUE(declared(t.defaults.unit_var)) << name;
            EXPECT_TRUE(declared(t.defaults.val_var)) << name;
            for (const auto& c : t.defaults.time_vars) EXPECT_NE(t.find_column(c), nullptr) << name << "." << c;
            if (t.partition) EXPECT_NE(t.find_column(t.partition->column), nullptr);
        }
        for (const auto& e : src.id_systems.entries) {
            if (!e.table) continue;
            const auto& t = src.table(*e.table);
            EXPECT_NE(t.find_column(e.column), nullptr);
            if (e.start) EXPECT_NE(t.find_column(*e.start), nullptr);
            if (e.end) EXPECT_NE(t.find_column(*e.end), nullptr);
        }
    }
}

TEST(SourceConfig, IdVarOutsideIdSystemsIsFlagged) {
    const auto sources = parse_source_configs(demo_source_configs().dump());
    const auto findings = validate_source(sources.at(0));
    ASSERT_EQ(findings.size(), 1u);
    EXPECT_NE(findings[0].find("d_items"), std::string::npos);
    EXPECT_TRUE(validate_source(sources.at(1)).empty());
}

TEST(Dictionary, RoundTrip) {
    const auto dict = demo_dict();
    auto again = parse_dictionary(serialize_dictionary(dict), nullptr, "builtin");
    EXPECT_EQ(again, dict);
}

TEST(Dictionary, OverlayAddsSourceKeepsMetadata) {
    const auto base = demo_dict();
    const auto overlay = R"({"hr": {"sources": {"new_dataset": [
        {"ids": [6640], "table": "numericitems", "sub_var": "itemid"}]}}})";
    const auto d = parse_dictionary(std::string_view(overlay), &base, "/user");
    const auto& hr = *d.find("hr");
    const auto& old = *base.find("hr");
    EXPECT_EQ(hr.units, old.units);
    EXPECT_EQ(hr.min, old.min);
    EXPECT_EQ(hr.max, old.max);
    ASSERT_EQ(hr.sources.count("new_dataset"), 1u);
    EXPECT_EQ(hr.sources.at("new_dataset").at(0).ids, (std::vector<Cell>{std::int64_t{6640}}));
    EXPECT_EQ(hr.sources.at("demo_long"), old.sources.at("demo_long"));
    EXPECT_EQ(d.provenance.at("hr"), (std::vector<std::string>{"builtin", "/user"}));
}

TEST(Dictionary, EmptyOverlayIsIdentity) {
    const auto base = demo_dict();
    EXPECT_EQ(parse_dictionary(std::string_view("{}"), &base, "/user"), base);
}

TEST(Dictionary, NewConceptIsAppended) {
    const auto base = demo_dict();
    const auto overlay = R"json({"diab": {"class": "lgl_cncpt", "target": "id_tbl",
        "description": "diabetes", "category": "misc",
        "sources": {"demo_long": [{"class": "rgx_itm", "table": "prescriptions", "sub_var": "drug",
                                   "regex": "insulin", "callback": "transform_fun(set_true)"}]}}})json";
    const auto d = parse_dictionary(std::string_view(overlay), &base, "/user");
    EXPECT_EQ(d.concepts.size(), base.concepts.size() + 1);
    EXPECT_EQ(d.find("diab")->cls, ConceptClass::lgl);
}

TEST(Dictionary, OverlayIsIdempotent) {
    const auto base = demo_dict();
    for (const auto* text : {R"({"hr": {"sources": {"x": [{"ids": [1], "table": "t", "sub_var": "i"}]}}})",
                             R"({"diab": {"class": "lgl_cncpt"}})", "{}"}) {
        const auto once = parse_dictionary(std::string_view(text), &base, "/user");
        const auto twice = parse_dictionary(std::string_view(text), &once, "/user");
        EXPECT_EQ(twice, once) << text;
    }
}

TEST(Dictionary, Errors) {
    EXPECT_EQ(error_code([] { parse_dictionary(std::string_view(R"({"x": {"class": "bogus"}})")); }),
              Errc::unknown_concept_class);
    EXPECT_EQ(error_code([] { parse_dictionary(std::string_view(R"({"x": {"class": "rec_cncpt", "concepts": ["a"]}})")); }),
              Errc::rec_without_callback);
    EXPECT_EQ(error_code([] { parse_dictionary(std::string_view(R"({"x": {"aggregate": "mode"}})")); }),
              Errc::bad_aggregate);
}

TEST(Dictionary, UnknownItemFieldsArePreserved) {
    const auto d = parse_dictionary(std::string_view(
        R"({"x": {"sources": {"s": [{"class": "col_itm", "table": "t", "val_var": "v", "note": 7}]}}})"));
    const auto& item = d.find("x")->sources.at("s").at(0);
    EXPECT_EQ(item.extra.at("note"), 7);
    EXPECT_EQ(parse_dictionary(serialize_dictionary(d)), d);
}

TEST(Discovery, SplitsConfigPath) {
    const auto builtin = builtin_config_dir();
    EXPECT_EQ(discover_config_paths({{"ICU_CONFIG_PATH", "/a,/b"}}),
              (std::vector<std::filesystem::path>{builtin, "/a", "/b"}));
    EXPECT_EQ(discover_config_paths({}), (std::vector<std::filesystem::path>{builtin}));
}

TEST(Discovery, DeduplicatesKeepingFirstOccurrence) {
    std::mt19937_64 rng(2);
    const std::vector<std::string> pool{"/a", "/b", "/c", "/d"};
    for (int i = 0; i < 100; ++i) {
        std::vector<std::string> parts;
        std::string joined;
        for (int k = std::uniform_int_distribution<int>(1, 6)(rng); k > 0; --k) {
            parts.push_back(pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)]);
            joined += (joined.empty() ? "" : (k % 2 ? ", " : ",")) + parts.back();
        }
        std::vector<std::filesystem::path> expected{builtin_config_dir()};
        for (const auto& p : parts) {
            if (std::find(expected.begin(), expected.end(), p) == expected.end()) expected.emplace_back(p);
        }
        EXPECT_EQ(discover_config_paths({{"ICU_CONFIG_PATH", joined}}), expected) << joined;
    }
    EXPECT_EQ(discover_config_paths({{"ICU_CONFIG_PATH", "/a, /a"}}),
              (std::vector<std::filesystem::path>{builtin_config_dir(), "/a"}));
}

TEST(Discovery, LaterDirectoriesOverlayEarlier) {
    fixtures::TempDir dir("overlay");
    fixtures::write_text(dir.path() / "concept-dict.json",
                         R"({"hr": {"sources": {"new_dataset": [{"ids": [6640], "table": "numericitems",
                                                                 "sub_var": "itemid"}]}}})");
    Diagnostics diag;
    const auto dict = load_dictionary_files({builtin_config_dir(), dir.path(), dir.path() / "missing"}, &diag);
    EXPECT_EQ(dict.find("hr")->sources.count("new_dataset"), 1u);
    EXPECT_EQ(diag.count("config"), 1u);
}
