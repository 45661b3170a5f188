#include "support.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <unistd.h>

namespace fixtures {

using icuharm::Env;

TempDir::TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("icuharm-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

void write_text(const fs::path& file, std::string_view text) {
    fs::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary);
    out << text;
}

DemoData::DemoData(std::uint64_t seed, int patients) : dir("demo") {
    const auto summary = icuharm::generate_demo({seed, patients}, dir.path());
    truth = summary.ground_truth;
    env = {{"ICU_DATA_PATH", dir.path().string()}, {"ICU_CONFIG_PATH", (dir.path() / "config").string()}};
    icuharm::Session s(env);
    s.import_source("demo_long");
    s.import_source("demo_wide");
}

const DemoData& demo(std::uint64_t seed, int patients) {
    static std::mutex mu;
    static std::map<std::pair<std::uint64_t, int>, std::unique_ptr<DemoData>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[{seed, patients}];
    if (!slot) slot = std::make_unique<DemoData>(seed, patients);
    return *slot;
}

std::string mini_config() {
    return R"({
  "name": "mini",
  "prefix": ["mini"],
  "id_cfg": {
    "patient": {"id": "subject_id", "position": 1, "table": "patients", "start": "dob"},
    "hadm": {"id": "hadm_id", "position": 2, "table": "admissions", "start": "admittime", "end": "dischtime"},
    "icustay": {"id": "icustay_id", "position": 3, "table": "icustays", "start": "intime", "end": "outtime"}
  },
  "col_cfg": {
    "patients": {"id_var": "subject_id"},
    "admissions": {"id_var": "hadm_id", "index_var": "admittime", "time_vars": ["admittime", "dischtime"]},
    "icustays": {"id_var": "icustay_id", "index_var": "intime", "time_vars": ["intime", "outtime"]}
  },
  "tbl_cfg": {
    "patients": {"cols": {"subject_id": {"name": "subject_id", "spec": "int"},
                          "dob": {"name": "dob", "spec": "timestamp"}}},
    "admissions": {"cols": {"subject_id": {"name": "subject_id", "spec": "int"},
                            "hadm_id": {"name": "hadm_id", "spec": "int"},
                            "admittime": {"name": "admittime", "spec": "timestamp"},
                            "dischtime": {"name": "dischtime", "spec": "timestamp"}}},
    "icustays": {"cols": {"subject_id": {"name": "subject_id", "spec": "int"},
                          "hadm_id": {"name": "hadm_id", "spec": "int"},
                          "icustay_id": {"name": "icustay_id", "spec": "int"},
                          "intime": {"name": "intime", "spec": "timestamp"},
                          "outtime": {"name": "outtime", "spec": "timestamp"}}}
  }
})";
}

MiniSource::MiniSource() : dir("mini") {
    const fs::path root = dir.path();
    write_text(root / "config" / "data-sources.json", mini_config());
    write_text(root / "mini" / "patients.csv",
               "subject_id,dob\n"
               "40001,2040-03-01 00:00:00\n"
               "44083,2050-01-01 00:00:00\n"
               "44154,2110-01-01 00:00:00\n"
               "44212,2060-01-01 00:00:00\n"
               "44222,2120-01-01 00:00:00\n"
               "44228,2100-01-01 00:00:00\n");
    write_text(root / "mini" / "admissions.csv",
               "subject_id,hadm_id,admittime,dischtime\n"
               "40001,100001,2101-02-03 04:05:00,2101-02-10 11:00:00\n"
               "44083,125157,2112-05-04 08:00:00,2112-05-11 14:15:00\n"
               "44083,131048,2112-05-22 15:37:00,2112-05-25 13:30:00\n"
               "44083,198330,2112-05-28 15:45:00,2112-06-07 16:50:00\n"
               "44154,174245,2178-05-14 20:29:00,2178-05-15 09:45:00\n"
               "44212,163189,2123-11-24 14:14:00,2123-12-30 14:31:00\n"
               "44222,192189,2180-07-19 06:55:00,2180-07-20 13:00:00\n"
               "44228,103379,2170-12-15 03:14:00,2170-12-24 18:00:00\n");
    write_text(root / "mini" / "icustays.csv",
               "subject_id,hadm_id,icustay_id,intime,outtime\n"
               "40001,100001,200001,2101-02-03 06:00:00,2101-02-04 06:00:00\n"
               "44083,125157,211001,2112-05-04 09:00:00,2112-05-05 09:00:00\n"
               "44083,131048,211002,2112-05-22 16:00:00,2112-05-23 10:00:00\n"
               "44083,198330,211003,2112-05-29 00:00:00,2112-05-30 00:00:00\n"
               "44154,174245,211004,2178-05-14 21:00:00,2178-05-15 05:00:00\n"
               "44212,163189,211005,2123-11-25 00:00:00,2123-11-28 00:00:00\n"
               "44222,192189,211006,2180-07-19 08:00:00,2180-07-20 08:00:00\n"
               "44228,103379,211007,2170-12-15 04:00:00,2170-12-16 04:00:00\n");
    env = {{"ICU_DATA_PATH", root.string()}, {"ICU_CONFIG_PATH", (root / "config").string()}};
    icuharm::Session s(env);
    s.import_source("mini");
}

const MiniSource& mini() {
    static MiniSource m;
    return m;
}

std::vector<std::string> row_strings(const icuharm::Table& t) {
    std::vector<std::string> out;
    for (std::size_t r = 0; r < t.rows(); ++r) {
        std::string line;
        for (const auto& c : t.columns()) line += icuharm::format_cell(c.cells[r], c.type) + "|";
        out.push_back(std::move(line));
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace fixtures
