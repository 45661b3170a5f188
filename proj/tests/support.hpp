#pragma once

#include "icuharm/concepts.hpp"
#include "icuharm/config.hpp"
#include "icuharm/demo.hpp"
#include "icuharm/session.hpp"
#include "icuharm/store.hpp"
#include "icuharm/table.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <string_view>

namespace fixtures {

namespace fs = std::filesystem;

class TempDir {
public:
    explicit TempDir(const std::string& tag);
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const fs::path& path() const noexcept { return path_; }

private:
    fs::path path_;
};

void write_text(const fs::path& file, std::string_view text);

/// Demo sources generated and imported under a private data directory.
struct DemoData {
    DemoData(std::uint64_t seed, int patients);
    TempDir dir;
    icuharm::Env env;
    nlohmann::ordered_json truth;
};

/// Process-wide cached demo data per (seed, patients).
const DemoData& demo(std::uint64_t seed = 42, int patients = 20);

/// Source `mini`: three ID systems over the seven admissions with subject_id
/// above 44000 listed in the reference manual, plus one earlier subject.
struct MiniSource {
    MiniSource();
    TempDir dir;
    icuharm::Env env;
};

const MiniSource& mini();

/// Source config text of `mini`.
std::string mini_config();

/// Rows as formatted strings, for order-insensitive comparison.
std::vector<std::string> row_strings(const icuharm::Table& t);

}  // namespace fixtures
