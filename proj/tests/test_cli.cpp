#include "support.hpp"

#include "icuharm/cli.hpp"
#include "icuharm/concepts.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace icuharm;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(const std::vector<std::string>& args, const Env& env = fixtures::demo().env) {
    std::ostringstream out, err;
    const int code = run_cli(args, env, out, err);
    return {code, out.str(), err.str()};
}

std::string library_csv(const std::vector<std::string>& names, const std::vector<std::string>& sources,
                        const ConceptLoadOptions& opts = {}) {
    Session s(fixtures::demo().env);
    std::ostringstream os;
    write_csv(load_concepts(s, names, sources, opts), os);
    return os.str();
}

/// Runs the installed binary with the given environment prefix; returns its exit status.
int run_binary(const std::string& env_prefix, const std::string& args, const fs::path& out_file) {
    const std::string cmd = env_prefix + " '" + std::string(ICUHARM_CLI_PATH) + "' " + args + " > '" +
                            out_file.string() + "' 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Cli, LoadPrintsLibraryCsvByteForByte) {
    const auto r = cli({"load", "--concepts", "hr", "--src", "demo_long,demo_wide"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "source,icustay_id,time_min,hr");
    EXPECT_EQ(r.out, library_csv({"hr"}, {"demo_long", "demo_wide"}));
    EXPECT_NE(r.err.find("warning [plausibility]"), std::string::npos);
}

TEST(Cli, LoadIntervalSuffixes) {
    ConceptLoadOptions opts;
    opts.interval = std::chrono::minutes{30};
    const auto expected = library_csv({"glu", "age"}, {"demo_long"}, opts);
    EXPECT_EQ(cli({"load", "-c", "glu,age", "-s", "demo_long", "--interval", "30m"}).out, expected);
    EXPECT_EQ(cli({"load", "-c", "glu", "-c", "age", "-s", "demo_long", "-i", "30"}).out, expected);
    EXPECT_EQ(cli({"load", "-c", "hr", "-s", "demo_long", "-i", "1h"}).out, library_csv({"hr"}, {"demo_long"}));
}

TEST(Cli, LoadWritesCsvAndSidecar) {
    fixtures::TempDir dir("cli-out");
    const auto file = dir.path() / "sirs.csv";
    const auto r = cli({"load", "-c", "sirs", "-s", "demo_wide", "--keep-components", "--out", file.string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    ConceptLoadOptions opts;
    opts.keep_components = true;
    EXPECT_EQ(read_text_file(file), library_csv({"sirs"}, {"demo_wide"}, opts));
    Session s(fixtures::demo().env);
    EXPECT_EQ(read_text_file(file.string() + ".meta.json"),
              metadata_json(load_concepts(s, {"sirs"}, {"demo_wide"}, opts)) + "\n");
    const auto meta = nlohmann::json::parse(read_text_file(file.string() + ".meta.json"));
    EXPECT_TRUE(meta.is_object());
}

TEST(Cli, LoadIdsFromListOrFile) {
    const auto& stays = fixtures::demo().truth["stays"];
    const auto a = std::to_string(stays[0]["icustay_id"].get<std::int64_t>());
    const auto b = std::to_string(stays[1]["icustay_id"].get<std::int64_t>());
    ConceptLoadOptions opts;
    opts.patient_ids = std::vector<Cell>{std::stoll(a), std::stoll(b)};
    const auto expected = library_csv({"hr"}, {"demo_long"}, opts);
    EXPECT_EQ(cli({"load", "-c", "hr", "-s", "demo_long", "--ids", a + "," + b}).out, expected);
    fixtures::TempDir dir("cli-ids");
    fixtures::write_text(dir.path() / "ids.txt", a + "\n" + b + "\n");
    EXPECT_EQ(cli({"load", "-c", "hr", "-s", "demo_long", "--ids", (dir.path() / "ids.txt").string()}).out, expected);
}

TEST(Cli, LoadJsonFormat) {
    const auto r = cli({"--format", "json", "load", "-c", "age", "-s", "demo_long"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["rows"].size(), fixtures::demo().truth["stays"].size());
}

TEST(Cli, ConceptsExplain) {
    const auto r = cli({"concepts", "explain"});
    ASSERT_EQ(r.code, kExitOk);
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "name,category,description");
    EXPECT_NE(r.out.find("\nabx,medications,antibiotics\n"), std::string::npos);
    EXPECT_NE(r.out.find("\nage,demographics,patient age\n"), std::string::npos);
    const auto one = cli({"concepts", "explain", "age"});
    EXPECT_EQ(one.out, "name,category,description\nage,demographics,patient age\n");
}

TEST(Cli, ConceptsListAndAvailability) {
    const auto list = cli({"concepts", "list", "--src", "demo_long"});
    ASSERT_EQ(list.code, kExitOk);
    EXPECT_EQ(std::count(list.out.begin(), list.out.end(), '\n'), 16);
    const auto av = cli({"availability", "--src", "demo_long,demo_wide"});
    ASSERT_EQ(av.code, kExitOk);
    EXPECT_EQ(av.out.substr(0, av.out.find('\n')), "concept,demo_long,demo_wide");
    EXPECT_NE(av.out.find("\nhr,yes,yes\n"), std::string::npos);
    EXPECT_EQ(av.out.find(",no"), std::string::npos);
}

TEST(Cli, ImportMissingSourceIsADataError) {
    const auto r = cli({"import", "--src", "missing"});
    EXPECT_EQ(r.code, kExitData);
    EXPECT_NE(r.err.find("NotImported"), std::string::npos);
    EXPECT_NE(r.err.find("missing"), std::string::npos);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(cli({"frobnicate"}).code, kExitUsage);
    EXPECT_EQ(cli({"load", "--src", "demo_long"}).code, kExitUsage);
    EXPECT_EQ(cli({"--format", "xml", "concepts", "list"}).code, kExitUsage);
    EXPECT_EQ(cli({"load", "-c", "hr", "-s", "demo_long", "--aggregate", "mode"}).code, kExitUsage);
}

TEST(Cli, DataErrors) {
    EXPECT_EQ(cli({"load", "-c", "nonexistent", "-s", "demo_long"}).code, kExitData);
    EXPECT_EQ(cli({"load", "-c", "hr", "-s", "demo_long", "-i", "soon"}).code, kExitData);
}

TEST(Cli, BinaryHonoursEnvironment) {
    fixtures::TempDir dir("cli-bin");
    const auto root = dir.path();
    const std::string env = "ICU_DATA_PATH='" + root.string() + "' ICU_CONFIG_PATH='" + (root / "config").string() + "'";
    const auto log = root / "log.txt";
    ASSERT_EQ(run_binary(env, "gen-demo --out '" + root.string() + "' --seed 42 --patients 20", log), kExitOk)
        << read_text_file(log);
    ASSERT_EQ(run_binary(env, "import --src demo_long,demo_wide --chunk-rows 50", log), kExitOk) << read_text_file(log);
    EXPECT_EQ(run_binary(env, "validate --src demo_long,demo_wide", log), kExitOk) << read_text_file(log);

    const auto csv = root / "hr.csv";
    ASSERT_EQ(run_binary(env, "load -c hr -s demo_long,demo_wide -o '" + csv.string() + "'", log), kExitOk);
    EXPECT_EQ(read_text_file(csv), library_csv({"hr"}, {"demo_long", "demo_wide"}));

    // Corrupt one partition: validate notices the checksum mismatch.
    const auto part = table_store_dir(root, "demo_long", "chartevents") / "part-0000.bin";
    {
        std::fstream f(part, std::ios::in | std::ios::out | std::ios::binary);
        f.seekg(-1, std::ios::end);
        const char last = static_cast<char>(f.get());
        f.seekp(-1, std::ios::end);
        f.put(static_cast<char>(~last));
    }
    EXPECT_EQ(run_binary(env, "validate --src demo_long", log), kExitData);
    EXPECT_NE(read_text_file(log).find("chartevents"), std::string::npos);

    EXPECT_EQ(run_binary(env, "frobnicate", log), kExitUsage);
    EXPECT_EQ(run_binary("ICU_DATA_PATH='" + (root / "nothing").string() + "' ICU_CONFIG_PATH='" +
                             (root / "config").string() + "'",
                         "load -c hr -s demo_long", log),
              kExitData);
    EXPECT_NE(read_text_file(log).find("NotImported"), std::string::npos);
}
