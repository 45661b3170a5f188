#include "icuharm/cli.hpp"

#include "icuharm/concepts.hpp"
#include "icuharm/demo.hpp"
#include "icuharm/error.hpp"
#include "icuharm/session.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace icuharm {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::vector<std::string> split_list(const std::vector<std::string>& raw) {
    std::vector<std::string> out;
    for (const auto& r : raw) {
        std::stringstream ss(r);
        std::string part;
        while (std::getline(ss, part, ',')) {
            if (!part.empty()) out.push_back(part);
        }
    }
    return out;
}

Cell parse_id(const std::string& s) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && ptr == s.data() + s.size()) return v;
    return s;
}

json cell_json(const Cell& c, ValueType type) {
    if (is_null(c)) return nullptr;
    if (const auto* b = std::get_if<bool>(&c)) return *b;
    if (const auto* d = std::get_if<double>(&c)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(&c)) {
        if (type == ValueType::integer || type == ValueType::duration) return *i;
    }
    return format_cell(c, type);
}

json table_json(const Table& t) {
    json rows = json::array();
    for (std::size_t r = 0; r < t.rows(); ++r) {
        json row = json::object();
        for (const auto& c : t.columns()) row[c.name] = cell_json(c.cells[r], c.type);
        rows.push_back(std::move(row));
    }
    return {{"meta", json::parse(metadata_json(t))}, {"rows", std::move(rows)}};
}

void flush_diagnostics(const Session& s, std::ostream& err) {
    for (const auto& d : const_cast<Session&>(s).diagnostics().entries()) {
        err << "warning [" << d.category << "]: " << d.message << '\n';
    }
}

std::vector<std::string> read_ids(const std::vector<std::string>& raw) {
    std::vector<std::string> out;
    for (const auto& r : raw) {
        std::error_code ec;
        if (!fs::is_regular_file(r, ec)) {
            for (auto& s : split_list({r})) out.push_back(std::move(s));
            continue;
        }
        std::ifstream in(r);
        std::string line;
        while (std::getline(in, line)) {
            std::replace(line.begin(), line.end(), ' ', ',');
            std::replace(line.begin(), line.end(), '\r', ',');
            for (auto& s : split_list({line})) out.push_back(std::move(s));
        }
    }
    return out;
}

/// Row totals, partition checksums and expected row counts of an attached source.
std::vector<std::string> check_store(const DataSource& src) {
    std::vector<std::string> problems;
    for (const auto& [name, h] : src.attached().tables) {
        const auto& m = h.manifest();
        std::size_t rows = 0;
        for (const auto& p : m.partitions) {
            rows += p.rows;
            const auto file = h.dir() / p.file;
            std::error_code ec;
            if (!fs::exists(file, ec)) {
                problems.push_back(name + ": missing partition " + p.file);
            } else if (sha256_file(file) != p.sha256) {
                problems.push_back(name + ": checksum mismatch in " + p.file);
            }
        }
        if (rows != m.total_rows) {
            problems.push_back(name + ": partition rows " + std::to_string(rows) + " != total " +
                               std::to_string(m.total_rows));
        }
        const auto& expected = src.descriptor().table(name).expected_rows;
        if (expected && static_cast<std::uint64_t>(*expected) != m.total_rows) {
            problems.push_back(name + ": expected " + std::to_string(*expected) + " rows, store has " +
                               std::to_string(m.total_rows));
        }
    }
    return problems;
}

std::vector<std::string> default_sources(const Session& s) {
    std::vector<std::string> out;
    for (const auto& [name, _] : s.catalog()) out.push_back(name);
    return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, const Env& env, std::ostream& out, std::ostream& err) {
    CLI::App app{"Harmonized concept loading for ICU datasets", "icuharm"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string format = "text";
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json", "csv"}));

    auto* gen = app.add_subcommand("gen-demo", "Write the synthetic demo sources");
    std::string gen_out = "demo-data";
    DemoOptions demo_opts;
    gen->add_option("--out", gen_out, "Output directory");
    gen->add_option("--seed", demo_opts.seed, "Random seed");
    gen->add_option("--patients", demo_opts.patients, "Number of patients")->check(CLI::PositiveNumber);

    auto* imp = app.add_subcommand("import", "Import raw CSV files into the columnar store");
    std::vector<std::string> imp_sources;
    ImportOptions imp_opts;
    imp->add_option("--src,-s", imp_sources, "Sources to import (default: all configured)");
    imp->add_option("--chunk-rows", imp_opts.chunk_rows, "Rows buffered per chunk")->check(CLI::PositiveNumber);

    auto* val = app.add_subcommand("validate", "Check source configurations and imported data");
    std::vector<std::string> val_sources;
    val->add_option("--src,-s", val_sources, "Sources to check (default: all configured)");

    auto* cpt = app.add_subcommand("concepts", "Inspect the concept dictionary");
    cpt->require_subcommand(1);
    auto* cpt_list = cpt->add_subcommand("list", "List concept names");
    std::vector<std::string> list_src;
    cpt_list->add_option("--src", list_src, "Only concepts available for these sources");
    auto* cpt_explain = cpt->add_subcommand("explain", "Show category and description");
    std::vector<std::string> explain_names;
    cpt_explain->add_option("names", explain_names, "Concepts (default: all)");

    auto* avail = app.add_subcommand("availability", "Concept by source availability matrix");
    std::vector<std::string> avail_src;
    avail->add_option("--src", avail_src, "Sources (default: all configured)");

    auto* load = app.add_subcommand("load", "Load harmonized concepts");
    std::vector<std::string> load_concepts_raw, load_src_raw, load_ids_raw;
    std::string interval = "1h", aggregate, out_file;
    bool keep = false;
    load->add_option("--concepts,-c", load_concepts_raw, "Concept names")->required();
    load->add_option("--src,-s", load_src_raw, "Source names")->required();
    load->add_option("--interval,-i", interval, "Time step, e.g. 60, 30m, 1h");
    load->add_option("--aggregate", aggregate, "Aggregation override");
    load->add_option("--ids", load_ids_raw, "Stay IDs, or a file listing them");
    load->add_flag("--keep-components", keep, "Keep score components");
    load->add_option("--out,-o", out_file, "Write CSV here plus a .meta.json sidecar");

    std::vector<std::string> argv(args.rbegin(), args.rend());
    try {
        app.parse(argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (gen->parsed()) {
            const auto summary = generate_demo(demo_opts, gen_out);
            if (format == "json") {
                out << json(summary.rows).dump(2) << '\n';
            } else {
                for (const auto& [file, n] : summary.rows) out << file << '\t' << n << '\n';
            }
            return kExitOk;
        }

        Session session(env);
        int code = kExitOk;

        if (imp->parsed()) {
            if (imp_sources.empty()) imp_sources = default_sources(session);
            json report = json::object();
            for (const auto& name : split_list(imp_sources)) {
                if (!session.catalog().count(name)) {
                    throw Error(Errc::not_imported,
                                "source '" + name + "' has no configuration or raw data under " + session.data_path().string());
                }
                for (const auto& m : session.import_source(name, imp_opts)) {
                    std::size_t rows = 0;
                    for (const auto& p : m.partitions) rows += p.rows;
                    report[name][m.table] = rows;
                    if (format != "json") {
                        out << name << '.' << m.table << '\t' << rows << " rows\t" << m.partitions.size()
                            << " partitions\n";
                    }
                }
            }
            if (format == "json") out << report.dump(2) << '\n';
        } else if (val->parsed()) {
            if (val_sources.empty()) val_sources = default_sources(session);
            json report = json::object();
            for (const auto& name : split_list(val_sources)) {
                const auto warnings = validate_source(session.source_config(name));
                std::vector<std::string> problems;
                try {
                    problems = check_store(*session.attach(name, true));
                } catch (const Error& e) {
                    if (e.code() != Errc::not_imported) throw;
                    problems.push_back(e.what());
                }
                if (!problems.empty()) code = kExitData;
                report[name] = {{"warnings", warnings}, {"problems", problems}};
                if (format != "json") {
                    out << name << ": " << (problems.empty() ? "ok" : "failed") << '\n';
                    for (const auto& w : warnings) out << "  warning: " << w << '\n';
                    for (const auto& p : problems) out << "  error: " << p << '\n';
                }
            }
            if (format == "json") out << report.dump(2) << '\n';
        } else if (cpt_list->parsed()) {
            const auto dict = load_dictionary(session, split_list(list_src));
            if (format == "json") {
                json names = json::array();
                for (const auto& [name, _] : dict.concepts) names.push_back(name);
                out << names.dump(2) << '\n';
            } else {
                for (const auto& [name, _] : dict.concepts) out << name << '\n';
            }
        } else if (cpt_explain->parsed()) {
            const auto dict = load_dictionary(session, {}, split_list(explain_names));
            const auto rows = explain_dictionary(dict);
            if (format == "json") {
                json arr = json::array();
                for (const auto& r : rows) {
                    arr.push_back({{"name", r.name}, {"category", r.category}, {"description", r.description}});
                }
                out << arr.dump(2) << '\n';
            } else {
                out << "name,category,description\n";
                for (const auto& r : rows) out << r.name << ',' << r.category << ',' << r.description << '\n';
            }
        } else if (avail->parsed()) {
            auto sources = split_list(avail_src);
            if (sources.empty()) sources = default_sources(session);
            const auto a = concept_availability(session.dictionary(), sources);
            if (format == "json") {
                out << json(a.available).dump(2) << '\n';
            } else {
                out << "concept";
                for (const auto& s : a.sources) out << ',' << s;
                out << '\n';
                for (const auto& c : a.concepts) {
                    out << c;
                    for (const auto& s : a.sources) out << ',' << (a.available.at(c).at(s) ? "yes" : "no");
                    out << '\n';
                }
            }
        } else if (load->parsed()) {
            ConceptLoadOptions opts;
            opts.interval = parse_interval(interval);
            opts.keep_components = keep;
            if (!aggregate.empty()) {
                auto agg = parse_aggregation(aggregate);
                if (!agg) {
                    err << "error: unknown aggregation '" << aggregate << "'\n";
                    return kExitUsage;
                }
                opts.aggregate = *agg;
            }
            if (!load_ids_raw.empty()) {
                std::vector<Cell> ids;
                for (const auto& s : read_ids(load_ids_raw)) ids.push_back(parse_id(s));
                opts.patient_ids = std::move(ids);
            }
            const Table t =
                load_concepts(session, split_list(load_concepts_raw), split_list(load_src_raw), opts);
            if (!out_file.empty()) {
                std::ofstream csv(out_file, std::ios::binary);
                if (!csv) throw Error(Errc::io_error, "cannot write " + out_file);
                write_csv(t, csv);
                std::ofstream meta(out_file + ".meta.json", std::ios::binary);
                if (!meta) throw Error(Errc::io_error, "cannot write " + out_file + ".meta.json");
                meta << metadata_json(t) << '\n';
                out << "wrote " << t.rows() << " rows to " << out_file << '\n';
            } else if (format == "json") {
                out << table_json(t).dump(2) << '\n';
            } else {
                write_csv(t, out);
            }
        }
        flush_diagnostics(session, err);
        return code;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    }
}

}  // namespace icuharm
