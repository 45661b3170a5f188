#include "icuharm/store.hpp"

#include "icuharm/csv.hpp"
#include "icuharm/error.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace icuharm {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

constexpr char kMagic[8] = {'I', 'C', 'U', 'P', 'A', 'R', 'T', '\0'};
constexpr std::string_view kManifestFile = "manifest.json";

template <typename T>
void put_le(std::ostream& out, T v) {
    static_assert(std::endian::native == std::endian::little, "little-endian host required");
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw Error(Errc::io_error, "truncated partition file");
    return v;
}

bool is_string_type(ValueType t) { return t == ValueType::string; }

std::size_t fixed_width(ValueType t) { return t == ValueType::boolean ? 1 : 8; }

std::string partition_file_name(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "part-%04zu.bin", i);
    return buf;
}

void copy_file_into(std::ostream& out, const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(Errc::io_error, "cannot reopen spill file " + p.string());
    out << in.rdbuf();
}

void check(const std::ostream& out, const fs::path& p) {
    if (!out) throw Error(Errc::io_error, "write failed: " + p.string());
}

/// Streams one column of one partition to spill files so that the final
/// partition layout does not depend on how rows were chunked.
class ColumnSpill {
public:
    ColumnSpill(const fs::path& base, ValueType type)
        : type_(type),
          valid_path_(base.string() + ".valid"),
          data_path_(base.string() + ".data"),
          heap_path_(base.string() + ".heap"),
          valid_(valid_path_, std::ios::binary),
          data_(data_path_, std::ios::binary) {
        if (is_string_type(type_)) heap_.open(heap_path_, std::ios::binary);
        check(valid_, valid_path_);
        check(data_, data_path_);
    }

    void push(const Cell& c) {
        const bool present = !is_null(c);
        if (present) bits_ |= static_cast<std::uint8_t>(1u << (rows_ % 8));
        ++rows_;
        if (rows_ % 8 == 0) {
            valid_.put(static_cast<char>(bits_));
            bits_ = 0;
        }
        switch (type_) {
            case ValueType::string: {
                if (present) {
                    const auto& s = std::get<std::string>(c);
                    heap_.write(s.data(), static_cast<std::streamsize>(s.size()));
                    heap_bytes_ += s.size();
                }
                put_le<std::uint64_t>(data_, heap_bytes_);
                break;
            }
            case ValueType::floating:
                put_le<double>(data_, present ? std::get<double>(c) : 0.0);
                break;
            case ValueType::boolean:
                data_.put(present && std::get<bool>(c) ? 1 : 0);
                break;
            default:
                put_le<std::int64_t>(data_, present ? std::get<std::int64_t>(c) : 0);
                break;
        }
    }

    /// Appends the finished column block to `out` and returns its size.
    std::uint64_t finish_into(std::ostream& out) {
        if (rows_ % 8 != 0) valid_.put(static_cast<char>(bits_));
        valid_.close();
        data_.close();
        if (heap_.is_open()) heap_.close();
        std::uint64_t bytes = (rows_ + 7) / 8;
        copy_if_nonempty(out, valid_path_, bytes);
        if (is_string_type(type_)) {
            put_le<std::uint64_t>(out, 0);
            copy_if_nonempty(out, data_path_, rows_ * 8);
            copy_if_nonempty(out, heap_path_, heap_bytes_);
            bytes += 8 + rows_ * 8 + heap_bytes_;
        } else {
            const std::uint64_t n = rows_ * fixed_width(type_);
            copy_if_nonempty(out, data_path_, n);
            bytes += n;
        }
        return bytes;
    }

    std::uint64_t block_bytes() const {
        std::uint64_t bytes = (rows_ + 7) / 8;
        if (is_string_type(type_)) return bytes + 8 + rows_ * 8 + heap_bytes_;
        return bytes + rows_ * fixed_width(type_);
    }

    void remove_files() {
        std::error_code ec;
        fs::remove(valid_path_, ec);
        fs::remove(data_path_, ec);
        fs::remove(heap_path_, ec);
    }

private:
    static void copy_if_nonempty(std::ostream& out, const fs::path& p, std::uint64_t n) {
        if (n > 0) copy_file_into(out, p);
    }

    ValueType type_;
    fs::path valid_path_, data_path_, heap_path_;
    std::ofstream valid_, data_, heap_;
    std::uint64_t rows_ = 0;
    std::uint64_t heap_bytes_ = 0;
    std::uint8_t bits_ = 0;
};

struct PartitionSpill {
    std::vector<std::unique_ptr<ColumnSpill>> cols;
    std::uint64_t rows = 0;
    std::optional<double> min, max;
};

void write_partition(const fs::path& file, const std::vector<ManifestColumn>& columns,
                     PartitionSpill& spill) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw Error(Errc::io_error, "cannot create " + file.string());
    out.write(kMagic, sizeof kMagic);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(kStoreFormatVersion));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(columns.size()));
    put_le<std::uint64_t>(out, spill.rows);
    for (std::size_t c = 0; c < columns.size(); ++c) {
        put_le<std::uint8_t>(out, static_cast<std::uint8_t>(columns[c].type));
        put_le<std::uint16_t>(out, static_cast<std::uint16_t>(columns[c].name.size()));
        out.write(columns[c].name.data(), static_cast<std::streamsize>(columns[c].name.size()));
        put_le<std::uint64_t>(out, spill.cols[c]->block_bytes());
        spill.cols[c]->finish_into(out);
        spill.cols[c]->remove_files();
    }
    check(out, file);
}

std::string hex(const unsigned char* d, unsigned n) {
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve(n * 2);
    for (unsigned i = 0; i < n; ++i) {
        s += digits[d[i] >> 4];
        s += digits[d[i] & 0xF];
    }
    return s;
}

class Sha256 {
public:
    Sha256() : ctx_(EVP_MD_CTX_new()) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) {
            throw Error(Errc::io_error, "sha256 initialisation failed");
        }
    }
    ~Sha256() { EVP_MD_CTX_free(ctx_); }
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;

    void update(const void* data, std::size_t n) { EVP_DigestUpdate(ctx_, data, n); }
    void update_file(const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        if (!in) throw Error(Errc::missing_file, p.string());
        std::array<char, 1 << 16> buf;
        while (in) {
            in.read(buf.data(), buf.size());
            update(buf.data(), static_cast<std::size_t>(in.gcount()));
        }
    }
    std::string hex_digest() {
        unsigned char md[EVP_MAX_MD_SIZE];
        unsigned n = 0;
        EVP_DigestFinal_ex(ctx_, md, &n);
        return hex(md, n);
    }

private:
    EVP_MD_CTX* ctx_;
};

ojson opt_number(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

}  // namespace

// ---------------------------------------------------------------------------

ojson PartitionManifest::to_json() const {
    ojson j;
    j["format_version"] = format_version;
    j["table"] = table;
    j["columns"] = ojson::array();
    for (const auto& c : columns) {
        j["columns"].push_back({{"name", c.name}, {"type", std::string(to_string(c.type))}});
    }
    j["partition_column"] = partition_column ? ojson(*partition_column) : ojson(nullptr);
    j["breakpoints"] = breakpoints;
    j["partitions"] = ojson::array();
    for (const auto& p : partitions) {
        j["partitions"].push_back({{"file", p.file},
                                   {"rows", p.rows},
                                   {"min", opt_number(p.min)},
                                   {"max", opt_number(p.max)},
                                   {"sha256", p.sha256}});
    }
    j["total_rows"] = total_rows;
    return j;
}

PartitionManifest PartitionManifest::from_json(const ojson& j) {
    try {
        PartitionManifest m;
        m.format_version = j.at("format_version").get<int>();
        if (m.format_version != kStoreFormatVersion) {
            throw Error(Errc::io_error, "unsupported store format version " +
                                            std::to_string(m.format_version));
        }
        m.table = j.at("table").get<std::string>();
        for (const auto& c : j.at("columns")) {
            auto type = parse_value_type(c.at("type").get<std::string>());
            if (!type) throw Error(Errc::io_error, "manifest: unknown column type");
            m.columns.push_back({c.at("name").get<std::string>(), *type});
        }
        if (!j.at("partition_column").is_null()) {
            m.partition_column = j.at("partition_column").get<std::string>();
        }
        m.breakpoints = j.at("breakpoints").get<std::vector<double>>();
        for (const auto& p : j.at("partitions")) {
            PartitionInfo info;
            info.file = p.at("file").get<std::string>();
            info.rows = p.at("rows").get<std::uint64_t>();
            if (!p.at("min").is_null()) info.min = p.at("min").get<double>();
            if (!p.at("max").is_null()) info.max = p.at("max").get<double>();
            info.sha256 = p.at("sha256").get<std::string>();
            m.partitions.push_back(std::move(info));
        }
        m.total_rows = j.at("total_rows").get<std::uint64_t>();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::malformed_json, std::string("manifest: ") + e.what());
    }
}

const ManifestColumn* PartitionManifest::find_column(std::string_view name) const noexcept {
    for (const auto& c : columns) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

std::size_t partition_bucket(const std::vector<double>& breaks, std::optional<double> v) noexcept {
    if (!v) return 0;
    return static_cast<std::size_t>(std::upper_bound(breaks.begin(), breaks.end(), *v) - breaks.begin());
}

fs::path table_store_dir(const fs::path& store_root, const std::string& source, const std::string& table) {
    return store_root / source / table;
}

PartitionManifest import_table(const std::string& source, const TableDescriptor& desc,
                               const fs::path& input_dir, const fs::path& store_root,
                               const ImportOptions& opts, Diagnostics* diag, ImportStats* stats) {
    if (opts.chunk_rows < 1) throw Error(Errc::invalid_argument, "chunk_rows must be at least 1");
    for (const auto& f : desc.files) {
        if (!fs::exists(input_dir / f)) {
            throw Error(Errc::missing_file, source + "." + desc.name + ": " + (input_dir / f).string());
        }
    }

    const fs::path final_dir = table_store_dir(store_root, source, desc.name);
    const fs::path work_dir = final_dir.string() + ".importing";
    fs::remove_all(work_dir);
    fs::create_directories(work_dir);

    PartitionManifest m;
    m.table = desc.name;
    for (const auto& c : desc.columns) m.columns.push_back({c.name, c.type});
    std::optional<std::size_t> part_col;
    if (desc.partition) {
        m.partition_column = desc.partition->column;
        m.breakpoints = desc.partition->breakpoints;
        for (std::size_t i = 0; i < desc.columns.size(); ++i) {
            if (desc.columns[i].name == desc.partition->column) part_col = i;
        }
    }
    const std::size_t nparts = m.breakpoints.size() + 1;
    const std::size_t ncols = desc.columns.size();

    std::vector<PartitionSpill> parts(nparts);
    for (std::size_t p = 0; p < nparts; ++p) {
        for (std::size_t c = 0; c < ncols; ++c) {
            auto base = work_dir / ("p" + std::to_string(p) + "_c" + std::to_string(c));
            parts[p].cols.push_back(std::make_unique<ColumnSpill>(base, desc.columns[c].type));
        }
    }

    ImportStats local;
    std::vector<std::vector<Cell>> buffer(ncols);
    std::size_t buffered = 0;
    auto flush = [&] {
        if (buffered == 0) return;
        for (std::size_t r = 0; r < buffered; ++r) {
            std::optional<double> key;
            if (part_col) key = as_double(buffer[*part_col][r]);
            auto& part = parts[partition_bucket(m.breakpoints, key)];
            for (std::size_t c = 0; c < ncols; ++c) part.cols[c]->push(buffer[c][r]);
            ++part.rows;
            if (key) {
                part.min = part.min ? std::min(*part.min, *key) : *key;
                part.max = part.max ? std::max(*part.max, *key) : *key;
            }
        }
        for (auto& col : buffer) col.clear();
        ++local.chunks;
        buffered = 0;
    };

    std::vector<std::string> fields;
    for (const auto& f : desc.files) {
        CsvReader reader(input_dir / f);
        std::vector<std::size_t> field_of(ncols);
        for (std::size_t c = 0; c < ncols; ++c) {
            const auto& hdr = reader.header();
            auto it = std::find(hdr.begin(), hdr.end(), desc.columns[c].raw_name);
            if (it == hdr.end()) {
                throw Error(Errc::unknown_column, source + "." + desc.name + ": file " + f +
                                                      " lacks column '" + desc.columns[c].raw_name + "'");
            }
            field_of[c] = static_cast<std::size_t>(it - hdr.begin());
        }
        while (reader.next(fields)) {
            for (std::size_t c = 0; c < ncols; ++c) {
                const std::string_view text =
                    field_of[c] < fields.size() ? std::string_view(fields[field_of[c]]) : std::string_view{};
                auto cell = parse_cell(text, desc.columns[c].type);
                if (!cell) {
                    throw Error(Errc::coercion_error,
                                source + "." + desc.name + "." + desc.columns[c].name + " at " + f +
                                    ":" + std::to_string(reader.line()) + ": '" + std::string(text) +
                                    "' is not a valid " + std::string(to_string(desc.columns[c].type)));
                }
                buffer[c].push_back(std::move(*cell));
            }
            ++buffered;
            ++local.rows;
            local.max_buffered_rows = std::max(local.max_buffered_rows, buffered);
            if (buffered == opts.chunk_rows) flush();
        }
    }
    flush();

    for (std::size_t p = 0; p < nparts; ++p) {
        const auto name = partition_file_name(p);
        write_partition(work_dir / name, m.columns, parts[p]);
        PartitionInfo info;
        info.file = name;
        info.rows = parts[p].rows;
        info.min = parts[p].min;
        info.max = parts[p].max;
        info.sha256 = sha256_file(work_dir / name);
        m.partitions.push_back(std::move(info));
        m.total_rows += parts[p].rows;
    }
    {
        std::ofstream out(work_dir / kManifestFile, std::ios::binary);
        out << m.to_json().dump(2) << '\n';
        check(out, work_dir / kManifestFile);
    }
    fs::remove_all(final_dir);
    fs::rename(work_dir, final_dir);

    if (desc.expected_rows && static_cast<std::uint64_t>(*desc.expected_rows) != m.total_rows && diag) {
        diag->report("row_count", "RowCountMismatch: " + source + "." + desc.name + ": expected " +
                                      std::to_string(*desc.expected_rows) + " rows, imported " +
                                      std::to_string(m.total_rows));
    }
    if (stats) *stats = local;
    return m;
}

std::vector<PartitionManifest> import_source(const SourceDescriptor& src, const fs::path& input_dir,
                                             const fs::path& store_root, const ImportOptions& opts,
                                             Diagnostics* diag) {
    std::vector<PartitionManifest> out;
    for (const auto& [name, t] : src.tables) {
        out.push_back(import_table(src.name, t, input_dir, store_root, opts, diag));
    }
    return out;
}

PartitionManifest read_manifest(const fs::path& table_dir) {
    const auto p = table_dir / kManifestFile;
    if (!fs::exists(p)) throw Error(Errc::not_imported, table_dir.string());
    try {
        return PartitionManifest::from_json(ojson::parse(read_text_file(p)));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(Errc::malformed_json, p.string() + ": " + e.what());
    }
}

std::string sha256_hex(std::string_view bytes) {
    Sha256 h;
    h.update(bytes.data(), bytes.size());
    return h.hex_digest();
}

std::string sha256_file(const fs::path& path) {
    Sha256 h;
    h.update_file(path);
    return h.hex_digest();
}

std::string table_checksum(const fs::path& table_dir) {
    const auto m = read_manifest(table_dir);
    Sha256 h;
    h.update_file(table_dir / kManifestFile);
    for (const auto& p : m.partitions) h.update_file(table_dir / p.file);
    return h.hex_digest();
}

Table read_partition(const fs::path& file, const std::vector<std::string>& cols) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error(Errc::missing_file, file.string());
    char magic[sizeof kMagic];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
        throw Error(Errc::io_error, file.string() + ": not a partition file");
    }
    const auto version = get_le<std::uint32_t>(in);
    if (version != static_cast<std::uint32_t>(kStoreFormatVersion)) {
        throw Error(Errc::io_error, file.string() + ": unsupported format version");
    }
    const auto ncols = get_le<std::uint32_t>(in);
    const auto nrows = get_le<std::uint64_t>(in);

    std::map<std::string, Column> loaded;
    std::vector<std::string> order;
    std::vector<char> block;
    for (std::uint32_t c = 0; c < ncols; ++c) {
        const auto type = static_cast<ValueType>(get_le<std::uint8_t>(in));
        std::string name(get_le<std::uint16_t>(in), '\0');
        in.read(name.data(), static_cast<std::streamsize>(name.size()));
        const auto bytes = get_le<std::uint64_t>(in);
        const bool wanted = cols.empty() || std::find(cols.begin(), cols.end(), name) != cols.end();
        if (!wanted) {
            in.seekg(static_cast<std::streamoff>(bytes), std::ios::cur);
            continue;
        }
        block.resize(bytes);
        in.read(block.data(), static_cast<std::streamsize>(bytes));
        if (!in) throw Error(Errc::io_error, file.string() + ": truncated column " + name);

        Column col{name, type, {}};
        col.cells.resize(nrows);
        const auto* bitmap = reinterpret_cast<const unsigned char*>(block.data());
        const char* payload = block.data() + (nrows + 7) / 8;
        auto present = [&](std::uint64_t r) { return (bitmap[r / 8] >> (r % 8)) & 1u; };
        if (type == ValueType::string) {
            const char* heap = payload + (nrows + 1) * 8;
            std::uint64_t prev = 0;
            for (std::uint64_t r = 0; r < nrows; ++r) {
                std::uint64_t end;
                std::memcpy(&end, payload + (r + 1) * 8, 8);
                if (present(r)) col.cells[r] = std::string(heap + prev, heap + end);
                prev = end;
            }
        } else if (type == ValueType::boolean) {
            for (std::uint64_t r = 0; r < nrows; ++r) {
                if (present(r)) col.cells[r] = payload[r] != 0;
            }
        } else if (type == ValueType::floating) {
            for (std::uint64_t r = 0; r < nrows; ++r) {
                if (!present(r)) continue;
                double v;
                std::memcpy(&v, payload + r * 8, 8);
                col.cells[r] = v;
            }
        } else {
            for (std::uint64_t r = 0; r < nrows; ++r) {
                if (!present(r)) continue;
                std::int64_t v;
                std::memcpy(&v, payload + r * 8, 8);
                col.cells[r] = v;
            }
        }
        order.push_back(name);
        loaded.emplace(name, std::move(col));
    }

    std::vector<Column> out;
    if (cols.empty()) {
        for (const auto& n : order) out.push_back(std::move(loaded.at(n)));
    } else {
        for (const auto& n : cols) {
            auto it = loaded.find(n);
            if (it == loaded.end()) throw Error(Errc::unknown_column, file.string() + ": " + n);
            out.push_back(it->second);
        }
    }
    return Table(std::move(out));
}

// ---------------------------------------------------------------------------

TableHandle::TableHandle(std::string source, TableDescriptor desc, PartitionManifest manifest,
                         fs::path dir, std::shared_ptr<ScanCounters> counters)
    : source_(std::move(source)),
      desc_(std::move(desc)),
      manifest_(std::move(manifest)),
      dir_(std::move(dir)),
      counters_(std::move(counters)) {}

Table TableHandle::scan(const Predicate& where, const std::vector<std::string>& cols,
                        ScanStats* stats) const {
    std::vector<std::string> out_cols = cols;
    if (out_cols.empty()) {
        for (const auto& c : manifest_.columns) out_cols.push_back(c.name);
    }
    for (const auto& c : out_cols) {
        if (!has_column(c)) {
            throw Error(Errc::unknown_column, source_ + "." + manifest_.table + ": '" + c + "'");
        }
    }
    std::vector<std::string> read_cols = out_cols;
    for (const auto& c : where.columns()) {
        if (!has_column(c)) {
            throw Error(Errc::unknown_column, source_ + "." + manifest_.table + ": '" + c + "'");
        }
        if (std::find(read_cols.begin(), read_cols.end(), c) == read_cols.end()) read_cols.push_back(c);
    }

    std::optional<Bounds> bounds;
    if (manifest_.partition_column) bounds = where.bounds(*manifest_.partition_column);

    ScanStats local;
    local.partitions_total = manifest_.partitions.size();
    std::vector<Column> result;
    for (const auto& c : out_cols) result.push_back(Column{c, manifest_.find_column(c)->type, {}});

    for (const auto& p : manifest_.partitions) {
        if (p.rows == 0) continue;
        if (bounds && bounds->constrained) {
            if (!p.min || !p.max || !bounds->overlaps(*p.min, *p.max)) continue;
        }
        Table part = read_partition(dir_ / p.file, read_cols);
        ++local.partitions_read;
        auto keep = where.empty() ? std::vector<std::size_t>{} : where.filter(part);
        for (std::size_t i = 0; i < out_cols.size(); ++i) {
            auto& src = part.column(i).cells;
            auto& dst = result[i].cells;
            if (where.empty()) {
                dst.insert(dst.end(), std::make_move_iterator(src.begin()),
                           std::make_move_iterator(src.end()));
            } else {
                for (auto r : keep) dst.push_back(std::move(src[r]));
            }
        }
    }
    Table out(std::move(result));
    local.rows = out.rows();
    if (counters_) {
        counters_->scans.fetch_add(1);
        counters_->partitions_read.fetch_add(local.partitions_read);
    }
    if (stats) *stats = local;
    return out;
}

const TableHandle& AttachedSource::table(std::string_view name) const {
    auto it = tables.find(std::string(name));
    if (it == tables.end()) {
        throw Error(Errc::unknown_table, "source '" + desc.name + "' has no table '" + std::string(name) + "'");
    }
    return it->second;
}

std::shared_ptr<const AttachedSource> attach_source(const SourceDescriptor& desc, const fs::path& store_root) {
    auto src = std::make_shared<AttachedSource>();
    src->desc = desc;
    src->dir = store_root / desc.name;
    src->counters = std::make_shared<ScanCounters>();
    std::vector<std::string> missing;
    for (const auto& [name, t] : desc.tables) {
        const auto dir = table_store_dir(store_root, desc.name, name);
        if (!fs::exists(dir / kManifestFile)) {
            missing.push_back(name);
            continue;
        }
        auto m = read_manifest(dir);
        for (const auto& c : t.columns) {
            if (!m.find_column(c.name)) {
                throw Error(Errc::not_imported, desc.name + "." + name + ": stored table lacks column '" +
                                                    c.name + "'; re-import required");
            }
        }
        src->tables.emplace(name, TableHandle(desc.name, t, std::move(m), dir, src->counters));
    }
    if (!missing.empty()) {
        std::string list;
        for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
        throw Error(Errc::not_imported, "source '" + desc.name + "' tables not imported: " + list);
    }
    return src;
}

std::shared_ptr<const AttachedSource> SourceRegistry::attach(const SourceDescriptor& desc,
                                                             const fs::path& store_root, bool refresh) {
    std::lock_guard lock(mu_);
    auto it = sources_.find(desc.name);
    if (!refresh && it != sources_.end() && it->second->desc == desc &&
        it->second->dir == store_root / desc.name) {
        return it->second;
    }
    auto src = attach_source(desc, store_root);
    manifest_reads_.fetch_add(src->tables.size());
    sources_.insert_or_assign(desc.name, src);
    return src;
}

std::shared_ptr<const AttachedSource> SourceRegistry::get(std::string_view name) const {
    std::lock_guard lock(mu_);
    auto it = sources_.find(name);
    if (it == sources_.end()) throw Error(Errc::unknown_source, std::string(name) + " is not attached");
    return it->second;
}

bool SourceRegistry::contains(std::string_view name) const {
    std::lock_guard lock(mu_);
    return sources_.find(name) != sources_.end();
}

void SourceRegistry::detach(std::string_view name) {
    std::lock_guard lock(mu_);
    if (auto it = sources_.find(name); it != sources_.end()) sources_.erase(it);
}

std::vector<std::string> SourceRegistry::names() const {
    std::lock_guard lock(mu_);
    std::vector<std::string> out;
    for (const auto& [n, _] : sources_) out.push_back(n);
    return out;
}

}  // namespace icuharm
