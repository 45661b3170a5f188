#pragma once

#include "icuharm/config.hpp"
#include "icuharm/diagnostics.hpp"
#include "icuharm/predicate.hpp"
#include "icuharm/table.hpp"

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace icuharm {

inline constexpr int kStoreFormatVersion = 1;

struct ManifestColumn {
    std::string name;
    ValueType type = ValueType::string;

    bool operator==(const ManifestColumn&) const = default;
};

struct PartitionInfo {
    std::string file;
    std::uint64_t rows = 0;
    /// Observed non-null range of the partition column.
    std::optional<double> min;
    std::optional<double> max;
    std::string sha256;

    bool operator==(const PartitionInfo&) const = default;
};

struct PartitionManifest {
    int format_version = kStoreFormatVersion;
    std::string table;
    std::vector<ManifestColumn> columns;
    std::optional<std::string> partition_column;
    std::vector<double> breakpoints;
    std::vector<PartitionInfo> partitions;
    std::uint64_t total_rows = 0;

    nlohmann::ordered_json to_json() const;
    static PartitionManifest from_json(const nlohmann::ordered_json& j);
    const ManifestColumn* find_column(std::string_view name) const noexcept;

    bool operator==(const PartitionManifest&) const = default;
};

struct ImportOptions {
    std::size_t chunk_rows = 100000;
};

struct ImportStats {
    std::uint64_t rows = 0;
    std::uint64_t chunks = 0;
    /// Largest number of rows held in the in-flight buffer at any point.
    std::size_t max_buffered_rows = 0;
};

/// Partition index for `v` given ascending breakpoints: bucket i holds
/// [breaks[i-1], breaks[i]), open at both extremes. Nulls go to bucket 0.
std::size_t partition_bucket(const std::vector<double>& breaks, std::optional<double> v) noexcept;

std::filesystem::path table_store_dir(const std::filesystem::path& store_root,
                                      const std::string& source, const std::string& table);

/// Imports one table's CSV files from `input_dir` into
/// `<store_root>/<source>/<table>/`, replacing a previous import.
PartitionManifest import_table(const std::string& source, const TableDescriptor& desc,
                               const std::filesystem::path& input_dir,
                               const std::filesystem::path& store_root,
                               const ImportOptions& opts = {}, Diagnostics* diag = nullptr,
                               ImportStats* stats = nullptr);

/// Imports every table of a source; raw files are looked up in `input_dir`.
std::vector<PartitionManifest> import_source(const SourceDescriptor& src,
                                             const std::filesystem::path& input_dir,
                                             const std::filesystem::path& store_root,
                                             const ImportOptions& opts = {},
                                             Diagnostics* diag = nullptr);

PartitionManifest read_manifest(const std::filesystem::path& table_dir);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);
/// Digest over the manifest and every partition file of an imported table.
std::string table_checksum(const std::filesystem::path& table_dir);

/// Table read back from one partition file, restricted to `cols` (all when empty).
Table read_partition(const std::filesystem::path& file, const std::vector<std::string>& cols = {});

struct ScanStats {
    std::size_t partitions_total = 0;
    std::size_t partitions_read = 0;
    std::size_t rows = 0;
};

/// Source-wide counters shared by every handle of an attached source.
struct ScanCounters {
    std::atomic<std::uint64_t> scans{0};
    std::atomic<std::uint64_t> partitions_read{0};
};

/// Lazy handle on an imported table; scans read partition files on demand.
class TableHandle {
public:
    TableHandle(std::string source, TableDescriptor desc, PartitionManifest manifest,
                std::filesystem::path dir, std::shared_ptr<ScanCounters> counters);

    const std::string& source() const noexcept { return source_; }
    const TableDescriptor& descriptor() const noexcept { return desc_; }
    const ColumnDefaults& defaults() const noexcept { return desc_.defaults; }
    const PartitionManifest& manifest() const noexcept { return manifest_; }
    const std::filesystem::path& dir() const noexcept { return dir_; }
    bool has_column(std::string_view name) const noexcept { return manifest_.find_column(name) != nullptr; }

    /// Rows satisfying `where`, projected to `cols` (all columns when empty).
    /// Partitions whose partition-column range cannot satisfy `where` are skipped.
    Table scan(const Predicate& where = {}, const std::vector<std::string>& cols = {},
               ScanStats* stats = nullptr) const;

    bool operator==(const TableHandle& o) const {
        return source_ == o.source_ && desc_ == o.desc_ && manifest_ == o.manifest_ && dir_ == o.dir_;
    }

private:
    std::string source_;
    TableDescriptor desc_;
    PartitionManifest manifest_;
    std::filesystem::path dir_;
    std::shared_ptr<ScanCounters> counters_;
};

struct AttachedSource {
    SourceDescriptor desc;
    std::filesystem::path dir;
    std::map<std::string, TableHandle> tables;
    std::shared_ptr<ScanCounters> counters;

    const TableHandle& table(std::string_view name) const;
};

/// Attaches a source's imported tables. Throws NotImported listing every
/// table without a manifest.
std::shared_ptr<const AttachedSource> attach_source(const SourceDescriptor& desc,
                                                    const std::filesystem::path& store_root);

/// Attached sources by name. Attaching an already attached, unchanged source
/// returns the existing entry without touching disk.
class SourceRegistry {
public:
    std::shared_ptr<const AttachedSource> attach(const SourceDescriptor& desc,
                                                 const std::filesystem::path& store_root,
                                                 bool refresh = false);
    std::shared_ptr<const AttachedSource> get(std::string_view name) const;
    bool contains(std::string_view name) const;
    void detach(std::string_view name);
    std::vector<std::string> names() const;
    std::uint64_t manifest_reads() const noexcept { return manifest_reads_.load(); }

private:
    mutable std::mutex mu_;
    std::map<std::string, std::shared_ptr<const AttachedSource>, std::less<>> sources_;
    std::atomic<std::uint64_t> manifest_reads_{0};
};

}  // namespace icuharm
