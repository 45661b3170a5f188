#pragma once

#include "icuharm/diagnostics.hpp"
#include "icuharm/predicate.hpp"
#include "icuharm/store.hpp"
#include "icuharm/table.hpp"

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace icuharm {

/// One ID value's window, in minutes relative to the coarsest ID's origin.
struct IdWindow {
    std::optional<std::int64_t> start;
    std::optional<std::int64_t> end;
    /// Absolute start in seconds since the epoch, for timestamped sources.
    std::optional<std::int64_t> abs_start;
    /// Rows of `IdWindows::table` carrying this value.
    std::vector<std::size_t> rows;
};

/// Per finest-grain stay: every ID system's value with its window. An id
/// table keyed by the finest ID, then `<id>`, `<id>_start`, `<id>_end` for
/// each system, coarsest first.
struct IdWindows {
    IdSystemSpec systems;
    Table table;
    /// Per system rank: value -> window.
    std::vector<std::map<Cell, IdWindow, CellLess>> lookup;

    const IdWindow* find(std::size_t rank, const Cell& value) const;
    std::size_t rank_of(std::string_view label_or_column) const;
};

/// Builds the window table by merging each ID system's origin table.
/// Nesting violations are reported to `diag` and the rows kept.
IdWindows build_id_windows(const AttachedSource& src, Diagnostics* diag = nullptr);

/// An attached source plus its memoized ID windows. The memo is built once
/// per object; re-attaching produces a new object and hence a fresh memo.
class DataSource {
public:
    explicit DataSource(std::shared_ptr<const AttachedSource> src);

    const std::string& name() const noexcept { return src_->desc.name; }
    const SourceDescriptor& descriptor() const noexcept { return src_->desc; }
    const AttachedSource& attached() const noexcept { return *src_; }
    const TableHandle& table(std::string_view name) const { return src_->table(name); }

    const IdWindows& id_windows(Diagnostics* diag = nullptr) const;
    std::uint64_t window_builds() const noexcept { return builds_; }

private:
    std::shared_ptr<const AttachedSource> src_;
    mutable std::once_flag once_;
    mutable std::unique_ptr<IdWindows> windows_;
    mutable std::uint64_t builds_ = 0;
};

/// Raw rows of a table; values are not modified.
Table load_src(const DataSource& src, std::string_view table, const Predicate& where = {},
               const std::vector<std::string>& cols = {});

/// ID column a table would be keyed by: `id_hint`'s system when its column is
/// present, else the finest system present. Throws NoIdAvailable.
const IdSystemEntry& choose_id(const DataSource& src, const TableHandle& tbl,
                               const std::optional<std::string>& id_hint);

/// Id table keyed by the chosen ID; timestamp and date columns become minutes
/// since that ID's window start (dates read as mid-day). Rows with null IDs are dropped.
Table load_difftime(const DataSource& src, std::string_view table, const Predicate& where = {},
                    std::vector<std::string> cols = {},
                    const std::optional<std::string>& id_hint = {}, Diagnostics* diag = nullptr);

/// Re-keys `t` to `target` (label or column). Moving to a coarser system
/// shifts every duration column by the window-start difference; moving to a
/// finer one assigns each time point to the finer window containing it
/// (half-open) and drops the rest, adding their count to `dropped`. Tables
/// without a time index are repeated for every finer window.
Table change_id(const Table& t, const DataSource& src, std::string_view target,
                Diagnostics* diag = nullptr, std::size_t* dropped = nullptr);

/// Truncates every duration column toward zero onto multiples of `interval`
/// and sets the interval of time-series tables. Duplicates are kept.
Table change_interval(const Table& t, std::chrono::minutes interval);

Table load_id(const DataSource& src, std::string_view table, const Predicate& where,
              std::vector<std::string> cols, const std::string& id_var,
              std::chrono::minutes interval = std::chrono::minutes{1}, Diagnostics* diag = nullptr);

/// `index_var` defaults to the table's configured index column.
Table load_ts(const DataSource& src, std::string_view table, const Predicate& where,
              std::vector<std::string> cols, const std::string& id_var,
              std::chrono::minutes interval = std::chrono::minutes{1},
              std::optional<std::string> index_var = {}, Diagnostics* diag = nullptr);

}  // namespace icuharm
