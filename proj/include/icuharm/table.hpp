#pragma once

#include "icuharm/value.hpp"

#include <chrono>
#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace icuharm {

struct Column {
    std::string name;
    ValueType type = ValueType::string;
    std::vector<Cell> cells;

    bool operator==(const Column&) const = default;
};

/// Class of a table, from least to most specific: a bare data frame, a table
/// grouped by id columns, and a regular time series over a duration index.
enum class TableKind { plain, id, ts };

std::string_view to_string(TableKind kind) noexcept;

/// Columnar table carrying optional grouping and time-series metadata.
///
/// The metadata is a claim; `kind()` reports the most specific class whose
/// invariants hold, as established by `validate_or_downcast`. Every library
/// routine that changes a table revalidates before returning it, so a table
/// whose index drifts off its interval grid silently becomes an id table.
class Table {
public:
    Table() = default;
    explicit Table(std::vector<Column> columns);

    std::size_t rows() const noexcept;
    std::size_t cols() const noexcept { return columns_.size(); }
    bool empty() const noexcept { return rows() == 0; }

    const std::vector<Column>& columns() const noexcept { return columns_; }
    std::vector<std::string> column_names() const;
    bool has_column(std::string_view name) const noexcept;
    std::size_t column_index(std::string_view name) const;
    const Column& column(std::string_view name) const;
    Column& column(std::string_view name);
    const Column& column(std::size_t i) const { return columns_.at(i); }
    Column& column(std::size_t i) { return columns_.at(i); }

    void add_column(Column c);
    void drop_column(std::string_view name);
    void rename_column(std::string_view from, const std::string& to);
    /// Keeps only `names`, in that order.
    void select(std::span<const std::string> names);
    /// New table with the given rows (repeats allowed) and the same metadata.
    Table take(std::span<const std::size_t> rows) const;
    void append(const Table& other);

    TableKind kind() const noexcept { return kind_; }
    const std::vector<std::string>& id_vars() const noexcept { return id_vars_; }
    const std::optional<std::string>& index_var() const noexcept { return index_var_; }
    std::chrono::minutes interval() const noexcept { return interval_; }
    /// id_vars followed by the index (for ts tables).
    std::vector<std::string> key_vars() const;
    std::vector<std::string> value_vars() const;

    /// Declares candidate metadata; call `validate_or_downcast` to settle the kind.
    void set_meta(std::vector<std::string> id_vars, std::optional<std::string> index_var = {},
                  std::chrono::minutes interval = std::chrono::minutes{0});

    const std::map<std::string, std::string>& units() const noexcept { return units_; }
    void set_unit(const std::string& column, std::string unit) { units_[column] = std::move(unit); }

    bool operator==(const Table&) const = default;

    friend Table validate_or_downcast(Table candidate);

private:
    std::vector<Column> columns_;
    std::vector<std::string> id_vars_;
    std::optional<std::string> index_var_;
    std::chrono::minutes interval_{0};
    TableKind kind_ = TableKind::plain;
    std::map<std::string, std::string> units_;
};

/// Returns the most specific class whose invariants hold for `candidate`'s
/// declared metadata. Id columns are moved to the front, followed by the index.
Table validate_or_downcast(Table candidate);

bool satisfies_id_invariants(const Table& t, std::span<const std::string> id_vars);
bool satisfies_ts_invariants(const Table& t, std::span<const std::string> id_vars,
                             std::string_view index_var, std::chrono::minutes interval);

Table make_id_tbl(std::vector<Column> columns, std::vector<std::string> id_vars);
Table make_ts_tbl(std::vector<Column> columns, std::vector<std::string> id_vars,
                  std::string index_var, std::chrono::minutes interval);

enum class Aggregation { first, last, min, max, sum, median, any, count };

std::optional<Aggregation> parse_aggregation(std::string_view name) noexcept;
std::string_view to_string(Aggregation fun) noexcept;
/// first for strings, sum (read as any) for booleans, median otherwise.
Aggregation default_aggregation(ValueType type) noexcept;

/// Row order sorted by the given columns (stable).
std::vector<std::size_t> sorted_order(const Table& t, std::span<const std::string> keys);
Table sort_by_keys(const Table& t);

/// One row per key (id_vars, plus index for ts tables). `fun` absent means the
/// per-column default. Nulls are skipped; an all-null group yields null.
Table aggregate(const Table& t, std::optional<Aggregation> fun = {},
                std::vector<std::string> value_cols = {});

/// Expands each id group onto the full interval grid between its first and last index.
Table fill_gaps(const Table& t);

enum class NaFill { constant, locf };

/// Replaces nulls in `vars`. `values` is consulted for constant fills only.
/// Grouping defaults to the id columns.
Table replace_na(const Table& t, std::span<const std::string> vars, std::span<const NaFill> types,
                 std::span<const Cell> values, std::vector<std::string> by = {});

/// ts x ts: full outer join on (ids, index). id x ts: static columns broadcast
/// to every time point with matching ids. id x id: full outer join on ids.
Table merge_tables(const Table& a, const Table& b);

/// Per id group, keeps rows up to and including the first true `flag_col`.
Table slice_until_event(const Table& t, std::string_view flag_col);

/// Stacks tables with identical column names and types.
Table concat_rows(std::span<const Table> parts);

void write_csv(const Table& t, std::ostream& out);
std::string metadata_json(const Table& t);

}  // namespace icuharm
