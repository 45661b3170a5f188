#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace icuharm {

/// Logical column types. Durations are integer minutes; timestamps and dates
/// are integer seconds since the Unix epoch (dates sit at midnight).
enum class ValueType : std::uint8_t {
    integer = 0,
    floating = 1,
    string = 2,
    boolean = 3,
    duration = 4,
    timestamp = 5,
    date = 6,
};

std::string_view to_string(ValueType type) noexcept;
std::optional<ValueType> parse_value_type(std::string_view name) noexcept;

bool is_numeric(ValueType type) noexcept;
bool is_time(ValueType type) noexcept;

/// A single table cell; `std::monostate` is null.
using Cell = std::variant<std::monostate, std::int64_t, double, bool, std::string>;

inline bool is_null(const Cell& c) noexcept { return std::holds_alternative<std::monostate>(c); }

std::optional<double> as_double(const Cell& c) noexcept;
std::optional<std::int64_t> as_int(const Cell& c) noexcept;

/// Total order used for sorting and grouping: null first, numbers compared by
/// value across int/float/bool, strings last and lexicographic.
int compare_cells(const Cell& a, const Cell& b) noexcept;

struct CellLess {
    bool operator()(const Cell& a, const Cell& b) const noexcept { return compare_cells(a, b) < 0; }
};

/// Parses CSV text into a cell of the given type. Empty text yields null;
/// std::nullopt signals a coercion failure.
std::optional<Cell> parse_cell(std::string_view text, ValueType type);

/// Converts a cell to the representation of `target`; null when impossible.
Cell cast_cell(const Cell& c, ValueType target);

std::string format_cell(const Cell& c, ValueType type);
std::string format_double(double v);

std::optional<std::int64_t> parse_timestamp(std::string_view text) noexcept;
std::optional<std::int64_t> parse_date(std::string_view text) noexcept;
std::string format_timestamp(std::int64_t seconds);
std::string format_date(std::int64_t seconds);

}  // namespace icuharm
