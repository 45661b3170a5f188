#pragma once

#include "icuharm/table.hpp"
#include "icuharm/value.hpp"

#include <memory>
#include <optional>
#include <regex>
#include <string>
#include <vector>

namespace icuharm {

enum class CmpOp { eq, ne, lt, le, gt, ge, in, regex, not_null };

/// One column condition. Null cells never satisfy a condition.
struct Condition {
    std::string column;
    CmpOp op = CmpOp::eq;
    std::vector<Cell> values;
    std::string pattern;

    bool test(const Cell& c) const;

private:
    friend class Predicate;
    std::shared_ptr<const std::regex> compiled_;
};

/// Closed-or-open interval a predicate confines a numeric column to.
struct Bounds {
    std::optional<double> lo;
    bool lo_inclusive = true;
    std::optional<double> hi;
    bool hi_inclusive = true;
    /// True when the column is constrained at all (nulls are then excluded).
    bool constrained = false;

    /// False when no value in [min, max] can satisfy these bounds.
    bool overlaps(double min, double max) const noexcept;
};

/// Conjunction of column conditions.
class Predicate {
public:
    Predicate() = default;

    Predicate& add(Condition c);
    Predicate operator&&(const Predicate& other) const;

    const std::vector<Condition>& conditions() const noexcept { return conds_; }
    bool empty() const noexcept { return conds_.empty(); }
    std::vector<std::string> columns() const;

    bool matches(const Table& t, std::size_t row) const;
    /// Row indices of `t` satisfying every condition.
    std::vector<std::size_t> filter(const Table& t) const;

    Bounds bounds(const std::string& column) const;

private:
    std::vector<Condition> conds_;
};

namespace pred {

Predicate eq(std::string col, Cell v);
Predicate ne(std::string col, Cell v);
Predicate lt(std::string col, Cell v);
Predicate le(std::string col, Cell v);
Predicate gt(std::string col, Cell v);
Predicate ge(std::string col, Cell v);
Predicate in(std::string col, std::vector<Cell> vs);
/// Case-insensitive unanchored regex search over the string form of the cell.
Predicate regex(std::string col, std::string pattern);
Predicate not_null(std::string col);

}  // namespace pred

}  // namespace icuharm
