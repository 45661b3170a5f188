#include "icuharm/predicate.hpp"

#include "icuharm/error.hpp"

#include <algorithm>
#include <limits>

namespace icuharm {

bool Condition::test(const Cell& c) const {
    if (is_null(c)) return false;
    switch (op) {
        case CmpOp::not_null: return true;
        case CmpOp::eq: return compare_cells(c, values.at(0)) == 0;
        case CmpOp::ne: return compare_cells(c, values.at(0)) != 0;
        case CmpOp::lt: return compare_cells(c, values.at(0)) < 0;
        case CmpOp::le: return compare_cells(c, values.at(0)) <= 0;
        case CmpOp::gt: return compare_cells(c, values.at(0)) > 0;
        case CmpOp::ge: return compare_cells(c, values.at(0)) >= 0;
        case CmpOp::in:
            return std::any_of(values.begin(), values.end(),
                               [&](const Cell& v) { return compare_cells(c, v) == 0; });
        case CmpOp::regex: {
            const auto* s = std::get_if<std::string>(&c);
            if (s) return std::regex_search(*s, *compiled_);
            return std::regex_search(format_cell(c, ValueType::string), *compiled_);
        }
    }
    return false;
}

bool Bounds::overlaps(double min, double max) const noexcept {
    if (lo && (lo_inclusive ? max < *lo : max <= *lo)) return false;
    if (hi && (hi_inclusive ? min > *hi : min >= *hi)) return false;
    return true;
}

Predicate& Predicate::add(Condition c) {
    const bool needs_value = c.op != CmpOp::not_null && c.op != CmpOp::regex && c.op != CmpOp::in;
    if (needs_value && c.values.size() != 1) {
        throw Error(Errc::invalid_argument, "condition on '" + c.column + "' needs one value");
    }
    if (c.op == CmpOp::regex) {
        try {
            c.compiled_ = std::make_shared<const std::regex>(
                c.pattern, std::regex::ECMAScript | std::regex::icase);
        } catch (const std::regex_error& e) {
            throw Error(Errc::invalid_argument, "bad regex '" + c.pattern + "': " + e.what());
        }
    }
    conds_.push_back(std::move(c));
    return *this;
}

Predicate Predicate::operator&&(const Predicate& other) const {
    Predicate out = *this;
    for (const auto& c : other.conds_) out.conds_.push_back(c);
    return out;
}

std::vector<std::string> Predicate::columns() const {
    std::vector<std::string> out;
    for (const auto& c : conds_) {
        if (std::find(out.begin(), out.end(), c.column) == out.end()) out.push_back(c.column);
    }
    return out;
}

bool Predicate::matches(const Table& t, std::size_t row) const {
    return std::all_of(conds_.begin(), conds_.end(),
                       [&](const Condition& c) { return c.test(t.column(c.column).cells[row]); });
}

std::vector<std::size_t> Predicate::filter(const Table& t) const {
    std::vector<char> keep(t.rows(), 1);
    for (const auto& c : conds_) {
        const auto& cells = t.column(c.column).cells;
        for (std::size_t r = 0; r < cells.size(); ++r) {
            if (keep[r] && !c.test(cells[r])) keep[r] = 0;
        }
    }
    std::vector<std::size_t> out;
    for (std::size_t r = 0; r < keep.size(); ++r) {
        if (keep[r]) out.push_back(r);
    }
    return out;
}

Bounds Predicate::bounds(const std::string& column) const {
    Bounds b;
    auto tighten_lo = [&](double v, bool inclusive) {
        if (!b.lo || v > *b.lo || (v == *b.lo && !inclusive)) {
            b.lo = v;
            b.lo_inclusive = inclusive;
        }
    };
    auto tighten_hi = [&](double v, bool inclusive) {
        if (!b.hi || v < *b.hi || (v == *b.hi && !inclusive)) {
            b.hi = v;
            b.hi_inclusive = inclusive;
        }
    };
    for (const auto& c : conds_) {
        if (c.column != column) continue;
        b.constrained = true;
        std::optional<double> v;
        if (!c.values.empty()) v = as_double(c.values.front());
        switch (c.op) {
            case CmpOp::eq:
                if (v) {
                    tighten_lo(*v, true);
                    tighten_hi(*v, true);
                }
                break;
            case CmpOp::lt: if (v) tighten_hi(*v, false); break;
            case CmpOp::le: if (v) tighten_hi(*v, true); break;
            case CmpOp::gt: if (v) tighten_lo(*v, false); break;
            case CmpOp::ge: if (v) tighten_lo(*v, true); break;
            case CmpOp::in: {
                double lo = std::numeric_limits<double>::infinity();
                double hi = -lo;
                bool all_numeric = !c.values.empty();
                for (const auto& x : c.values) {
                    auto d = as_double(x);
                    if (!d) {
                        all_numeric = false;
                        break;
                    }
                    lo = std::min(lo, *d);
                    hi = std::max(hi, *d);
                }
                if (all_numeric) {
                    tighten_lo(lo, true);
                    tighten_hi(hi, true);
                }
                break;
            }
            default: break;
        }
    }
    return b;
}

namespace pred {

namespace {
Predicate one(std::string col, CmpOp op, std::vector<Cell> vs, std::string pattern = {}) {
    Condition c;
    c.column = std::move(col);
    c.op = op;
    c.values = std::move(vs);
    c.pattern = std::move(pattern);
    Predicate p;
    p.add(std::move(c));
    return p;
}
}  // namespace

Predicate eq(std::string col, Cell v) { return one(std::move(col), CmpOp::eq, {std::move(v)}); }
Predicate ne(std::string col, Cell v) { return one(std::move(col), CmpOp::ne, {std::move(v)}); }
Predicate lt(std::string col, Cell v) { return one(std::move(col), CmpOp::lt, {std::move(v)}); }
Predicate le(std::string col, Cell v) { return one(std::move(col), CmpOp::le, {std::move(v)}); }
Predicate gt(std::string col, Cell v) { return one(std::move(col), CmpOp::gt, {std::move(v)}); }
Predicate ge(std::string col, Cell v) { return one(std::move(col), CmpOp::ge, {std::move(v)}); }
Predicate in(std::string col, std::vector<Cell> vs) { return one(std::move(col), CmpOp::in, std::move(vs)); }
Predicate regex(std::string col, std::string pattern) {
    return one(std::move(col), CmpOp::regex, {}, std::move(pattern));
}
Predicate not_null(std::string col) { return one(std::move(col), CmpOp::not_null, {}); }

}  // namespace pred

}  // namespace icuharm
