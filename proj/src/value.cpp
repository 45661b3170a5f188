#include "icuharm/value.hpp"

#include "icuharm/error.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>

namespace icuharm {

std::string_view errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::malformed_json: return "MalformedJson";
        case Errc::missing_field: return "MissingField";
        case Errc::bad_partition: return "BadPartition";
        case Errc::dangling_column_ref: return "DanglingColumnRef";
        case Errc::invalid_config: return "InvalidConfig";
        case Errc::unknown_concept_class: return "UnknownConceptClass";
        case Errc::rec_without_callback: return "RecWithoutCallback";
        case Errc::bad_aggregate: return "BadAggregate";
        case Errc::syntax_error: return "SyntaxError";
        case Errc::nested_call_unsupported: return "NestedCallUnsupported";
        case Errc::unknown_factory: return "UnknownFactory";
        case Errc::unknown_transform: return "UnknownTransform";
        case Errc::arity_mismatch: return "ArityMismatch";
        case Errc::coercion_error: return "CoercionError";
        case Errc::missing_file: return "MissingFile";
        case Errc::row_count_mismatch: return "RowCountMismatch";
        case Errc::unknown_column: return "UnknownColumn";
        case Errc::unknown_table: return "UnknownTable";
        case Errc::unknown_source: return "UnknownSource";
        case Errc::not_imported: return "NotImported";
        case Errc::io_error: return "IoError";
        case Errc::length_mismatch: return "LengthMismatch";
        case Errc::incompatible_ids: return "IncompatibleIds";
        case Errc::interval_mismatch: return "IntervalMismatch";
        case Errc::no_id_available: return "NoIdAvailable";
        case Errc::unknown_id_system: return "UnknownIdSystem";
        case Errc::missing_origin_table: return "MissingOriginTable";
        case Errc::unknown_concept_name: return "UnknownConceptName";
        case Errc::concept_unavailable: return "ConceptUnavailable";
        case Errc::unknown_sub_var: return "UnknownSubVar";
        case Errc::invalid_argument: return "InvalidArgument";
    }
    return "Error";
}

namespace {

constexpr std::array<std::string_view, 7> kTypeNames = {
    "int", "float", "string", "bool", "duration", "timestamp", "date"};

int type_rank(const Cell& c) noexcept {
    switch (c.index()) {
        case 0: return 0;
        case 1:
        case 2:
        case 3: return 1;
        default: return 2;
    }
}

template <typename T>
std::optional<T> parse_number(std::string_view text) noexcept {
    T out{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
    return out;
}

std::string_view trim(std::string_view s) noexcept {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::optional<bool> parse_bool(std::string_view s) noexcept {
    std::string lower(s);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    if (lower == "true" || lower == "t" || lower == "1" || lower == "yes") return true;
    if (lower == "false" || lower == "f" || lower == "0" || lower == "no") return false;
    return std::nullopt;
}

std::optional<std::int64_t> days_since_epoch(std::string_view s) noexcept {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    auto y = parse_number<int>(s.substr(0, 4));
    auto m = parse_number<unsigned>(s.substr(5, 2));
    auto d = parse_number<unsigned>(s.substr(8, 2));
    if (!y || !m || !d) return std::nullopt;
    std::chrono::year_month_day ymd{std::chrono::year{*y}, std::chrono::month{*m},
                                    std::chrono::day{*d}};
    if (!ymd.ok()) return std::nullopt;
    return std::chrono::sys_days{ymd}.time_since_epoch().count();
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) noexcept {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

}  // namespace

std::string_view to_string(ValueType type) noexcept {
    return kTypeNames[static_cast<std::size_t>(type)];
}

std::optional<ValueType> parse_value_type(std::string_view name) noexcept {
    for (std::size_t i = 0; i < kTypeNames.size(); ++i) {
        if (kTypeNames[i] == name) return static_cast<ValueType>(i);
    }
    if (name == "integer") return ValueType::integer;
    if (name == "double" || name == "numeric") return ValueType::floating;
    if (name == "character") return ValueType::string;
    if (name == "logical") return ValueType::boolean;
    return std::nullopt;
}

bool is_numeric(ValueType type) noexcept {
    return type != ValueType::string && type != ValueType::boolean;
}

bool is_time(ValueType type) noexcept {
    return type == ValueType::duration || type == ValueType::timestamp || type == ValueType::date;
}

std::optional<double> as_double(const Cell& c) noexcept {
    if (auto i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
    if (auto d = std::get_if<double>(&c)) return *d;
    if (auto b = std::get_if<bool>(&c)) return *b ? 1.0 : 0.0;
    return std::nullopt;
}

std::optional<std::int64_t> as_int(const Cell& c) noexcept {
    if (auto i = std::get_if<std::int64_t>(&c)) return *i;
    if (auto d = std::get_if<double>(&c)) {
        if (std::isfinite(*d) && std::trunc(*d) == *d) return static_cast<std::int64_t>(*d);
        return std::nullopt;
    }
    if (auto b = std::get_if<bool>(&c)) return *b ? 1 : 0;
    return std::nullopt;
}

int compare_cells(const Cell& a, const Cell& b) noexcept {
    const int ra = type_rank(a);
    const int rb = type_rank(b);
    if (ra != rb) return ra < rb ? -1 : 1;
    if (ra == 0) return 0;
    if (ra == 2) {
        const auto& sa = std::get<std::string>(a);
        const auto& sb = std::get<std::string>(b);
        int r = sa.compare(sb);
        return r < 0 ? -1 : (r > 0 ? 1 : 0);
    }
    const auto* ia = std::get_if<std::int64_t>(&a);
    const auto* ib = std::get_if<std::int64_t>(&b);
    if (ia && ib) return *ia < *ib ? -1 : (*ia > *ib ? 1 : 0);
    const double da = *as_double(a);
    const double db = *as_double(b);
    if (da < db) return -1;
    if (da > db) return 1;
    return 0;
}

std::optional<std::int64_t> parse_date(std::string_view text) noexcept {
    auto days = days_since_epoch(trim(text));
    if (!days) return std::nullopt;
    return *days * 86400;
}

std::optional<std::int64_t> parse_timestamp(std::string_view text) noexcept {
    text = trim(text);
    if (text.size() == 10) return parse_date(text);
    if (text.size() != 19 || (text[10] != ' ' && text[10] != 'T') || text[13] != ':' ||
        text[16] != ':') {
        return std::nullopt;
    }
    auto days = days_since_epoch(text.substr(0, 10));
    auto hh = parse_number<int>(text.substr(11, 2));
    auto mm = parse_number<int>(text.substr(14, 2));
    auto ss = parse_number<int>(text.substr(17, 2));
    if (!days || !hh || !mm || !ss || *hh > 23 || *mm > 59 || *ss > 60) return std::nullopt;
    return *days * 86400 + *hh * 3600 + *mm * 60 + *ss;
}

std::string format_date(std::int64_t seconds) {
    const std::int64_t days = floor_div(seconds, 86400);
    std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{days}}};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

std::string format_timestamp(std::int64_t seconds) {
    const std::int64_t days = floor_div(seconds, 86400);
    const std::int64_t rem = seconds - days * 86400;
    char buf[16];
    std::snprintf(buf, sizeof buf, " %02d:%02d:%02d", static_cast<int>(rem / 3600),
                  static_cast<int>((rem % 3600) / 60), static_cast<int>(rem % 60));
    return format_date(seconds) + buf;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "NaN";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::optional<Cell> parse_cell(std::string_view text, ValueType type) {
    if (text.empty()) return Cell{};
    switch (type) {
        case ValueType::string: return Cell{std::string(text)};
        case ValueType::integer:
        case ValueType::duration: {
            auto v = parse_number<std::int64_t>(trim(text));
            if (v) return Cell{*v};
            // Accept integral floats such as "12.0".
            auto d = parse_number<double>(trim(text));
            if (d && std::trunc(*d) == *d && std::isfinite(*d)) {
                return Cell{static_cast<std::int64_t>(*d)};
            }
            return std::nullopt;
        }
        case ValueType::floating: {
            auto t = trim(text);
            if (t == "NA" || t == "NaN") return Cell{};
            auto v = parse_number<double>(t);
            if (!v) return std::nullopt;
            return Cell{*v};
        }
        case ValueType::boolean: {
            auto v = parse_bool(trim(text));
            if (!v) return std::nullopt;
            return Cell{*v};
        }
        case ValueType::timestamp: {
            auto v = parse_timestamp(text);
            if (!v) return std::nullopt;
            return Cell{*v};
        }
        case ValueType::date: {
            auto v = parse_date(text.substr(0, std::min<std::size_t>(text.size(), 10)));
            if (!v) return std::nullopt;
            return Cell{*v};
        }
    }
    return std::nullopt;
}

Cell cast_cell(const Cell& c, ValueType target) {
    if (is_null(c)) return Cell{};
    switch (target) {
        case ValueType::string:
            if (auto s = std::get_if<std::string>(&c)) return *s;
            if (auto b = std::get_if<bool>(&c)) return std::string(*b ? "true" : "false");
            if (auto i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
            return format_double(std::get<double>(c));
        case ValueType::floating:
            if (auto s = std::get_if<std::string>(&c)) {
                auto v = parse_number<double>(trim(*s));
                return v ? Cell{*v} : Cell{};
            }
            return *as_double(c);
        case ValueType::boolean:
            if (auto s = std::get_if<std::string>(&c)) {
                auto v = parse_bool(trim(*s));
                return v ? Cell{*v} : Cell{};
            }
            if (auto b = std::get_if<bool>(&c)) return *b;
            return *as_double(c) != 0.0;
        case ValueType::integer:
        case ValueType::duration:
        case ValueType::timestamp:
        case ValueType::date: {
            if (auto s = std::get_if<std::string>(&c)) {
                auto v = parse_cell(*s, target);
                return v ? *v : Cell{};
            }
            if (auto d = std::get_if<double>(&c)) {
                if (!std::isfinite(*d)) return Cell{};
                return static_cast<std::int64_t>(std::trunc(*d));
            }
            return *as_int(c);
        }
    }
    return Cell{};
}

std::string format_cell(const Cell& c, ValueType type) {
    if (is_null(c)) return {};
    if (auto s = std::get_if<std::string>(&c)) return *s;
    if (auto b = std::get_if<bool>(&c)) return *b ? "true" : "false";
    if (auto d = std::get_if<double>(&c)) return format_double(*d);
    const auto v = std::get<std::int64_t>(c);
    switch (type) {
        case ValueType::timestamp: return format_timestamp(v);
        case ValueType::date: return format_date(v);
        default: return std::to_string(v);
    }
}

}  // namespace icuharm
