#pragma once

#include "icuharm/error.hpp"
#include "icuharm/table.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace icuharm {

/// Flat callback call such as `convert_unit(fahr_to_cels, 'C', 'f')`.
///
/// Grammar:
///   call := ident "(" [arg {"," arg}] ")"
///   arg  := ident | string | number
///   string := "'" chars "'" | '"' chars '"'
struct CallbackArg {
    enum class Kind { identifier, string, number };
    Kind kind = Kind::identifier;
    std::string text;
    double number = 0.0;

    bool operator==(const CallbackArg&) const = default;
};

struct CallbackExpr {
    std::string head;
    std::vector<CallbackArg> args;

    bool operator==(const CallbackExpr&) const = default;
};

class CallbackSyntaxError : public Error {
public:
    CallbackSyntaxError(Errc code, std::size_t position, const std::string& what)
        : Error(code, what + " at " + std::to_string(position)), position_(position) {}
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// Throws CallbackSyntaxError (syntax_error or nested_call_unsupported).
CallbackExpr parse_callback(std::string_view src);

struct ItemMeta {
    std::string val_var;
    std::optional<std::string> unit_var;
    std::optional<std::string> index_var;
    std::vector<std::string> id_vars;
};

using ItemCallback = std::function<Table(Table, const ItemMeta&)>;
using ScalarTransform = std::function<Cell(const Cell&)>;

class CallbackRegistry;
using CallbackFactory = std::function<ItemCallback(const CallbackExpr&, const CallbackRegistry&)>;

/// Named function factories and scalar transforms available to item callbacks.
/// Built-ins: factories convert_unit, transform_fun, apply_map; transforms
/// fahr_to_cels, set_true, identity, fraction_to_percent.
class CallbackRegistry {
public:
    static CallbackRegistry with_builtins();

    void add_factory(std::string name, CallbackFactory f) { factories_[std::move(name)] = std::move(f); }
    void add_transform(std::string name, ScalarTransform f) { transforms_[std::move(name)] = std::move(f); }

    const CallbackFactory& factory(std::string_view name) const;
    const ScalarTransform& transform(std::string_view name) const;

private:
    std::map<std::string, CallbackFactory, std::less<>> factories_;
    std::map<std::string, ScalarTransform, std::less<>> transforms_;
};

ItemCallback evaluate(const CallbackExpr& expr, const CallbackRegistry& registry);

double fahr_to_cels(double fahrenheit) noexcept;
/// Inspired-oxygen values recorded as fractions (<= 1) are rescaled to percent.
double fraction_to_percent(double v) noexcept;

/// Settles a column's declared type after cell-wise rewriting; mixed ints and
/// floats become floating.
void retype_column(Column& c);

}  // namespace icuharm
