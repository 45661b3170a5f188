#include "icuharm/callback.hpp"

#include <cctype>
#include <charconv>
#include <regex>

namespace icuharm {

namespace {

class CallbackParser {
public:
    explicit CallbackParser(std::string_view src) : src_(src) {}

    CallbackExpr parse() {
        skip_ws();
        CallbackExpr expr;
        expr.head = identifier();
        skip_ws();
        expect('(');
        skip_ws();
        if (peek() == ')') {
            ++pos_;
        } else {
            for (;;) {
                skip_ws();
                expr.args.push_back(argument());
                skip_ws();
                if (peek() == ',') {
                    ++pos_;
                    continue;
                }
                expect(')');
                break;
            }
        }
        skip_ws();
        if (pos_ != src_.size()) fail("unexpected trailing input");
        return expr;
    }

private:
    [[noreturn]] void fail(const std::string& what, Errc code = Errc::syntax_error) const {
        throw CallbackSyntaxError(code, pos_, what);
    }

    char peek() const noexcept { return pos_ < src_.size() ? src_[pos_] : '\0'; }

    void skip_ws() noexcept {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    void expect(char ch) {
        if (pos_ >= src_.size()) fail(std::string("expected '") + ch + "' but input ended");
        if (src_[pos_] != ch) fail(std::string("expected '") + ch + "'");
        ++pos_;
    }

    static bool ident_start(char ch) noexcept {
        return std::isalpha(static_cast<unsigned char>(ch)) || ch == '_';
    }
    static bool ident_char(char ch) noexcept {
        return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_';
    }

    std::string identifier() {
        if (pos_ >= src_.size() || !ident_start(src_[pos_])) fail("expected identifier");
        const std::size_t begin = pos_;
        while (pos_ < src_.size() && ident_char(src_[pos_])) ++pos_;
        return std::string(src_.substr(begin, pos_ - begin));
    }

    CallbackArg argument() {
        const char ch = peek();
        CallbackArg arg;
        if (ch == '\'' || ch == '"') {
            arg.kind = CallbackArg::Kind::string;
            ++pos_;
            const std::size_t begin = pos_;
            while (pos_ < src_.size() && src_[pos_] != ch) ++pos_;
            if (pos_ >= src_.size()) fail("unterminated string literal");
            arg.text = std::string(src_.substr(begin, pos_ - begin));
            ++pos_;
            return arg;
        }
        if (ident_start(ch)) {
            arg.kind = CallbackArg::Kind::identifier;
            arg.text = identifier();
            const std::size_t after = pos_;
            skip_ws();
            if (peek() == '(') fail("nested calls are not supported", Errc::nested_call_unsupported);
            pos_ = after;
            return arg;
        }
        if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '-' || ch == '+' || ch == '.') {
            const std::size_t begin = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.' ||
                    src_[pos_] == '-' || src_[pos_] == '+')) {
                ++pos_;
            }
            arg.kind = CallbackArg::Kind::number;
            arg.text = std::string(src_.substr(begin, pos_ - begin));
            const char* first = arg.text.data() + (arg.text.front() == '+' ? 1 : 0);
            auto [ptr, ec] = std::from_chars(first, arg.text.data() + arg.text.size(), arg.number);
            if (ec != std::errc() || ptr != arg.text.data() + arg.text.size()) {
                pos_ = begin;
                fail("malformed number");
            }
            return arg;
        }
        if (pos_ >= src_.size()) fail("expected argument but input ended");
        fail("expected argument");
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

void check_arity(const CallbackExpr& e, std::size_t n) {
    if (e.args.size() != n) {
        throw Error(Errc::arity_mismatch, e.head + " takes " + std::to_string(n) +
                                              " argument(s), got " + std::to_string(e.args.size()));
    }
}

const std::string& literal_text(const CallbackArg& a) { return a.text; }

Cell numeric_transform(const Cell& c, double (*fn)(double)) {
    if (is_null(c)) return c;
    auto v = as_double(cast_cell(c, ValueType::floating));
    if (!v) return Cell{};
    return fn(*v);
}

ItemCallback make_convert_unit(const CallbackExpr& e, const CallbackRegistry& reg) {
    check_arity(e, 3);
    if (e.args[0].kind != CallbackArg::Kind::identifier) {
        throw Error(Errc::invalid_argument, "convert_unit: first argument must name a transform");
    }
    ScalarTransform fn = reg.transform(e.args[0].text);
    std::string new_unit = literal_text(e.args[1]);
    std::regex pattern(literal_text(e.args[2]), std::regex::ECMAScript | std::regex::icase);
    return [fn, new_unit, pattern](Table t, const ItemMeta& meta) {
        if (!meta.unit_var || !t.has_column(*meta.unit_var)) return t;
        auto& val = t.column(meta.val_var);
        auto& unit = t.column(*meta.unit_var);
        bool touched = false;
        for (std::size_t r = 0; r < t.rows(); ++r) {
            const auto* u = std::get_if<std::string>(&unit.cells[r]);
            if (u == nullptr || !std::regex_search(*u, pattern)) continue;
            val.cells[r] = fn(val.cells[r]);
            unit.cells[r] = new_unit;
            touched = true;
        }
        if (touched) retype_column(val);
        return t;
    };
}

ItemCallback make_transform_fun(const CallbackExpr& e, const CallbackRegistry& reg) {
    check_arity(e, 1);
    ScalarTransform fn = reg.transform(e.args[0].text);
    return [fn](Table t, const ItemMeta& meta) {
        auto& val = t.column(meta.val_var);
        for (auto& c : val.cells) c = fn(c);
        retype_column(val);
        return t;
    };
}

ItemCallback make_apply_map(const CallbackExpr& e, const CallbackRegistry&) {
    if (e.args.empty() || e.args.size() % 2 != 0) {
        throw Error(Errc::arity_mismatch, "apply_map takes key/value pairs");
    }
    std::map<std::string, std::string> mapping;
    for (std::size_t i = 0; i < e.args.size(); i += 2) {
        mapping[literal_text(e.args[i])] = literal_text(e.args[i + 1]);
    }
    return [mapping](Table t, const ItemMeta& meta) {
        auto& val = t.column(meta.val_var);
        for (auto& c : val.cells) {
            if (is_null(c)) continue;
            auto it = mapping.find(std::get<std::string>(cast_cell(c, ValueType::string)));
            c = it == mapping.end() ? Cell{} : Cell{it->second};
        }
        val.type = ValueType::string;
        return t;
    };
}

}  // namespace

CallbackExpr parse_callback(std::string_view src) { return CallbackParser(src).parse(); }

double fahr_to_cels(double fahrenheit) noexcept { return (fahrenheit - 32.0) * 5.0 / 9.0; }

double fraction_to_percent(double v) noexcept { return v <= 1.0 ? v * 100.0 : v; }

void retype_column(Column& c) {
    bool any_int = false, any_float = false, any_bool = false, any_str = false;
    for (const auto& cell : c.cells) {
        switch (cell.index()) {
            case 1: any_int = true; break;
            case 2: any_float = true; break;
            case 3: any_bool = true; break;
            case 4: any_str = true; break;
            default: break;
        }
    }
    const int kinds = any_int + any_float + any_bool + any_str;
    if (kinds == 0) return;
    if (any_str && kinds == 1) {
        c.type = ValueType::string;
    } else if (any_bool && kinds == 1) {
        c.type = ValueType::boolean;
    } else if (any_int && kinds == 1) {
        if (c.type == ValueType::floating || c.type == ValueType::string ||
            c.type == ValueType::boolean) {
            c.type = ValueType::integer;
        }
    } else {
        c.type = ValueType::floating;
        for (auto& cell : c.cells) cell = cast_cell(cell, ValueType::floating);
    }
}

const CallbackFactory& CallbackRegistry::factory(std::string_view name) const {
    auto it = factories_.find(name);
    if (it == factories_.end()) throw Error(Errc::unknown_factory, std::string(name));
    return it->second;
}

const ScalarTransform& CallbackRegistry::transform(std::string_view name) const {
    auto it = transforms_.find(name);
    if (it == transforms_.end()) throw Error(Errc::unknown_transform, std::string(name));
    return it->second;
}

CallbackRegistry CallbackRegistry::with_builtins() {
    CallbackRegistry reg;
    reg.add_factory("convert_unit", make_convert_unit);
    reg.add_factory("transform_fun", make_transform_fun);
    reg.add_factory("apply_map", make_apply_map);
    reg.add_transform("fahr_to_cels",
                      [](const Cell& c) { return numeric_transform(c, fahr_to_cels); });
    reg.add_transform("fraction_to_percent",
                      [](const Cell& c) { return numeric_transform(c, fraction_to_percent); });
    reg.add_transform("set_true", [](const Cell&) { return Cell{true}; });
    reg.add_transform("identity", [](const Cell& c) { return c; });
    return reg;
}

ItemCallback evaluate(const CallbackExpr& expr, const CallbackRegistry& registry) {
    return registry.factory(expr.head)(expr, registry);
}

}  // namespace icuharm
