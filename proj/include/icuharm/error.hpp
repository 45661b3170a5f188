#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace icuharm {

enum class Errc {
    malformed_json,
    missing_field,
    bad_partition,
    dangling_column_ref,
    invalid_config,
    unknown_concept_class,
    rec_without_callback,
    bad_aggregate,
    syntax_error,
    nested_call_unsupported,
    unknown_factory,
    unknown_transform,
    arity_mismatch,
    coercion_error,
    missing_file,
    row_count_mismatch,
    unknown_column,
    unknown_table,
    unknown_source,
    not_imported,
    io_error,
    length_mismatch,
    incompatible_ids,
    interval_mismatch,
    no_id_available,
    unknown_id_system,
    missing_origin_table,
    unknown_concept_name,
    concept_unavailable,
    unknown_sub_var,
    invalid_argument,
};

std::string_view errc_name(Errc code) noexcept;

/// Library-wide exception. `code()` identifies the failure class; the message
/// carries source/table/concept context where it is known.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace icuharm
