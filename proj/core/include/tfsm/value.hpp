#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <variant>

namespace tfsm {

/// Virtual time in integer milliseconds.
using Millis = std::int64_t;

/// Timeout value meaning "no timeout at this state".
inline constexpr Millis kInfinite = std::numeric_limits<Millis>::max();

/// Reserved name of the empty output.
inline constexpr std::string_view kEpsilon = "eps";

enum class ValueKind { None, Int, String };

using Value = std::variant<std::int64_t, std::string>;

inline ValueKind kind_of(const Value& v) {
  return std::holds_alternative<std::int64_t>(v) ? ValueKind::Int : ValueKind::String;
}

std::string_view to_string(ValueKind kind) noexcept;
ValueKind value_kind_from_string(std::string_view text);  // throws Error(SchemaError)

/// Human-readable rendering: integers in base 10, strings double-quoted with escapes.
std::string format_value(const Value& v);

/// Quote a string with `"` and backslash escapes (used by expressions and the wire protocol).
std::string quote(std::string_view text);

}  // namespace tfsm
