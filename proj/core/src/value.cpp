#include "tfsm/value.hpp"

#include "tfsm/error.hpp"

namespace tfsm {

std::string_view to_string(ValueKind kind) noexcept {
  switch (kind) {
    case ValueKind::None: return "none";
    case ValueKind::Int: return "int";
    case ValueKind::String: return "string";
  }
  return "none";
}

ValueKind value_kind_from_string(std::string_view text) {
  if (text == "none") return ValueKind::None;
  if (text == "int") return ValueKind::Int;
  if (text == "string") return ValueKind::String;
  throw Error(ErrorKind::SchemaError, "unknown value kind '" + std::string(text) + "'");
}

std::string quote(std::string_view text) {
  std::string out;
  out.reserve(text.size() + 2);
  out.push_back('"');
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('"');
  return out;
}

std::string format_value(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  return quote(std::get<std::string>(v));
}

}  // namespace tfsm
