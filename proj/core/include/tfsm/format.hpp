#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tfsm/machine.hpp"
#include "tfsm/mutation.hpp"
#include "tfsm/suite.hpp"

namespace tfsm {

inline constexpr std::string_view kSchemaVersion = "tfsm/1";

// Document parsers throw Error(SyntaxError) with "line L, column C" for
// malformed JSON and Error(SchemaError) naming the field path for shape or
// kind violations. Unknown fields are rejected.

/// Shape checks only; the result may still fail validate_machine.
MachineDef parse_model_def(std::string_view text);
/// Also validates and compiles. Ill-typed guards or updates throw
/// Error(SchemaError); other violations throw Error(SemanticError) listing them.
Machine parse_model(std::string_view text);
/// Canonical form: sorted keys, two-space indent, declaration order kept, trailing LF.
std::string serialize_model(const MachineDef& def);

Suite parse_suite(std::string_view text);
std::string serialize_suite(const Suite& suite);

VerdictReport parse_verdicts(std::string_view text);
std::string serialize_verdicts(const VerdictReport& report);

MutantSet parse_mutants(std::string_view text);
std::string serialize_mutants(const MutantSet& set);

MutantDescriptor parse_descriptor(std::string_view text);
/// Single line, used by the wire MUTATE command.
std::string serialize_descriptor(const MutantDescriptor& d);

// Bundled device models.
std::vector<std::string> bundled_model_names();
std::string_view bundled_model_text(std::string_view name);  // throws Error(UnknownModel)
Machine load_bundled(std::string_view name);                 // throws Error(UnknownModel)

}  // namespace tfsm
