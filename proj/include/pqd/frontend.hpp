#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "pqd/syntax.hpp"

namespace pqd {

/// Parses a whole source file. A declaration starts at column 1 and extends
/// until the next token at column 1. Internal forms (labels, \', @, force',
/// apply') are rejected unless `allow_internal`. Throws ParseError.
std::vector<Declaration> parse_program(std::string_view source,
                                       bool allow_internal = false);

/// Parses a single term or type; internal forms are accepted by default so
/// that printed terms read back.
TermPtr parse_term(std::string_view source, bool allow_internal = true);
TypePtr parse_type(std::string_view source, bool allow_internal = true);

/// Renders in the concrete syntax accepted by the parser. Internal forms
/// (labels, primed constructs, boxed circuits) use reserved notation.
std::string print_term(const TermPtr& m);
std::string print_type(const TypePtr& a);
std::string print_program(const std::vector<Declaration>& decls);

}  // namespace pqd
