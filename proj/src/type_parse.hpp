#pragma once

#include "lexer.hpp"
#include "sessium/session_type.hpp"

namespace sessium::detail {

/// Parses a session type at the current position, stopping at the first
/// token that cannot continue it.
Type parse_type_tokens(TokenStream& ts, const TypeUniverse& u);
BasicType parse_basic_tokens(TokenStream& ts, const TypeUniverse& u);

}  // namespace sessium::detail
