#pragma once

#include <string>

#include "motiq/motif.hpp"

namespace motiq {

/// Inline motif expressions:
///   Qfree(N)  Qconv(s[,step[,offset]])  Qpool(s, filter)  Qdense()
/// combined with infix `+`, postfix `* k` and parentheses. Filters are
/// quoted strings, either a family name or a 0/1 literal. Syntax errors
/// carry the offending position.
Motif parse_motif_expr(const std::string& text);

/// Canonical expression for a motif built from the grammar above;
/// round-trips through parse_motif_expr.
std::string to_expr(const Motif& m);

}  // namespace motiq
