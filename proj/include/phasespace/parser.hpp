#pragma once

#include <string_view>

#include "phasespace/operator_algebra.hpp"

namespace phasespace {

// Grammar (whitespace-insensitive):
//
//   expr   := ['+'|'-'] term { ('+'|'-') term }
//   term   := factor { ['*'] factor }
//   factor := atom [ '^' integer ]
//   atom   := number | 'i' | 'hbar' | 'q' | 'p' | '(' expr ')'
//
// Juxtaposed factors multiply left to right, so "p q" is the product p̂·q̂
// and is reordered to q̂p̂ - i hbar. Errors carry the character offset.

/// Parses non-commuting operator text into canonical standard order.
OperatorExpr parse_operator(std::string_view text, double hbar);

/// Parses the same grammar with commuting q, p into a phase-space symbol.
PhaseSpaceSymbol parse_symbol(std::string_view text, double hbar);

}  // namespace phasespace
