#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "specmorph/expr.hpp"

namespace specmorph {

// Name registry enforcing variable/parameter disjointness within a context.
class SymbolTable {
 public:
  Symbol declare_variable(const std::string& name);
  Symbol declare_parameter(const std::string& name);
  // Unknown names encountered while parsing become parameters.
  Symbol get_or_declare_parameter(const std::string& name);
  std::optional<Symbol> lookup(const std::string& name) const;

 private:
  Symbol declare(const std::string& name, SymbolKind kind);
  std::map<std::string, Symbol> table_;
};

// Parses the prefix serialization produced by Expr::str, e.g.
//   (mul (rat 1 1) (arctanh (cos (mul 2 a x))))
// Heads: add, mul, pow, rat, cplx, sqrt, and the function family names.
// Bare integer atoms are constants; `i` is the imaginary unit; other atoms
// resolve through the symbol table.
Expr parse_expr(std::string_view text, SymbolTable& symbols);

}  // namespace specmorph
