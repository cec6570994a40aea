// Text format (.sfi) and JSON output.
//
//   entry C.main
//   class A extends S {
//     field f init
//     clinit { 0: put A.f clinit=B -> 1   1: return }
//     method m { 2: invoke calls C.n -> 3   3: return }
//   }
//
// A return point always gets an edge to the method exit `end`.

#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sfi/analysis.hpp"
#include "sfi/checks.hpp"
#include "sfi/model.hpp"

namespace sfi {

struct SourceSpan {
  std::size_t line = 1;
  std::size_t column = 1;
};

struct ParseError {
  SourceSpan span;
  std::string expected;
  std::string found;

  std::string str() const;
};

using ParseResult = std::variant<Program, std::vector<ParseError>>;

struct ParseOptions {
  /// Keep intra edges to undeclared labels instead of failing, so that
  /// validate() can report them.
  bool keep_dangling_labels = false;
};

ParseResult parse(std::string_view text, const ParseOptions& options = {});

std::string render(const Program& program);

/// Deterministic JSON rendering of a solution and its diagnostics.
std::string solution_to_json(const Cfg& cfg, const Solution& sol, const std::vector<Diagnostic>& warnings = {});

}  // namespace sfi
