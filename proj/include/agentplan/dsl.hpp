#pragma once

/// @file dsl.hpp
/// Textual frontend for agent graphs (`.agraph` files).
///
///   file   := graph+                       first graph is the root
///   graph  := "graph" ID "{" decl* "}"
///   decl   := ID "=" KIND "(" [ID ("," ID)*] ")" attrs
///           | "edge" ID "->" ID attrs
///   attrs  := "{" [ID "=" literal ([","] ID "=" literal)*] "}"
///   literal:= INT | FLOAT | STRING | "true" | "false"
///
/// `//` starts a comment running to end of line. Operands create plain data
/// edges; an explicit `edge` declaration carries bytes/mode/kind/loop. Agent
/// nodes reference another graph block with `body="<graph>"`.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "agentplan/error.hpp"
#include "agentplan/graph.hpp"

namespace agentplan {

struct SourceSpan {
  int line = 1;
  int column = 1;
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct AstAttribute {
  std::string key;
  AttrValue value;
  SourceSpan span;
};

struct AstNode {
  std::string id;
  TaskKind kind = TaskKind::GeneralCompute;
  std::vector<std::string> operands;
  std::vector<AstAttribute> attributes;
  SourceSpan span;
};

struct AstEdge {
  std::string src;
  std::string dst;
  std::vector<AstAttribute> attributes;
  SourceSpan span;
};

struct AstGraph {
  std::string name;
  std::vector<AstNode> nodes;
  std::vector<AstEdge> edges;
  SourceSpan span;
};

struct Ast {
  std::vector<AstGraph> graphs;
};

/// Error with the offending span. `expected` lists acceptable tokens for
/// syntax errors.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, const std::string& message, SourceSpan span, std::vector<std::string> expected = {});

  const SourceSpan& span() const noexcept { return span_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  SourceSpan span_;
  std::vector<std::string> expected_;
};

/// Throws ParseError (SyntaxError, DuplicateId, UnknownKind, UnknownReference).
Ast parse(std::string_view text);

/// Lowers an Ast to a TaskGraph rooted at its first graph block.
TaskGraph to_graph(const Ast& ast);
Ast to_ast(const TaskGraph& g);

/// Canonical text: topological-then-lexicographic node order, sorted
/// attributes, two-space indentation.
std::string print(const TaskGraph& g);
std::string print(const Ast& ast);

Ast normalize(const Ast& ast);
bool structurally_equal(const Ast& a, const Ast& b);

/// Convenience: parse + to_graph.
TaskGraph parse_graph(std::string_view text);

/// Shortest decimal text that parses back to the same double; always carries a
/// '.' or exponent so it reads back as a float.
std::string format_double(double v);

}  // namespace agentplan
