#include <gtest/gtest.h>

#include "agentplan/dsl.hpp"
#include "agentplan/error.hpp"
#include "agentplan/io.hpp"
#include "test_support.hpp"

using namespace agentplan;

namespace {

ParseError parse_failure(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "parse succeeded: " << text;
  return ParseError(ErrorCode::SyntaxError, "none", {});
}

}  // namespace

TEST(Parse, SingleInputNode) {
  const Ast ast = parse("graph g { a = input() {} }");
  ASSERT_EQ(ast.graphs.size(), 1u);
  EXPECT_EQ(ast.graphs[0].name, "g");
  ASSERT_EQ(ast.graphs[0].nodes.size(), 1u);
  EXPECT_EQ(ast.graphs[0].nodes[0].id, "a");
  EXPECT_EQ(ast.graphs[0].nodes[0].kind, TaskKind::Input);
  EXPECT_TRUE(ast.graphs[0].edges.empty());
}

TEST(Parse, VoiceAgentShape) {
  const std::string text = read_text_file(fixtures::data_path("voice_agent.agraph"));
  const Ast ast = parse(text);
  ASSERT_EQ(ast.graphs.size(), 1u);
  EXPECT_EQ(ast.graphs[0].nodes.size(), 6u);
  const TaskGraph g = to_graph(ast);
  EXPECT_EQ(g.nodes.size(), 6u);
  EXPECT_EQ(g.edges.size(), 6u);
  int annotated = 0;
  for (const auto& e : g.edges) annotated += e.loop_annotation.has_value();
  EXPECT_EQ(annotated, 1);
  ASSERT_TRUE(g.find_edge("search", "llm"));
  EXPECT_EQ(g.find_edge("search", "llm")->loop_annotation, 3);
  EXPECT_EQ(g.inputs, std::vector<std::string>{"mic"});
  EXPECT_EQ(g.outputs, std::vector<std::string>{"speaker"});
}

TEST(Parse, UnclosedOperandListReportsTheBrace) {
  const std::string text = "graph g { a = llm( }";
  const ParseError e = parse_failure(text);
  EXPECT_EQ(e.code(), ErrorCode::SyntaxError);
  EXPECT_EQ(e.span().line, 1);
  EXPECT_EQ(e.span().begin, text.find('}'));
  EXPECT_EQ(e.span().column, static_cast<int>(text.find('}')) + 1);
  EXPECT_FALSE(e.expected().empty());
}

TEST(Parse, DuplicateNodeId) {
  const ParseError e = parse_failure("graph g {\n  a = input() {}\n  a = output(a) {}\n}");
  EXPECT_EQ(e.code(), ErrorCode::DuplicateId);
  EXPECT_EQ(e.span().line, 3);
}

TEST(Parse, UnknownKind) {
  const ParseError e = parse_failure("graph g { a = teleport() {} }");
  EXPECT_EQ(e.code(), ErrorCode::UnknownKind);
  EXPECT_EQ(e.span().column, 15);
}

TEST(Parse, UndeclaredOperand) {
  EXPECT_EQ(parse_failure("graph g { b = output(a) {} }").code(), ErrorCode::UnknownReference);
  EXPECT_EQ(parse_failure("graph g { a = input() {} edge a -> zz {} }").code(), ErrorCode::UnknownReference);
}

TEST(Parse, DuplicateAttributeAndBadValue) {
  EXPECT_EQ(parse_failure("graph g { a = input() { x=1, x=2 } }").code(), ErrorCode::DuplicateId);
  EXPECT_EQ(parse_failure("graph g { a = input() { x= } }").code(), ErrorCode::SyntaxError);
  EXPECT_EQ(parse_failure("graph g { a = input() { x=\"open } }").code(), ErrorCode::SyntaxError);
}

TEST(Parse, LiteralTypesAndComments) {
  const TaskGraph g = parse_graph(
      "// leading comment\n"
      "graph g {\n"
      "  a = general_compute() { i=-3 f=2.5e3 s=\"q\\\"x\\n\" t=true u=false } // trailing\n"
      "}\n");
  const TaskNode* a = g.find("a");
  ASSERT_TRUE(a);
  EXPECT_EQ(std::get<std::int64_t>(a->payload.at("i")), -3);
  EXPECT_EQ(std::get<double>(a->payload.at("f")), 2500.0);
  EXPECT_EQ(std::get<std::string>(a->payload.at("s")), "q\"x\n");
  EXPECT_EQ(std::get<bool>(a->payload.at("t")), true);
  EXPECT_EQ(std::get<bool>(a->payload.at("u")), false);
}

TEST(Parse, NumericFieldsRejectStrings) {
  EXPECT_THROW(parse_graph("graph g { a = general_compute() { static_latency_ms=\"slow\" } }"), Error);
  EXPECT_THROW(parse_graph("graph g { a = input() {} b = output(a) {} edge a -> b { bytes=-1 } }"), Error);
  EXPECT_THROW(parse_graph("graph g { a = input() {} b = output(a) {} edge a -> b { colour=1 } }"), Error);
}

TEST(Parse, AgentBodyLinksNestedGraph) {
  const TaskGraph g = parse_graph(
      "graph outer { i = input() {} w = agent(i) { body=\"inner\" } o = output(w) {} }\n"
      "graph inner { x = input() {} y = model_exec(x) { model=\"m\" } z = output(y) {} }\n");
  const TaskNode* w = g.find("w");
  ASSERT_TRUE(w && w->subgraph);
  EXPECT_EQ(w->subgraph->name, "inner");
  EXPECT_EQ(w->subgraph->nodes.size(), 3u);
  EXPECT_EQ(w->payload.count("body"), 0u);
  EXPECT_EQ(parse_failure("graph a { w = agent() { body=\"a\" } }").code(), ErrorCode::UnknownReference);
  EXPECT_EQ(parse_failure("graph a { w = agent() { body=\"nope\" } }").code(), ErrorCode::UnknownReference);
}

TEST(Print, OneNodeCanonicalText) {
  EXPECT_EQ(print(parse_graph("graph g { a = input() {} }")), "graph g {\n  a = input() {}\n}\n");
  EXPECT_EQ(print(parse_graph("graph g{a=general_compute(){z=1 b=2.0}}")),
            "graph g {\n  a = general_compute() { b=2.0, z=1 }\n}\n");
}

TEST(Print, VoiceAgentMatchesGolden) {
  const TaskGraph g = parse_graph(read_text_file(fixtures::data_path("voice_agent.agraph")));
  EXPECT_EQ(print(g), read_text_file(fixtures::data_path("voice_agent.golden.agraph")));
}

TEST(Print, NonDefaultEdgesBecomeEdgeDeclarations) {
  const std::string text =
      "graph g {\n"
      "  a = input() {}\n"
      "  b = output() {}\n"
      "  edge a -> b { bytes=64, kind=\"kv_store\", mode=\"async\" }\n"
      "}\n";
  EXPECT_EQ(print(parse_graph(text)), text);
}

TEST(FormatDouble, AlwaysReadsBackAsFloat) {
  EXPECT_EQ(format_double(2.0), "2.0");
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(-0.5), "-0.5");
  EXPECT_EQ(format_double(1e300), "1e+300");
  for (double v : {1.0 / 3.0, 123456.789, 5e-324, 0.0}) {
    EXPECT_EQ(std::strtod(format_double(v).c_str(), nullptr), v);
  }
}

TEST(RoundTrip, GeneratedGraphsAreFixedPoints) {
  fixtures::GraphGenerator gen(99);
  for (int k = 0; k < 100; ++k) {
    const TaskGraph g = gen.next();
    const std::string text = print(g);
    const TaskGraph back = parse_graph(text);
    EXPECT_TRUE(structurally_equal(back, g)) << text;
    EXPECT_EQ(print(back), text);
    const Ast ast = parse(text);
    EXPECT_TRUE(structurally_equal(parse(print(ast)), normalize(ast)));
  }
}

TEST(RoundTrip, ShuffledSourceNormalizesToSameText) {
  const std::string a =
      "graph g {\n  x = input() {}\n  q = general_compute(x) { k=1 }\n  p = general_compute(x) {}\n"
      "  y = output(p) {}\n  edge q -> y {}\n}\n";
  const std::string b =
      "graph g {\n  x = input() {}\n  p = general_compute(x) {}\n  q = general_compute(x) { k=1 }\n"
      "  y = output(q) {}\n  edge p -> y {}\n}\n";
  EXPECT_EQ(print(parse_graph(a)), print(parse_graph(b)));
  EXPECT_TRUE(structurally_equal(parse(a), parse(b)));
}
