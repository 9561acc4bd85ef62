#include "agentplan/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace agentplan {

ParseError::ParseError(ErrorCode code, const std::string& message, SourceSpan span, std::vector<std::string> expected)
    : Error(code, std::to_string(span.line) + ":" + std::to_string(span.column) + ": " + message),
      span_(span),
      expected_(std::move(expected)) {}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

namespace {

enum class Tok { Ident, Int, Float, String, LBrace, RBrace, LParen, RParen, Comma, Equals, Arrow, End };

std::string describe(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Int: return "integer";
    case Tok::Float: return "float";
    case Tok::String: return "string";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Comma: return "','";
    case Tok::Equals: return "'='";
    case Tok::Arrow: return "'->'";
    case Tok::End: return "end of input";
  }
  return "token";
}

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourceSpan span;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '#';
}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1;
  std::size_t line_start = 0;
  auto span_at = [&](std::size_t b, std::size_t e) {
    return SourceSpan{line, static_cast<int>(b - line_start) + 1, b, e};
  };
  while (i < src.size()) {
    const char c = src[i];
    if (c == '\n') {
      ++line;
      line_start = ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    const std::size_t b = i;
    auto single = [&](Tok t) {
      out.push_back({t, std::string(1, c), span_at(b, b + 1)});
      ++i;
    };
    switch (c) {
      case '{': single(Tok::LBrace); continue;
      case '}': single(Tok::RBrace); continue;
      case '(': single(Tok::LParen); continue;
      case ')': single(Tok::RParen); continue;
      case ',': single(Tok::Comma); continue;
      case '=': single(Tok::Equals); continue;
      default: break;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '>') {
      out.push_back({Tok::Arrow, "->", span_at(b, b + 2)});
      i += 2;
      continue;
    }
    if (ident_start(c)) {
      while (i < src.size() && ident_char(src[i])) ++i;
      out.push_back({Tok::Ident, std::string(src.substr(b, i - b)), span_at(b, i)});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-') {
      bool is_float = false;
      if (c == '-') ++i;
      auto digits = [&] {
        std::size_t start = i;
        while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
        return i > start;
      };
      if (!digits()) throw ParseError(ErrorCode::SyntaxError, "malformed number", span_at(b, i), {"digit"});
      if (i < src.size() && src[i] == '.') {
        ++i;
        is_float = true;
        if (!digits()) throw ParseError(ErrorCode::SyntaxError, "malformed number", span_at(b, i), {"digit"});
      }
      if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
        ++i;
        is_float = true;
        if (i < src.size() && (src[i] == '+' || src[i] == '-')) ++i;
        if (!digits()) throw ParseError(ErrorCode::SyntaxError, "malformed exponent", span_at(b, i), {"digit"});
      }
      out.push_back({is_float ? Tok::Float : Tok::Int, std::string(src.substr(b, i - b)), span_at(b, i)});
      continue;
    }
    if (c == '"') {
      std::string value;
      ++i;
      for (;;) {
        if (i >= src.size() || src[i] == '\n') {
          throw ParseError(ErrorCode::SyntaxError, "unterminated string", span_at(b, i), {"'\"'"});
        }
        char ch = src[i++];
        if (ch == '"') break;
        if (ch == '\\') {
          if (i >= src.size()) throw ParseError(ErrorCode::SyntaxError, "dangling escape", span_at(b, i));
          char esc = src[i++];
          switch (esc) {
            case 'n': value += '\n'; break;
            case 't': value += '\t'; break;
            case '\\': value += '\\'; break;
            case '"': value += '"'; break;
            default: throw ParseError(ErrorCode::SyntaxError, "unknown escape", span_at(i - 2, i));
          }
        } else {
          value += ch;
        }
      }
      out.push_back({Tok::String, std::move(value), span_at(b, i)});
      continue;
    }
    throw ParseError(ErrorCode::SyntaxError, std::string("unexpected character '") + c + "'", span_at(b, b + 1));
  }
  out.push_back({Tok::End, "", span_at(i, i)});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Ast file() {
    Ast ast;
    std::set<std::string> names;
    do {
      auto g = graph();
      if (!names.insert(g.name).second) {
        throw ParseError(ErrorCode::DuplicateId, "graph '" + g.name + "' declared twice", g.span);
      }
      ast.graphs.push_back(std::move(g));
    } while (peek().kind != Tok::End);
    check_bodies(ast);
    return ast;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }

  Token expect(Tok kind, std::vector<std::string> expected = {}) {
    const Token& t = peek();
    if (t.kind != kind) {
      if (expected.empty()) expected.push_back(describe(kind));
      const std::string message = "expected " + expected.front() + ", found " + describe(t.kind);
      throw ParseError(ErrorCode::SyntaxError, message, t.span, std::move(expected));
    }
    return toks_[pos_++];
  }

  Token keyword(std::string_view word) {
    const Token& t = peek();
    if (t.kind != Tok::Ident || t.text != word) {
      throw ParseError(ErrorCode::SyntaxError, "expected '" + std::string(word) + "'", t.span,
                       {"'" + std::string(word) + "'"});
    }
    return toks_[pos_++];
  }

  AstGraph graph() {
    AstGraph g;
    Token kw = keyword("graph");
    g.name = expect(Tok::Ident).text;
    expect(Tok::LBrace);
    std::set<std::string> ids;
    std::set<EdgeKey> explicit_edges;
    std::vector<std::pair<std::string, SourceSpan>> edge_refs;
    while (peek().kind != Tok::RBrace) {
      if (peek().kind == Tok::End) {
        throw ParseError(ErrorCode::SyntaxError, "unterminated graph block", peek().span, {"'}'", "identifier"});
      }
      if (peek().kind == Tok::Ident && peek().text == "edge" && peek(1).kind == Tok::Ident) {
        AstEdge e;
        Token start = toks_[pos_++];
        Token src = expect(Tok::Ident);
        expect(Tok::Arrow);
        Token dst = expect(Tok::Ident);
        e.src = src.text;
        e.dst = dst.text;
        e.attributes = attributes();
        e.span = {start.span.line, start.span.column, start.span.begin, toks_[pos_ - 1].span.end};
        if (!explicit_edges.insert({e.src, e.dst}).second) {
          throw ParseError(ErrorCode::DuplicateId, "edge " + e.src + " -> " + e.dst + " declared twice", e.span);
        }
        edge_refs.emplace_back(e.src, src.span);
        edge_refs.emplace_back(e.dst, dst.span);
        g.edges.push_back(std::move(e));
        continue;
      }
      AstNode n;
      Token id = expect(Tok::Ident, {"identifier", "'}'"});
      n.id = id.text;
      expect(Tok::Equals);
      Token kind = expect(Tok::Ident, {"task kind"});
      auto parsed = parse_task_kind(kind.text);
      if (!parsed) throw ParseError(ErrorCode::UnknownKind, "unknown task kind '" + kind.text + "'", kind.span);
      n.kind = *parsed;
      expect(Tok::LParen);
      if (peek().kind != Tok::RParen) {
        for (;;) {
          Token op = expect(Tok::Ident, {"identifier", "')'"});
          if (!ids.count(op.text)) {
            throw ParseError(ErrorCode::UnknownReference, "operand '" + op.text + "' used before declaration", op.span);
          }
          n.operands.push_back(op.text);
          if (peek().kind != Tok::Comma) break;
          ++pos_;
        }
      }
      expect(Tok::RParen, {"')'", "','"});
      n.attributes = attributes();
      n.span = {id.span.line, id.span.column, id.span.begin, toks_[pos_ - 1].span.end};
      if (!ids.insert(n.id).second) {
        throw ParseError(ErrorCode::DuplicateId, "node '" + n.id + "' declared twice", id.span);
      }
      g.nodes.push_back(std::move(n));
    }
    Token close = expect(Tok::RBrace);
    g.span = {kw.span.line, kw.span.column, kw.span.begin, close.span.end};
    for (const auto& [ref, span] : edge_refs) {
      if (!ids.count(ref)) throw ParseError(ErrorCode::UnknownReference, "edge endpoint '" + ref + "' is not declared", span);
    }
    return g;
  }

  std::vector<AstAttribute> attributes() {
    std::vector<AstAttribute> attrs;
    expect(Tok::LBrace);
    std::set<std::string> keys;
    while (peek().kind != Tok::RBrace) {
      Token key = expect(Tok::Ident, {"attribute name", "'}'"});
      expect(Tok::Equals);
      const Token& v = peek();
      AstAttribute a;
      a.key = key.text;
      a.span = {key.span.line, key.span.column, key.span.begin, v.span.end};
      switch (v.kind) {
        case Tok::Int: {
          std::int64_t x = 0;
          auto r = std::from_chars(v.text.data(), v.text.data() + v.text.size(), x);
          if (r.ec != std::errc{}) throw ParseError(ErrorCode::SyntaxError, "integer out of range", v.span);
          a.value = x;
          break;
        }
        case Tok::Float: {
          double x = 0;
          auto r = std::from_chars(v.text.data(), v.text.data() + v.text.size(), x);
          if (r.ec != std::errc{}) throw ParseError(ErrorCode::SyntaxError, "float out of range", v.span);
          a.value = x;
          break;
        }
        case Tok::String: a.value = v.text; break;
        case Tok::Ident:
          if (v.text == "true" || v.text == "false") {
            a.value = v.text == "true";
            break;
          }
          [[fallthrough]];
        default:
          throw ParseError(ErrorCode::SyntaxError, "expected a literal value", v.span,
                           {"integer", "float", "string", "true", "false"});
      }
      ++pos_;
      if (!keys.insert(a.key).second) {
        throw ParseError(ErrorCode::DuplicateId, "attribute '" + a.key + "' repeated", a.span);
      }
      attrs.push_back(std::move(a));
      if (peek().kind == Tok::Comma) ++pos_;
    }
    expect(Tok::RBrace);
    return attrs;
  }

  static void check_bodies(const Ast& ast) {
    std::map<std::string, const AstGraph*> by_name;
    for (const auto& g : ast.graphs) by_name[g.name] = &g;
    std::map<std::string, int> state;  // 1 = visiting, 2 = done
    std::function<void(const AstGraph&)> visit = [&](const AstGraph& g) {
      state[g.name] = 1;
      for (const auto& n : g.nodes) {
        for (const auto& a : n.attributes) {
          if (a.key != "body" || n.kind != TaskKind::Agent) continue;
          const auto* name = std::get_if<std::string>(&a.value);
          if (!name || !by_name.count(*name)) {
            throw ParseError(ErrorCode::UnknownReference, "agent '" + n.id + "' body names no graph block", a.span);
          }
          if (state[*name] == 1) {
            throw ParseError(ErrorCode::UnknownReference, "agent '" + n.id + "' nests its own graph", a.span);
          }
          if (state[*name] == 0) visit(*by_name[*name]);
        }
      }
      state[g.name] = 2;
    };
    for (const auto& g : ast.graphs) {
      if (state[g.name] == 0) visit(g);
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// Demand field accessors shared by lowering and printing.
struct DemandField {
  const char* key;
  double ResourceVector::*member;
};

constexpr DemandField kDemandFields[] = {
    {"hp_compute_tflops", &ResourceVector::hp_compute_tflops},
    {"mem_bandwidth_gbps_bytes", &ResourceVector::mem_bandwidth_gbps_bytes},
    {"mem_capacity_gb", &ResourceVector::mem_capacity_gb},
    {"net_bandwidth_gbps_bits", &ResourceVector::net_bandwidth_gbps_bits},
    {"disk_capacity_gb", &ResourceVector::disk_capacity_gb},
    {"gp_compute_units", &ResourceVector::gp_compute_units},
};

double numeric(const AstAttribute& a) {
  if (const auto* i = std::get_if<std::int64_t>(&a.value)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&a.value)) return *d;
  throw ParseError(ErrorCode::SyntaxError, "attribute '" + a.key + "' must be numeric", a.span, {"integer", "float"});
}

std::string text(const AstAttribute& a) {
  if (const auto* s = std::get_if<std::string>(&a.value)) return *s;
  throw ParseError(ErrorCode::SyntaxError, "attribute '" + a.key + "' must be a string", a.span, {"string"});
}

std::int64_t integer(const AstAttribute& a) {
  if (const auto* i = std::get_if<std::int64_t>(&a.value)) return *i;
  throw ParseError(ErrorCode::SyntaxError, "attribute '" + a.key + "' must be an integer", a.span, {"integer"});
}

void apply_edge_attributes(GraphEdge& e, const std::vector<AstAttribute>& attrs) {
  for (const auto& a : attrs) {
    if (a.key == "bytes") {
      auto v = integer(a);
      if (v < 0) throw ParseError(ErrorCode::SyntaxError, "bytes must be >= 0", a.span);
      e.transfer_bytes = static_cast<std::uint64_t>(v);
    } else if (a.key == "mode") {
      auto v = text(a);
      if (v != "sync" && v != "async") throw ParseError(ErrorCode::SyntaxError, "mode must be sync or async", a.span);
      e.mode = v == "sync" ? EdgeMode::Sync : EdgeMode::Async;
    } else if (a.key == "kind") {
      auto v = text(a);
      if (v != "data" && v != "kv_store") throw ParseError(ErrorCode::SyntaxError, "kind must be data or kv_store", a.span);
      e.kind = v == "data" ? EdgeKind::Data : EdgeKind::KvStore;
    } else if (a.key == "loop") {
      e.loop_annotation = static_cast<int>(integer(a));
    } else {
      throw ParseError(ErrorCode::SyntaxError, "unknown edge attribute '" + a.key + "'", a.span,
                       {"bytes", "mode", "kind", "loop"});
    }
  }
}

void derive_ports(TaskGraph& g) {
  auto pick = [&](TaskKind kind, bool incoming) {
    std::vector<std::string> typed, fallback;
    for (const auto& n : g.nodes) {
      bool free = incoming ? g.in_edges(n.id).empty() : g.out_edges(n.id).empty();
      if (!free) continue;
      fallback.push_back(n.id);
      if (n.kind == kind) typed.push_back(n.id);
    }
    return typed.empty() ? fallback : typed;
  };
  g.inputs = pick(TaskKind::Input, true);
  g.outputs = pick(TaskKind::Output, false);
}

class Lowering {
 public:
  explicit Lowering(const Ast& ast) {
    for (const auto& g : ast.graphs) by_name_[g.name] = &g;
  }

  std::shared_ptr<const TaskGraph> build(const std::string& name) {
    if (auto it = built_.find(name); it != built_.end()) return it->second;
    const AstGraph& ag = *by_name_.at(name);
    TaskGraph g;
    g.name = ag.name;
    for (const auto& an : ag.nodes) {
      TaskNode n;
      n.id = an.id;
      n.kind = an.kind;
      for (const auto& a : an.attributes) {
        if (a.key == "static_latency_ms") {
          n.static_latency_ms = numeric(a);
        } else if (a.key == "hp_compute_fp8_tflops") {
          n.demand.hp_compute_fp8_tflops = numeric(a);
        } else if (a.key == "body" && an.kind == TaskKind::Agent) {
          n.subgraph = build(text(a));
        } else if (auto f = std::find_if(std::begin(kDemandFields), std::end(kDemandFields),
                                         [&](const DemandField& d) { return a.key == d.key; });
                   f != std::end(kDemandFields)) {
          n.demand.*(f->member) = numeric(a);
        } else {
          n.payload[a.key] = a.value;
        }
      }
      for (const auto& op : an.operands) {
        if (g.find_edge(op, an.id)) continue;
        GraphEdge e;
        e.src = op;
        e.dst = an.id;
        g.edges.push_back(std::move(e));
      }
      g.nodes.push_back(std::move(n));
    }
    for (const auto& ae : ag.edges) {
      GraphEdge* target = nullptr;
      for (auto& e : g.edges) {
        if (e.src == ae.src && e.dst == ae.dst) target = &e;
      }
      if (!target) {
        GraphEdge e;
        e.src = ae.src;
        e.dst = ae.dst;
        g.edges.push_back(std::move(e));
        target = &g.edges.back();
      }
      apply_edge_attributes(*target, ae.attributes);
    }
    derive_ports(g);
    auto ptr = std::make_shared<const TaskGraph>(std::move(g));
    built_[name] = ptr;
    return ptr;
  }

 private:
  std::map<std::string, const AstGraph*> by_name_;
  std::map<std::string, std::shared_ptr<const TaskGraph>> built_;
};

bool default_edge(const GraphEdge& e) {
  return e.transfer_bytes == 0 && e.mode == EdgeMode::Sync && e.kind == EdgeKind::Data && !e.loop_annotation;
}

AstAttribute attr(std::string key, AttrValue value) { return AstAttribute{std::move(key), std::move(value), {}}; }

class Emitter {
 public:
  Ast run(const TaskGraph& root) {
    names_.insert(root.name);
    emit(root, root.name);
    return std::move(ast_);
  }

 private:
  void emit(const TaskGraph& g, const std::string& name) {
    const TaskGraph norm = normalize(g);
    std::size_t slot = ast_.graphs.size();
    ast_.graphs.emplace_back();
    AstGraph ag;
    ag.name = name;
    std::map<std::string, std::size_t> position;
    for (std::size_t i = 0; i < norm.nodes.size(); ++i) position[norm.nodes[i].id] = i;

    std::vector<std::pair<const TaskGraph*, std::string>> nested;
    for (const auto& n : norm.nodes) {
      AstNode an;
      an.id = n.id;
      an.kind = n.kind;
      std::vector<const GraphEdge*> operand_edges;
      for (const auto& e : norm.edges) {
        if (e.dst == n.id && default_edge(e) && position.count(e.src) && position[e.src] < position[n.id]) {
          operand_edges.push_back(&e);
        }
      }
      std::sort(operand_edges.begin(), operand_edges.end(),
                [&](const GraphEdge* a, const GraphEdge* b) { return position[a->src] < position[b->src]; });
      for (const auto* e : operand_edges) an.operands.push_back(e->src);

      std::map<std::string, AttrValue> attrs;
      if (n.static_latency_ms != 0.0) attrs["static_latency_ms"] = n.static_latency_ms;
      for (const auto& f : kDemandFields) {
        if (n.demand.*(f.member) != 0.0) attrs[f.key] = n.demand.*(f.member);
      }
      if (n.demand.hp_compute_fp8_tflops) attrs["hp_compute_fp8_tflops"] = *n.demand.hp_compute_fp8_tflops;
      if (n.subgraph) {
        std::string sub = nested_name(*n.subgraph);
        attrs["body"] = sub;
        nested.emplace_back(n.subgraph.get(), sub);
      }
      for (const auto& [k, v] : n.payload) attrs.emplace(k, v);
      for (auto& [k, v] : attrs) an.attributes.push_back(attr(k, v));
      ag.nodes.push_back(std::move(an));
    }
    for (const auto& e : norm.edges) {
      if (default_edge(e) && position.count(e.src) && position.count(e.dst) && position[e.src] < position[e.dst]) {
        continue;
      }
      AstEdge ae;
      ae.src = e.src;
      ae.dst = e.dst;
      if (e.transfer_bytes != 0) ae.attributes.push_back(attr("bytes", static_cast<std::int64_t>(e.transfer_bytes)));
      if (e.kind != EdgeKind::Data) ae.attributes.push_back(attr("kind", std::string(to_string(e.kind))));
      if (e.loop_annotation) ae.attributes.push_back(attr("loop", static_cast<std::int64_t>(*e.loop_annotation)));
      if (e.mode != EdgeMode::Sync) ae.attributes.push_back(attr("mode", std::string(to_string(e.mode))));
      ag.edges.push_back(std::move(ae));
    }
    ast_.graphs[slot] = std::move(ag);
    for (const auto& [graph, sub] : nested) {
      if (emitted_.count(sub)) continue;
      emitted_.insert(sub);
      emit(*graph, sub);
    }
  }

  std::string nested_name(const TaskGraph& g) {
    if (auto it = assigned_.find(&g); it != assigned_.end()) return it->second;
    for (const auto& [ptr, name] : assigned_) {
      if (*ptr == g) return assigned_[&g] = name;
    }
    std::string name = g.name;
    for (int n = 2; names_.count(name); ++n) name = g.name + "_" + std::to_string(n);
    names_.insert(name);
    return assigned_[&g] = name;
  }

  Ast ast_;
  std::set<std::string> names_;
  std::set<std::string> emitted_;
  std::map<const TaskGraph*, std::string> assigned_;
};

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

std::string literal(const AttrValue& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(x);
        } else if constexpr (std::is_same_v<T, double>) {
          return format_double(x);
        } else if constexpr (std::is_same_v<T, bool>) {
          return x ? "true" : "false";
        } else {
          return quote(x);
        }
      },
      v);
}

std::string attribute_block(const std::vector<AstAttribute>& attrs) {
  if (attrs.empty()) return "{}";
  std::string out = "{ ";
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    if (i) out += ", ";
    out += attrs[i].key + "=" + literal(attrs[i].value);
  }
  return out + " }";
}

std::string render(const Ast& ast) {
  std::ostringstream os;
  for (std::size_t gi = 0; gi < ast.graphs.size(); ++gi) {
    const auto& g = ast.graphs[gi];
    if (gi) os << '\n';
    os << "graph " << g.name << " {\n";
    for (const auto& n : g.nodes) {
      os << "  " << n.id << " = " << to_string(n.kind) << '(';
      for (std::size_t i = 0; i < n.operands.size(); ++i) os << (i ? ", " : "") << n.operands[i];
      os << ") " << attribute_block(n.attributes) << '\n';
    }
    for (const auto& e : g.edges) {
      os << "  edge " << e.src << " -> " << e.dst << ' ' << attribute_block(e.attributes) << '\n';
    }
    os << "}\n";
  }
  return os.str();
}

}  // namespace

Ast parse(std::string_view text) { return Parser(lex(text)).file(); }

TaskGraph to_graph(const Ast& ast) {
  if (ast.graphs.empty()) throw Error(ErrorCode::InvalidArgument, "empty Ast");
  return *Lowering(ast).build(ast.graphs.front().name);
}

Ast to_ast(const TaskGraph& g) { return Emitter{}.run(g); }

std::string print(const TaskGraph& g) { return render(to_ast(g)); }

std::string print(const Ast& ast) { return print(to_graph(ast)); }

Ast normalize(const Ast& ast) { return to_ast(to_graph(ast)); }

bool structurally_equal(const Ast& a, const Ast& b) { return structurally_equal(to_graph(a), to_graph(b)); }

TaskGraph parse_graph(std::string_view text) { return to_graph(parse(text)); }

}  // namespace agentplan
