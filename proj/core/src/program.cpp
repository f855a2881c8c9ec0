#include "fql/program.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "fql/instance_io.hpp"
#include "fql/migrate.hpp"
#include "fql/sqlgen.hpp"

namespace fql {

namespace {

struct Token {
  enum class Kind { Ident, Number, Str, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  int line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { tok_ = lex(); }

  const Token& tok() const { return tok_; }
  void advance() { tok_ = lex(); }

 private:
  [[noreturn]] void fail(const std::string& msg, int line, int col) {
    throw ParseError(msg, line, col);
  }

  Token lex() {
    for (;;) {
      if (pos_ >= src_.size()) return {Token::Kind::End, "", line_, col_};
      char c = src_[pos_];
      if (c == '\n') {
        ++pos_;
        ++line_;
        col_ = 1;
      } else if (c == ' ' || c == '\t' || c == '\r') {
        ++pos_;
        ++col_;
      } else if (c == '-' && pos_ + 1 < src_.size() &&
                 src_[pos_ + 1] == '-') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
    int line = line_, col = col_;
    char c = src_[pos_];
    auto isid = [](char ch) {
      return (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
             (ch >= '0' && ch <= '9') || ch == '_';
    };
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') {
      std::string t;
      while (pos_ < src_.size() && isid(src_[pos_])) {
        t += src_[pos_++];
        ++col_;
      }
      return {Token::Kind::Ident, std::move(t), line, col};
    }
    if ((c >= '0' && c <= '9') ||
        (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] >= '0' &&
         src_[pos_ + 1] <= '9')) {
      std::string t;
      t += src_[pos_++];
      ++col_;
      while (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') {
        t += src_[pos_++];
        ++col_;
      }
      return {Token::Kind::Number, std::move(t), line, col};
    }
    if (c == '"') {
      ++pos_;
      ++col_;
      std::string t;
      while (true) {
        if (pos_ >= src_.size()) fail("unterminated string", line, col);
        char d = src_[pos_++];
        ++col_;
        if (d == '"') break;
        if (d == '\n') fail("unterminated string", line, col);
        if (d == '\\') {
          if (pos_ >= src_.size()) fail("unterminated string", line, col);
          char e = src_[pos_++];
          ++col_;
          switch (e) {
            case '"':
              t += '"';
              break;
            case '\\':
              t += '\\';
              break;
            case 'n':
              t += '\n';
              break;
            case 't':
              t += '\t';
              break;
            default:
              fail(std::string("unknown escape '\\") + e + "'", line_, col_);
          }
        } else {
          t += d;
        }
      }
      return {Token::Kind::Str, std::move(t), line, col};
    }
    if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
      pos_ += 2;
      col_ += 2;
      return {Token::Kind::Punct, "->", line, col};
    }
    if (std::string("{}=;:,.").find(c) != std::string::npos) {
      ++pos_;
      ++col_;
      return {Token::Kind::Punct, std::string(1, c), line, col};
    }
    fail(std::string("unexpected character '") + c + "'", line, col);
  }

  const std::string& src_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
};

class Parser {
 public:
  Parser(const std::string& text, const FileLoader& loader, int fuel)
      : lx_(text), loader_(loader), fuel_(fuel) {}

  Program run() {
    while (tok().kind != Token::Kind::End) {
      if (at_kw("schema")) {
        parse_schema();
      } else if (at_kw("mapping")) {
        parse_mapping();
      } else if (at_kw("query")) {
        parse_query();
      } else if (at_kw("instance")) {
        parse_instance();
      } else {
        fail("expected a declaration (schema, mapping, query or instance)");
      }
    }
    return std::move(prog_);
  }

 private:
  const Token& tok() const { return lx_.tok(); }
  void advance() { lx_.advance(); }

  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError(msg, tok().line, tok().col);
  }
  [[noreturn]] void fail_at(const std::string& msg, const Token& t) {
    throw ParseError(msg, t.line, t.col);
  }

  bool at_kw(const char* kw) const {
    return tok().kind == Token::Kind::Ident && tok().text == kw;
  }
  bool accept_kw(const char* kw) {
    if (!at_kw(kw)) return false;
    advance();
    return true;
  }
  void expect_kw(const char* kw) {
    if (!accept_kw(kw)) fail(std::string("expected '") + kw + "'");
  }
  bool at_punct(const char* p) const {
    return tok().kind == Token::Kind::Punct && tok().text == p;
  }
  bool accept_punct(const char* p) {
    if (!at_punct(p)) return false;
    advance();
    return true;
  }
  void expect_punct(const char* p) {
    if (!accept_punct(p)) fail(std::string("expected '") + p + "'");
  }
  std::string expect_ident(const char* what) {
    if (tok().kind != Token::Kind::Ident) {
      fail(std::string("expected ") + what);
    }
    std::string t = tok().text;
    advance();
    return t;
  }

  void declare(DeclKind k, const std::string& name, const Token& at) {
    if (prog_.schemas.count(name) || prog_.mappings.count(name) ||
        prog_.queries.count(name) || prog_.instances.count(name)) {
      fail_at("name '" + name + "' already declared", at);
    }
    prog_.order.emplace_back(k, name);
  }

  Path parse_path() {
    Path p;
    p.start = expect_ident("a node name to start a path");
    while (accept_punct(".")) {
      p.edges.push_back(expect_ident("an edge name"));
    }
    return p;
  }

  BaseType parse_type() {
    Token t = tok();
    std::string n = expect_ident("a type (String, Nat or Int)");
    if (n == "String") return BaseType::String;
    if (n == "Nat") return BaseType::Nat;
    if (n == "Int") return BaseType::Int;
    fail_at("unknown type '" + n + "' (String, Nat or Int)", t);
  }

  // Any structural throw while assembling a declaration becomes a parse
  // error at the declaration's head, keeping the engine's description.
  template <typename F>
  auto structural(const Token& at, const std::string& what, F&& fn) {
    try {
      return fn();
    } catch (const ParseError&) {
      throw;
    } catch (const FqlError& e) {
      fail_at(what + ": " + e.what(), at);
    }
  }

  void parse_schema() {
    Token head = tok();
    expect_kw("schema");
    Token nt = tok();
    std::string name = expect_ident("a schema name");
    expect_punct("=");
    expect_punct("{");
    Graph g;
    std::vector<PathEquation> eqs;
    std::vector<AttrDecl> attrs;
    while (!at_punct("}")) {
      Token st = tok();
      if (accept_kw("nodes")) {
        do {
          std::string n = expect_ident("a node name");
          structural(st, "node '" + n + "'", [&] { g.add_node(n); });
        } while (accept_punct(","));
        expect_punct(";");
      } else if (accept_kw("edges")) {
        do {
          std::string e = expect_ident("an edge name");
          expect_punct(":");
          std::string src = expect_ident("a source node");
          expect_punct("->");
          std::string dst = expect_ident("a target node");
          structural(st, "edge '" + e + "'",
                     [&] { g.add_edge(e, src, dst); });
        } while (accept_punct(","));
        expect_punct(";");
      } else if (accept_kw("equations")) {
        do {
          Path l = parse_path();
          expect_punct("=");
          Path r = parse_path();
          eqs.emplace_back(std::move(l), std::move(r));
        } while (accept_punct(","));
        expect_punct(";");
      } else if (accept_kw("attributes")) {
        do {
          std::string node = expect_ident("a node name");
          expect_punct(".");
          std::string attr = expect_ident("an attribute name");
          expect_punct(":");
          BaseType ty = parse_type();
          attrs.push_back({attr, node, ty});
        } while (accept_punct(","));
        expect_punct(";");
      } else {
        fail("expected nodes, edges, equations or attributes");
      }
    }
    expect_punct("}");
    SigPtr sig = structural(head, "schema '" + name + "'", [&] {
      return make_signature(std::move(g), std::move(eqs), std::move(attrs),
                            fuel_);
    });
    declare(DeclKind::Schema, name, nt);
    prog_.schemas[name] = {name, std::move(sig)};
  }

  const SchemaDecl& lookup_schema(const std::string& n, const Token& at) {
    auto it = prog_.schemas.find(n);
    if (it == prog_.schemas.end()) fail_at("unknown schema '" + n + "'", at);
    return it->second;
  }

  void parse_mapping() {
    Token head = tok();
    expect_kw("mapping");
    Token nt = tok();
    std::string name = expect_ident("a mapping name");
    expect_punct(":");
    Token srct = tok();
    std::string src = expect_ident("a source schema");
    expect_punct("->");
    Token tgtt = tok();
    std::string tgt = expect_ident("a target schema");
    expect_punct("=");
    expect_punct("{");
    TypedSignatureMorphism f;
    f.source = lookup_schema(src, srct).sig;
    f.target = lookup_schema(tgt, tgtt).sig;
    while (!at_punct("}")) {
      if (accept_kw("node")) {
        do {
          Token t = tok();
          std::string a = expect_ident("a source node");
          expect_punct("->");
          std::string b = expect_ident("a target node");
          if (!f.node_map.emplace(a, b).second) {
            fail_at("node '" + a + "' mapped twice", t);
          }
        } while (accept_punct(","));
        expect_punct(";");
      } else if (accept_kw("edge")) {
        do {
          Token t = tok();
          std::string e = expect_ident("a source edge");
          expect_punct("->");
          Path p = parse_path();
          if (!f.edge_map.emplace(e, std::move(p)).second) {
            fail_at("edge '" + e + "' mapped twice", t);
          }
        } while (accept_punct(","));
        expect_punct(";");
      } else if (accept_kw("attr")) {
        do {
          Token t = tok();
          std::string a = expect_ident("a source attribute");
          expect_punct("->");
          std::string b = expect_ident("a target attribute");
          if (!f.attr_map.emplace(a, b).second) {
            fail_at("attribute '" + a + "' mapped twice", t);
          }
        } while (accept_punct(","));
        expect_punct(";");
      } else {
        fail("expected node, edge or attr");
      }
    }
    expect_punct("}");
    structural(head, "mapping '" + name + "'",
               [&] { require_valid(f, "mapping '" + name + "'"); });
    declare(DeclKind::Mapping, name, nt);
    prog_.mappings[name] = {name, src, tgt, std::move(f)};
  }

  const MappingDecl& lookup_mapping(const std::string& n, const Token& at) {
    auto it = prog_.mappings.find(n);
    if (it == prog_.mappings.end()) fail_at("unknown mapping '" + n + "'", at);
    return it->second;
  }

  void parse_query() {
    expect_kw("query");
    Token nt = tok();
    std::string name = expect_ident("a query name");
    expect_punct("=");
    expect_kw("sigma");
    Token ht = tok();
    std::string h = expect_ident("a mapping name");
    expect_kw("pi");
    Token gt = tok();
    std::string g = expect_ident("a mapping name");
    expect_kw("delta");
    Token ft = tok();
    std::string fnm = expect_ident("a mapping name");
    expect_punct(";");
    Query q{lookup_mapping(fnm, ft).morphism, lookup_mapping(g, gt).morphism,
            lookup_mapping(h, ht).morphism};
    if (q.delta_leg.source != q.pi_leg.source) {
      fail_at("the delta and pi legs must share their source schema", gt);
    }
    if (q.pi_leg.target != q.sigma_leg.source) {
      fail_at("the pi leg must land in the sigma leg's source schema", ht);
    }
    declare(DeclKind::Query, name, nt);
    prog_.queries[name] = {name, h, g, fnm, std::move(q)};
  }

  std::string parse_id() {
    if (tok().kind == Token::Kind::Ident ||
        tok().kind == Token::Kind::Number ||
        tok().kind == Token::Kind::Str) {
      std::string t = tok().text;
      advance();
      return t;
    }
    fail("expected a row ID");
  }

  Value parse_value(BaseType ty) {
    Token t = tok();
    switch (ty) {
      case BaseType::String:
        if (t.kind != Token::Kind::Str) {
          fail("expected a quoted string value");
        }
        advance();
        return Value{t.text};
      case BaseType::Nat: {
        if (t.kind != Token::Kind::Number || t.text[0] == '-') {
          fail("expected a nonnegative number");
        }
        advance();
        std::uint64_t v = 0;
        auto [p, ec] =
            std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc() || p != t.text.data() + t.text.size()) {
          fail_at("number out of range", t);
        }
        return Value{v};
      }
      case BaseType::Int: {
        if (t.kind != Token::Kind::Number) fail("expected a number");
        advance();
        std::int64_t v = 0;
        auto [p, ec] =
            std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc() || p != t.text.data() + t.text.size()) {
          fail_at("number out of range", t);
        }
        return Value{v};
      }
    }
    fail("unreachable value type");
  }

  void parse_instance() {
    Token head = tok();
    expect_kw("instance");
    Token nt = tok();
    std::string name = expect_ident("an instance name");
    expect_kw("on");
    Token st = tok();
    std::string schema = expect_ident("a schema name");
    SigPtr sig = lookup_schema(schema, st).sig;

    if (accept_kw("from")) {
      Token pt = tok();
      if (pt.kind != Token::Kind::Str) fail("expected a quoted file path");
      advance();
      expect_punct(";");
      if (!loader_) {
        fail_at("no file loader available for 'from'", pt);
      }
      std::string text;
      try {
        text = loader_(pt.text);
      } catch (const std::exception& e) {
        fail_at("cannot read '" + pt.text + "': " + e.what(), pt);
      }
      Instance inst = structural(pt, "instance '" + name + "'", [&] {
        nlohmann::json j;
        try {
          j = nlohmann::json::parse(text);
        } catch (const std::exception& e) {
          throw InstanceError(std::string("not valid JSON: ") + e.what());
        }
        return instance_from_json(sig, j);
      });
      declare(DeclKind::Instance, name, nt);
      prog_.instances[name] = {name, schema, std::move(inst), pt.text};
      return;
    }

    expect_punct("=");
    expect_punct("{");
    Instance inst = empty_instance(sig);
    while (!at_punct("}")) {
      if (accept_kw("node")) {
        Token t = tok();
        std::string n = expect_ident("a node name");
        if (!sig->graph().has_node(n)) {
          fail_at("schema '" + schema + "' has no node '" + n + "'", t);
        }
        expect_punct("{");
        if (!at_punct("}")) {
          do {
            inst.nodes[n].push_back(parse_id());
          } while (accept_punct(","));
        }
        expect_punct("}");
      } else if (accept_kw("edge")) {
        Token t = tok();
        std::string e = expect_ident("an edge name");
        if (!sig->graph().has_edge(e)) {
          fail_at("schema '" + schema + "' has no edge '" + e + "'", t);
        }
        expect_punct("{");
        if (!at_punct("}")) {
          do {
            Token xt = tok();
            Id x = parse_id();
            expect_punct("->");
            Id y = parse_id();
            if (!inst.edges[e].emplace(x, y).second) {
              fail_at("edge '" + e + "' maps '" + x + "' twice", xt);
            }
          } while (accept_punct(","));
        }
        expect_punct("}");
      } else if (accept_kw("attr")) {
        Token t = tok();
        std::string a = expect_ident("an attribute name");
        if (!sig->has_attribute(a)) {
          fail_at("schema '" + schema + "' has no attribute '" + a + "'", t);
        }
        expect_punct("{");
        if (!at_punct("}")) {
          do {
            Token xt = tok();
            Id x = parse_id();
            expect_punct("->");
            Value v = parse_value(sig->attribute(a).type);
            if (!inst.attrs[a].emplace(x, std::move(v)).second) {
              fail_at("attribute '" + a + "' set at '" + x + "' twice", xt);
            }
          } while (accept_punct(","));
        }
        expect_punct("}");
      } else {
        fail("expected node, edge or attr");
      }
    }
    expect_punct("}");
    (void)head;
    declare(DeclKind::Instance, name, nt);
    prog_.instances[name] = {name, schema, std::move(inst), std::nullopt};
  }

  Lexer lx_;
  FileLoader loader_;
  int fuel_;
  Program prog_;
};

bool ident_shaped(const std::string& s) {
  if (s.empty()) return false;
  auto head = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  };
  auto rest = [&](char c) { return head(c) || (c >= '0' && c <= '9'); };
  if (!head(s[0])) return false;
  for (char c : s) {
    if (!rest(c)) return false;
  }
  return true;
}

bool number_shaped(const std::string& s) {
  size_t i = s.size() > 1 && s[0] == '-' ? 1 : 0;
  if (i >= s.size()) return false;
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  return true;
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\t':
        out += "\\t";
        break;
      default:
        out += c;
    }
  }
  out += '"';
  return out;
}

std::string print_id(const std::string& s) {
  if (ident_shaped(s) || number_shaped(s)) return s;
  return quoted(s);
}

std::string print_value(const Value& v) {
  if (std::holds_alternative<std::string>(v)) {
    return quoted(std::get<std::string>(v));
  }
  return render_value(v);
}

std::string to_text(BaseType t) { return to_string(t); }

void print_schema(const SchemaDecl& d, std::string& out) {
  const TypedSignature& s = *d.sig;
  out += "schema " + d.name + " = {\n";
  if (!s.nodes().empty()) {
    out += "  nodes ";
    for (size_t i = 0; i < s.nodes().size(); ++i) {
      if (i) out += ", ";
      out += s.nodes()[i];
    }
    out += ";\n";
  }
  if (!s.edges().empty()) {
    out += "  edges ";
    for (size_t i = 0; i < s.edges().size(); ++i) {
      if (i) out += ", ";
      const EdgeDecl& e = s.edges()[i];
      out += e.name + ": " + e.src + " -> " + e.dst;
    }
    out += ";\n";
  }
  if (!s.equations().empty()) {
    out += "  equations ";
    for (size_t i = 0; i < s.equations().size(); ++i) {
      if (i) out += ", ";
      out += render_path(s.equations()[i].first) + " = " +
             render_path(s.equations()[i].second);
    }
    out += ";\n";
  }
  if (!s.attributes().empty()) {
    out += "  attributes ";
    for (size_t i = 0; i < s.attributes().size(); ++i) {
      if (i) out += ", ";
      const AttrDecl& a = s.attributes()[i];
      out += a.node + "." + a.name + " : " + to_text(a.type);
    }
    out += ";\n";
  }
  out += "}\n";
}

void print_mapping(const MappingDecl& d, std::string& out) {
  out += "mapping " + d.name + " : " + d.source + " -> " + d.target +
         " = {\n";
  const TypedSignature& s = *d.morphism.source;
  if (!s.nodes().empty()) {
    out += "  node ";
    for (size_t i = 0; i < s.nodes().size(); ++i) {
      if (i) out += ", ";
      out += s.nodes()[i] + " -> " + d.morphism.node_map.at(s.nodes()[i]);
    }
    out += ";\n";
  }
  if (!s.edges().empty()) {
    out += "  edge ";
    for (size_t i = 0; i < s.edges().size(); ++i) {
      if (i) out += ", ";
      const std::string& e = s.edges()[i].name;
      out += e + " -> " + render_path(d.morphism.edge_map.at(e));
    }
    out += ";\n";
  }
  if (!s.attributes().empty()) {
    out += "  attr ";
    for (size_t i = 0; i < s.attributes().size(); ++i) {
      if (i) out += ", ";
      const std::string& a = s.attributes()[i].name;
      out += a + " -> " + d.morphism.attr_map.at(a);
    }
    out += ";\n";
  }
  out += "}\n";
}

void print_instance(const InstanceDecl& d, std::string& out) {
  if (d.from_file) {
    out += "instance " + d.name + " on " + d.schema + " from " +
           quoted(*d.from_file) + ";\n";
    return;
  }
  out += "instance " + d.name + " on " + d.schema + " = {\n";
  const TypedSignature& s = *d.instance.sig;
  for (const auto& n : s.nodes()) {
    const auto& rows = d.instance.nodes.at(n);
    if (rows.empty()) continue;
    out += "  node " + n + " { ";
    for (size_t i = 0; i < rows.size(); ++i) {
      if (i) out += ", ";
      out += print_id(rows[i]);
    }
    out += " }\n";
  }
  for (const auto& e : s.edges()) {
    const auto& m = d.instance.edges.at(e.name);
    if (m.empty()) continue;
    out += "  edge " + e.name + " { ";
    bool first = true;
    for (const auto& [x, y] : m) {
      if (!first) out += ", ";
      first = false;
      out += print_id(x) + " -> " + print_id(y);
    }
    out += " }\n";
  }
  for (const auto& a : s.attributes()) {
    const auto& m = d.instance.attrs.at(a.name);
    if (m.empty()) continue;
    out += "  attr " + a.name + " { ";
    bool first = true;
    for (const auto& [x, v] : m) {
      if (!first) out += ", ";
      first = false;
      out += print_id(x) + " -> " + print_value(v);
    }
    out += " }\n";
  }
  out += "}\n";
}

}  // namespace

Program parse_program(const std::string& text, const FileLoader& loader,
                      int fuel) {
  Parser p(text, loader, fuel);
  return p.run();
}

std::string print_program(const Program& p) {
  std::string out;
  bool first = true;
  for (const auto& [kind, name] : p.order) {
    if (!first) out += "\n";
    first = false;
    switch (kind) {
      case DeclKind::Schema:
        print_schema(p.schemas.at(name), out);
        break;
      case DeclKind::Mapping:
        print_mapping(p.mappings.at(name), out);
        break;
      case DeclKind::Query: {
        const QueryDecl& d = p.queries.at(name);
        out += "query " + d.name + " = sigma " + d.sigma_name + " pi " +
               d.pi_name + " delta " + d.delta_name + ";\n";
        break;
      }
      case DeclKind::Instance:
        print_instance(p.instances.at(name), out);
        break;
    }
  }
  return out;
}

bool programs_equal(const Program& a, const Program& b) {
  if (a.order != b.order) return false;
  for (const auto& [kind, name] : a.order) {
    switch (kind) {
      case DeclKind::Schema: {
        const auto& x = a.schemas.at(name);
        const auto& y = b.schemas.at(name);
        if (!same_shape(*x.sig, *y.sig)) return false;
        break;
      }
      case DeclKind::Mapping: {
        const auto& x = a.mappings.at(name);
        const auto& y = b.mappings.at(name);
        if (x.source != y.source || x.target != y.target) return false;
        if (x.morphism.node_map != y.morphism.node_map) return false;
        if (x.morphism.edge_map != y.morphism.edge_map) return false;
        if (x.morphism.attr_map != y.morphism.attr_map) return false;
        break;
      }
      case DeclKind::Query: {
        const auto& x = a.queries.at(name);
        const auto& y = b.queries.at(name);
        if (x.sigma_name != y.sigma_name || x.pi_name != y.pi_name ||
            x.delta_name != y.delta_name) {
          return false;
        }
        break;
      }
      case DeclKind::Instance: {
        const auto& x = a.instances.at(name);
        const auto& y = b.instances.at(name);
        if (x.schema != y.schema || x.from_file != y.from_file) return false;
        if (x.instance.nodes != y.instance.nodes) return false;
        if (x.instance.edges != y.instance.edges) return false;
        if (x.instance.attrs != y.instance.attrs) return false;
        break;
      }
    }
  }
  return true;
}

namespace {

template <typename F>
int guarded(std::ostream& err, F&& fn) {
  try {
    return fn();
  } catch (const FinitenessUnknownError& e) {
    err << "unknown: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    err << "parse error at " << e.line << ":" << e.col << ": " << e.what()
        << "\n";
    return 1;
  } catch (const FqlError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

void write_instance(const Instance& I, std::ostream& out,
                    const RunOptions& opts) {
  namespace fs = std::filesystem;
  if (opts.format == "csv") {
    std::map<std::string, std::string> files = instance_to_csv(I);
    if (opts.out_dir.empty()) {
      for (const auto& [node, text] : files) {
        out << "-- " << node << "\n" << text;
      }
    } else {
      fs::create_directories(opts.out_dir);
      for (const auto& [node, text] : files) {
        fs::path p = fs::path(opts.out_dir) / (node + ".csv");
        std::ofstream f(p);
        f << text;
        out << "wrote " << p.string() << "\n";
      }
    }
    return;
  }
  std::string text = instance_to_json(I).dump(2);
  if (opts.out_dir.empty()) {
    out << text << "\n";
  } else {
    fs::create_directories(opts.out_dir);
    fs::path p = fs::path(opts.out_dir) / "result.json";
    std::ofstream f(p);
    f << text << "\n";
    out << "wrote " << p.string() << "\n";
  }
}

}  // namespace

int run_check(const Program& p, std::ostream& out, std::ostream& err,
              const RunOptions& opts) {
  return guarded(err, [&]() -> int {
    bool bad = false, gave_up = false;
    for (const auto& [kind, name] : p.order) {
      switch (kind) {
        case DeclKind::Schema: {
          const SchemaDecl& d = p.schemas.at(name);
          if (!d.sig->complete()) {
            out << "schema " << name
                << ": equation completion ran out of fuel\n";
            gave_up = true;
            break;
          }
          out << "schema " << name << ": ok (" << d.sig->nodes().size()
              << " nodes, " << d.sig->edges().size() << " edges, "
              << d.sig->equations().size() << " equations, "
              << d.sig->attributes().size() << " attributes)\n";
          break;
        }
        case DeclKind::Mapping: {
          const MappingDecl& d = p.mappings.at(name);
          ValidationReport rep = check_morphism(d.morphism);
          if (rep.ok()) {
            out << "mapping " << name << ": ok\n";
          } else {
            out << "mapping " << name << ":\n" << rep.to_string();
            bad = true;
          }
          break;
        }
        case DeclKind::Query: {
          const QueryDecl& d = p.queries.at(name);
          try {
            ValidationReport rep = check_query(d.query, opts.fuel);
            if (rep.ok()) {
              out << "query " << name << ": ok\n";
            } else {
              out << "query " << name << ":\n" << rep.to_string();
              bad = true;
            }
          } catch (const FinitenessUnknownError& e) {
            out << "query " << name << ": unknown, " << e.what() << "\n";
            gave_up = true;
          }
          break;
        }
        case DeclKind::Instance: {
          const InstanceDecl& d = p.instances.at(name);
          ValidationReport rep = validate(d.instance);
          if (rep.ok()) {
            out << "instance " << name << ": ok";
            size_t rows = 0;
            for (const auto& [n, v] : d.instance.nodes) rows += v.size();
            out << " (" << rows << " rows)\n";
          } else {
            out << "instance " << name << ":\n" << rep.to_string();
            bad = true;
          }
          break;
        }
      }
    }
    return bad ? 1 : gave_up ? 2 : 0;
  });
}

int run_eval(const Program& p, const std::string& query_name,
             const std::string& instance_name, std::ostream& out,
             std::ostream& err, const RunOptions& opts) {
  auto qit = p.queries.find(query_name);
  if (qit == p.queries.end()) {
    err << "no query named '" << query_name << "'\n";
    return 3;
  }
  if (opts.format != "json" && opts.format != "csv") {
    err << "unknown format '" << opts.format << "' (json or csv)\n";
    return 3;
  }
  const Query& q = qit->second.query;

  Instance I;
  auto iit = p.instances.find(instance_name);
  if (iit != p.instances.end()) {
    I = iit->second.instance;
  } else if (opts.loader) {
    std::string text;
    try {
      text = opts.loader(instance_name);
    } catch (const std::exception&) {
      err << "no instance named '" << instance_name
          << "' and no readable file at that path\n";
      return 3;
    }
    int rc = guarded(err, [&]() -> int {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(text);
      } catch (const std::exception& e) {
        throw InstanceError("'" + instance_name +
                            "' is not valid JSON: " + e.what());
      }
      I = instance_from_json(q.source(), j);
      return 0;
    });
    if (rc != 0) return rc;
  } else {
    err << "no instance named '" << instance_name << "'\n";
    return 3;
  }

  return guarded(err, [&]() -> int {
    if (I.sig != q.source()) {
      if (!same_shape(*I.sig, *q.source())) {
        throw InstanceError("instance '" + instance_name +
                            "' lives on a different schema than the query "
                            "reads");
      }
      I = rehome(I, q.source());
    }
    KeyGen keys(opts.seed);
    EvalOptions eo;
    eo.fuel = opts.fuel;
    Instance res = eval(q, I, keys, eo);
    write_instance(res, out, opts);
    return 0;
  });
}

int run_compose(const Program& p, const std::string& outer_name,
                const std::string& inner_name, const std::string& result_name,
                std::ostream& out, std::ostream& err,
                const RunOptions& opts) {
  auto oit = p.queries.find(outer_name);
  auto iit = p.queries.find(inner_name);
  if (oit == p.queries.end() || iit == p.queries.end()) {
    err << "no query named '"
        << (oit == p.queries.end() ? outer_name : inner_name) << "'\n";
    return 3;
  }
  return guarded(err, [&]() -> int {
    EvalOptions eo;
    eo.fuel = opts.fuel;
    Query qc = compose_queries(oit->second.query, iit->second.query, eo);

    Program frag;
    auto taken = [&](const std::string& n) {
      return p.schemas.count(n) || p.mappings.count(n) ||
             p.queries.count(n) || p.instances.count(n) ||
             frag.schemas.count(n) || frag.mappings.count(n) ||
             frag.queries.count(n);
    };
    auto fresh = [&](std::string base) {
      if (!taken(base)) return base;
      for (int i = 2;; ++i) {
        std::string n = base + "_" + std::to_string(i);
        if (!taken(n)) return n;
      }
    };
    auto schema_name = [&](SigPtr sig, const std::string& hint) {
      for (const auto& [n, d] : p.schemas) {
        if (d.sig == sig) return n;
      }
      for (const auto& [n, d] : frag.schemas) {
        if (d.sig == sig) return n;
      }
      std::string n = fresh(hint);
      frag.order.emplace_back(DeclKind::Schema, n);
      frag.schemas[n] = {n, sig};
      return n;
    };

    std::string sn = schema_name(qc.delta_leg.target, result_name + "_in");
    std::string un = schema_name(qc.delta_leg.source, result_name + "_src");
    std::string vn = schema_name(qc.pi_leg.target, result_name + "_mid");
    std::string tn = schema_name(qc.sigma_leg.target, result_name + "_out");

    std::string dn = fresh(result_name + "_delta");
    frag.order.emplace_back(DeclKind::Mapping, dn);
    frag.mappings[dn] = {dn, un, sn, qc.delta_leg};
    std::string pn = fresh(result_name + "_pi");
    frag.order.emplace_back(DeclKind::Mapping, pn);
    frag.mappings[pn] = {pn, un, vn, qc.pi_leg};
    std::string hn = fresh(result_name + "_sigma");
    frag.order.emplace_back(DeclKind::Mapping, hn);
    frag.mappings[hn] = {hn, vn, tn, qc.sigma_leg};

    std::string qn = fresh(result_name);
    frag.order.emplace_back(DeclKind::Query, qn);
    frag.queries[qn] = {qn, hn, pn, dn, qc};

    out << print_program(frag);
    return 0;
  });
}

int run_sql(const Program& p, const std::string& query_name, bool plan,
            std::ostream& out, std::ostream& err, const RunOptions& opts) {
  auto qit = p.queries.find(query_name);
  if (qit == p.queries.end()) {
    err << "no query named '" << query_name << "'\n";
    return 3;
  }
  return guarded(err, [&]() -> int {
    EvalOptions eo;
    eo.fuel = opts.fuel;
    SqlScript sc = sql_query(qit->second.query, "in_", "out_", eo);
    if (plan) {
      out << plan_json(sc) << "\n";
    } else {
      out << render(sc);
    }
    return 0;
  });
}

}  // namespace fql
