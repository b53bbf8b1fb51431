#include "semx/frontend.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace semx {

SourceFile SourceFile::read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return {path, buf.str()};
}

std::string ParseDiagnostic::format(std::string_view path) const {
  std::ostringstream os;
  os << path << ':' << line << ':' << column << ": "
     << (kind == ParseDiagnosticKind::Syntax ? "syntax error" : "resolution error") << ": "
     << message;
  return os.str();
}

namespace {

// ---------------------------------------------------------------------------
// Lexer

enum class Tok { Ident, Int, String, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourceLoc loc;
};

struct SyntaxError {
  SourceLoc loc;
  std::string message;
};

const std::set<std::string, std::less<>> kKeywords = {
    "package", "imports", "class",  "extends", "extension", "method",
    "script",  "return",  "fail",   "self",    "new",       "field"};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    SourceLoc last_end{1, 1};
    for (;;) {
      skip_trivia();
      if (pos_ >= src_.size()) break;
      Token tok = next();
      last_end = here();
      out.push_back(std::move(tok));
    }
    out.push_back(Token{Tok::End, "", last_end});
    return out;
  }

 private:
  SourceLoc here() const { return {line_, col_}; }

  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_trivia() {
    while (pos_ < src_.size()) {
      char c = peek();
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (pos_ < src_.size() && peek() != '\n') advance();
      } else {
        break;
      }
    }
  }

  Token next() {
    SourceLoc loc = here();
    char c = peek();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::string text;
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') {
        text += peek();
        advance();
      }
      return {Tok::Ident, std::move(text), loc};
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string text;
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        text += peek();
        advance();
      }
      return {Tok::Int, std::move(text), loc};
    }
    if (c == '\'' || c == '"') {
      char quote = c;
      advance();
      std::string text;
      for (;;) {
        if (pos_ >= src_.size() || peek() == '\n')
          throw SyntaxError{loc, "unterminated string literal"};
        char ch = peek();
        advance();
        if (ch == quote) break;
        if (ch == '\\') {
          if (pos_ >= src_.size()) throw SyntaxError{loc, "unterminated string literal"};
          ch = peek();
          advance();
          if (ch == 'n') ch = '\n';
          else if (ch == 't') ch = '\t';
        }
        text += ch;
      }
      return {Tok::String, std::move(text), loc};
    }
    if (std::string_view("{}(),;./").find(c) != std::string_view::npos) {
      advance();
      return {Tok::Punct, std::string(1, c), loc};
    }
    throw SyntaxError{loc, std::string("unexpected character '") + c + "'"};
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  WorldBuilder parse() {
    while (!at_end()) parse_package();
    return std::move(builder_);
  }

 private:
  const Token& cur() const { return toks_[pos_]; }
  bool at_end() const { return cur().kind == Tok::End; }

  std::string describe_current() const {
    switch (cur().kind) {
      case Tok::End: return "end of input";
      case Tok::String: return "string literal";
      case Tok::Int: return "integer '" + cur().text + "'";
      default: return "'" + cur().text + "'";
    }
  }

  [[noreturn]] void error(const std::string& expected) const {
    throw SyntaxError{cur().loc, "expected " + expected + ", found " + describe_current()};
  }

  bool is_punct(char c) const { return cur().kind == Tok::Punct && cur().text[0] == c; }
  bool is_keyword(std::string_view kw) const {
    return cur().kind == Tok::Ident && cur().text == kw;
  }

  bool accept_punct(char c) {
    if (!is_punct(c)) return false;
    ++pos_;
    return true;
  }

  bool accept_keyword(std::string_view kw) {
    if (!is_keyword(kw)) return false;
    ++pos_;
    return true;
  }

  void expect_punct(char c) {
    if (!accept_punct(c)) error(std::string("'") + c + "'");
  }

  void expect_keyword(std::string_view kw) {
    if (!accept_keyword(kw)) error("'" + std::string(kw) + "'");
  }

  std::string expect_ident(const char* what = "identifier") {
    if (cur().kind != Tok::Ident || kKeywords.contains(cur().text)) error(what);
    return toks_[pos_++].text;
  }

  int expect_arity() {
    if (cur().kind != Tok::Int) error("arity");
    int value = 0;
    const std::string& text = cur().text;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
      throw SyntaxError{cur().loc, "arity out of range"};
    ++pos_;
    return value;
  }

  ExtensionRef parse_extref() {
    ExtensionRef ref;
    ref.package = expect_ident("extension reference");
    expect_punct('.');
    ref.name = expect_ident("extension name");
    return ref;
  }

  std::vector<ExtensionRef> parse_imports_opt() {
    std::vector<ExtensionRef> refs;
    if (!accept_keyword("imports")) return refs;
    do {
      refs.push_back(parse_extref());
    } while (accept_punct(','));
    expect_punct(';');
    return refs;
  }

  void parse_package() {
    SourceLoc loc = cur().loc;
    expect_keyword("package");
    package_ = expect_ident("package name");
    expect_punct('{');
    builder_.add_package(package_, parse_imports_opt(), loc);
    while (!accept_punct('}')) {
      if (is_keyword("class")) parse_class();
      else if (is_keyword("extension")) parse_extension();
      else if (is_keyword("script")) parse_script();
      else error("'class', 'extension', 'script' or '}'");
    }
  }

  void parse_class() {
    ClassDef cls;
    cls.loc = cur().loc;
    expect_keyword("class");
    cls.name = expect_ident("class name");
    cls.package = package_;
    if (accept_keyword("extends")) cls.superclass = expect_ident("superclass name");
    if (accept_punct('(')) {
      do {
        cls.fields.push_back(expect_ident("field name"));
      } while (accept_punct(','));
      expect_punct(')');
    }
    expect_punct('{');
    cls.imports = parse_imports_opt();
    std::string name = cls.name;
    builder_.add_class(std::move(cls));
    while (!accept_punct('}')) {
      if (!is_keyword("method")) error("'method' or '}'");
      parse_method(name, ExtensionRef::global());
    }
  }

  void parse_extension() {
    SourceLoc loc = cur().loc;
    expect_keyword("extension");
    ExtensionRef ref{package_, expect_ident("extension name")};
    expect_punct('{');
    builder_.add_extension(ref, loc);
    while (!accept_punct('}')) {
      if (!is_keyword("method")) error("'method' or '}'");
      parse_method(std::nullopt, ref);
    }
  }

  /// `host` is set for class-body methods; extension methods name their
  /// target class as `Class.selector`.
  void parse_method(const std::optional<std::string>& host, const ExtensionRef& ext) {
    MethodDef m;
    m.loc = cur().loc;
    expect_keyword("method");
    if (host) {
      m.cls = *host;
      m.sig.name = expect_ident("selector");
    } else {
      m.cls = expect_ident("target class");
      expect_punct('.');
      m.sig.name = expect_ident("selector");
    }
    expect_punct('/');
    m.sig.arity = expect_arity();
    expect_punct('(');
    if (!is_punct(')')) {
      do {
        m.params.push_back(expect_ident("parameter name"));
      } while (accept_punct(','));
    }
    expect_punct(')');
    if (static_cast<std::size_t>(m.sig.arity) != m.params.size())
      throw SyntaxError{m.loc, "method " + m.sig.str() + " declares " +
                                   std::to_string(m.params.size()) + " parameters"};
    m.ext = ext;
    m.package = package_;
    expect_punct('{');
    m.imports = parse_imports_opt();
    m.body = parse_body();
    builder_.add_method(std::move(m));
  }

  void parse_script() {
    ScriptDef script;
    script.loc = cur().loc;
    expect_keyword("script");
    script.name = expect_ident("script name");
    script.package = package_;
    expect_punct('{');
    script.imports = parse_imports_opt();
    script.body = parse_body();
    builder_.add_script(std::move(script));
  }

  /// Statements up to and including the closing brace.
  std::vector<Stmt> parse_body() {
    std::vector<Stmt> body;
    while (!accept_punct('}')) {
      if (at_end()) error("'}'");
      SourceLoc loc = cur().loc;
      if (accept_keyword("return")) {
        body.push_back(Stmt{Return{parse_expr()}, loc});
      } else if (accept_keyword("fail")) {
        body.push_back(Stmt{Fail{expect_ident("failure tag")}, loc});
      } else {
        body.push_back(Stmt{ExprStmt{parse_expr()}, loc});
      }
      expect_punct(';');
    }
    return body;
  }

  std::vector<ExprPtr> parse_args() {
    std::vector<ExprPtr> args;
    expect_punct('(');
    if (!is_punct(')')) {
      do {
        args.push_back(parse_expr());
      } while (accept_punct(','));
    }
    expect_punct(')');
    return args;
  }

  ExprPtr parse_expr() {
    ExprPtr expr = parse_primary();
    while (is_punct('.')) {
      SourceLoc loc = cur().loc;
      ++pos_;
      std::string selector = expect_ident("selector");
      auto args = parse_args();
      Signature sig{std::move(selector), static_cast<int>(args.size())};
      expr = make_expr(Send{std::move(expr), std::move(sig), std::move(args)}, loc);
    }
    return expr;
  }

  ExprPtr parse_primary() {
    SourceLoc loc = cur().loc;
    if (accept_keyword("self")) return make_expr(SelfRef{}, loc);
    if (accept_keyword("new")) {
      std::string cls = expect_ident("class name");
      return make_expr(New{std::move(cls), parse_args()}, loc);
    }
    if (accept_keyword("field")) return make_expr(FieldRef{expect_ident("field name")}, loc);
    if (cur().kind == Tok::Int) {
      std::int64_t value = 0;
      const std::string& text = cur().text;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
      if (ec != std::errc()) throw SyntaxError{loc, "integer literal out of range"};
      ++pos_;
      return make_expr(IntLiteral{value}, loc);
    }
    if (cur().kind == Tok::String) return make_expr(StringLiteral{toks_[pos_++].text}, loc);
    if (cur().kind == Tok::Ident && !kKeywords.contains(cur().text))
      return make_expr(ParamRef{toks_[pos_++].text}, loc);
    error("expression");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::string package_;
  WorldBuilder builder_;
};

SourceLoc clamp(SourceLoc loc) { return loc.known() ? loc : SourceLoc{1, 1}; }

}  // namespace

ParseResult parse_world(const SourceFile& source) {
  World world;
  try {
    world = Parser(Lexer(source.content).run()).parse().build();
  } catch (const SyntaxError& err) {
    SourceLoc loc = clamp(err.loc);
    return std::vector<ParseDiagnostic>{
        {loc.line, loc.column, err.message, ParseDiagnosticKind::Syntax}};
  }
  ValidationReport report = validate_world(world);
  if (report.ok()) return world;
  std::vector<ParseDiagnostic> diags;
  for (const auto& d : report.diagnostics) {
    SourceLoc loc = clamp(d.loc);
    diags.push_back({loc.line, loc.column, std::string(to_string(d.kind)) + ": " + d.message,
                     ParseDiagnosticKind::Resolution});
  }
  return diags;
}

}  // namespace semx
