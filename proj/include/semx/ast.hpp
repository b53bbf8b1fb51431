#pragma once

// Body language of methods and scripts. Bodies only send messages, build
// instances and read literals/parameters/fields; the dispatch order they
// produce is the only observable behavior.

#include <compare>
#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace semx {

struct SourceLoc {
  int line = 0;
  int column = 0;

  bool known() const { return line > 0; }
  auto operator<=>(const SourceLoc&) const = default;
};

/// Selector name plus arity. Rendered as "name/arity".
struct Signature {
  std::string name;
  int arity = 0;

  std::string str() const { return name + "/" + std::to_string(arity); }
  auto operator<=>(const Signature&) const = default;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct SelfRef {};
struct ParamRef { std::string name; };
struct FieldRef { std::string name; };
struct New {
  std::string cls;
  std::vector<ExprPtr> args;
};
struct IntLiteral { std::int64_t value = 0; };
struct StringLiteral { std::string value; };
struct Send {
  ExprPtr receiver;
  Signature selector;
  std::vector<ExprPtr> args;
};

struct Expr {
  std::variant<SelfRef, ParamRef, FieldRef, New, IntLiteral, StringLiteral, Send> node;
  SourceLoc loc;
};

struct ExprStmt { ExprPtr expr; };
struct Return { ExprPtr expr; };
struct Fail { std::string tag; };

struct Stmt {
  std::variant<ExprStmt, Return, Fail> node;
  SourceLoc loc;
};

template <class Node>
ExprPtr make_expr(Node node, SourceLoc loc = {}) {
  return std::make_shared<const Expr>(Expr{std::move(node), loc});
}

/// Canonical single-line rendering, used by the export and diagnostics.
std::string render(const Expr& expr);
std::string render(const Stmt& stmt);

}  // namespace semx
