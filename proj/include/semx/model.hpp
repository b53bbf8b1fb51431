#pragma once

// World data model: packages, classes, extension groups, methods and
// scripts. A World is built once through WorldBuilder and then only read.

#include "semx/ast.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace semx {

/// Reference to an extension group, `Package.Name`. The distinguished
/// global extension has an empty package and the reserved name "global".
struct ExtensionRef {
  std::string package;
  std::string name;

  static constexpr std::string_view kGlobalName = "global";

  static ExtensionRef global() { return {"", std::string(kGlobalName)}; }
  bool is_global() const { return package.empty() && name == kGlobalName; }
  std::string str() const { return is_global() ? name : package + "." + name; }

  auto operator<=>(const ExtensionRef&) const = default;
};

struct MethodId {
  std::size_t index = 0;
  auto operator<=>(const MethodId&) const = default;
};

struct ScriptId {
  std::string package;
  std::string name;
  auto operator<=>(const ScriptId&) const = default;
};

/// A stack frame is identified by the method or script it executes.
using FrameRef = std::variant<MethodId, ScriptId>;
using CallStack = std::vector<FrameRef>;

struct ClassDef {
  std::string name;
  std::string package;
  std::optional<std::string> superclass;
  std::vector<std::string> fields;
  std::vector<ExtensionRef> imports;
  SourceLoc loc;
};

struct MethodDef {
  std::string cls;
  Signature sig;
  ExtensionRef ext;
  /// Declaring package: the class's package for regular methods, the
  /// extension's package for extension methods.
  std::string package;
  std::vector<std::string> params;
  std::vector<Stmt> body;
  std::vector<ExtensionRef> imports;
  SourceLoc loc;

  bool is_extension() const { return !ext.is_global(); }
};

struct ExtensionDef {
  ExtensionRef ref;
  std::vector<MethodId> methods;
  SourceLoc loc;
};

struct ScriptDef {
  std::string name;
  std::string package;
  std::vector<ExtensionRef> imports;
  std::vector<Stmt> body;
  SourceLoc loc;

  ScriptId id() const { return {package, name}; }
};

struct PackageDef {
  std::string name;
  std::vector<ExtensionRef> imports;
  std::vector<std::string> classes;
  std::vector<std::string> extensions;
  std::vector<std::string> scripts;
  SourceLoc loc;
};

struct ImportConfig {
  /// Class-level imports of a class also apply to methods of its subclasses.
  bool refinement_inheritance = false;
};

/// Declarations that could not be indexed because their key was taken.
struct DuplicateDecl {
  std::string what;
  std::string name;
  SourceLoc loc;
};

class World {
 public:
  const std::map<std::string, PackageDef>& packages() const { return packages_; }
  const std::map<std::string, ClassDef>& classes() const { return classes_; }
  /// All extension groups, the global one included.
  const std::map<ExtensionRef, ExtensionDef>& extensions() const { return extensions_; }
  const std::vector<MethodDef>& methods() const { return methods_; }
  const std::map<ScriptId, ScriptDef>& scripts() const { return scripts_; }
  const std::vector<DuplicateDecl>& duplicates() const { return duplicates_; }

  const PackageDef* find_package(std::string_view name) const;
  const ClassDef* find_class(std::string_view name) const;
  const ExtensionDef* find_extension(const ExtensionRef& ref) const;
  const ScriptDef* find_script(const ScriptId& id) const;
  /// Scripts named `name` in any package.
  std::vector<ScriptId> scripts_named(std::string_view name) const;

  const MethodDef& method(MethodId id) const { return methods_.at(id.index); }

  /// The partial function method(c, s, e).
  std::optional<MethodId> method_at(std::string_view cls, const Signature& sig,
                                    const ExtensionRef& ext) const;

  const std::string* superclass(std::string_view cls) const;

 private:
  friend class WorldBuilder;

  void reindex();

  std::map<std::string, PackageDef> packages_;
  std::map<std::string, ClassDef> classes_;
  std::map<ExtensionRef, ExtensionDef> extensions_;
  std::vector<MethodDef> methods_;
  std::map<ScriptId, ScriptDef> scripts_;
  std::vector<DuplicateDecl> duplicates_;

  struct CellKey {
    std::string cls;
    Signature sig;
    ExtensionRef ext;
    auto operator<=>(const CellKey&) const = default;
  };
  std::map<CellKey, MethodId> cells_;
};

/// Mutable construction front for World. Adding to a package that does not
/// exist yet creates it implicitly.
class WorldBuilder {
 public:
  WorldBuilder();
  explicit WorldBuilder(World base);

  WorldBuilder& add_package(std::string name, std::vector<ExtensionRef> imports = {},
                            SourceLoc loc = {});
  WorldBuilder& add_class(ClassDef cls);
  WorldBuilder& add_extension(ExtensionRef ref, SourceLoc loc = {});
  MethodId add_method(MethodDef method);
  WorldBuilder& add_script(ScriptDef script);

  World build() const&;
  World build() &&;

 private:
  PackageDef& package(const std::string& name);

  World world_;
  std::set<std::string> declared_packages_;
};

enum class DiagnosticKind {
  CyclicHierarchy,
  UnknownClass,
  UnknownExtension,
  DuplicateMethod,
  ReservedName,
  DuplicateDefinition,
  UnknownName,
  ArityMismatch,
};

std::string_view to_string(DiagnosticKind kind);

struct Diagnostic {
  DiagnosticKind kind;
  std::string entity;
  std::string message;
  SourceLoc loc;
};

struct ValidationReport {
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return diagnostics.empty(); }
};

ValidationReport validate_world(const World& world);

/// Strict superclasses, nearest first. Throws std::invalid_argument for an
/// unknown class.
std::vector<std::string> ancestors(const World& world, std::string_view cls);

/// Strict transitive subclasses. Throws std::invalid_argument for an unknown
/// class.
std::set<std::string> descendants(const World& world, std::string_view cls);

/// Instance layout of `cls`: inherited fields root-first, then its own.
std::vector<std::string> all_fields(const World& world, std::string_view cls);

/// Imports effective in a frame, highest priority first: method, class,
/// (inherited class imports), package. Duplicates and global are dropped.
std::vector<ExtensionRef> effective_imports(const World& world, const FrameRef& frame,
                                            const ImportConfig& config);

/// Human-readable frame name, e.g. "C2.sendRedefinedTo/1" or "script Main.caseA".
std::string describe(const World& world, const FrameRef& frame);

/// Package whose name is shown for a method location: the extension's
/// package, or the class's package for the global extension.
std::string location_package(const World& world, std::string_view cls, const ExtensionRef& ext);

}  // namespace semx
