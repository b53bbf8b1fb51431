#include "semx/model.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace semx {

namespace {

template <class Map, class Key>
auto find_ptr(const Map& map, const Key& key) -> const typename Map::mapped_type* {
  auto it = map.find(key);
  return it == map.end() ? nullptr : &it->second;
}

void append_unique(std::vector<ExtensionRef>& out, const std::vector<ExtensionRef>& refs) {
  for (const auto& ref : refs) {
    if (ref.is_global()) continue;
    if (std::find(out.begin(), out.end(), ref) == out.end()) out.push_back(ref);
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// World

const PackageDef* World::find_package(std::string_view name) const {
  return find_ptr(packages_, std::string(name));
}

const ClassDef* World::find_class(std::string_view name) const {
  return find_ptr(classes_, std::string(name));
}

const ExtensionDef* World::find_extension(const ExtensionRef& ref) const {
  return find_ptr(extensions_, ref);
}

const ScriptDef* World::find_script(const ScriptId& id) const { return find_ptr(scripts_, id); }

std::vector<ScriptId> World::scripts_named(std::string_view name) const {
  std::vector<ScriptId> out;
  for (const auto& [id, script] : scripts_)
    if (id.name == name) out.push_back(id);
  return out;
}

std::optional<MethodId> World::method_at(std::string_view cls, const Signature& sig,
                                         const ExtensionRef& ext) const {
  auto it = cells_.find(CellKey{std::string(cls), sig, ext});
  if (it == cells_.end()) return std::nullopt;
  return it->second;
}

const std::string* World::superclass(std::string_view cls) const {
  const ClassDef* def = find_class(cls);
  if (def == nullptr || !def->superclass) return nullptr;
  return &*def->superclass;
}

void World::reindex() {
  cells_.clear();
  for (auto& [ref, ext] : extensions_) ext.methods.clear();
  extensions_.try_emplace(ExtensionRef::global(), ExtensionDef{ExtensionRef::global(), {}, {}});
  for (std::size_t i = 0; i < methods_.size(); ++i) {
    const MethodDef& m = methods_[i];
    // The first declaration of a cell wins; later ones are reported by
    // validate_world as DuplicateMethod.
    auto [it, inserted] = cells_.emplace(CellKey{m.cls, m.sig, m.ext}, MethodId{i});
    if (!inserted) continue;
    if (auto ext = extensions_.find(m.ext); ext != extensions_.end())
      ext->second.methods.push_back(MethodId{i});
  }
}

// ---------------------------------------------------------------------------
// WorldBuilder

WorldBuilder::WorldBuilder() { world_.reindex(); }

WorldBuilder::WorldBuilder(World base) : world_(std::move(base)) {
  for (const auto& [name, pkg] : world_.packages_) declared_packages_.insert(name);
}

PackageDef& WorldBuilder::package(const std::string& name) {
  auto [it, inserted] = world_.packages_.try_emplace(name);
  if (inserted) it->second.name = name;
  return it->second;
}

WorldBuilder& WorldBuilder::add_package(std::string name, std::vector<ExtensionRef> imports,
                                        SourceLoc loc) {
  // A package created implicitly by an earlier declaration can still be
  // declared once explicitly.
  if (!declared_packages_.insert(name).second) {
    world_.duplicates_.push_back({"package", name, loc});
    return *this;
  }
  PackageDef& pkg = package(name);
  pkg.imports = std::move(imports);
  pkg.loc = loc;
  return *this;
}

WorldBuilder& WorldBuilder::add_class(ClassDef cls) {
  if (world_.classes_.contains(cls.name)) {
    world_.duplicates_.push_back({"class", cls.name, cls.loc});
    return *this;
  }
  package(cls.package).classes.push_back(cls.name);
  std::string key = cls.name;
  world_.classes_.emplace(std::move(key), std::move(cls));
  return *this;
}

WorldBuilder& WorldBuilder::add_extension(ExtensionRef ref, SourceLoc loc) {
  if (world_.extensions_.contains(ref)) {
    world_.duplicates_.push_back({"extension", ref.str(), loc});
    return *this;
  }
  if (!ref.is_global()) package(ref.package).extensions.push_back(ref.name);
  world_.extensions_.emplace(ref, ExtensionDef{ref, {}, loc});
  return *this;
}

MethodId WorldBuilder::add_method(MethodDef method) {
  MethodId id{world_.methods_.size()};
  world_.methods_.push_back(std::move(method));
  return id;
}

WorldBuilder& WorldBuilder::add_script(ScriptDef script) {
  ScriptId id = script.id();
  if (world_.scripts_.contains(id)) {
    world_.duplicates_.push_back({"script", id.package + "." + id.name, script.loc});
    return *this;
  }
  package(script.package).scripts.push_back(script.name);
  world_.scripts_.emplace(std::move(id), std::move(script));
  return *this;
}

World WorldBuilder::build() const& {
  World copy = world_;
  copy.reindex();
  return copy;
}

World WorldBuilder::build() && {
  world_.reindex();
  return std::move(world_);
}

// ---------------------------------------------------------------------------
// Validation

std::string_view to_string(DiagnosticKind kind) {
  switch (kind) {
    case DiagnosticKind::CyclicHierarchy: return "CyclicHierarchy";
    case DiagnosticKind::UnknownClass: return "UnknownClass";
    case DiagnosticKind::UnknownExtension: return "UnknownExtension";
    case DiagnosticKind::DuplicateMethod: return "DuplicateMethod";
    case DiagnosticKind::ReservedName: return "ReservedName";
    case DiagnosticKind::DuplicateDefinition: return "DuplicateDefinition";
    case DiagnosticKind::UnknownName: return "UnknownName";
    case DiagnosticKind::ArityMismatch: return "ArityMismatch";
  }
  return "?";
}

namespace {

class Validator {
 public:
  explicit Validator(const World& world) : world_(world) {}

  ValidationReport run() {
    for (const auto& dup : world_.duplicates())
      report(DiagnosticKind::DuplicateDefinition, dup.name,
             "duplicate " + dup.what + " '" + dup.name + "'", dup.loc);

    for (const auto& [name, pkg] : world_.packages())
      check_imports(pkg.imports, "package " + name, pkg.loc);

    for (const auto& [ref, ext] : world_.extensions()) {
      if (!ref.is_global() && ref.name == ExtensionRef::kGlobalName)
        report(DiagnosticKind::ReservedName, ref.str(),
               "extension name 'global' is reserved", ext.loc);
    }

    check_hierarchy();
    for (const auto& [name, cls] : world_.classes()) check_class(cls);
    check_methods();
    for (const auto& [id, script] : world_.scripts()) check_script(script);

    std::stable_sort(report_.diagnostics.begin(), report_.diagnostics.end(),
                     [](const Diagnostic& a, const Diagnostic& b) { return a.loc < b.loc; });
    return std::move(report_);
  }

 private:
  struct Scope {
    std::string entity;
    bool has_self = false;
    const std::vector<std::string>* params = nullptr;
    std::vector<std::string> fields;
  };

  void report(DiagnosticKind kind, std::string entity, std::string message, SourceLoc loc) {
    report_.diagnostics.push_back({kind, std::move(entity), std::move(message), loc});
  }

  void check_imports(const std::vector<ExtensionRef>& imports, const std::string& owner,
                     SourceLoc loc) {
    for (const auto& ref : imports) {
      if (ref.name == ExtensionRef::kGlobalName) {
        report(DiagnosticKind::ReservedName, owner,
               "'" + ref.str() + "' names the implicit global extension and cannot be imported",
               loc);
      } else if (world_.find_extension(ref) == nullptr) {
        report(DiagnosticKind::UnknownExtension, owner,
               "unknown extension '" + ref.str() + "'", loc);
      }
    }
  }

  void check_hierarchy() {
    for (const auto& [name, cls] : world_.classes()) {
      if (!cls.superclass) continue;
      if (world_.find_class(*cls.superclass) == nullptr) {
        report(DiagnosticKind::UnknownClass, name,
               "superclass '" + *cls.superclass + "' of '" + name + "' does not exist", cls.loc);
        continue;
      }
      // Follow the chain for at most |classes| steps; revisiting the start
      // means the class is its own transitive superclass.
      const std::string* cur = cls.superclass ? &*cls.superclass : nullptr;
      for (std::size_t steps = 0; cur != nullptr && steps <= world_.classes().size(); ++steps) {
        if (*cur == name) {
          report(DiagnosticKind::CyclicHierarchy, name,
                 "class '" + name + "' is its own transitive superclass", cls.loc);
          cyclic_.insert(name);
          break;
        }
        cur = world_.superclass(*cur);
      }
    }
  }

  void check_class(const ClassDef& cls) {
    check_imports(cls.imports, "class " + cls.name, cls.loc);
    if (cyclic_.contains(cls.name)) return;
    std::set<std::string> seen;
    for (const auto& field : all_fields(world_, cls.name)) {
      if (!seen.insert(field).second)
        report(DiagnosticKind::DuplicateDefinition, cls.name,
               "field '" + field + "' declared more than once in the layout of '" + cls.name + "'",
               cls.loc);
    }
  }

  void check_methods() {
    std::set<std::tuple<std::string, Signature, ExtensionRef>> cells;
    for (const auto& m : world_.methods()) {
      std::string entity = m.cls + "." + m.sig.str();
      if (!m.ext.is_global()) entity += " [" + m.ext.str() + "]";

      if (!cells.emplace(m.cls, m.sig, m.ext).second)
        report(DiagnosticKind::DuplicateMethod, entity,
               "method " + entity + " is defined more than once", m.loc);
      if (m.ext.name == ExtensionRef::kGlobalName && !m.ext.is_global())
        report(DiagnosticKind::ReservedName, entity, "extension name 'global' is reserved", m.loc);
      else if (world_.find_extension(m.ext) == nullptr)
        report(DiagnosticKind::UnknownExtension, entity,
               "unknown extension '" + m.ext.str() + "'", m.loc);

      const ClassDef* host = world_.find_class(m.cls);
      if (host == nullptr) {
        report(DiagnosticKind::UnknownClass, entity, "unknown class '" + m.cls + "'", m.loc);
      }
      if (m.sig.arity < 0 || static_cast<std::size_t>(m.sig.arity) != m.params.size())
        report(DiagnosticKind::ArityMismatch, entity,
               "declared arity " + std::to_string(m.sig.arity) + " but " +
                   std::to_string(m.params.size()) + " parameters",
               m.loc);
      check_unique(m.params, entity, "parameter", m.loc);
      check_imports(m.imports, entity, m.loc);

      Scope scope{entity, true, &m.params, {}};
      if (host != nullptr && !cyclic_.contains(m.cls)) scope.fields = all_fields(world_, m.cls);
      check_body(m.body, scope);
    }
  }

  void check_script(const ScriptDef& script) {
    std::string entity = "script " + script.package + "." + script.name;
    check_imports(script.imports, entity, script.loc);
    Scope scope{entity, false, nullptr, {}};
    check_body(script.body, scope);
  }

  void check_unique(const std::vector<std::string>& names, const std::string& entity,
                    const char* what, SourceLoc loc) {
    std::set<std::string> seen;
    for (const auto& n : names)
      if (!seen.insert(n).second)
        report(DiagnosticKind::DuplicateDefinition, entity,
               std::string("duplicate ") + what + " '" + n + "'", loc);
  }

  void check_body(const std::vector<Stmt>& body, const Scope& scope) {
    for (const auto& stmt : body) {
      std::visit(
          [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, ExprStmt> || std::is_same_v<T, Return>)
              check_expr(*node.expr, scope);
          },
          stmt.node);
    }
  }

  void check_expr(const Expr& expr, const Scope& scope) {
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, SelfRef>) {
            if (!scope.has_self)
              report(DiagnosticKind::UnknownName, scope.entity, "'self' used outside a method",
                     expr.loc);
          } else if constexpr (std::is_same_v<T, ParamRef>) {
            if (scope.params == nullptr ||
                std::find(scope.params->begin(), scope.params->end(), node.name) ==
                    scope.params->end())
              report(DiagnosticKind::UnknownName, scope.entity,
                     "unknown parameter '" + node.name + "'", expr.loc);
          } else if constexpr (std::is_same_v<T, FieldRef>) {
            if (std::find(scope.fields.begin(), scope.fields.end(), node.name) ==
                scope.fields.end())
              report(DiagnosticKind::UnknownName, scope.entity,
                     "unknown field '" + node.name + "'", expr.loc);
          } else if constexpr (std::is_same_v<T, New>) {
            if (world_.find_class(node.cls) == nullptr) {
              report(DiagnosticKind::UnknownClass, scope.entity,
                     "'new' of unknown class '" + node.cls + "'", expr.loc);
            } else if (!cyclic_.contains(node.cls)) {
              auto fields = all_fields(world_, node.cls);
              if (fields.size() != node.args.size())
                report(DiagnosticKind::ArityMismatch, scope.entity,
                       "'new " + node.cls + "' takes " + std::to_string(fields.size()) +
                           " arguments, got " + std::to_string(node.args.size()),
                       expr.loc);
            }
            for (const auto& arg : node.args) check_expr(*arg, scope);
          } else if constexpr (std::is_same_v<T, Send>) {
            if (static_cast<std::size_t>(node.selector.arity) != node.args.size())
              report(DiagnosticKind::ArityMismatch, scope.entity,
                     "send of " + node.selector.str() + " with " +
                         std::to_string(node.args.size()) + " arguments",
                     expr.loc);
            check_expr(*node.receiver, scope);
            for (const auto& arg : node.args) check_expr(*arg, scope);
          }
        },
        expr.node);
  }

  const World& world_;
  ValidationReport report_;
  std::set<std::string> cyclic_;
};

}  // namespace

ValidationReport validate_world(const World& world) { return Validator(world).run(); }

// ---------------------------------------------------------------------------
// Hierarchy queries

std::vector<std::string> ancestors(const World& world, std::string_view cls) {
  if (world.find_class(cls) == nullptr)
    throw std::invalid_argument("unknown class '" + std::string(cls) + "'");
  std::vector<std::string> chain;
  for (const std::string* cur = world.superclass(cls); cur != nullptr;
       cur = world.superclass(*cur)) {
    // Guards unvalidated worlds against cycles.
    if (*cur == cls || std::find(chain.begin(), chain.end(), *cur) != chain.end()) break;
    if (world.find_class(*cur) == nullptr) break;
    chain.push_back(*cur);
  }
  return chain;
}

std::set<std::string> descendants(const World& world, std::string_view cls) {
  if (world.find_class(cls) == nullptr)
    throw std::invalid_argument("unknown class '" + std::string(cls) + "'");
  std::map<std::string, std::vector<std::string>> children;
  for (const auto& [name, def] : world.classes())
    if (def.superclass) children[*def.superclass].push_back(name);

  std::set<std::string> out;
  std::vector<std::string> work{std::string(cls)};
  while (!work.empty()) {
    std::string cur = std::move(work.back());
    work.pop_back();
    for (const auto& child : children[cur])
      if (child != cls && out.insert(child).second) work.push_back(child);
  }
  return out;
}

std::vector<std::string> all_fields(const World& world, std::string_view cls) {
  std::vector<std::string> chain = ancestors(world, cls);
  std::vector<std::string> fields;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    const auto& own = world.find_class(*it)->fields;
    fields.insert(fields.end(), own.begin(), own.end());
  }
  const auto& own = world.find_class(cls)->fields;
  fields.insert(fields.end(), own.begin(), own.end());
  return fields;
}

// ---------------------------------------------------------------------------
// Imports

std::vector<ExtensionRef> effective_imports(const World& world, const FrameRef& frame,
                                            const ImportConfig& config) {
  std::vector<ExtensionRef> out;
  if (const auto* mid = std::get_if<MethodId>(&frame)) {
    const MethodDef& m = world.method(*mid);
    append_unique(out, m.imports);
    // Class-level imports belong to methods declared in the class body;
    // extension methods are declared in their own package, not the class.
    if (!m.is_extension()) {
      if (const ClassDef* cls = world.find_class(m.cls)) {
        append_unique(out, cls->imports);
        if (config.refinement_inheritance)
          for (const auto& anc : ancestors(world, m.cls))
            append_unique(out, world.find_class(anc)->imports);
      }
    }
    if (const PackageDef* pkg = world.find_package(m.package)) append_unique(out, pkg->imports);
  } else {
    const ScriptDef* script = world.find_script(std::get<ScriptId>(frame));
    if (script == nullptr) return out;
    append_unique(out, script->imports);
    if (const PackageDef* pkg = world.find_package(script->package))
      append_unique(out, pkg->imports);
  }
  return out;
}

std::string describe(const World& world, const FrameRef& frame) {
  if (const auto* mid = std::get_if<MethodId>(&frame)) {
    const MethodDef& m = world.method(*mid);
    std::string out = m.cls + "." + m.sig.str();
    if (m.is_extension()) out += " [" + m.ext.str() + "]";
    return out;
  }
  const auto& id = std::get<ScriptId>(frame);
  return "script " + id.package + "." + id.name;
}

std::string location_package(const World& world, std::string_view cls, const ExtensionRef& ext) {
  if (!ext.is_global()) return ext.package;
  const ClassDef* def = world.find_class(cls);
  return def == nullptr ? std::string() : def->package;
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

void render_args(std::ostringstream& os, const std::vector<ExprPtr>& args) {
  os << '(';
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i > 0) os << ", ";
    os << render(*args[i]);
  }
  os << ')';
}

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'' || c == '\\') out += '\\';
    out += c;
  }
  return out + "'";
}

}  // namespace

std::string render(const Expr& expr) {
  std::ostringstream os;
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, SelfRef>) os << "self";
        else if constexpr (std::is_same_v<T, ParamRef>) os << node.name;
        else if constexpr (std::is_same_v<T, FieldRef>) os << "field " << node.name;
        else if constexpr (std::is_same_v<T, IntLiteral>) os << node.value;
        else if constexpr (std::is_same_v<T, StringLiteral>) os << quote(node.value);
        else if constexpr (std::is_same_v<T, New>) {
          os << "new " << node.cls;
          render_args(os, node.args);
        } else if constexpr (std::is_same_v<T, Send>) {
          os << render(*node.receiver) << '.' << node.selector.name;
          render_args(os, node.args);
        }
      },
      expr.node);
  return os.str();
}

std::string render(const Stmt& stmt) {
  return std::visit(
      [](const auto& node) -> std::string {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, ExprStmt>) return render(*node.expr) + ";";
        else if constexpr (std::is_same_v<T, Return>) return "return " + render(*node.expr) + ";";
        else return "fail " + node.tag + ";";
      },
      stmt.node);
}

}  // namespace semx
