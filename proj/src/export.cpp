#include "semx/frontend.hpp"

#include <json.hpp>

#include <algorithm>

namespace semx {

namespace {

using Json = nlohmann::ordered_json;

Json refs_json(const std::vector<ExtensionRef>& refs) {
  Json out = Json::array();
  for (const auto& r : refs) out.push_back(r.str());
  return out;
}

Json body_json(const std::vector<Stmt>& body) {
  Json out = Json::array();
  for (const auto& stmt : body) out.push_back(render(stmt));
  return out;
}

Json sorted(std::vector<std::string> names) {
  std::sort(names.begin(), names.end());
  return Json(names);
}

}  // namespace

std::string export_world(const World& world) {
  Json doc;

  Json packages = Json::array();
  for (const auto& [name, pkg] : world.packages()) {
    packages.push_back(Json{{"name", name},
                            {"imports", refs_json(pkg.imports)},
                            {"classes", sorted(pkg.classes)},
                            {"extensions", sorted(pkg.extensions)},
                            {"scripts", sorted(pkg.scripts)}});
  }
  doc["packages"] = std::move(packages);

  Json classes = Json::array();
  for (const auto& [name, cls] : world.classes()) {
    classes.push_back(Json{{"name", name},
                           {"package", cls.package},
                           {"superclass", cls.superclass ? Json(*cls.superclass) : Json(nullptr)},
                           {"fields", cls.fields},
                           {"imports", refs_json(cls.imports)}});
  }
  doc["classes"] = std::move(classes);

  // Method order inside an extension follows (class, signature) so the
  // export does not depend on declaration order.
  auto method_key = [&](MethodId id) {
    const MethodDef& m = world.method(id);
    return std::tie(m.cls, m.sig);
  };

  Json extensions = Json::array();
  for (const auto& [ref, ext] : world.extensions()) {
    std::vector<MethodId> ids = ext.methods;
    std::sort(ids.begin(), ids.end(),
              [&](MethodId a, MethodId b) { return method_key(a) < method_key(b); });
    Json methods = Json::array();
    for (MethodId id : ids) {
      const MethodDef& m = world.method(id);
      methods.push_back(m.cls + "." + m.sig.str());
    }
    extensions.push_back(Json{{"ref", ref.str()},
                              {"package", ref.is_global() ? Json(nullptr) : Json(ref.package)},
                              {"name", ref.name},
                              {"methods", std::move(methods)}});
  }
  doc["extensions"] = std::move(extensions);

  std::vector<const MethodDef*> methods;
  for (const auto& m : world.methods()) methods.push_back(&m);
  std::sort(methods.begin(), methods.end(), [](const MethodDef* a, const MethodDef* b) {
    return std::tie(a->cls, a->sig, a->ext) < std::tie(b->cls, b->sig, b->ext);
  });
  Json method_list = Json::array();
  for (const MethodDef* m : methods) {
    method_list.push_back(Json{{"class", m->cls},
                               {"selector", m->sig.str()},
                               {"extension", m->ext.str()},
                               {"package", m->package},
                               {"params", m->params},
                               {"imports", refs_json(m->imports)},
                               {"body", body_json(m->body)}});
  }
  doc["methods"] = std::move(method_list);

  Json scripts = Json::array();
  for (const auto& [id, script] : world.scripts()) {
    scripts.push_back(Json{{"name", id.name},
                           {"package", id.package},
                           {"imports", refs_json(script.imports)},
                           {"body", body_json(script.body)}});
  }
  doc["scripts"] = std::move(scripts);

  return doc.dump(2) + "\n";
}

}  // namespace semx
