#include "semx/analysis.hpp"

#include <set>

namespace semx {

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

WorldStats world_stats(const World& world) {
  std::size_t extension_methods = 0;
  std::set<std::string> extended_classes;
  std::set<std::string> defining_packages;
  std::set<std::string> extended_by_others;  // packages owning a class extended elsewhere

  for (const auto& m : world.methods()) {
    if (!m.is_extension()) continue;
    ++extension_methods;
    extended_classes.insert(m.cls);
    defining_packages.insert(m.package);
    if (const ClassDef* cls = world.find_class(m.cls); cls && cls->package != m.package)
      extended_by_others.insert(cls->package);
  }

  const std::size_t packages = world.packages().size();
  return {ratio(extension_methods, world.methods().size()),
          ratio(extended_classes.size(), world.classes().size()),
          ratio(defining_packages.size(), packages), ratio(extended_by_others.size(), packages)};
}

}  // namespace semx
