#include "semx/analysis.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace semx {

std::string_view to_string(OverwriteKind kind) {
  return kind == OverwriteKind::OverwritesRegular ? "overwritesRegular" : "betweenExtensions";
}

std::string_view to_string(OverrideKind kind) {
  switch (kind) {
    case OverrideKind::RegularOverExtension: return "regularOverExtension";
    case OverrideKind::ExtensionOverExtension: return "extensionOverExtension";
    case OverrideKind::ExtensionOverRegular: return "extensionOverRegular";
  }
  return "?";
}

namespace {

/// (class, signature) -> defining extensions, global first.
std::map<std::pair<std::string, Signature>, std::vector<ExtensionRef>> cells_by_signature(
    const World& world) {
  std::map<std::pair<std::string, Signature>, std::vector<ExtensionRef>> cells;
  for (const auto& [ref, ext] : world.extensions())
    for (MethodId id : ext.methods) {
      const MethodDef& m = world.method(id);
      cells[{m.cls, m.sig}].push_back(ref);
    }
  for (auto& [key, exts] : cells)
    std::stable_partition(exts.begin(), exts.end(),
                          [](const ExtensionRef& r) { return r.is_global(); });
  return cells;
}

}  // namespace

std::vector<OverwriteConflict> detect_overwrites(const World& world) {
  std::vector<OverwriteConflict> out;
  for (auto& [key, exts] : cells_by_signature(world)) {
    if (exts.size() < 2) continue;
    bool regular = std::any_of(exts.begin(), exts.end(),
                               [](const ExtensionRef& r) { return r.is_global(); });
    out.push_back({key.first, key.second, exts,
                   regular ? OverwriteKind::OverwritesRegular : OverwriteKind::BetweenExtensions});
  }
  return out;
}

std::vector<OverrideConflict> detect_overrides(const World& world) {
  auto cells = cells_by_signature(world);
  std::vector<OverrideConflict> out;
  for (const auto& [key, lower_exts] : cells) {
    const auto& [cls, sig] = key;
    for (const auto& upper_cls : ancestors(world, cls)) {
      auto upper = cells.find({upper_cls, sig});
      if (upper == cells.end()) continue;
      for (const auto& le : lower_exts) {
        for (const auto& ue : upper->second) {
          if (le == ue) continue;
          OverrideKind kind = le.is_global()   ? OverrideKind::RegularOverExtension
                              : ue.is_global() ? OverrideKind::ExtensionOverRegular
                                               : OverrideKind::ExtensionOverExtension;
          out.push_back({{cls, le}, {upper_cls, ue}, sig, kind});
        }
      }
    }
  }
  return out;
}

}  // namespace semx
