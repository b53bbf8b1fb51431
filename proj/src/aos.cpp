#include "semx/analysis.hpp"

#include <algorithm>

namespace semx {

namespace {

struct BaseMethod {
  ResolvedMethod resolved;
  std::size_t index;  // 1-based position of the defining extension
};

BaseMethod resolve_base(const World& world, const MessageContext& mess,
                        SelectionStrategy strategy) {
  auto hit = select(world, mess.receiver_class, mess.sig, mess.exts.refs(), strategy);
  if (!hit)
    throw AnalysisError(AnalysisErrorKind::BaseMethodUndefined,
                        mess.receiver_class + " does not understand " + mess.sig.str() +
                            " under " + mess.exts.str());
  return {*hit, *mess.exts.position(hit->ext)};
}

void add_row(LocationSet& out, const std::string& cls, const ActiveExtensions& exts,
             std::size_t from, std::size_t to_exclusive, std::size_t skip) {
  for (std::size_t j = from; j < to_exclusive; ++j)
    if (j != skip) out.insert({cls, j, exts[j - 1]});
}

}  // namespace

std::int64_t aos_ext_size(std::int64_t subclasses, std::int64_t ext_count, std::int64_t i) {
  return subclasses * (ext_count - 1) + (i - 1);
}

std::int64_t aos_hrc_size(std::int64_t subclasses, std::int64_t superclasses, std::int64_t i) {
  return (subclasses + superclasses + 1) * (i - 1);
}

AosResult aos_extensions_first(const World& world, const MessageContext& mess) {
  BaseMethod base = resolve_base(world, mess, SelectionStrategy::ExtensionsFirst);
  const std::string& def = base.resolved.cls;
  const std::size_t n = mess.exts.size();
  const std::size_t i = base.index;

  AosResult result{def, i, {}, 0};
  // A subclass method in any other active extension is found before
  // reaching c_def; at c_def only higher-priority extensions win.
  auto subs = descendants(world, def);
  for (const auto& sub : subs) add_row(result.locations, sub, mess.exts, 1, n + 1, i);
  add_row(result.locations, def, mess.exts, 1, i, 0);
  result.formula_size = aos_ext_size(static_cast<std::int64_t>(subs.size()),
                                     static_cast<std::int64_t>(n), static_cast<std::int64_t>(i));
  return result;
}

AosResult aos_hierarchy_first(const World& world, const MessageContext& mess) {
  BaseMethod base = resolve_base(world, mess, SelectionStrategy::HierarchyFirst);
  const std::string& def = base.resolved.cls;
  const std::size_t i = base.index;

  AosResult result{def, i, {}, 0};
  // Any class on a receiver's chain wins if its extension is scanned first.
  auto subs = descendants(world, def);
  auto supers = ancestors(world, def);
  for (const auto& sub : subs) add_row(result.locations, sub, mess.exts, 1, i, 0);
  add_row(result.locations, def, mess.exts, 1, i, 0);
  for (const auto& sup : supers) add_row(result.locations, sup, mess.exts, 1, i, 0);
  result.formula_size = aos_hrc_size(static_cast<std::int64_t>(subs.size()),
                                     static_cast<std::int64_t>(supers.size()),
                                     static_cast<std::int64_t>(i));
  return result;
}

AosResult aos(const World& world, const MessageContext& mess, SelectionStrategy strategy) {
  return strategy == SelectionStrategy::ExtensionsFirst ? aos_extensions_first(world, mess)
                                                        : aos_hierarchy_first(world, mess);
}

LocationSet aos_bruteforce(const World& world, const MessageContext& mess,
                           SelectionStrategy strategy) {
  BaseMethod base = resolve_base(world, mess, strategy);
  auto same_sig = std::count_if(world.methods().begin(), world.methods().end(),
                                [&](const MethodDef& m) { return m.sig == mess.sig; });
  if (same_sig != 1)
    throw AnalysisError(AnalysisErrorKind::PreconditionViolated,
                        mess.sig.str() + " is defined " + std::to_string(same_sig) +
                            " times; the enumeration needs it at the base method only");

  const std::string& def = base.resolved.cls;
  std::vector<std::string> receivers{def};
  for (const auto& sub : descendants(world, def)) receivers.push_back(sub);

  std::vector<std::string> params;
  for (int p = 0; p < mess.sig.arity; ++p) params.push_back("p" + std::to_string(p + 1));

  LocationSet out;
  for (const auto& [cls, cls_def] : world.classes()) {
    for (std::size_t j = 1; j <= mess.exts.size(); ++j) {
      // Same-extension placements are intentional overrides, not accidents.
      if (j == base.index) continue;
      const ExtensionRef& ext = mess.exts[j - 1];

      WorldBuilder builder(world);
      if (world.find_extension(ext) == nullptr) builder.add_extension(ext);
      MethodDef probe;
      probe.cls = cls;
      probe.sig = mess.sig;
      probe.ext = ext;
      probe.package = ext.is_global() ? cls_def.package : ext.package;
      probe.params = params;
      MethodId probe_id = builder.add_method(std::move(probe));
      World trial = std::move(builder).build();

      bool changes = std::any_of(receivers.begin(), receivers.end(), [&](const auto& rcv) {
        auto hit = select(trial, rcv, mess.sig, mess.exts.refs(), strategy);
        return hit && hit->method == probe_id;
      });
      if (changes) out.insert({cls, j, ext});
    }
  }
  return out;
}

}  // namespace semx
