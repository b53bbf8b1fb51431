#include "semx/lookup.hpp"

#include <algorithm>

namespace semx {

std::string_view to_string(ActivationStrategy s) {
  switch (s) {
    case ActivationStrategy::BottomUpLocalRebinding: return "lr-up";
    case ActivationStrategy::TopDownLocalRebinding: return "lr-down";
    case ActivationStrategy::Lexical: return "lexical";
  }
  return "?";
}

std::string_view to_string(SelectionStrategy s) {
  switch (s) {
    case SelectionStrategy::ExtensionsFirst: return "ext-first";
    case SelectionStrategy::HierarchyFirst: return "hrc-first";
  }
  return "?";
}

std::optional<ActivationStrategy> parse_activation(std::string_view text) {
  for (auto s : kAllActivations)
    if (to_string(s) == text) return s;
  return std::nullopt;
}

std::optional<SelectionStrategy> parse_selection(std::string_view text) {
  for (auto s : kAllSelections)
    if (to_string(s) == text) return s;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// ActiveExtensions

ActiveExtensions::ActiveExtensions(std::span<const ExtensionRef> prioritized) {
  for (const auto& ref : prioritized) {
    if (ref.is_global()) continue;
    if (std::find(refs_.begin(), refs_.end(), ref) == refs_.end()) refs_.push_back(ref);
  }
  refs_.push_back(ExtensionRef::global());
}

std::optional<std::size_t> ActiveExtensions::position(const ExtensionRef& ref) const {
  auto it = std::find(refs_.begin(), refs_.end(), ref);
  if (it == refs_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - refs_.begin()) + 1;
}

std::string ActiveExtensions::str() const {
  std::string out = "<";
  for (std::size_t i = 0; i < refs_.size(); ++i) {
    if (i > 0) out += ", ";
    out += refs_[i].str();
  }
  return out + ">";
}

// ---------------------------------------------------------------------------
// Activation

namespace {

template <class FrameRange>
ActiveExtensions concat_imports(const World& world, const FrameRange& frames,
                                const ImportConfig& config) {
  std::vector<ExtensionRef> seq;
  for (const FrameRef& frame : frames) {
    auto imports = effective_imports(world, frame, config);
    seq.insert(seq.end(), imports.begin(), imports.end());
  }
  return ActiveExtensions(seq);
}

}  // namespace

ActiveExtensions active_exts_bottom_up(const World& world, std::span<const FrameRef> stack,
                                       const ImportConfig& config) {
  return concat_imports(world, stack, config);
}

ActiveExtensions active_exts_top_down(const World& world, std::span<const FrameRef> stack,
                                      const ImportConfig& config) {
  return concat_imports(world, std::vector<FrameRef>(stack.rbegin(), stack.rend()), config);
}

ActiveExtensions active_exts_lexical(const World& world, std::span<const FrameRef> stack,
                                     const ImportConfig& config) {
  if (stack.empty()) return ActiveExtensions();
  return concat_imports(world, stack.last(1), config);
}

ActiveExtensions active_extensions(const World& world, std::span<const FrameRef> stack,
                                   ActivationStrategy strategy, const ImportConfig& config) {
  switch (strategy) {
    case ActivationStrategy::BottomUpLocalRebinding:
      return active_exts_bottom_up(world, stack, config);
    case ActivationStrategy::TopDownLocalRebinding:
      return active_exts_top_down(world, stack, config);
    case ActivationStrategy::Lexical:
      return active_exts_lexical(world, stack, config);
  }
  return ActiveExtensions();
}

// ---------------------------------------------------------------------------
// Selection

std::optional<ResolvedMethod> lookup_in_class(const World& world, std::string_view cls,
                                              const Signature& sig,
                                              std::span<const ExtensionRef> exts) {
  for (const auto& ext : exts)
    if (auto id = world.method_at(cls, sig, ext)) return ResolvedMethod{std::string(cls), ext, *id};
  return std::nullopt;
}

std::optional<ResolvedMethod> lookup_in_extension(const World& world, std::string_view cls,
                                                  const Signature& sig, const ExtensionRef& ext) {
  if (world.find_class(cls) == nullptr) return std::nullopt;
  if (auto id = world.method_at(cls, sig, ext)) return ResolvedMethod{std::string(cls), ext, *id};
  for (const auto& anc : ancestors(world, cls))
    if (auto id = world.method_at(anc, sig, ext)) return ResolvedMethod{anc, ext, *id};
  return std::nullopt;
}

std::optional<ResolvedMethod> select_extensions_first(const World& world, std::string_view cls,
                                                      const Signature& sig,
                                                      std::span<const ExtensionRef> exts) {
  if (world.find_class(cls) == nullptr) return std::nullopt;
  if (auto hit = lookup_in_class(world, cls, sig, exts)) return hit;
  for (const auto& anc : ancestors(world, cls))
    if (auto hit = lookup_in_class(world, anc, sig, exts)) return hit;
  return std::nullopt;
}

std::optional<ResolvedMethod> select_hierarchy_first(const World& world, std::string_view cls,
                                                     const Signature& sig,
                                                     std::span<const ExtensionRef> exts) {
  for (const auto& ext : exts)
    if (auto hit = lookup_in_extension(world, cls, sig, ext)) return hit;
  return std::nullopt;
}

std::optional<ResolvedMethod> select(const World& world, std::string_view cls,
                                     const Signature& sig, std::span<const ExtensionRef> exts,
                                     SelectionStrategy strategy) {
  return strategy == SelectionStrategy::ExtensionsFirst
             ? select_extensions_first(world, cls, sig, exts)
             : select_hierarchy_first(world, cls, sig, exts);
}

std::optional<ResolvedMethod> lookup(const World& world, std::string_view receiver_class,
                                     const Signature& sig, std::span<const FrameRef> stack,
                                     const StrategyConfig& config) {
  ActiveExtensions exts = active_extensions(world, stack, config.activation, config.imports);
  return select(world, receiver_class, sig, exts.refs(), config.selection);
}

// ---------------------------------------------------------------------------
// MethodLookup

MethodLookup::MethodLookup(const World& world, StrategyConfig config)
    : world_(world), config_(config) {}

ActiveExtensions MethodLookup::activate(std::span<const FrameRef> stack) const {
  return active_extensions(world_, stack, config_.activation, config_.imports);
}

std::optional<ResolvedMethod> MethodLookup::resolve(std::string_view receiver_class,
                                                    const Signature& sig,
                                                    const ActiveExtensions& exts) const {
  if (!config_.cache_enabled)
    return select(world_, receiver_class, sig, exts.refs(), config_.selection);

  Key key{std::string(receiver_class), sig, exts};
  {
    std::lock_guard lock(mutex_);
    if (auto it = memo_.find(key); it != memo_.end()) {
      ++hits_;
      return it->second;
    }
  }
  auto result = select(world_, receiver_class, sig, exts.refs(), config_.selection);
  std::lock_guard lock(mutex_);
  memo_.emplace(std::move(key), result);
  return result;
}

std::optional<ResolvedMethod> MethodLookup::lookup(std::string_view receiver_class,
                                                   const Signature& sig,
                                                   std::span<const FrameRef> stack) const {
  return resolve(receiver_class, sig, activate(stack));
}

std::size_t MethodLookup::cache_hits() const {
  std::lock_guard lock(mutex_);
  return hits_;
}

std::size_t MethodLookup::cache_size() const {
  std::lock_guard lock(mutex_);
  return memo_.size();
}

}  // namespace semx
