#pragma once

// Two-step method lookup: an activation strategy turns the call stack into
// a priority-ordered sequence of active extensions, then a selection
// strategy picks a method from the (class hierarchy x extensions) grid.

#include "semx/model.hpp"

#include <cstddef>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace semx {

enum class ActivationStrategy { BottomUpLocalRebinding, TopDownLocalRebinding, Lexical };
enum class SelectionStrategy { ExtensionsFirst, HierarchyFirst };

inline constexpr ActivationStrategy kAllActivations[] = {
    ActivationStrategy::BottomUpLocalRebinding, ActivationStrategy::TopDownLocalRebinding,
    ActivationStrategy::Lexical};
inline constexpr SelectionStrategy kAllSelections[] = {SelectionStrategy::ExtensionsFirst,
                                                       SelectionStrategy::HierarchyFirst};

/// CLI spellings: lr-up, lr-down, lexical / ext-first, hrc-first.
std::string_view to_string(ActivationStrategy s);
std::string_view to_string(SelectionStrategy s);
std::optional<ActivationStrategy> parse_activation(std::string_view text);
std::optional<SelectionStrategy> parse_selection(std::string_view text);

struct StrategyConfig {
  ActivationStrategy activation = ActivationStrategy::Lexical;
  SelectionStrategy selection = SelectionStrategy::HierarchyFirst;
  ImportConfig imports;
  bool cache_enabled = true;
  int max_depth = 1024;
};

/// Priority-ordered active extensions. Always ends with the global
/// extension, which occurs exactly once; other duplicates keep their first
/// (highest priority) position.
class ActiveExtensions {
 public:
  ActiveExtensions() : refs_{ExtensionRef::global()} {}
  explicit ActiveExtensions(std::span<const ExtensionRef> prioritized);

  std::span<const ExtensionRef> refs() const { return refs_; }
  std::size_t size() const { return refs_.size(); }
  const ExtensionRef& operator[](std::size_t i) const { return refs_[i]; }
  auto begin() const { return refs_.begin(); }
  auto end() const { return refs_.end(); }

  /// 1-based position of `ref`, if active.
  std::optional<std::size_t> position(const ExtensionRef& ref) const;

  std::string str() const;

  auto operator<=>(const ActiveExtensions&) const = default;

 private:
  std::vector<ExtensionRef> refs_;
};

struct ResolvedMethod {
  std::string cls;
  ExtensionRef ext;
  MethodId method;

  auto operator<=>(const ResolvedMethod&) const = default;
};

ActiveExtensions active_exts_bottom_up(const World& world, std::span<const FrameRef> stack,
                                       const ImportConfig& config);
ActiveExtensions active_exts_top_down(const World& world, std::span<const FrameRef> stack,
                                      const ImportConfig& config);
/// Imports of the newest frame (the sender) only.
ActiveExtensions active_exts_lexical(const World& world, std::span<const FrameRef> stack,
                                     const ImportConfig& config);
ActiveExtensions active_extensions(const World& world, std::span<const FrameRef> stack,
                                   ActivationStrategy strategy, const ImportConfig& config);

/// First extension of `exts` defining (cls, sig). Undefined for an empty
/// sequence.
std::optional<ResolvedMethod> lookup_in_class(const World& world, std::string_view cls,
                                              const Signature& sig,
                                              std::span<const ExtensionRef> exts);

/// First class, walking from `cls` up its superclass chain, that defines
/// sig in `ext`.
std::optional<ResolvedMethod> lookup_in_extension(const World& world, std::string_view cls,
                                                  const Signature& sig, const ExtensionRef& ext);

std::optional<ResolvedMethod> select_extensions_first(const World& world, std::string_view cls,
                                                      const Signature& sig,
                                                      std::span<const ExtensionRef> exts);
std::optional<ResolvedMethod> select_hierarchy_first(const World& world, std::string_view cls,
                                                     const Signature& sig,
                                                     std::span<const ExtensionRef> exts);
std::optional<ResolvedMethod> select(const World& world, std::string_view cls,
                                     const Signature& sig, std::span<const ExtensionRef> exts,
                                     SelectionStrategy strategy);

/// Uncached composition select(c, s, activeExts(stack)).
std::optional<ResolvedMethod> lookup(const World& world, std::string_view receiver_class,
                                     const Signature& sig, std::span<const FrameRef> stack,
                                     const StrategyConfig& config);

/// Lookup bound to one world and strategy configuration. With caching on,
/// selections are memoized by (receiver class, signature, active
/// extensions); concurrent callers are serialized on the memo table.
class MethodLookup {
 public:
  MethodLookup(const World& world, StrategyConfig config);

  ActiveExtensions activate(std::span<const FrameRef> stack) const;
  std::optional<ResolvedMethod> resolve(std::string_view receiver_class, const Signature& sig,
                                        const ActiveExtensions& exts) const;
  std::optional<ResolvedMethod> lookup(std::string_view receiver_class, const Signature& sig,
                                       std::span<const FrameRef> stack) const;

  const StrategyConfig& config() const { return config_; }
  std::size_t cache_hits() const;
  std::size_t cache_size() const;

 private:
  using Key = std::tuple<std::string, Signature, ActiveExtensions>;

  const World& world_;
  StrategyConfig config_;
  mutable std::mutex mutex_;
  mutable std::map<Key, std::optional<ResolvedMethod>> memo_;
  mutable std::size_t hits_ = 0;
};

}  // namespace semx
