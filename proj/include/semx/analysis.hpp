#pragma once

// Static analyses over worlds: accidental overwrite/override detection,
// the accidental override space (AOS) of a message under each selection
// strategy, and the hierarchy-first vs extensions-first dominance table.

#include "semx/lookup.hpp"
#include "semx/model.hpp"

#include <cstddef>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace semx {

enum class AnalysisErrorKind { BaseMethodUndefined, PreconditionViolated, Domain };

class AnalysisError : public std::runtime_error {
 public:
  AnalysisError(AnalysisErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  AnalysisErrorKind kind() const { return kind_; }

 private:
  AnalysisErrorKind kind_;
};

// ---------------------------------------------------------------------------
// Conflicts

enum class OverwriteKind { BetweenExtensions, OverwritesRegular };

/// Several extensions define the same (class, signature) cell.
struct OverwriteConflict {
  std::string cls;
  Signature sig;
  /// Global first when present, then user extensions in ref order.
  std::vector<ExtensionRef> extensions;
  OverwriteKind kind;
};

enum class OverrideKind { RegularOverExtension, ExtensionOverExtension, ExtensionOverRegular };

std::string_view to_string(OverwriteKind kind);
std::string_view to_string(OverrideKind kind);

struct MethodCell {
  std::string cls;
  ExtensionRef ext;
  auto operator<=>(const MethodCell&) const = default;
};

/// A method at `lower` shadows a same-signature method of a different
/// extension at `upper`, whose class is a strict ancestor.
struct OverrideConflict {
  MethodCell lower;
  MethodCell upper;
  Signature sig;
  OverrideKind kind;
};

/// Ordered by class, then signature.
std::vector<OverwriteConflict> detect_overwrites(const World& world);
/// Ordered by lower class, signature, then distance of the upper class.
std::vector<OverrideConflict> detect_overrides(const World& world);

// ---------------------------------------------------------------------------
// Accidental override space

struct MessageContext {
  std::string receiver_class;
  Signature sig;
  ActiveExtensions exts;
};

/// A (class, extension) position where a method with the message's
/// signature could be added. `ext_index` is 1-based into the active
/// extensions.
struct MethodLocation {
  std::string cls;
  std::size_t ext_index = 0;
  ExtensionRef ext;

  auto operator<=>(const MethodLocation&) const = default;
};

using LocationSet = std::set<MethodLocation>;

struct AosResult {
  /// The method the message dispatches to: class c_def and position i.
  std::string def_class;
  std::size_t def_index = 0;
  LocationSet locations;
  std::int64_t formula_size = 0;
};

AosResult aos_extensions_first(const World& world, const MessageContext& mess);
AosResult aos_hierarchy_first(const World& world, const MessageContext& mess);
AosResult aos(const World& world, const MessageContext& mess, SelectionStrategy strategy);

/// Closed-form sizes, independent of any world.
std::int64_t aos_ext_size(std::int64_t subclasses, std::int64_t ext_count, std::int64_t i);
std::int64_t aos_hrc_size(std::int64_t subclasses, std::int64_t superclasses, std::int64_t i);

/// Enumerates every candidate location by adding a method there to a copy
/// of the world and checking whether some receiver at or below c_def now
/// dispatches to it. Requires the message's signature to be defined only
/// at the base method (PreconditionViolated otherwise).
LocationSet aos_bruteforce(const World& world, const MessageContext& mess,
                           SelectionStrategy strategy);

// ---------------------------------------------------------------------------
// Dominance of hierarchy-first over extensions-first

struct DominanceRow {
  int ext_count = 0;
  /// Largest i with |AOS_hrc| <= |AOS_ext| for average class shapes.
  int max_favorable_i = 0;
};

struct Fraction {
  std::int64_t numerator = 0;
  std::int64_t denominator = 1;

  double value() const {
    return static_cast<double>(numerator) / static_cast<double>(denominator);
  }
  std::string str() const { return std::to_string(numerator) + "/" + std::to_string(denominator); }
};

std::vector<DominanceRow> dominance_table(double avg_subclasses, double avg_superclasses,
                                          int max_exts);
Fraction dominance_summary(const std::vector<DominanceRow>& rows);

struct SweepCell {
  int subclasses = 0;
  int superclasses = 0;
  Fraction summary;
};

/// Row-major over `subclasses` then `superclasses`, both inclusive ranges.
std::vector<SweepCell> dominance_sweep(int sub_lo, int sub_hi, int sup_lo, int sup_hi,
                                       int max_exts);

// ---------------------------------------------------------------------------
// Statistics

struct WorldStats {
  double extension_method_fraction = 0;
  double extended_class_fraction = 0;
  double packages_defining_extensions_fraction = 0;
  double packages_with_extended_classes_fraction = 0;
};

WorldStats world_stats(const World& world);

}  // namespace semx
