#pragma once

// Tree-walking evaluator for script and method bodies. Every message send
// is resolved through MethodLookup against the live call stack and recorded
// as a DispatchRecord.

#include "semx/lookup.hpp"
#include "semx/model.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace semx {

struct Value;

struct Instance {
  std::string cls;
  std::shared_ptr<const std::vector<Value>> fields;
};

struct Value {
  std::variant<Instance, std::int64_t, std::string> data;

  /// Class used for dispatch. Literals are instances of Object.
  std::string class_name() const;
  std::string str() const;
};

inline constexpr std::string_view kLiteralClass = "Object";

struct DispatchRecord {
  int step = 0;
  std::string receiver_class;
  Signature selector;
  /// Call stack at the send, oldest first; the last frame is the sender.
  CallStack stack;
  ActiveExtensions active;
  std::optional<ResolvedMethod> resolved;

  const FrameRef& sender() const { return stack.back(); }
};

enum class EvalErrorKind { MessageNotUnderstood, DepthExceeded, UserFailure, LiteralClassMissing };

std::string_view to_string(EvalErrorKind kind);

struct EvalError {
  EvalErrorKind kind;
  std::string message;
  /// Frame descriptions, oldest first, at the point of failure.
  std::vector<std::string> stack;
  /// Tag of a `fail` statement.
  std::string tag;
};

struct EvalOutcome {
  std::optional<Value> result;
  std::vector<DispatchRecord> dispatches;
  std::optional<EvalError> error;

  bool ok() const { return !error.has_value(); }
  /// Last dispatch that resolved to a method, if any.
  const DispatchRecord* last_resolved() const;
};

/// Runs a script. Throws std::invalid_argument if the script does not exist
/// or max_depth < 1; runtime failures are reported in the outcome.
EvalOutcome evaluate(const World& world, const ScriptId& script, const StrategyConfig& config);

using StrategyPair = std::pair<ActivationStrategy, SelectionStrategy>;

/// One independent evaluation per (activation, selection) pair. `base`
/// supplies the remaining options (imports, cache, depth).
std::map<StrategyPair, EvalOutcome> evaluate_matrix(const World& world, const ScriptId& script,
                                                    const StrategyConfig& base = {});

}  // namespace semx
