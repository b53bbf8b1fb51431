#include "semx/interp.hpp"

#include <algorithm>
#include <future>
#include <stdexcept>

namespace semx {

std::string Value::class_name() const {
  if (const auto* inst = std::get_if<Instance>(&data)) return inst->cls;
  return std::string(kLiteralClass);
}

std::string Value::str() const {
  if (const auto* inst = std::get_if<Instance>(&data)) return "a " + inst->cls;
  if (const auto* i = std::get_if<std::int64_t>(&data)) return std::to_string(*i);
  return "'" + std::get<std::string>(data) + "'";
}

std::string_view to_string(EvalErrorKind kind) {
  switch (kind) {
    case EvalErrorKind::MessageNotUnderstood: return "MessageNotUnderstood";
    case EvalErrorKind::DepthExceeded: return "DepthExceeded";
    case EvalErrorKind::UserFailure: return "UserFailure";
    case EvalErrorKind::LiteralClassMissing: return "LiteralClassMissing";
  }
  return "?";
}

const DispatchRecord* EvalOutcome::last_resolved() const {
  for (auto it = dispatches.rbegin(); it != dispatches.rend(); ++it)
    if (it->resolved) return &*it;
  return nullptr;
}

namespace {

struct Abort {
  EvalError error;
};

class Evaluator {
 public:
  Evaluator(const World& world, const StrategyConfig& config)
      : world_(world), lookup_(world, config), max_depth_(config.max_depth) {}

  EvalOutcome run(const ScriptDef& script) {
    EvalOutcome outcome;
    try {
      push(Activation{script.id(), std::nullopt, {}, nullptr});
      std::optional<Value> last;
      for (const auto& stmt : script.body) {
        auto step = exec(stmt);
        if (step.returned) {
          last = std::move(step.value);
          break;
        }
        last = std::move(step.value);
      }
      frames_.pop_back();
      outcome.result = std::move(last);
    } catch (Abort& abort) {
      outcome.error = std::move(abort.error);
      frames_.clear();
    }
    outcome.dispatches = std::move(records_);
    return outcome;
  }

 private:
  struct Activation {
    FrameRef ref;
    std::optional<Value> self;
    std::vector<Value> args;
    const MethodDef* method;
  };

  struct StepResult {
    bool returned = false;
    std::optional<Value> value;
  };

  [[noreturn]] void fail(EvalErrorKind kind, std::string message, std::string tag = {}) {
    EvalError err{kind, std::move(message), {}, std::move(tag)};
    for (const auto& frame : frames_) err.stack.push_back(describe(world_, frame.ref));
    throw Abort{std::move(err)};
  }

  void push(Activation frame) {
    if (static_cast<int>(frames_.size()) >= max_depth_)
      fail(EvalErrorKind::DepthExceeded,
           "call stack deeper than " + std::to_string(max_depth_) + " frames");
    frames_.push_back(std::move(frame));
  }

  StepResult exec(const Stmt& stmt) {
    return std::visit(
        [&](const auto& node) -> StepResult {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, ExprStmt>) return {false, eval(*node.expr)};
          else if constexpr (std::is_same_v<T, Return>) return {true, eval(*node.expr)};
          else fail(EvalErrorKind::UserFailure, "fail " + node.tag, node.tag);
        },
        stmt.node);
  }

  Value literal(Value v) {
    if (world_.find_class(kLiteralClass) == nullptr)
      fail(EvalErrorKind::LiteralClassMissing, "literals need a class named Object");
    return v;
  }

  Value eval(const Expr& expr) {
    return std::visit(
        [&](const auto& node) -> Value {
          using T = std::decay_t<decltype(node)>;
          const Activation& top = frames_.back();
          if constexpr (std::is_same_v<T, SelfRef>) {
            return *top.self;
          } else if constexpr (std::is_same_v<T, ParamRef>) {
            const auto& params = top.method->params;
            auto pos = std::find(params.begin(), params.end(), node.name) - params.begin();
            return top.args.at(static_cast<std::size_t>(pos));
          } else if constexpr (std::is_same_v<T, FieldRef>) {
            // Layouts are prefix-compatible along the hierarchy, so the
            // host class's field index is valid for subclass instances too.
            auto layout = all_fields(world_, top.method->cls);
            auto pos = std::find(layout.begin(), layout.end(), node.name) - layout.begin();
            const auto& inst = std::get<Instance>(top.self->data);
            return inst.fields->at(static_cast<std::size_t>(pos));
          } else if constexpr (std::is_same_v<T, IntLiteral>) {
            return literal(Value{node.value});
          } else if constexpr (std::is_same_v<T, StringLiteral>) {
            return literal(Value{node.value});
          } else if constexpr (std::is_same_v<T, New>) {
            auto fields = std::make_shared<std::vector<Value>>();
            for (const auto& arg : node.args) fields->push_back(eval(*arg));
            return Value{Instance{node.cls, std::move(fields)}};
          } else {
            return send(node);
          }
        },
        expr.node);
  }

  Value send(const Send& node) {
    Value receiver = eval(*node.receiver);
    std::vector<Value> args;
    args.reserve(node.args.size());
    for (const auto& arg : node.args) args.push_back(eval(*arg));

    DispatchRecord record;
    record.step = static_cast<int>(records_.size()) + 1;
    record.receiver_class = receiver.class_name();
    record.selector = node.selector;
    for (const auto& frame : frames_) record.stack.push_back(frame.ref);
    record.active = lookup_.activate(record.stack);
    record.resolved = lookup_.resolve(record.receiver_class, node.selector, record.active);
    records_.push_back(record);

    if (!record.resolved)
      fail(EvalErrorKind::MessageNotUnderstood,
           record.receiver_class + " does not understand " + node.selector.str() +
               " under active extensions " + record.active.str());

    const MethodDef& method = world_.method(record.resolved->method);
    push(Activation{record.resolved->method, receiver, std::move(args), &method});
    std::optional<Value> result;
    for (const auto& stmt : method.body) {
      auto step = exec(stmt);
      if (step.returned) {
        result = std::move(step.value);
        break;
      }
    }
    frames_.pop_back();
    return result ? std::move(*result) : receiver;
  }

  const World& world_;
  MethodLookup lookup_;
  int max_depth_;
  std::vector<Activation> frames_;
  std::vector<DispatchRecord> records_;
};

}  // namespace

EvalOutcome evaluate(const World& world, const ScriptId& script, const StrategyConfig& config) {
  const ScriptDef* def = world.find_script(script);
  if (def == nullptr)
    throw std::invalid_argument("unknown script '" + script.package + "." + script.name + "'");
  if (config.max_depth < 1) throw std::invalid_argument("max depth must be at least 1");
  return Evaluator(world, config).run(*def);
}

std::map<StrategyPair, EvalOutcome> evaluate_matrix(const World& world, const ScriptId& script,
                                                    const StrategyConfig& base) {
  if (world.find_script(script) == nullptr)
    throw std::invalid_argument("unknown script '" + script.package + "." + script.name + "'");

  std::vector<std::pair<StrategyPair, std::future<EvalOutcome>>> cells;
  for (auto activation : kAllActivations) {
    for (auto selection : kAllSelections) {
      StrategyConfig cfg = base;
      cfg.activation = activation;
      cfg.selection = selection;
      cells.emplace_back(StrategyPair{activation, selection},
                         std::async(std::launch::async,
                                    [&world, script, cfg] { return evaluate(world, script, cfg); }));
    }
  }
  std::map<StrategyPair, EvalOutcome> out;
  for (auto& [key, fut] : cells) out.emplace(key, fut.get());
  return out;
}

}  // namespace semx
