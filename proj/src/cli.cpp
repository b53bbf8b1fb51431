#include "semx/cli.hpp"

#include "semx/analysis.hpp"
#include "semx/frontend.hpp"
#include "semx/interp.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace semx::cli {

namespace {

using Json = nlohmann::ordered_json;

struct UsageError {
  std::string message;
};

std::optional<World> load_world(const std::string& spec, std::ostream& err) {
  SourceFile source;
  try {
    source = load_source(spec);
  } catch (const std::exception& e) {
    err << "semx: " << e.what() << "\n";
    return std::nullopt;
  }
  auto parsed = parse_world(source);
  if (auto* diags = std::get_if<std::vector<ParseDiagnostic>>(&parsed)) {
    for (const auto& d : *diags) err << d.format(source.path) << "\n";
    return std::nullopt;
  }
  return std::get<World>(std::move(parsed));
}

ScriptId find_script(const World& world, const std::string& name) {
  if (auto dot = name.find('.'); dot != std::string::npos) {
    ScriptId id{name.substr(0, dot), name.substr(dot + 1)};
    if (world.find_script(id) == nullptr) throw UsageError{"unknown script '" + name + "'"};
    return id;
  }
  auto matches = world.scripts_named(name);
  if (matches.empty()) throw UsageError{"unknown script '" + name + "'"};
  if (matches.size() > 1)
    throw UsageError{"script name '" + name + "' is ambiguous; qualify it as Package." + name};
  return matches.front();
}

Signature parse_signature(const std::string& text) {
  auto slash = text.rfind('/');
  if (slash == std::string::npos || slash == 0)
    throw UsageError{"selector must be written name/arity, got '" + text + "'"};
  Signature sig{text.substr(0, slash), 0};
  const char* first = text.data() + slash + 1;
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, sig.arity);
  if (ec != std::errc() || ptr != last || first == last || sig.arity < 0)
    throw UsageError{"bad arity in selector '" + text + "'"};
  return sig;
}

std::string location_label(const World& world, const std::string& cls, const ExtensionRef& ext) {
  return location_package(world, cls, ext) + "." + ext.name;
}

Json resolved_json(const World& world, const std::optional<ResolvedMethod>& r) {
  if (!r) return nullptr;
  return Json{{"class", r->cls},
              {"extension", r->ext.name},
              {"package", location_package(world, r->cls, r->ext)}};
}

Json value_json(const std::optional<Value>& value) {
  if (!value) return nullptr;
  if (const auto* i = std::get_if<std::int64_t>(&value->data)) return *i;
  if (const auto* s = std::get_if<std::string>(&value->data)) return *s;
  return Json{{"instanceOf", std::get<Instance>(value->data).cls}};
}

Json error_json(const std::optional<EvalError>& error) {
  if (!error) return nullptr;
  Json out{{"kind", to_string(error->kind)}, {"message", error->message}};
  if (!error->tag.empty()) out["tag"] = error->tag;
  out["stack"] = error->stack;
  return out;
}

std::string error_label(const EvalError& error) {
  std::string out(to_string(error.kind));
  if (!error.tag.empty()) out += "(" + error.tag + ")";
  return out;
}

// ---------------------------------------------------------------------------
// run

struct RunOptions {
  std::string file;
  std::string script;
  std::string activation = "lexical";
  std::string selection = "hrc-first";
  bool refinement_inheritance = false;
  bool no_cache = false;
  int max_depth = 1024;
  std::string trace = "text";
};

int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  auto world = load_world(opts.file, err);
  if (!world) return kUsageError;
  ScriptId script = find_script(*world, opts.script);

  StrategyConfig cfg;
  cfg.activation = *parse_activation(opts.activation);
  cfg.selection = *parse_selection(opts.selection);
  cfg.imports.refinement_inheritance = opts.refinement_inheritance;
  cfg.cache_enabled = !opts.no_cache;
  cfg.max_depth = opts.max_depth;
  EvalOutcome outcome = evaluate(*world, script, cfg);

  if (opts.trace == "json") {
    Json dispatches = Json::array();
    for (const auto& d : outcome.dispatches) {
      Json active = Json::array();
      for (const auto& ref : d.active) active.push_back(ref.str());
      dispatches.push_back(Json{{"n", d.step},
                                {"receiverClass", d.receiver_class},
                                {"selector", d.selector.str()},
                                {"activation", std::move(active)},
                                {"resolved", resolved_json(*world, d.resolved)}});
    }
    Json doc{{"result", value_json(outcome.result)},
             {"dispatches", std::move(dispatches)},
             {"error", error_json(outcome.error)}};
    out << doc.dump(2) << "\n";
  } else {
    for (const auto& d : outcome.dispatches) {
      out << d.step << ". " << d.receiver_class << "." << d.selector.str() << " -> ";
      if (d.resolved)
        out << d.resolved->cls << " [" << location_label(*world, d.resolved->cls, d.resolved->ext)
            << "]\n";
      else
        out << "(not understood)\n";
    }
    if (outcome.error)
      out << "error: " << error_label(*outcome.error) << ": " << outcome.error->message << "\n";
  }
  return outcome.ok() ? kSuccess : kRuntimeFailure;
}

// ---------------------------------------------------------------------------
// diff

struct DiffOptions {
  std::string file;
  std::string script;
  bool refinement_inheritance = false;
  std::string format = "text";
};

std::string cell_label(const World& world, const EvalOutcome& outcome) {
  std::string resolved = "-";
  if (const DispatchRecord* last = outcome.last_resolved())
    resolved = location_label(world, last->resolved->cls, last->resolved->ext) + "@" +
               last->resolved->cls;
  if (outcome.error) return error_label(*outcome.error) + " after " + resolved;
  return resolved;
}

int cmd_diff(const DiffOptions& opts, std::ostream& out, std::ostream& err) {
  auto world = load_world(opts.file, err);
  if (!world) return kUsageError;
  ScriptId script = find_script(*world, opts.script);
  StrategyConfig base;
  base.imports.refinement_inheritance = opts.refinement_inheritance;
  auto matrix = evaluate_matrix(*world, script, base);

  bool all_ok = true;
  for (const auto& [key, outcome] : matrix) all_ok = all_ok && outcome.ok();

  if (opts.format == "json") {
    Json cells = Json::array();
    for (auto activation : kAllActivations) {
      for (auto selection : kAllSelections) {
        const EvalOutcome& o = matrix.at({activation, selection});
        const DispatchRecord* last = o.last_resolved();
        cells.push_back(Json{{"activation", to_string(activation)},
                             {"selection", to_string(selection)},
                             {"resolved", last ? resolved_json(*world, last->resolved) : Json()},
                             {"error", o.error ? Json(error_label(*o.error)) : Json()}});
      }
    }
    out << Json{{"script", script.package + "." + script.name}, {"cells", std::move(cells)}}.dump(2)
        << "\n";
    return all_ok ? kSuccess : kRuntimeFailure;
  }

  std::vector<std::vector<std::string>> rows{{"activation"}};
  for (auto selection : kAllSelections) rows[0].emplace_back(to_string(selection));
  for (auto activation : kAllActivations) {
    std::vector<std::string> row{std::string(to_string(activation))};
    for (auto selection : kAllSelections)
      row.push_back(cell_label(*world, matrix.at({activation, selection})));
    rows.push_back(std::move(row));
  }
  std::vector<std::size_t> widths(rows[0].size(), 0);
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], row[c].size());
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << row[c];
      if (c + 1 < row.size()) out << std::string(widths[c] - row[c].size() + 2, ' ');
    }
    out << "\n";
  }
  return all_ok ? kSuccess : kRuntimeFailure;
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeOptions {
  std::string file;
  std::string report = "conflicts";
  std::string format = "text";
};

std::string cell_str(const MethodCell& cell, const World& world, const Signature& sig) {
  return cell.cls + "." + sig.str() + " [" + location_label(world, cell.cls, cell.ext) + "]";
}

int cmd_analyze(const AnalyzeOptions& opts, std::ostream& out, std::ostream& err) {
  auto world = load_world(opts.file, err);
  if (!world) return kUsageError;

  if (opts.report == "stats") {
    WorldStats s = world_stats(*world);
    std::pair<const char*, double> fields[] = {
        {"extensionMethodFraction", s.extension_method_fraction},
        {"extendedClassFraction", s.extended_class_fraction},
        {"packagesDefiningExtensionsFraction", s.packages_defining_extensions_fraction},
        {"packagesWithExtendedClassesFraction", s.packages_with_extended_classes_fraction}};
    if (opts.format == "json") {
      Json doc = Json::object();
      for (const auto& [k, v] : fields) doc[k] = v;
      out << doc.dump(2) << "\n";
    } else {
      for (const auto& [k, v] : fields) out << k << " " << v << "\n";
    }
    return kSuccess;
  }

  auto overwrites = detect_overwrites(*world);
  auto overrides = detect_overrides(*world);
  if (opts.format == "json") {
    Json ow = Json::array();
    for (const auto& c : overwrites) {
      Json exts = Json::array();
      for (const auto& e : c.extensions) exts.push_back(e.str());
      ow.push_back(Json{{"class", c.cls},
                        {"selector", c.sig.str()},
                        {"extensions", std::move(exts)},
                        {"kind", to_string(c.kind)}});
    }
    Json ov = Json::array();
    for (const auto& c : overrides) {
      ov.push_back(Json{{"selector", c.sig.str()},
                        {"lower", {{"class", c.lower.cls}, {"extension", c.lower.ext.str()}}},
                        {"upper", {{"class", c.upper.cls}, {"extension", c.upper.ext.str()}}},
                        {"kind", to_string(c.kind)}});
    }
    out << Json{{"overwrites", std::move(ow)}, {"overrides", std::move(ov)}}.dump(2) << "\n";
    return kSuccess;
  }

  out << "overwrites: " << overwrites.size() << "\n";
  for (const auto& c : overwrites) {
    out << "  " << c.cls << "." << c.sig.str() << ":";
    for (std::size_t i = 0; i < c.extensions.size(); ++i)
      out << (i == 0 ? " " : ", ") << c.extensions[i].str();
    out << " (" << to_string(c.kind) << ")\n";
  }
  out << "overrides: " << overrides.size() << "\n";
  for (const auto& c : overrides)
    out << "  " << cell_str(c.lower, *world, c.sig) << " overrides "
        << cell_str(c.upper, *world, c.sig) << " (" << to_string(c.kind) << ")\n";
  return kSuccess;
}

// ---------------------------------------------------------------------------
// aos

struct AosOptions {
  std::string file;
  std::string cls;
  std::string selector;
  std::vector<std::string> exts;
  std::string strategy = "hrc";
  bool brute_force = false;
  std::string format = "text";
};

ExtensionRef parse_extref(const World& world, const std::string& text) {
  auto dot = text.find('.');
  if (dot == std::string::npos) throw UsageError{"extension must be written Package.Name"};
  ExtensionRef ref{text.substr(0, dot), text.substr(dot + 1)};
  if (world.find_extension(ref) == nullptr) throw UsageError{"unknown extension '" + text + "'"};
  return ref;
}

int cmd_aos(const AosOptions& opts, std::ostream& out, std::ostream& err) {
  auto world = load_world(opts.file, err);
  if (!world) return kUsageError;
  if (world->find_class(opts.cls) == nullptr) throw UsageError{"unknown class '" + opts.cls + "'"};

  std::vector<ExtensionRef> refs;
  for (const auto& text : opts.exts) {
    if (text == ExtensionRef::kGlobalName) continue;
    refs.push_back(parse_extref(*world, text));
  }
  MessageContext mess{opts.cls, parse_signature(opts.selector), ActiveExtensions(refs)};
  SelectionStrategy strategy = opts.strategy == "ext" ? SelectionStrategy::ExtensionsFirst
                                                      : SelectionStrategy::HierarchyFirst;

  AosResult result;
  std::optional<LocationSet> brute;
  try {
    result = aos(*world, mess, strategy);
    if (opts.brute_force) brute = aos_bruteforce(*world, mess, strategy);
  } catch (const AnalysisError& e) {
    err << "semx: " << e.what() << "\n";
    return kUsageError;
  }

  const auto enumerated = static_cast<std::int64_t>(result.locations.size());
  bool match = enumerated == result.formula_size;
  bool brute_match = !brute || *brute == result.locations;

  if (opts.format == "json") {
    Json locs = Json::array();
    for (const auto& l : result.locations)
      locs.push_back(Json{{"class", l.cls}, {"index", l.ext_index}, {"extension", l.ext.str()}});
    Json doc{{"receiverClass", mess.receiver_class},
             {"selector", mess.sig.str()},
             {"activeExtensions", Json::array()},
             {"strategy", to_string(strategy)},
             {"base", {{"class", result.def_class},
                       {"index", result.def_index},
                       {"extension", mess.exts[result.def_index - 1].str()}}},
             {"locations", std::move(locs)},
             {"enumeratedSize", enumerated},
             {"formulaSize", result.formula_size},
             {"match", match}};
    for (const auto& ref : mess.exts) doc["activeExtensions"].push_back(ref.str());
    if (brute) {
      doc["bruteForceSize"] = brute->size();
      doc["bruteForceMatch"] = brute_match;
    }
    out << doc.dump(2) << "\n";
  } else {
    out << "message: " << mess.receiver_class << "." << mess.sig.str() << " under "
        << mess.exts.str() << "\n";
    out << "strategy: " << to_string(strategy) << "\n";
    out << "base method: " << result.def_class << " ["
        << mess.exts[result.def_index - 1].str() << "] (i=" << result.def_index << ")\n";
    out << "locations:";
    if (result.locations.empty()) out << " (none)";
    out << "\n";
    for (const auto& l : result.locations)
      out << "  " << l.cls << " [" << l.ext.str() << "] (j=" << l.ext_index << ")\n";
    out << "size: " << enumerated << "\n";
    out << "formula: " << result.formula_size << "\n";
    out << (match ? "match" : "MISMATCH") << "\n";
    if (brute)
      out << "brute-force: " << brute->size() << " locations, "
          << (brute_match ? "match" : "MISMATCH") << "\n";
  }
  return match && brute_match ? kSuccess : kRuntimeFailure;
}

// ---------------------------------------------------------------------------
// aos-table

struct TableOptions {
  double subclasses = 0;
  double superclasses = 0;
  int max_exts = 10;
  std::string format = "text";
};

int cmd_aos_table(const TableOptions& opts, std::ostream& out, std::ostream& err) {
  std::vector<DominanceRow> rows;
  Fraction summary;
  try {
    rows = dominance_table(opts.subclasses, opts.superclasses, opts.max_exts);
    summary = dominance_summary(rows);
  } catch (const AnalysisError& e) {
    err << "semx: " << e.what() << "\n";
    return kUsageError;
  }

  if (opts.format == "json") {
    Json jrows = Json::array();
    for (const auto& r : rows)
      jrows.push_back(Json{{"extCount", r.ext_count}, {"maxFavorableI", r.max_favorable_i}});
    out << Json{{"rows", std::move(jrows)},
                {"summary", {{"numerator", summary.numerator},
                             {"denominator", summary.denominator},
                             {"value", summary.value()}}}}
               .dump(2)
        << "\n";
    return kSuccess;
  }
  out << "|e|  max i\n";
  for (const auto& r : rows) out << std::left << std::setw(5) << r.ext_count << r.max_favorable_i << "\n";
  std::ostringstream pct;
  pct << std::fixed << std::setprecision(4) << summary.value();
  out << "summary: " << summary.str() << " = " << pct.str() << "\n";
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Scoped extension method lookup and accidental override analysis", "semx"};
  app.require_subcommand(1);

  const std::vector<std::string> activations{"lexical", "lr-up", "lr-down"};
  const std::vector<std::string> selections{"ext-first", "hrc-first"};
  const std::vector<std::string> formats{"text", "json"};

  RunOptions run_opts;
  auto* run_cmd = app.add_subcommand("run", "Evaluate a script and print its dispatch trace");
  run_cmd->add_option("file", run_opts.file, "World file or bundled fixture name")->required();
  run_cmd->add_option("--script", run_opts.script, "Script name (or Package.name)")->required();
  run_cmd->add_option("--activation", run_opts.activation)->check(CLI::IsMember(activations));
  run_cmd->add_option("--selection", run_opts.selection)->check(CLI::IsMember(selections));
  run_cmd->add_flag("--refinement-inheritance", run_opts.refinement_inheritance,
                    "Class-level imports also apply in subclasses");
  run_cmd->add_flag("--no-cache", run_opts.no_cache, "Disable lookup memoization");
  run_cmd->add_option("--max-depth", run_opts.max_depth)->check(CLI::PositiveNumber);
  run_cmd->add_option("--trace", run_opts.trace)->check(CLI::IsMember(formats));

  DiffOptions diff_opts;
  auto* diff_cmd = app.add_subcommand("diff", "Compare a script under all six strategy pairs");
  diff_cmd->add_option("file", diff_opts.file)->required();
  diff_cmd->add_option("--script", diff_opts.script)->required();
  diff_cmd->add_flag("--refinement-inheritance", diff_opts.refinement_inheritance);
  diff_cmd->add_option("--format", diff_opts.format)->check(CLI::IsMember(formats));

  AnalyzeOptions analyze_opts;
  auto* analyze_cmd = app.add_subcommand("analyze", "Report conflicts or extension statistics");
  analyze_cmd->add_option("file", analyze_opts.file)->required();
  analyze_cmd->add_option("--report", analyze_opts.report)
      ->check(CLI::IsMember({"conflicts", "stats"}));
  analyze_cmd->add_option("--format", analyze_opts.format)->check(CLI::IsMember(formats));

  AosOptions aos_opts;
  auto* aos_cmd = app.add_subcommand("aos", "Accidental override space of one message");
  aos_cmd->add_option("file", aos_opts.file)->required();
  aos_cmd->add_option("--class,--receiver", aos_opts.cls, "Receiver class of the message")
      ->required();
  aos_cmd->add_option("--selector", aos_opts.selector, "name/arity")->required();
  aos_cmd->add_option("--exts", aos_opts.exts, "Active extensions, highest priority first")
      ->delimiter(',');
  aos_cmd->add_option("--strategy", aos_opts.strategy)->check(CLI::IsMember({"ext", "hrc"}));
  aos_cmd->add_flag("--brute-force", aos_opts.brute_force,
                    "Cross-check the location set by enumeration");
  aos_cmd->add_option("--format", aos_opts.format)->check(CLI::IsMember(formats));

  TableOptions table_opts;
  auto* table_cmd = app.add_subcommand("aos-table", "Hierarchy-first dominance table");
  table_cmd->add_option("--subclasses", table_opts.subclasses)->required();
  table_cmd->add_option("--superclasses", table_opts.superclasses)->required();
  table_cmd->add_option("--max-exts", table_opts.max_exts)->check(CLI::PositiveNumber);
  table_cmd->add_option("--format", table_opts.format)->check(CLI::IsMember(formats));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(run_opts, out, err);
    if (diff_cmd->parsed()) return cmd_diff(diff_opts, out, err);
    if (analyze_cmd->parsed()) return cmd_analyze(analyze_opts, out, err);
    if (aos_cmd->parsed()) return cmd_aos(aos_opts, out, err);
    return cmd_aos_table(table_opts, out, err);
  } catch (const UsageError& e) {
    err << "semx: " << e.message << "\n";
    return kUsageError;
  }
}

}  // namespace semx::cli
