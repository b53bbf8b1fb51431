#pragma once

// Textual world DSL (.semx files): parsing, canonical export and the
// bundled fixture worlds.

#include "semx/model.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace semx {

struct SourceFile {
  std::string path;  ///< Display name; may be empty for inline text.
  std::string content;

  static SourceFile inline_text(std::string text) { return {"<inline>", std::move(text)}; }
  /// Throws std::runtime_error if the file cannot be read.
  static SourceFile read(const std::string& path);
};

enum class ParseDiagnosticKind { Syntax, Resolution };

struct ParseDiagnostic {
  int line = 1;
  int column = 1;
  std::string message;
  ParseDiagnosticKind kind = ParseDiagnosticKind::Syntax;

  /// "path:line:col: kind: message"
  std::string format(std::string_view path) const;
};

using ParseResult = std::variant<World, std::vector<ParseDiagnostic>>;

/// Parses and validates. A World is returned only if it passes
/// validate_world; otherwise every resolution problem is reported with the
/// location of the offending declaration.
ParseResult parse_world(const SourceFile& source);

/// Canonical JSON rendering with top-level keys packages, classes,
/// extensions, methods, scripts (in that order). Deterministic.
std::string export_world(const World& world);

struct Fixture {
  std::string_view name;  ///< e.g. "fig6.semx"
  std::string_view text;
};

const std::vector<Fixture>& fixtures();

/// Finds a bundled fixture by file name, with or without the .semx suffix.
std::optional<Fixture> find_fixture(std::string_view name);

/// Reads `spec` from disk if such a file exists, else from the bundled
/// fixtures. Throws std::runtime_error if neither matches.
SourceFile load_source(const std::string& spec);

}  // namespace semx
