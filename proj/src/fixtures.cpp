#include "semx/frontend.hpp"

#include <filesystem>
#include <stdexcept>

namespace semx {

std::optional<Fixture> find_fixture(std::string_view name) {
  for (const auto& fx : fixtures()) {
    std::string_view stem = fx.name.substr(0, fx.name.rfind('.'));
    if (fx.name == name || stem == name) return fx;
  }
  return std::nullopt;
}

SourceFile load_source(const std::string& spec) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(spec, ec)) return SourceFile::read(spec);
  if (auto fx = find_fixture(spec)) return {std::string(fx->name), std::string(fx->text)};
  throw std::runtime_error("no such file or bundled fixture: '" + spec + "'");
}

}  // namespace semx
