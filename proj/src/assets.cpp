#include "cml/assets.hpp"

#include <cstdlib>
#include <string>

#include "cml/errors.hpp"

namespace cml {

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("CML_DATA_DIR"); env && *env) return env;
  return CML_DEFAULT_DATA_DIR;
}

std::filesystem::path resolve_asset(std::string_view name, std::string_view kind,
                                    std::string_view extension) {
  std::filesystem::path given{std::string(name)};
  if (std::filesystem::is_regular_file(given)) return given;
  std::filesystem::path bundled = data_dir() / std::string(kind) / given;
  if (bundled.extension().empty()) bundled += std::string(extension);
  if (std::filesystem::is_regular_file(bundled)) return bundled;
  throw InputError("no such " + std::string(kind) + " file or bundled asset: " +
                   std::string(name));
}

}  // namespace cml
