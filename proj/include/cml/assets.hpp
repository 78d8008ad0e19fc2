#pragma once

#include <filesystem>
#include <string_view>

namespace cml {

/// CML_DATA_DIR when set, else the source tree's data directory.
std::filesystem::path data_dir();

/// An existing path is returned as is; otherwise `name` is looked up under
/// data_dir()/<kind>/ with `extension` appended. Throws InputError.
std::filesystem::path resolve_asset(std::string_view name, std::string_view kind,
                                    std::string_view extension);

}  // namespace cml
