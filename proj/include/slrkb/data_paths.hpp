#pragma once

#include <cstdlib>
#include <string>

namespace slrkb {

// Bundled fixtures live here unless SLRKB_DATA_DIR points elsewhere.
inline std::string default_data_dir() {
    if (const char* env = std::getenv("SLRKB_DATA_DIR"); env && *env) return env;
#ifdef SLRKB_DATA_DIR_DEFAULT
    return SLRKB_DATA_DIR_DEFAULT;
#else
    return "data";
#endif
}

}  // namespace slrkb
