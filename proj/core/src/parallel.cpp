#include "limitnls/parallel.hpp"

#include <cstdlib>
#include <string>

namespace limitnls {

int thread_cap() {
    if (const char* env = std::getenv("LIMITNLS_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0 && v <= 4096) return static_cast<int>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace limitnls
