#include "geodyn/parallel.hpp"

#include <cstdlib>
#include <string>

namespace geodyn {

unsigned default_workers() {
  if (const char* env = std::getenv("GEODYN_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace geodyn
