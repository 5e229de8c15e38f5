#include "lrperc/parallel.hpp"

#include <cstdlib>
#include <string>

namespace lrp {

unsigned resolve_threads(unsigned requested) noexcept {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("PERC_LR_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace lrp
