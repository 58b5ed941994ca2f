#include "bohm2p/parallel.hpp"

#include <cstdlib>
#include <string>

namespace bohm2p {

unsigned resolve_thread_count(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("BOHM2P_THREADS"); env != nullptr && *env) {
    try {
      const long value = std::stol(env);
      if (value > 0) return static_cast<unsigned>(value);
    } catch (const std::exception&) {
      // fall through to the hardware default
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace bohm2p
