#include "crnlyap/parallel.hpp"

#include <cstdlib>
#include <string>

namespace crnlyap {

std::size_t resolve_jobs(std::optional<int> requested) {
  if (requested && *requested > 0) return static_cast<std::size_t>(*requested);
  if (const char* env = std::getenv("CRN_LYAP_JOBS")) {
    try {
      std::size_t used = 0;
      const int value = std::stoi(env, &used);
      if (used == std::string(env).size() && value > 0) return static_cast<std::size_t>(value);
    } catch (const std::exception&) {
      // fall through to the default
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace crnlyap
