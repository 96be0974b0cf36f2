#include "mped/parallel.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mped::parallel {

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_max_threads(int threads) {
  if (threads < 1) return;
#ifdef _OPENMP
  omp_set_num_threads(threads);
#endif
}

int configure_from_env() {
  if (const char* env = std::getenv("MPED_THREADS")) {
    try {
      set_max_threads(std::stoi(env));
    } catch (const std::exception&) {
      // unparsable value: keep the runtime default
    }
  }
  return max_threads();
}

}  // namespace mped::parallel
