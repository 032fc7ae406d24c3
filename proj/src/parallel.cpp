#include "rigmixer/parallel.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rigmixer {

int configure_threads_from_env() {
    const char* env = std::getenv("RIGMIXER_THREADS");
    if (env != nullptr) {
        try {
            const int n = std::stoi(env);
            if (n > 0) {
#ifdef _OPENMP
                omp_set_num_threads(n);
#endif
                return n;
            }
        } catch (...) {
            // ignore malformed values; keep the runtime default
        }
    }
    return max_threads();
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace rigmixer
