#pragma once

namespace mped::parallel {

/// Number of OpenMP threads the kernels will use (1 without OpenMP).
int max_threads();

/// Cap the kernel thread count. Values < 1 are ignored.
void set_max_threads(int threads);

/// Apply the MPED_THREADS environment variable, if set to a positive integer.
/// Returns the resulting thread count.
int configure_from_env();

}  // namespace mped::parallel
