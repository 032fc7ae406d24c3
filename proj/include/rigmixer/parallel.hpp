#pragma once

namespace rigmixer {

// Execution policy for the data-parallel kernels (voxel scans, distance
// transforms, field sweeps, surface extraction). Serial runs the exact same
// per-element arithmetic on one thread, so results are bit-identical; tests
// rely on that, and the bench target compares the two.
enum class Exec { Serial, Parallel };

// Applies RIGMIXER_THREADS (if set and > 0) to the OpenMP runtime.
// Returns the resulting thread cap.
int configure_threads_from_env();

int max_threads();

} // namespace rigmixer
