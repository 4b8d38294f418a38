#pragma once

#include <cstddef>
#include <functional>

namespace amil {

// Runs fn(0..n-1) on up to `workers` threads. Each task must write only its
// own output slot and draw randomness from seeds derived from its index, so
// results are identical for every worker count.
void parallel_for_indexed(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

// AMIL_WORKERS environment variable, else hardware concurrency.
int default_workers();

} // namespace amil
