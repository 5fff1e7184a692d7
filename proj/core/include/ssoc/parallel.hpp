#pragma once

#include <functional>

namespace ssoc {

/// Worker count: SSOC_CERTIFY_THREADS if set to a positive integer, else the hardware concurrency.
int worker_count();

/// Runs body(i) for i in [0, count). Each index should write only its own output slot,
/// so results do not depend on the number of workers.
void parallel_for(int count, const std::function<void(int)>& body);

}  // namespace ssoc
