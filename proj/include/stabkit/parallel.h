#pragma once

#include <functional>

namespace stabkit {

/// requested > 0 wins; otherwise STABKIT_THREADS, otherwise the hardware
/// concurrency (at least 1).
int ResolveThreads(int requested);

/// Runs body(i) for i in [0, count) on up to `threads` workers. The first
/// exception thrown by any body is rethrown after all workers join.
void ParallelFor(int count, int threads, const std::function<void(int)>& body);

}  // namespace stabkit
