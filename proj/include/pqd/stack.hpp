#pragma once

#include <cstddef>
#include <functional>

namespace pqd {

/// Checking and evaluation recurse on term depth. Runs `task` on a thread
/// with a stack of `bytes` and rethrows whatever it throws.
void run_with_stack(std::size_t bytes, const std::function<void()>& task);

inline constexpr std::size_t kLargeStack = std::size_t{1} << 30;

}  // namespace pqd
