// Copyright (c) 2026 The bss-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace bss {

/// Runs fn(i) for i in [0, count) on up to `threads` worker threads. Work is
/// handed out dynamically, so callers must write results by index and must
/// not depend on execution order. The first exception thrown by any task is
/// rethrown after all workers have joined. threads <= 1 runs inline.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace bss
