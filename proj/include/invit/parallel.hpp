// Copyright 2026 The invit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace invit {

// INVIT_THREADS if set and positive, else hardware concurrency.
unsigned thread_count();
void set_thread_count(unsigned n);  // 0 restores the default

// Runs fn(i) for i in [0, n) over thread_count() workers.  Results must be
// written to per-index slots; the caller reduces in index order.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace invit
