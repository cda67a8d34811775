// Copyright 2026 The drcnet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <functional>

namespace drcnet {

// Runs fn(i) for every i in [0, count) on up to `threads` workers. Work items
// are claimed dynamically; callers write results into per-index slots so the
// outcome never depends on scheduling. threads <= 1 runs inline, in order.
// The first exception thrown by any item is rethrown on the calling thread.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

// As above, also passing the worker slot in [0, min(threads, count)) so
// callers can keep per-worker scratch state.
void parallel_for_workers(std::size_t count, int threads,
                          const std::function<void(std::size_t item, int worker)>& fn);

// Resolves a user-facing thread count: 0 means hardware concurrency.
int resolve_threads(int requested);

}  // namespace drcnet
