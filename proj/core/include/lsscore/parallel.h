// Copyright 2026 The lsscore Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LSSCORE_PARALLEL_H_
#define LSSCORE_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace lsscore {

// Number of worker threads used when a caller passes 0.
size_t DefaultThreadCount();

// Runs fn(i) for i in [0, count) on up to `threads` workers (0 = default).
// Work is handed out dynamically; callers must make fn's effects independent
// of which thread runs which index. The first exception thrown by any fn is
// rethrown after all workers finish.
void ParallelFor(size_t count, size_t threads,
                 const std::function<void(size_t)>& fn);

}  // namespace lsscore

#endif  // LSSCORE_PARALLEL_H_
