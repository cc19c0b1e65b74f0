// Copyright 2026 The graded-min Authors
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

#pragma once

#include <cstddef>
#include <functional>

namespace graded {

/// Environment variable consulted for the default worker count.
inline constexpr const char* kThreadsEnv = "GRADED_MIN_THREADS";

/// Worker count used by parallel_for; defaults to the environment override
/// or the hardware concurrency.
int thread_count();
void set_thread_count(int threads);

/// Runs body(i) for i in [0, n). Each index is processed exactly once and
/// must write only to its own slot, so results do not depend on the worker
/// count. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace graded
