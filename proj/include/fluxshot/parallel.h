// Copyright 2026 The fluxshot Authors
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

#ifndef FLUXSHOT_PARALLEL_H
#define FLUXSHOT_PARALLEL_H

#include <cstddef>
#include <functional>

namespace fluxshot {

/// Worker count: `requested` when nonzero, otherwise FLUXSHOT_THREADS, otherwise
/// the hardware concurrency. FLUXSHOT_THREADS also caps an explicit request.
unsigned worker_count(unsigned requested = 0);

/// Calls body(k) for k in [0, n) on up to `workers` threads. Each index is
/// visited exactly once; the first exception thrown is rethrown here.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  unsigned workers = 0);

}  // namespace fluxshot

#endif
