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

#include "fluxshot/parallel.h"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace fluxshot {

namespace {

unsigned env_threads() {
    const char* raw = std::getenv("FLUXSHOT_THREADS");
    if (raw == nullptr || *raw == '\0') {
        return 0;
    }
    try {
        const long value = std::stol(raw);
        return value > 0 ? static_cast<unsigned>(value) : 0;
    } catch (const std::exception&) {
        return 0;
    }
}

}  // namespace

unsigned worker_count(unsigned requested) {
    const unsigned cap = env_threads();
    unsigned count = requested;
    if (count == 0) {
        count = cap != 0 ? cap : std::max(1u, std::thread::hardware_concurrency());
    } else if (cap != 0) {
        count = std::min(count, cap);
    }
    return std::max(1u, count);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, unsigned workers) {
    const unsigned count =
        static_cast<unsigned>(std::min<std::size_t>(worker_count(workers), std::max<std::size_t>(n, 1)));
    if (count <= 1) {
        for (std::size_t k = 0; k < n; ++k) {
            body(k);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    constexpr std::size_t kChunk = 64;
    auto worker = [&] {
        for (;;) {
            const std::size_t begin = next.fetch_add(kChunk);
            if (begin >= n) {
                return;
            }
            const std::size_t end = std::min(n, begin + kChunk);
            try {
                for (std::size_t k = begin; k < end; ++k) {
                    body(k);
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(count);
    for (unsigned t = 0; t < count; ++t) {
        pool.emplace_back(worker);
    }
    for (auto& th : pool) {
        th.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

}  // namespace fluxshot
