#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace debunk {

/// Runs `work(i)` for i in [0, n) on up to `workers` threads and hands each
/// produced result to `commit(i, result)` in ascending index order, so the
/// committed sequence is independent of scheduling. An item whose work
/// returns nullopt is skipped by the committer. `commit` runs under a lock
/// and never concurrently with itself.
///
/// The first exception thrown by `work` or `commit` stops dispatch and is
/// rethrown after all threads have joined.
template <typename Result, typename Work, typename Commit>
void run_ordered(std::size_t n, int workers, Work&& work, Commit&& commit) {
    std::vector<std::optional<Result>> slots(n);
    std::vector<char> done(n, 0);
    std::size_t next_commit = 0;
    std::atomic<std::size_t> next_item{0};
    std::atomic<bool> abort{false};
    std::exception_ptr failure;
    std::mutex mu;

    auto drain = [&] {
        while (next_commit < n && done[next_commit]) {
            if (slots[next_commit]) commit(next_commit, std::move(*slots[next_commit]));
            slots[next_commit].reset();
            ++next_commit;
        }
    };

    auto loop = [&] {
        for (;;) {
            if (abort.load()) return;
            const auto i = next_item.fetch_add(1);
            if (i >= n) return;
            try {
                auto r = work(i);
                std::lock_guard lock(mu);
                slots[i] = std::move(r);
                done[i] = 1;
                drain();
            } catch (...) {
                std::lock_guard lock(mu);
                if (!failure) failure = std::current_exception();
                abort = true;
                return;
            }
        }
    };

    const auto count = static_cast<std::size_t>(std::clamp(workers, 1, 256));
    if (count == 1 || n <= 1) {
        loop();
    } else {
        std::vector<std::jthread> threads;
        threads.reserve(std::min(count, n));
        for (std::size_t t = 0; t < std::min(count, n); ++t) threads.emplace_back(loop);
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace debunk
