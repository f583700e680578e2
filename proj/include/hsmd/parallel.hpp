// Copyright 2026 The HSMD Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <functional>
#include <memory>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

namespace hsmd {

namespace detail {

// Persistent worker pool shared by all per-pixel stages. Workers are spawned
// once and reused, so dispatching a row job costs a wakeup rather than a
// thread spawn. Jobs are immutable snapshots; a worker that arrives late
// sees its own job exhausted and just goes back to sleep. Calls must not be
// nested from inside a worker.
class WorkerPool {
public:
    static WorkerPool& instance() {
        static WorkerPool pool;
        return pool;
    }

    void run(const std::vector<std::pair<int, int>>& blocks,
             const std::function<void(int, int)>& fn, int helpers) {
        std::lock_guard<std::mutex> job_lock(job_mutex_);  // one job at a time
        auto job = std::make_shared<Job>();
        job->blocks = blocks;
        job->fn = &fn;
        job->remaining.store(static_cast<int>(blocks.size()), std::memory_order_relaxed);
        ensure_workers(helpers);
        {
            std::lock_guard<std::mutex> lk(m_);
            current_ = job;
            ++generation_;
        }
        wake_cv_.notify_all();
        work(*job);
        std::unique_lock<std::mutex> lk(m_);
        done_cv_.wait(lk, [&] { return job->remaining.load(std::memory_order_acquire) == 0; });
        current_.reset();
    }

    ~WorkerPool() {
        {
            std::lock_guard<std::mutex> lk(m_);
            stop_ = true;
        }
        wake_cv_.notify_all();
        for (auto& w : workers_)
            w.join();
    }

    WorkerPool(const WorkerPool&) = delete;
    WorkerPool& operator=(const WorkerPool&) = delete;

private:
    struct Job {
        std::vector<std::pair<int, int>> blocks;
        const std::function<void(int, int)>* fn = nullptr;
        std::atomic<int> next{0};
        std::atomic<int> remaining{0};
    };

    WorkerPool() = default;

    void ensure_workers(int needed) {
        std::lock_guard<std::mutex> lk(m_);
        while (static_cast<int>(workers_.size()) < needed)
            workers_.emplace_back([this] { worker_loop(); });
    }

    void work(Job& job) {
        const int count = static_cast<int>(job.blocks.size());
        for (;;) {
            const int i = job.next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count)
                return;
            (*job.fn)(job.blocks[i].first, job.blocks[i].second);
            if (job.remaining.fetch_sub(1, std::memory_order_acq_rel) == 1) {
                std::lock_guard<std::mutex> lk(m_);
                done_cv_.notify_all();
            }
        }
    }

    void worker_loop() {
        std::uint64_t seen = 0;
        for (;;) {
            std::shared_ptr<Job> job;
            {
                std::unique_lock<std::mutex> lk(m_);
                wake_cv_.wait(lk, [&] { return stop_ || generation_ != seen; });
                if (stop_)
                    return;
                seen = generation_;
                job = current_;
            }
            if (job)
                work(*job);
        }
    }

    std::mutex job_mutex_;
    std::mutex m_;
    std::condition_variable wake_cv_;
    std::condition_variable done_cv_;
    std::vector<std::thread> workers_;
    std::shared_ptr<Job> current_;
    std::uint64_t generation_ = 0;
    bool stop_ = false;
};

}  // namespace detail

// Splits [0, height) into `threads` contiguous row blocks. Callers must only
// write rows inside their own block, so the result is independent of the
// worker count and of which worker runs which block.
template <typename Fn>
void parallel_for_rows(int height, int threads, Fn&& fn) {
    threads = std::clamp(threads, 1, std::max(1, height));
    if (threads == 1) {
        fn(0, height);
        return;
    }
    const int chunk = (height + threads - 1) / threads;
    std::vector<std::pair<int, int>> blocks;
    blocks.reserve(threads);
    for (int begin = 0; begin < height; begin += chunk)
        blocks.emplace_back(begin, std::min(height, begin + chunk));
    const std::function<void(int, int)> body = std::forward<Fn>(fn);
    detail::WorkerPool::instance().run(blocks, body, static_cast<int>(blocks.size()) - 1);
}

}  // namespace hsmd
