#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace ridges {

/// Worker count cap: RIDGE_THREADS when set (>=1), else hardware concurrency.
inline int max_threads() {
    static const int cap = [] {
        if (const char* env = std::getenv("RIDGE_THREADS")) {
            int v = std::atoi(env);
            if (v >= 1) return v;
        }
        unsigned hw = std::thread::hardware_concurrency();
        return hw ? static_cast<int>(hw) : 1;
    }();
    return cap;
}

namespace detail {

/// Persistent pool running chunked index ranges. The calling thread
/// participates; nested calls fall back to serial execution, so callers can
/// freely combine run-level and pass-level parallelism. Work items write to
/// disjoint output slots, so results never depend on chunk scheduling.
class ThreadPool {
  public:
    static ThreadPool& global() {
        static ThreadPool pool(max_threads() - 1);
        return pool;
    }

    explicit ThreadPool(int n_workers) {
        for (int t = 0; t < n_workers; ++t)
            workers_.emplace_back([this] { worker_loop(); });
    }

    ~ThreadPool() {
        {
            std::lock_guard lk(m_);
            stop_ = true;
            ++generation_;
        }
        cv_.notify_all();
        for (auto& w : workers_) w.join();
    }

    int worker_count() const { return static_cast<int>(workers_.size()); }

    void parallel_for(int n, int grain, const std::function<void(int, int)>& fn) {
        if (n <= 0) return;
        if (workers_.empty() || !busy_.try_lock()) {
            fn(0, n);
            return;
        }
        {
            std::lock_guard lk(m_);
            job_ = &fn;
            n_ = n;
            grain_ = grain < 1 ? 1 : grain;
            next_.store(0, std::memory_order_relaxed);
            pending_ = static_cast<int>(workers_.size());
            ++generation_;
        }
        cv_.notify_all();
        run_chunks(fn);
        {
            std::unique_lock lk(m_);
            done_cv_.wait(lk, [this] { return pending_ == 0; });
            job_ = nullptr;
        }
        busy_.unlock();
    }

  private:
    void run_chunks(const std::function<void(int, int)>& fn) {
        int i;
        while ((i = next_.fetch_add(grain_, std::memory_order_relaxed)) < n_) {
            int e = i + grain_ < n_ ? i + grain_ : n_;
            fn(i, e);
        }
    }

    void worker_loop() {
        std::uint64_t seen = 0;
        for (;;) {
            const std::function<void(int, int)>* job = nullptr;
            {
                std::unique_lock lk(m_);
                cv_.wait(lk, [&] { return stop_ || generation_ != seen; });
                if (stop_) return;
                seen = generation_;
                job = job_;
            }
            if (job) run_chunks(*job);
            {
                std::lock_guard lk(m_);
                if (--pending_ == 0) done_cv_.notify_one();
            }
        }
    }

    std::vector<std::thread> workers_;
    std::mutex busy_;  // held by the thread owning the current parallel region
    std::mutex m_;
    std::condition_variable cv_, done_cv_;
    const std::function<void(int, int)>* job_ = nullptr;
    std::atomic<int> next_{0};
    int n_ = 0, grain_ = 1, pending_ = 0;
    std::uint64_t generation_ = 0;
    bool stop_ = false;
};

} // namespace detail
} // namespace ridges
