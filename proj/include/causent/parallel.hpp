#pragma once

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <queue>
#include <thread>
#include <vector>

namespace causent {

// Minimal fixed-size worker pool. parallel_for partitions an index range
// over the workers; calls made from inside a worker run inline, so nested
// parallel sections never oversubscribe.
class ThreadPool {
public:
    static ThreadPool& global() {
        static ThreadPool pool(default_threads());
        return pool;
    }

    static std::size_t default_threads() {
        unsigned hw = std::thread::hardware_concurrency();
        return hw ? hw : 1;
    }

    explicit ThreadPool(std::size_t threads) { start(threads); }

    ~ThreadPool() { stop(); }

    ThreadPool(const ThreadPool&) = delete;
    ThreadPool& operator=(const ThreadPool&) = delete;

    std::size_t size() const { return workers_.size(); }

    void resize(std::size_t threads) {
        stop();
        start(threads);
    }

    // Runs fn(i) for i in [0, n). Blocks until all items finish.
    void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
        if (n == 0) return;
        if (in_worker() || workers_.empty() || n == 1) {
            for (std::size_t i = 0; i < n; ++i) fn(i);
            return;
        }
        std::atomic<std::size_t> next{0};
        std::atomic<std::size_t> done{0};
        std::mutex m;
        std::condition_variable cv;
        auto task = [&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) break;
                fn(i);
                if (done.fetch_add(1) + 1 == n) {
                    std::lock_guard<std::mutex> lk(m);
                    cv.notify_all();
                }
            }
        };
        {
            std::lock_guard<std::mutex> lk(queue_mutex_);
            for (std::size_t w = 0; w < workers_.size(); ++w) tasks_.push(task);
        }
        queue_cv_.notify_all();
        task();  // caller participates
        std::unique_lock<std::mutex> lk(m);
        cv.wait(lk, [&] { return done.load() >= n; });
    }

private:
    static bool& in_worker() {
        thread_local bool flag = false;
        return flag;
    }

    void start(std::size_t threads) {
        stopping_ = false;
        if (threads < 1) threads = 1;
        // One of the `threads` lanes is the caller itself.
        for (std::size_t i = 0; i + 1 < threads; ++i) {
            workers_.emplace_back([this] {
                in_worker() = true;
                for (;;) {
                    std::function<void()> task;
                    {
                        std::unique_lock<std::mutex> lk(queue_mutex_);
                        queue_cv_.wait(lk, [this] { return stopping_ || !tasks_.empty(); });
                        if (stopping_ && tasks_.empty()) return;
                        task = std::move(tasks_.front());
                        tasks_.pop();
                    }
                    task();
                }
            });
        }
    }

    void stop() {
        {
            std::lock_guard<std::mutex> lk(queue_mutex_);
            stopping_ = true;
        }
        queue_cv_.notify_all();
        for (auto& w : workers_) w.join();
        workers_.clear();
        std::queue<std::function<void()>>().swap(tasks_);
    }

    std::vector<std::thread> workers_;
    std::queue<std::function<void()>> tasks_;
    std::mutex queue_mutex_;
    std::condition_variable queue_cv_;
    bool stopping_ = false;
};

inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    ThreadPool::global().parallel_for(n, fn);
}

}  // namespace causent
