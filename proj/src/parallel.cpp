#include "asbs/parallel.hpp"

#include <atomic>
#include <condition_variable>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace asbs {

int thread_count() {
    static const int n = [] {
        if (const char* env = std::getenv("ASBS_NUM_THREADS")) {
            const int v = std::atoi(env);
            if (v > 0) return v;
        }
        const unsigned hc = std::thread::hardware_concurrency();
        return hc > 0 ? static_cast<int>(hc) : 1;
    }();
    return n;
}

namespace {

// Lazily started pool; tasks pull indices from a shared counter.
class Pool {
  public:
    static Pool& instance() {
        static Pool* pool = new Pool(thread_count());  // leaked so workers never join at exit
        return *pool;
    }

    void run(std::size_t n, const std::function<void(std::size_t)>& fn) {
        if (n == 0) return;
        if (workers_.empty() || n == 1) {
            for (std::size_t i = 0; i < n; ++i) fn(i);
            return;
        }
        {
            std::unique_lock<std::mutex> lk(mu_);
            fn_ = &fn;
            total_ = n;
            next_.store(0, std::memory_order_relaxed);
            pending_ = static_cast<int>(workers_.size());
            ++generation_;
            cv_start_.notify_all();
        }
        work();  // caller participates
        std::unique_lock<std::mutex> lk(mu_);
        cv_done_.wait(lk, [&] { return pending_ == 0; });
        fn_ = nullptr;
        if (error_) {
            auto e = error_;
            error_ = nullptr;
            std::rethrow_exception(e);
        }
    }

  private:
    explicit Pool(int n_threads) {
        for (int i = 1; i < n_threads; ++i)
            workers_.emplace_back([this] { worker_loop(); });
    }

    void worker_loop() {
        std::uint64_t seen = 0;
        for (;;) {
            {
                std::unique_lock<std::mutex> lk(mu_);
                cv_start_.wait(lk, [&] { return generation_ != seen; });
                seen = generation_;
            }
            work();
            std::unique_lock<std::mutex> lk(mu_);
            if (--pending_ == 0) cv_done_.notify_all();
        }
    }

    void work() {
        for (;;) {
            const std::size_t i = next_.fetch_add(1, std::memory_order_relaxed);
            if (i >= total_) break;
            try {
                (*fn_)(i);
            } catch (...) {
                std::unique_lock<std::mutex> lk(mu_);
                if (!error_) error_ = std::current_exception();
            }
        }
    }

    std::vector<std::thread> workers_;
    std::mutex mu_;
    std::condition_variable cv_start_, cv_done_;
    const std::function<void(std::size_t)>* fn_ = nullptr;
    std::atomic<std::size_t> next_{0};
    std::size_t total_ = 0;
    int pending_ = 0;
    std::uint64_t generation_ = 0;
    std::exception_ptr error_;
};

}  // namespace

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    Pool::instance().run(n, fn);
}

}  // namespace asbs
