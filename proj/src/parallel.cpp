#include "pulsecell/parallel.hpp"

#include <algorithm>

#ifdef __linux__
#include <pthread.h>
#include <sched.h>
#endif

namespace pulsecell {

namespace {

void pin_to_cpu(unsigned cpu) {
#ifdef __linux__
  cpu_set_t set;
  CPU_ZERO(&set);
  CPU_SET(cpu % std::max(1u, std::thread::hardware_concurrency()), &set);
  pthread_setaffinity_np(pthread_self(), sizeof(set), &set);
#else
  (void)cpu;
#endif
}

}  // namespace

LinePool::LinePool(const ExecPlan& plan) : workers_(plan.workers), chunking_(plan.chunking) {
  plan.validate();
  if (plan.pin_hint.value_or(false)) pin_to_cpu(0);
  threads_.reserve(workers_ - 1);
  for (int id = 1; id < workers_; ++id) {
    threads_.emplace_back([this, id, pin = plan.pin_hint.value_or(false)] {
      if (pin) pin_to_cpu(static_cast<unsigned>(id));
      worker_main(id);
    });
  }
}

LinePool::~LinePool() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  cv_start_.notify_all();
  for (auto& t : threads_) t.join();
}

void LinePool::worker_main(int id) {
  std::uint64_t seen = 0;
  for (;;) {
    {
      std::unique_lock lock(mutex_);
      cv_start_.wait(lock, [&] { return stopping_ || generation_ != seen; });
      if (stopping_) return;
      seen = generation_;
    }
    run_chunk(id);
    {
      std::lock_guard lock(mutex_);
      if (--pending_ == 0) cv_done_.notify_all();
    }
  }
}

void LinePool::run_chunk(int id) {
  const Index n = count_;
  const auto& body = *body_;
  auto run_line = [&](Index line) {
    try {
      body(line);
    } catch (const std::exception& e) {
      record_failure(line, e.what());
    } catch (...) {
      record_failure(line, "unknown exception");
    }
  };
  if (chunking_ == Chunking::StaticBlock) {
    const Index chunk = (n + workers_ - 1) / workers_;
    const Index lo = id * chunk;
    const Index hi = std::min(n, lo + chunk);
    for (Index line = lo; line < hi; ++line) run_line(line);
  } else {
    for (Index line = id; line < n; line += workers_) run_line(line);
  }
}

void LinePool::record_failure(Index line, const std::string& what) {
  std::lock_guard lock(failure_mutex_);
  if (failed_line_ < 0 || line < failed_line_) {
    failed_line_ = line;
    failure_what_ = what;
  }
}

void LinePool::for_lines(Index count, const std::function<void(Index)>& body) {
  if (count <= 0) return;
  failed_line_ = -1;
  failure_what_.clear();
  count_ = count;
  body_ = &body;
  if (workers_ == 1) {
    run_chunk(0);
  } else {
    {
      std::lock_guard lock(mutex_);
      pending_ = workers_ - 1;
      ++generation_;
    }
    cv_start_.notify_all();
    run_chunk(0);
    std::unique_lock lock(mutex_);
    cv_done_.wait(lock, [&] { return pending_ == 0; });
  }
  body_ = nullptr;
  if (failed_line_ >= 0) throw LineError(failed_line_, failure_what_);
}

void parallel_for_lines(Index count, const ExecPlan& plan,
                        const std::function<void(Index)>& body) {
  LinePool pool(plan);
  pool.for_lines(count, body);
}

}  // namespace pulsecell
