#pragma once

#include <condition_variable>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "pulsecell/errors.hpp"
#include "pulsecell/types.hpp"

namespace pulsecell {

enum class Chunking { StaticBlock, StaticInterleave };

struct ExecPlan {
  int workers = 1;
  Chunking chunking = Chunking::StaticBlock;
  std::optional<bool> pin_hint;

  void validate() const {
    if (workers < 1) throw ConfigError("exec.workers: must be >= 1");
  }
};

/// Fork-join pool executing independent line bodies. The calling thread
/// participates as worker 0; workers-1 helper threads persist across calls.
/// Each for_lines call is a barrier: it returns only after every line ran.
/// Line-to-worker assignment is static, so any body writing only its own
/// line's output produces results independent of the worker count.
class LinePool {
 public:
  explicit LinePool(const ExecPlan& plan);
  ~LinePool();
  LinePool(const LinePool&) = delete;
  LinePool& operator=(const LinePool&) = delete;

  int workers() const { return workers_; }
  Chunking chunking() const { return chunking_; }

  /// Runs body(line) exactly once for each line in [0, count). A body
  /// exception is re-thrown after the barrier as LineError carrying the
  /// lowest failing line index.
  void for_lines(Index count, const std::function<void(Index)>& body);

 private:
  void worker_main(int id);
  void run_chunk(int id);
  void record_failure(Index line, const std::string& what);

  int workers_;
  Chunking chunking_;
  std::vector<std::thread> threads_;

  std::mutex mutex_;
  std::condition_variable cv_start_, cv_done_;
  std::uint64_t generation_ = 0;
  int pending_ = 0;
  bool stopping_ = false;

  Index count_ = 0;
  const std::function<void(Index)>* body_ = nullptr;

  std::mutex failure_mutex_;
  Index failed_line_ = -1;
  std::string failure_what_;
};

/// One-shot form of the line-loop contract.
void parallel_for_lines(Index count, const ExecPlan& plan,
                        const std::function<void(Index)>& body);

}  // namespace pulsecell
