#pragma once

#include <functional>
#include <queue>
#include <vector>

#include "chainlab/common.hpp"

namespace chainlab::sim {

// Deterministic discrete-event scheduler. Ties on the timestamp are broken
// by insertion sequence, so a (config, seed) pair fully determines the
// event trace.
class EventLoop {
 public:
  TimeUs now() const { return now_; }

  void at(TimeUs t, std::function<void()> fn);
  void after(TimeUs delay, std::function<void()> fn) { at(now_ + delay, std::move(fn)); }

  bool empty() const { return queue_.empty(); }
  TimeUs next_time() const;

  // Executes the next event; returns false on an empty queue.
  bool step();

  // Runs events with timestamp <= horizon.
  void run_until(TimeUs horizon);

  void run_all();

 private:
  struct Entry {
    TimeUs t;
    uint64_t seq;
    std::function<void()> fn;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.t != b.t) return a.t > b.t;
      return a.seq > b.seq;
    }
  };

  TimeUs now_ = 0;
  uint64_t next_seq_ = 0;
  std::priority_queue<Entry, std::vector<Entry>, Later> queue_;
};

}  // namespace chainlab::sim
