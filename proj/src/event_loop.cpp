#include "chainlab/sim/event_loop.hpp"

#include <limits>
#include <stdexcept>

namespace chainlab::sim {

void EventLoop::at(TimeUs t, std::function<void()> fn) {
  if (t < now_) throw std::invalid_argument("event scheduled in the past");
  queue_.push(Entry{t, next_seq_++, std::move(fn)});
}

TimeUs EventLoop::next_time() const {
  if (queue_.empty()) return std::numeric_limits<TimeUs>::max();
  return queue_.top().t;
}

bool EventLoop::step() {
  if (queue_.empty()) return false;
  Entry e = queue_.top();
  queue_.pop();
  now_ = e.t;
  e.fn();
  return true;
}

void EventLoop::run_until(TimeUs horizon) {
  while (!queue_.empty() && queue_.top().t <= horizon) step();
  if (now_ < horizon) now_ = horizon;
}

void EventLoop::run_all() {
  while (step()) {
  }
}

}  // namespace chainlab::sim
