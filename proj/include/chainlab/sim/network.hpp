#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "chainlab/proto/messages.hpp"
#include "chainlab/sim/event_loop.hpp"

namespace chainlab::sim {

struct NetParams {
  TimeUs rtt = 200;            // round trip, one-way latency is rtt/2
  int64_t bandwidth_mbps = 1000;  // per directed lane
};

// Point-to-point simulated network. Each directed (from, to) lane is FIFO
// with serialization delay size*8/bandwidth on top of the propagation delay,
// so large batches cost more than small control messages.
class Network {
 public:
  using Handler = std::function<void(const proto::Message&)>;
  // Outgoing transform: may rewrite the message per destination (equivocation,
  // inflated measurements) or drop it (silent). Applied before serialization.
  using Filter =
      std::function<std::optional<proto::Message>(uint32_t to, proto::Message)>;

  Network(EventLoop& loop, NetParams params, uint32_t node_count);

  void set_handler(uint32_t node, Handler h);
  void set_outgoing_filter(uint32_t node, Filter f);

  void send(uint32_t from, uint32_t to, proto::Message msg);
  void multicast(uint32_t from, const std::vector<uint32_t>& to,
                 const proto::Message& msg);

  uint64_t messages_sent() const { return messages_sent_; }
  uint64_t bytes_sent() const { return bytes_sent_; }

 private:
  TimeUs serialization_delay(size_t bytes) const;

  EventLoop& loop_;
  NetParams params_;
  uint32_t node_count_;
  std::vector<Handler> handlers_;
  std::vector<Filter> filters_;
  std::vector<TimeUs> lane_free_;  // indexed from * node_count + to
  uint64_t messages_sent_ = 0;
  uint64_t bytes_sent_ = 0;
};

}  // namespace chainlab::sim
