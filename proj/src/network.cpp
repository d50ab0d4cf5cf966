#include "chainlab/sim/network.hpp"

#include <algorithm>
#include <stdexcept>

namespace chainlab::sim {

Network::Network(EventLoop& loop, NetParams params, uint32_t node_count)
    : loop_(loop),
      params_(params),
      node_count_(node_count),
      handlers_(node_count),
      filters_(node_count),
      lane_free_(static_cast<size_t>(node_count) * node_count, 0) {
  if (params_.bandwidth_mbps <= 0)
    throw std::invalid_argument("bandwidth must be positive");
}

void Network::set_handler(uint32_t node, Handler h) {
  handlers_.at(node) = std::move(h);
}

void Network::set_outgoing_filter(uint32_t node, Filter f) {
  filters_.at(node) = std::move(f);
}

TimeUs Network::serialization_delay(size_t bytes) const {
  // bytes * 8 bits over mbps * 1e6 bit/s, expressed in microseconds.
  return static_cast<TimeUs>(bytes) * 8 / params_.bandwidth_mbps;
}

void Network::send(uint32_t from, uint32_t to, proto::Message msg) {
  if (from >= node_count_ || to >= node_count_)
    throw std::out_of_range("node id out of range");
  if (filters_[from]) {
    auto out = filters_[from](to, std::move(msg));
    if (!out) return;  // dropped (silent behavior)
    msg = std::move(*out);
  }
  size_t bytes = msg.wire_size();
  messages_sent_++;
  bytes_sent_ += bytes;
  TimeUs& free_at = lane_free_[static_cast<size_t>(from) * node_count_ + to];
  TimeUs depart = std::max(loop_.now(), free_at) + serialization_delay(bytes);
  free_at = depart;
  TimeUs deliver = depart + params_.rtt / 2;
  Handler& h = handlers_[to];
  loop_.at(deliver, [&h, m = std::move(msg)]() {
    if (h) h(m);
  });
}

void Network::multicast(uint32_t from, const std::vector<uint32_t>& to,
                        const proto::Message& msg) {
  for (uint32_t t : to) send(from, t, msg);
}

}  // namespace chainlab::sim
