#include "mixoram/transport.hpp"

namespace mixoram {

void LoopbackNetwork::attach(Node& node) { nodes_[node.id()] = &node; }

void LoopbackNetwork::detach(NodeId id) { nodes_.erase(id); }

void LoopbackNetwork::send(NodeId to, const Frame& frame) {
  auto encoded = encode_frame(frame);
  transcript_.push_back({seq_++, frame.from, to, frame.type, frame.phase, frame.round, frame.epoch,
                         encoded.size()});
  queue_.push_back({to, std::move(encoded)});
}

std::vector<Frame> LoopbackNetwork::run() {
  std::vector<Frame> undelivered;
  while (!queue_.empty()) {
    auto item = std::move(queue_.front());
    queue_.pop_front();
    auto frame = decode_frame(item.encoded);
    if (tap_) tap_(item.to, frame);
    auto it = nodes_.find(item.to);
    if (it == nodes_.end()) {
      undelivered.push_back(std::move(frame));
      continue;
    }
    for (auto& out : it->second->handle(frame)) send(out.to, out.frame);
  }
  return undelivered;
}

}  // namespace mixoram
