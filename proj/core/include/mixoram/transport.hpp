#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "mixoram/instruction.hpp"
#include "mixoram/wire.hpp"

namespace mixoram {

struct Outbound {
  NodeId to = 0;
  Frame frame;
};

// A protocol participant driven by inbound frames. Implementations are single-threaded state
// machines; transports serialise delivery.
class Node {
 public:
  virtual ~Node() = default;
  virtual NodeId id() const = 0;
  virtual std::vector<Outbound> handle(const Frame& frame) = 0;
  // Network address of a peer, if this node knows it (used by the TCP transport).
  virtual std::optional<Endpoint> endpoint_of(NodeId) const { return std::nullopt; }
};

struct WireEvent {
  std::uint64_t seq = 0;
  NodeId from = 0;
  NodeId to = 0;
  FrameType type = FrameType::kAck;
  Phase phase = Phase::kControl;
  std::uint16_t round = 0;
  std::uint64_t epoch = 0;
  std::size_t bytes = 0;  // encoded frame length including the prefix

  bool operator==(const WireEvent&) const = default;
};

// Deterministic in-process network: a single FIFO queue, every frame encoded and decoded with
// the wire format on the way through. Frames for ids with no attached node (the client) are
// collected and returned by run().
class LoopbackNetwork {
 public:
  using Tap = std::function<void(NodeId to, const Frame& frame)>;

  void attach(Node& node);
  void detach(NodeId id);
  void send(NodeId to, const Frame& frame);
  std::vector<Frame> run();

  const std::vector<WireEvent>& transcript() const { return transcript_; }
  void clear_transcript() { transcript_.clear(); }
  void set_tap(Tap tap) { tap_ = std::move(tap); }

 private:
  struct Pending {
    NodeId to;
    Bytes encoded;
  };

  std::map<NodeId, Node*> nodes_;
  std::deque<Pending> queue_;
  std::vector<WireEvent> transcript_;
  Tap tap_;
  std::uint64_t seq_ = 0;
};

}  // namespace mixoram
