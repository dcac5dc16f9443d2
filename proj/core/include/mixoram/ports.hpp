#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "mixoram/storage.hpp"
#include "mixoram/transport.hpp"

namespace mixoram {

// Request/response channel from the client's side of the wire.
class FramePort {
 public:
  virtual ~FramePort() = default;
  virtual void send(NodeId to, const Frame& frame) = 0;
  // Next frame addressed to the client. Throws kTransport if none can arrive.
  virtual Frame receive() = 0;
};

// Client port on a LoopbackNetwork: receive() runs the network until it drains.
class LoopbackPort : public FramePort {
 public:
  explicit LoopbackPort(LoopbackNetwork& net) : net_(net) {}
  void send(NodeId to, const Frame& frame) override;
  Frame receive() override;

 private:
  LoopbackNetwork& net_;
  std::deque<Frame> inbox_;
};

// The operations the client performs on the server, all tagged with the client as actor.
class StoreApi {
 public:
  virtual ~StoreApi() = default;
  virtual Bytes read(std::uint64_t slot) = 0;
  virtual void write(std::uint64_t slot, ByteView cell) = 0;
  // Overwrites the whole cache array, one write per slot.
  virtual void upload_cache(const std::vector<Bytes>& cells) = 0;
  virtual void flush_cache() = 0;
  // Epoch stamped on subsequent log entries.
  virtual void set_epoch(std::uint64_t epoch) = 0;
};

class LocalStore : public StoreApi {
 public:
  explicit LocalStore(Storage& storage) : storage_(storage) {}
  Bytes read(std::uint64_t slot) override;
  void write(std::uint64_t slot, ByteView cell) override;
  void upload_cache(const std::vector<Bytes>& cells) override;
  void flush_cache() override { storage_.flush_cache(); }
  void set_epoch(std::uint64_t epoch) override { epoch_ = epoch; }

 private:
  AccessContext ctx() const { return {kClientNode, epoch_, 0}; }

  Storage& storage_;
  std::uint64_t epoch_ = 0;
};

// Talks to a StorageNode through a FramePort, one synchronous request at a time.
class RemoteStore : public StoreApi {
 public:
  explicit RemoteStore(FramePort& port) : port_(port) {}
  Bytes read(std::uint64_t slot) override;
  void write(std::uint64_t slot, ByteView cell) override;
  void upload_cache(const std::vector<Bytes>& cells) override;
  void flush_cache() override;
  void set_epoch(std::uint64_t epoch) override { epoch_ = epoch; }

 private:
  Frame request(FrameType type, Phase phase, Bytes payload);

  FramePort& port_;
  std::uint64_t epoch_ = 0;
};

}  // namespace mixoram
