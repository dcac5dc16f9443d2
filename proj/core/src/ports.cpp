#include "mixoram/ports.hpp"

namespace mixoram {

void LoopbackPort::send(NodeId to, const Frame& frame) { net_.send(to, frame); }

Frame LoopbackPort::receive() {
  if (inbox_.empty()) {
    for (auto& f : net_.run()) inbox_.push_back(std::move(f));
  }
  if (inbox_.empty()) fail(Errc::kTransport, "network drained without a reply for the client");
  auto f = std::move(inbox_.front());
  inbox_.pop_front();
  return f;
}

Bytes LocalStore::read(std::uint64_t slot) { return storage_.db_read(slot, ctx()); }

void LocalStore::write(std::uint64_t slot, ByteView cell) { storage_.db_write(slot, cell, ctx()); }

void LocalStore::upload_cache(const std::vector<Bytes>& cells) {
  for (std::uint64_t i = 0; i < cells.size(); ++i) storage_.cache_write(i, cells[i], ctx());
}

Frame RemoteStore::request(FrameType type, Phase phase, Bytes payload) {
  Frame f;
  f.type = type;
  f.epoch = epoch_;
  f.phase = phase;
  f.from = kClientNode;
  f.payload = std::move(payload);
  port_.send(kStorageNode, f);
  auto reply = port_.receive();
  if (reply.from != kStorageNode) fail(Errc::kTransport, "unexpected reply while talking to storage");
  return reply;
}

Bytes RemoteStore::read(std::uint64_t slot) {
  auto reply = request(FrameType::kDbFetch, Phase::kAccess, encode_slots({slot}));
  auto cells = decode_batch(reply.payload);
  if (reply.type != FrameType::kRecordBatch || cells.size() != 1 || cells[0].slot != slot) {
    fail(Errc::kTransport, "bad fetch reply");
  }
  return std::move(cells[0].cell);
}

void RemoteStore::write(std::uint64_t slot, ByteView cell) {
  std::vector<SlotCell> batch{{slot, Bytes(cell.begin(), cell.end())}};
  auto reply = request(FrameType::kDbStore, Phase::kAccess, encode_batch(batch));
  if (reply.type != FrameType::kAck) fail(Errc::kTransport, "store not acknowledged");
}

void RemoteStore::upload_cache(const std::vector<Bytes>& cells) {
  std::vector<SlotCell> batch;
  for (std::uint64_t i = 0; i < cells.size(); ++i) batch.push_back({i, cells[i]});
  auto reply = request(FrameType::kDbStore, Phase::kCache, encode_batch(batch));
  if (reply.type != FrameType::kAck) fail(Errc::kTransport, "cache upload not acknowledged");
}

void RemoteStore::flush_cache() {
  auto reply = request(FrameType::kDbStore, Phase::kCacheFlush, {});
  if (reply.type != FrameType::kAck) fail(Errc::kTransport, "cache flush not acknowledged");
}

}  // namespace mixoram
