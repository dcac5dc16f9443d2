#include "mixoram/storage_node.hpp"

#include <algorithm>

namespace mixoram {

std::vector<Outbound> StorageNode::handle(const Frame& f) {
  const AccessContext ctx{f.from, f.epoch, f.round};
  Frame reply;
  reply.epoch = f.epoch;
  reply.phase = f.phase;
  reply.round = f.round;
  reply.from = kStorageNode;

  switch (f.type) {
    case FrameType::kDbFetch: {
      std::vector<SlotCell> cells;
      for (auto slot : decode_slots(f.payload)) {
        auto cell = f.phase == Phase::kCache ? storage_.cache_read(slot, ctx)
                                             : storage_.db_read(slot, ctx);
        cells.push_back({slot, std::move(cell)});
      }
      reply.type = FrameType::kRecordBatch;
      reply.payload = encode_batch(cells);
      break;
    }
    case FrameType::kDbStore: {
      if (f.phase == Phase::kCacheFlush) {
        storage_.flush_cache();
      } else {
        for (const auto& sc : decode_batch(f.payload)) {
          if (f.phase == Phase::kCache) {
            storage_.cache_write(sc.slot, sc.cell, ctx);
          } else {
            storage_.db_write(sc.slot, sc.cell, ctx);
          }
        }
        if (f.phase == Phase::kStore) storage_.set_epoch(std::max(storage_.epoch(), f.epoch));
      }
      reply.type = FrameType::kAck;
      break;
    }
    default:
      fail(Errc::kMalformedFrame, "storage only serves fetch and store requests");
  }
  return {{f.from, std::move(reply)}};
}

}  // namespace mixoram
