#include "mixoram/wire.hpp"

#include "mixoram/error.hpp"

namespace mixoram {

std::string_view to_string(FrameType t) {
  switch (t) {
    case FrameType::kInstruction: return "INSTRUCTION";
    case FrameType::kRecordBatch: return "RECORD_BATCH";
    case FrameType::kAck: return "ACK";
    case FrameType::kDbFetch: return "DB_FETCH";
    case FrameType::kDbStore: return "DB_STORE";
  }
  return "UNKNOWN";
}

std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::kControl: return "control";
    case Phase::kUnwrap: return "unwrap";
    case Phase::kEncDec: return "ed";
    case Phase::kWrap: return "wrap";
    case Phase::kShuffle: return "shuffle";
    case Phase::kStore: return "store";
    case Phase::kAccess: return "access";
    case Phase::kCache: return "cache";
    case Phase::kCacheFlush: return "cache-flush";
  }
  return "unknown";
}

Bytes encode_frame(const Frame& f) {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(kFrameHeaderBytes - 4 + f.payload.size()))
      .u8(static_cast<std::uint8_t>(f.type))
      .u64(f.epoch)
      .u8(static_cast<std::uint8_t>(f.phase))
      .u16(f.round)
      .u8(f.from)
      .raw(f.payload);
  return std::move(w).take();
}

Frame decode_frame_body(ByteView body) {
  ByteReader r(body);
  Frame f;
  auto type = r.u8();
  if (type < 0x01 || type > 0x05) fail(Errc::kMalformedFrame, "unknown frame type");
  f.type = static_cast<FrameType>(type);
  f.epoch = r.u64();
  auto phase = r.u8();
  if (phase > static_cast<std::uint8_t>(Phase::kCacheFlush)) fail(Errc::kMalformedFrame, "unknown phase");
  f.phase = static_cast<Phase>(phase);
  f.round = r.u16();
  f.from = r.u8();
  auto rest = r.raw(r.remaining());
  f.payload.assign(rest.begin(), rest.end());
  return f;
}

Frame decode_frame(ByteView data) {
  ByteReader r(data);
  auto len = r.u32();
  if (len != r.remaining()) fail(Errc::kMalformedFrame, "length prefix does not match frame");
  return decode_frame_body(data.subspan(4));
}

Bytes encode_batch(const std::vector<SlotCell>& cells) {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(cells.size()));
  for (const auto& c : cells) {
    if (c.cell.size() != cells.front().cell.size()) {
      fail(Errc::kSizeMismatch, "batch cells differ in length");
    }
    w.u64(c.slot).raw(c.cell);
  }
  return std::move(w).take();
}

std::vector<SlotCell> decode_batch(ByteView payload) {
  ByteReader r(payload);
  auto count = r.u32();
  std::vector<SlotCell> out;
  if (count == 0) {
    r.expect_done();
    return out;
  }
  if (r.remaining() % count != 0 || r.remaining() / count < 8) {
    fail(Errc::kMalformedFrame, "batch payload not divisible into entries");
  }
  const std::size_t cell = r.remaining() / count - 8;
  out.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    SlotCell sc;
    sc.slot = r.u64();
    auto v = r.raw(cell);
    sc.cell.assign(v.begin(), v.end());
    out.push_back(std::move(sc));
  }
  return out;
}

Bytes encode_slots(const std::vector<std::uint64_t>& slots) {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(slots.size()));
  for (auto s : slots) w.u64(s);
  return std::move(w).take();
}

std::vector<std::uint64_t> decode_slots(ByteView payload) {
  ByteReader r(payload);
  auto count = r.u32();
  if (r.remaining() != static_cast<std::size_t>(count) * 8) {
    fail(Errc::kMalformedFrame, "slot list length mismatch");
  }
  std::vector<std::uint64_t> out(count);
  for (auto& s : out) s = r.u64();
  return out;
}

}  // namespace mixoram
