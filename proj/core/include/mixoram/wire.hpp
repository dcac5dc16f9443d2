#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "mixoram/bytes.hpp"

namespace mixoram {

using NodeId = std::uint8_t;
inline constexpr NodeId kStorageNode = 0xFE;
inline constexpr NodeId kClientNode = 0xFF;

enum class FrameType : std::uint8_t {
  kInstruction = 0x01,
  kRecordBatch = 0x02,
  kAck = 0x03,
  kDbFetch = 0x04,
  kDbStore = 0x05,
};

enum class Phase : std::uint8_t {
  kControl = 0,
  kUnwrap = 1,
  kEncDec = 2,
  kWrap = 3,
  kShuffle = 4,  // layered rounds
  kStore = 5,    // final write of an eviction
  kAccess = 6,   // client database traffic
  kCache = 7,    // client cache traffic
  kCacheFlush = 8,
};

std::string_view to_string(FrameType t);
std::string_view to_string(Phase p);

struct Frame {
  FrameType type = FrameType::kAck;
  std::uint64_t epoch = 0;
  Phase phase = Phase::kControl;
  std::uint16_t round = 0;
  NodeId from = 0;
  Bytes payload;

  bool operator==(const Frame&) const = default;
};

inline constexpr std::size_t kFrameHeaderBytes = 4 + 1 + 8 + 1 + 2 + 1;

// [len u32][type u8][epoch u64][phase u8][round u16][from u8][payload], len counts what follows it.
Bytes encode_frame(const Frame& f);
// Decodes one complete encoded frame, including its length prefix.
Frame decode_frame(ByteView data);
// Decodes the body that follows the length prefix.
Frame decode_frame_body(ByteView body);

struct SlotCell {
  std::uint64_t slot = 0;
  Bytes cell;

  bool operator==(const SlotCell&) const = default;
};

// count u32, then (slot u64, cell) x count; all cells the same length.
Bytes encode_batch(const std::vector<SlotCell>& cells);
std::vector<SlotCell> decode_batch(ByteView payload);

// count u32, then slot u64 x count.
Bytes encode_slots(const std::vector<std::uint64_t>& slots);
std::vector<std::uint64_t> decode_slots(ByteView payload);

}  // namespace mixoram
