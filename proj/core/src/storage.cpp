#include "mixoram/storage.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

#include "mixoram/error.hpp"

namespace mixoram {
namespace {
constexpr char kMagic[4] = {'M', 'X', 'O', 'R'};
constexpr std::uint16_t kSnapshotVersion = 1;
}  // namespace

void AccessLog::append(const AccessEntry& e) {
  std::lock_guard lock(mu_);
  entries_.push_back(e);
}

std::vector<AccessEntry> AccessLog::snapshot() const {
  std::lock_guard lock(mu_);
  return entries_;
}

std::size_t AccessLog::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

Storage::Storage(std::uint64_t n, std::size_t cell_bytes, std::size_t cache_slots)
    : cell_bytes_(cell_bytes),
      db_(n, Bytes(cell_bytes, 0)),
      cache_(cache_slots, Bytes(cell_bytes, 0)),
      cache_used_(cache_slots, false) {
  if (n == 0) fail(Errc::kInvalidArgument, "database must hold at least one record");
  if (cell_bytes == 0) fail(Errc::kInvalidArgument, "cells must be non-empty");
}

void Storage::check_slot(std::uint64_t slot, std::size_t limit) const {
  if (slot >= limit) fail(Errc::kOutOfRange, "slot " + std::to_string(slot) + " out of range");
}

void Storage::check_cell(ByteView cell) const {
  if (cell.size() != cell_bytes_) fail(Errc::kSizeMismatch, "cell length mismatch");
}

Bytes Storage::db_read(std::uint64_t slot, const AccessContext& ctx) {
  check_slot(slot, db_.size());
  log_.append({AccessOp::kRead, StoreArray::kDatabase, slot, ctx.actor, ctx.epoch, ctx.round,
               static_cast<std::uint32_t>(cell_bytes_)});
  return db_[slot];
}

void Storage::db_write(std::uint64_t slot, ByteView cell, const AccessContext& ctx) {
  check_slot(slot, db_.size());
  check_cell(cell);
  log_.append({AccessOp::kWrite, StoreArray::kDatabase, slot, ctx.actor, ctx.epoch, ctx.round,
               static_cast<std::uint32_t>(cell_bytes_)});
  db_[slot].assign(cell.begin(), cell.end());
}

Bytes Storage::cache_read(std::uint64_t slot, const AccessContext& ctx) {
  check_slot(slot, cache_.size());
  log_.append({AccessOp::kRead, StoreArray::kCache, slot, ctx.actor, ctx.epoch, ctx.round,
               static_cast<std::uint32_t>(cell_bytes_)});
  return cache_[slot];
}

void Storage::cache_write(std::uint64_t slot, ByteView cell, const AccessContext& ctx) {
  check_slot(slot, cache_.size());
  check_cell(cell);
  log_.append({AccessOp::kWrite, StoreArray::kCache, slot, ctx.actor, ctx.epoch, ctx.round,
               static_cast<std::uint32_t>(cell_bytes_)});
  cache_[slot].assign(cell.begin(), cell.end());
  if (!cache_used_[slot]) {
    cache_used_[slot] = true;
    ++fill_;
  }
}

void Storage::flush_cache() {
  for (auto& c : cache_) std::fill(c.begin(), c.end(), 0);
  std::fill(cache_used_.begin(), cache_used_.end(), false);
  fill_ = 0;
}

void Storage::save_snapshot(const std::filesystem::path& path) const {
  ByteWriter w;
  w.raw(as_bytes(std::string_view(kMagic, 4)))
      .u16(kSnapshotVersion)
      .u64(db_.size())
      .u32(static_cast<std::uint32_t>(cell_bytes_))
      .u32(static_cast<std::uint32_t>(cache_.size()))
      .u64(epoch_);
  for (const auto& c : db_) w.raw(c);
  for (const auto& c : cache_) w.raw(c);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::kBadSnapshot, "cannot open " + path.string() + " for writing");
  const auto& bytes = w.bytes();
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(Errc::kBadSnapshot, "short write to " + path.string());
}

Storage Storage::load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::kBadSnapshot, "cannot open " + path.string());
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    ByteReader r(data);
    auto magic = r.raw(4);
    if (!std::equal(magic.begin(), magic.end(), kMagic)) fail(Errc::kBadSnapshot, "bad magic");
    if (r.u16() != kSnapshotVersion) fail(Errc::kBadSnapshot, "unsupported snapshot version");
    auto n = r.u64();
    auto cell = r.u32();
    auto s = r.u32();
    auto epoch = r.u64();
    if (n == 0 || cell == 0) fail(Errc::kBadSnapshot, "empty geometry");
    if (r.remaining() != (n + s) * cell) fail(Errc::kBadSnapshot, "cell area has wrong length");
    Storage st(n, cell, s);
    st.epoch_ = epoch;
    for (auto& c : st.db_) {
      auto v = r.raw(cell);
      c.assign(v.begin(), v.end());
    }
    for (auto& c : st.cache_) {
      auto v = r.raw(cell);
      c.assign(v.begin(), v.end());
    }
    return st;
  } catch (const Error& e) {
    if (e.code() == Errc::kBadSnapshot) throw;
    fail(Errc::kBadSnapshot, e.what());
  }
}

}  // namespace mixoram
