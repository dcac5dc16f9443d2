#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <vector>

#include "mixoram/bytes.hpp"

namespace mixoram {

enum class AccessOp : std::uint8_t { kRead = 0, kWrite = 1 };
enum class StoreArray : std::uint8_t { kDatabase = 0, kCache = 1 };

// Who touched the server and when. actor uses wire node ids.
struct AccessContext {
  std::uint8_t actor = 0xFF;
  std::uint64_t epoch = 0;
  std::uint16_t round = 0;
};

struct AccessEntry {
  AccessOp op;
  StoreArray array;
  std::uint64_t slot;
  std::uint8_t actor;
  std::uint64_t epoch;
  std::uint16_t round;
  std::uint32_t bytes;

  bool operator==(const AccessEntry&) const = default;
};

// Append-only, internally synchronized.
class AccessLog {
 public:
  AccessLog() = default;
  AccessLog(AccessLog&& other) noexcept : entries_(other.snapshot()) {}
  AccessLog& operator=(AccessLog&& other) noexcept {
    if (this != &other) {
      auto copy = other.snapshot();
      std::lock_guard lock(mu_);
      entries_ = std::move(copy);
    }
    return *this;
  }

  void append(const AccessEntry& e);
  std::vector<AccessEntry> snapshot() const;
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::vector<AccessEntry> entries_;
};

class Storage {
 public:
  Storage(std::uint64_t n, std::size_t cell_bytes, std::size_t cache_slots);

  std::uint64_t size() const { return db_.size(); }
  std::size_t cell_bytes() const { return cell_bytes_; }
  std::size_t cache_slots() const { return cache_.size(); }
  std::size_t cache_fill() const { return fill_; }
  std::uint64_t epoch() const { return epoch_; }
  void set_epoch(std::uint64_t e) { epoch_ = e; }

  // OutOfRange for bad slots, SizeMismatch for wrong cell length. Every call is logged.
  Bytes db_read(std::uint64_t slot, const AccessContext& ctx);
  void db_write(std::uint64_t slot, ByteView cell, const AccessContext& ctx);
  Bytes cache_read(std::uint64_t slot, const AccessContext& ctx);
  void cache_write(std::uint64_t slot, ByteView cell, const AccessContext& ctx);
  // Empties the cache at the start of an eviction.
  void flush_cache();

  std::vector<AccessEntry> export_view() const { return log_.snapshot(); }
  std::size_t log_size() const { return log_.size(); }

  // Unlogged inspection for analysers and tests.
  const std::vector<Bytes>& raw_database() const { return db_; }
  const std::vector<Bytes>& raw_cache() const { return cache_; }

  // "MXOR", version u16, n u64, cell bytes u32, s u32, epoch u64, then n db cells and s cache cells.
  void save_snapshot(const std::filesystem::path& path) const;
  static Storage load_snapshot(const std::filesystem::path& path);

 private:
  void check_slot(std::uint64_t slot, std::size_t limit) const;
  void check_cell(ByteView cell) const;

  std::size_t cell_bytes_;
  std::vector<Bytes> db_;
  std::vector<Bytes> cache_;
  std::vector<bool> cache_used_;
  std::size_t fill_ = 0;
  std::uint64_t epoch_ = 0;
  AccessLog log_;
};

}  // namespace mixoram
