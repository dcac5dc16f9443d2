#pragma once

#include "mixoram/storage.hpp"
#include "mixoram/transport.hpp"

namespace mixoram {

// Serves DB_FETCH / DB_STORE frames against a Storage. Fetches are answered with a RECORD_BATCH
// carrying the request's epoch, phase and round so the requester can file it; stores are
// acknowledged. Phase kCache addresses the cache array, kCacheFlush empties it.
class StorageNode : public Node {
 public:
  explicit StorageNode(Storage& storage) : storage_(storage) {}

  NodeId id() const override { return kStorageNode; }
  std::vector<Outbound> handle(const Frame& frame) override;

  Storage& storage() { return storage_; }

 private:
  Storage& storage_;
};

}  // namespace mixoram
