#include "mixoram/routing.hpp"

#include <algorithm>

namespace mixoram {

EpochRouting EpochRouting::cascade(std::vector<Permutation> perms,
                                   std::vector<std::uint32_t> order) {
  if (perms.empty()) fail(Errc::kInvalidArgument, "cascade needs at least one mix");
  EpochRouting r;
  r.n_ = perms.front().size();
  r.m_ = static_cast<std::uint32_t>(perms.size());
  for (const auto& p : perms) {
    if (p.size() != r.n_) fail(Errc::kSizeMismatch, "cascade permutations differ in size");
    r.cascade_inv_.push_back(p.inverse());
  }
  if (order.size() != perms.size()) fail(Errc::kInvalidArgument, "order must list every mix");
  r.cascade_perms_ = std::move(perms);
  r.order_ = std::move(order);
  return r;
}

EpochRouting EpochRouting::parallel(std::uint64_t n, std::uint32_t m,
                                    std::vector<std::vector<Permutation>> local,
                                    std::vector<Permutation> pub) {
  if (m == 0 || n % m != 0) fail(Errc::kIndivisible, "m must divide n");
  if (local.size() != pub.size()) fail(Errc::kInvalidArgument, "round count mismatch");
  EpochRouting r;
  r.n_ = n;
  r.m_ = m;
  r.parallel_ = true;
  for (std::size_t l = 0; l < pub.size(); ++l) {
    if (local[l].size() != m || pub[l].size() != n) {
      fail(Errc::kSizeMismatch, "parallel schedule has the wrong shape");
    }
    std::vector<Permutation> inv;
    for (const auto& p : local[l]) {
      if (p.size() != n / m) fail(Errc::kSizeMismatch, "local permutation must cover one chunk");
      inv.push_back(p.inverse());
    }
    r.local_inv_.push_back(std::move(inv));
    r.pub_inv_.push_back(pub[l].inverse());
  }
  r.local_ = std::move(local);
  r.pub_ = std::move(pub);
  return r;
}

Trace EpochRouting::trace_forward(std::uint64_t start) const {
  if (start >= n_) fail(Errc::kOutOfRange, "slot out of range");
  Trace t;
  t.start = start;
  std::uint64_t slot = start;
  if (!parallel_) {
    for (auto mix : order_) {
      slot = cascade_perms_[mix][slot];
      t.hops.push_back({mix, 0, slot});
    }
  } else {
    const std::uint64_t c = n_ / m_;
    for (std::size_t l = 0; l < pub_.size(); ++l) {
      auto j = static_cast<std::uint32_t>(slot / c);
      std::uint64_t after_local = j * c + local_[l][j][slot % c];
      t.hops.push_back({j, static_cast<std::uint32_t>(l + 1), after_local});
      slot = pub_[l][after_local];
    }
  }
  t.end = slot;
  return t;
}

Trace EpochRouting::trace_backward(std::uint64_t end) const {
  if (end >= n_) fail(Errc::kOutOfRange, "slot out of range");
  Trace t;
  t.end = end;
  std::uint64_t slot = end;
  if (!parallel_) {
    for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
      t.hops.push_back({*it, 0, slot});
      slot = cascade_inv_[*it][slot];
    }
  } else {
    const std::uint64_t c = n_ / m_;
    for (std::size_t l = pub_.size(); l-- > 0;) {
      std::uint64_t after_local = pub_inv_[l][slot];
      auto j = static_cast<std::uint32_t>(after_local / c);
      t.hops.push_back({j, static_cast<std::uint32_t>(l + 1), after_local});
      slot = j * c + local_inv_[l][j][after_local % c];
    }
  }
  std::reverse(t.hops.begin(), t.hops.end());
  t.start = slot;
  return t;
}

Permutation EpochRouting::composite() const {
  std::vector<std::uint64_t> mapping(n_);
  for (std::uint64_t i = 0; i < n_; ++i) mapping[i] = forward(i);
  return Permutation::from_mapping(std::move(mapping));
}

}  // namespace mixoram
