#include "mixoram/prg.hpp"

#include <algorithm>
#include <array>

#include "aes.hpp"
#include "mixoram/error.hpp"

namespace mixoram {
namespace {
constexpr std::size_t kChunk = 1024;
}

Prg::Prg(ByteView seed) : stream_(std::make_unique<detail::CtrStream>(seed)) {
  std::array<std::uint8_t, 16> zero_iv{};
  stream_->reset(zero_iv);
}

Prg::~Prg() = default;
Prg::Prg(Prg&&) noexcept = default;
Prg& Prg::operator=(Prg&&) noexcept = default;

void Prg::refill() {
  buf_.assign(kChunk, 0);
  stream_->xor_stream(buf_);
  pos_ = 0;
}

void Prg::fill(MutableByteView out) {
  std::size_t done = 0;
  while (done < out.size()) {
    if (pos_ >= buf_.size()) refill();
    std::size_t take = std::min(out.size() - done, buf_.size() - pos_);
    std::copy_n(buf_.begin() + static_cast<std::ptrdiff_t>(pos_), take, out.begin() + done);
    pos_ += take;
    done += take;
  }
}

Bytes Prg::bytes(std::size_t n) {
  Bytes out(n);
  fill(out);
  return out;
}

std::uint64_t Prg::next_u64() {
  std::array<std::uint8_t, 8> b{};
  fill(b);
  return load_be(b);
}

std::uint64_t Prg::uniform(std::uint64_t bound) {
  if (bound == 0) fail(Errc::kInvalidArgument, "uniform bound must be nonzero");
  return uniform_below(*this, bound);
}

}  // namespace mixoram
