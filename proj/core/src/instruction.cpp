#include "mixoram/instruction.hpp"

#include <charconv>

#include "mixoram/wire.hpp"

namespace mixoram {
namespace {

enum Flags : std::uint8_t {
  kHasAlphaOld = 1 << 0,
  kHasBetaOld = 1 << 1,
  kHasShareOld = 1 << 2,
  kHasBetaNew = 1 << 3,
  kHasShareNew = 1 << 4,
  kHasClientPublic = 1 << 5,
};

[[noreturn]] void bad(const char* why) { fail(Errc::kBadInstruction, why); }

template <class T>
void put(ByteWriter& w, const T& v) {
  w.raw(v.v);
}

template <class T>
T get(ByteReader& r) {
  T out;
  auto v = r.raw(out.v.size());
  std::copy(v.begin(), v.end(), out.v.begin());
  return out;
}

}  // namespace

std::string to_string(const Endpoint& e) { return e.host + ":" + std::to_string(e.port); }

Endpoint parse_endpoint(const std::string& text) {
  auto colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0) {
    fail(Errc::kInvalidArgument, "endpoint must look like host:port, got '" + text + "'");
  }
  unsigned port = 0;
  auto tail = text.substr(colon + 1);
  auto res = std::from_chars(tail.data(), tail.data() + tail.size(), port);
  if (res.ec != std::errc() || res.ptr != tail.data() + tail.size() || port > 65535) {
    fail(Errc::kInvalidArgument, "bad port in '" + text + "'");
  }
  return {text.substr(0, colon), static_cast<std::uint16_t>(port)};
}

std::size_t MixInstruction::group_element_count() const {
  return 1 + (alpha_old ? 1 : 0) + (beta_old ? 1 : 0) + (beta_new ? 1 : 0);
}

void validate(const MixInstruction& in) {
  const auto m = in.mix_count();
  if (in.n == 0) bad("n must be positive");
  if (m == 0 || m >= kStorageNode) bad("mix list must hold 1..253 entries");
  if (in.mix_index >= m) bad("mix index outside the mix list");
  if (in.cell_bytes == 0) bad("cell size must be positive");
  if (in.kappa != Kappa::k128 && in.kappa != Kappa::k256) bad("unsupported kappa");
  if (is_rebuild(in.design) && !in.alpha_old) bad("rebuild instruction without old alpha");
  if (!is_rebuild(in.design) && in.alpha_old) bad("layered instruction carries an old alpha");
  if (is_parallel(in.design)) {
    if (in.n % m != 0) bad("m must divide n");
    if (in.rounds == 0) bad("parallel instruction without a round count");
    if (!in.beta_new || !in.share_new) bad("parallel instruction without beta and share");
    if (is_rebuild(in.design) && (!in.beta_old || !in.share_old || !in.client_public)) {
      bad("parallel rebuild instruction without old beta, old share or client key");
    }
  } else {
    if (in.beta_new || in.beta_old || in.share_new || in.share_old) {
      bad("cascade instruction carries public-allocation elements");
    }
    if (in.rounds != 0) bad("cascade instruction carries a round count");
  }
}

Bytes encode_instruction(const MixInstruction& in) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(in.design))
      .u16(static_cast<std::uint16_t>(in.kappa))
      .u64(in.n)
      .u32(in.cell_bytes)
      .u32(in.rounds)
      .u64(in.epoch)
      .u32(in.mix_index)
      .str(in.db.host)
      .u16(in.db.port)
      .u32(in.mix_count());
  for (const auto& e : in.mixes) w.str(e.host).u16(e.port);
  std::uint8_t flags = 0;
  if (in.alpha_old) flags |= kHasAlphaOld;
  if (in.beta_old) flags |= kHasBetaOld;
  if (in.share_old) flags |= kHasShareOld;
  if (in.beta_new) flags |= kHasBetaNew;
  if (in.share_new) flags |= kHasShareNew;
  if (in.client_public) flags |= kHasClientPublic;
  w.u8(flags);
  put(w, in.alpha_new);
  if (in.alpha_old) put(w, *in.alpha_old);
  if (in.beta_old) put(w, *in.beta_old);
  if (in.share_old) put(w, *in.share_old);
  if (in.beta_new) put(w, *in.beta_new);
  if (in.share_new) put(w, *in.share_new);
  if (in.client_public) put(w, *in.client_public);
  return std::move(w).take();
}

MixInstruction decode_instruction(ByteView payload) {
  try {
    ByteReader r(payload);
    MixInstruction in;
    auto design = r.u8();
    if (design > 3) bad("unknown design");
    in.design = static_cast<Design>(design);
    in.kappa = kappa_from_bits(r.u16());
    in.n = r.u64();
    in.cell_bytes = r.u32();
    in.rounds = r.u32();
    in.epoch = r.u64();
    in.mix_index = r.u32();
    in.db.host = r.str();
    in.db.port = r.u16();
    auto m = r.u32();
    if (m >= kStorageNode) bad("mix list too long");
    for (std::uint32_t i = 0; i < m; ++i) {
      Endpoint e;
      e.host = r.str();
      e.port = r.u16();
      in.mixes.push_back(std::move(e));
    }
    auto flags = r.u8();
    in.alpha_new = get<RistrettoPoint>(r);
    if (flags & kHasAlphaOld) in.alpha_old = get<RistrettoPoint>(r);
    if (flags & kHasBetaOld) in.beta_old = get<RistrettoPoint>(r);
    if (flags & kHasShareOld) in.share_old = get<RistrettoScalar>(r);
    if (flags & kHasBetaNew) in.beta_new = get<RistrettoPoint>(r);
    if (flags & kHasShareNew) in.share_new = get<RistrettoScalar>(r);
    if (flags & kHasClientPublic) in.client_public = get<RistrettoPoint>(r);
    r.expect_done();
    validate(in);
    return in;
  } catch (const Error& e) {
    if (e.code() == Errc::kBadInstruction) throw;
    fail(Errc::kBadInstruction, e.what());
  }
}

}  // namespace mixoram
