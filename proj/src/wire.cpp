#include "qia/wire.hpp"

#include <string>

#include "qia/errors.hpp"

namespace qia {

namespace {

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t u8() { return take(1)[0]; }
  std::uint32_t u32() {
    auto b = take(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    auto b = take(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }
  std::span<const std::uint8_t> take(std::size_t n) {
    if (in_.size() - pos_ < n) throw FramingError("payload truncated");
    auto out = in_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  std::size_t remaining() const noexcept { return in_.size() - pos_; }
  void finish() const {
    if (remaining() != 0) throw FramingError("trailing bytes in payload");
  }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

bool known_type(std::uint8_t t) { return t >= 0x01 && t <= 0x05; }

}  // namespace

std::string_view msg_type_name(MsgType t) noexcept {
  switch (t) {
    case MsgType::Challenge: return "CHALLENGE";
    case MsgType::Qubits: return "QUBITS";
    case MsgType::ModeAnnounce: return "MODE_ANNOUNCE";
    case MsgType::Result: return "RESULT";
    case MsgType::NonceHashFromAlice: return "NONCE_HASH_FROM_ALICE";
  }
  return "UNKNOWN";
}

std::vector<std::uint8_t> encode_frame(const Frame& frame) {
  if (frame.payload.size() + 1 > kMaxFrameLength) throw FramingError("frame too large");
  Writer w;
  w.u32(static_cast<std::uint32_t>(frame.payload.size() + 1));
  w.u8(static_cast<std::uint8_t>(frame.type));
  w.bytes(frame.payload);
  return w.take();
}

Frame decode_frame(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kFrameHeaderSize) throw FramingError("truncated frame header");
  Reader r(bytes);
  const std::uint32_t length = r.u32();
  if (length == 0 || length > kMaxFrameLength) throw FramingError("invalid frame length");
  if (bytes.size() - 4 != length) {
    throw FramingError("frame length field " + std::to_string(length) + " does not match " +
                       std::to_string(bytes.size() - 4) + " bytes");
  }
  const std::uint8_t type = r.u8();
  if (!known_type(type)) throw FramingError("unknown msg_type " + std::to_string(type));
  auto payload = r.take(length - 1);
  return Frame{static_cast<MsgType>(type), {payload.begin(), payload.end()}};
}

MsgType message_type(const Message& m) noexcept {
  struct {
    MsgType operator()(const ChallengeMsg& c) const {
      return c.from_alice ? MsgType::NonceHashFromAlice : MsgType::Challenge;
    }
    MsgType operator()(const QubitsMsg&) const { return MsgType::Qubits; }
    MsgType operator()(const ModeAnnounceMsg&) const { return MsgType::ModeAnnounce; }
    MsgType operator()(const ResultMsg&) const { return MsgType::Result; }
  } visitor;
  return std::visit(visitor, m);
}

Frame to_frame(const Message& m) {
  Writer w;
  if (const auto* c = std::get_if<ChallengeMsg>(&m)) {
    w.u32(static_cast<std::uint32_t>(c->nonce.size()));
    w.bytes(c->nonce.to_bytes());
    w.u64(c->hash_seed);
    w.u32(c->in_len);
    w.u32(c->d);
  } else if (const auto* q = std::get_if<QubitsMsg>(&m)) {
    w.u32(static_cast<std::uint32_t>(q->tokens.size()));
    for (const auto& t : q->tokens) {
      w.u64(t.id);
      w.u8(static_cast<std::uint8_t>(basis_bit(t.basis) << 1 | t.value));
    }
  } else if (const auto* a = std::get_if<ModeAnnounceMsg>(&m)) {
    if (a->mode) w.u8(static_cast<std::uint8_t>(*a->mode));
  } else if (const auto* r = std::get_if<ResultMsg>(&m)) {
    w.u8(r->outcome == Outcome::Accept ? 1 : 0);
  }
  return Frame{message_type(m), w.take()};
}

Message from_frame(const Frame& f) {
  Reader r(f.payload);
  switch (f.type) {
    case MsgType::Challenge:
    case MsgType::NonceHashFromAlice: {
      ChallengeMsg c;
      const std::uint32_t bits = r.u32();
      if (bits == 0 || bits > 8 * kMaxFrameLength) throw FramingError("invalid nonce length");
      c.nonce = BitString::from_bytes(r.take((bits + 7) / 8), bits);
      c.hash_seed = r.u64();
      c.in_len = r.u32();
      c.d = r.u32();
      c.from_alice = f.type == MsgType::NonceHashFromAlice;
      r.finish();
      // Padding bits of the last nonce byte must be zero for the encoding to be canonical.
      if (c.nonce.to_bytes() != std::vector<std::uint8_t>(f.payload.begin() + 4,
                                                           f.payload.begin() + 4 + (bits + 7) / 8)) {
        throw FramingError("nonzero nonce padding bits");
      }
      return c;
    }
    case MsgType::Qubits: {
      QubitsMsg q;
      const std::uint32_t count = r.u32();
      if (static_cast<std::size_t>(count) * 9 != r.remaining()) {
        throw FramingError("qubit count does not match payload size");
      }
      q.tokens.reserve(count);
      for (std::uint32_t i = 0; i < count; ++i) {
        QubitToken t;
        t.id = r.u64();
        const std::uint8_t state = r.u8();
        if (state > 3) throw FramingError("invalid qubit state byte");
        t.basis = basis_from_bit(state >> 1);
        t.value = state & 1U;
        q.tokens.push_back(t);
      }
      return q;
    }
    case MsgType::ModeAnnounce: {
      ModeAnnounceMsg a;
      if (r.remaining() == 1) {
        const std::uint8_t mode = r.u8();
        if (mode > 1) throw FramingError("invalid mode byte");
        a.mode = static_cast<Mode>(mode);
      }
      r.finish();
      return a;
    }
    case MsgType::Result: {
      const std::uint8_t v = r.u8();
      r.finish();
      if (v > 1) throw FramingError("invalid result byte");
      return ResultMsg{v ? Outcome::Accept : Outcome::Reject};
    }
  }
  throw FramingError("unknown msg_type");
}

QubitToken to_token(Qubit& q, std::uint64_t id) {
  const auto [basis, value] = q.release();
  return {id, basis, value};
}

Qubit TokenLedger::admit(const QubitToken& token) {
  if (!seen_.insert(token.id).second) {
    throw ReplayError("qubit token " + std::to_string(token.id) + " presented twice");
  }
  return Qubit(token.basis, token.value);
}

}  // namespace qia
