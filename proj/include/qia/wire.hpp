#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_set>
#include <variant>
#include <vector>

#include "qia/bits.hpp"
#include "qia/protocol.hpp"
#include "qia/qstate.hpp"

namespace qia {

// Frame layout (bit-exact):
//   u32 length (little-endian) = 1 + |payload|
//   u8  msg_type
//   payload
// All multi-byte payload integers are little-endian.

enum class MsgType : std::uint8_t {
  Challenge = 0x01,
  Qubits = 0x02,
  ModeAnnounce = 0x03,
  Result = 0x04,
  NonceHashFromAlice = 0x05,
};

std::string_view msg_type_name(MsgType t) noexcept;

inline constexpr std::size_t kFrameHeaderSize = 5;
inline constexpr std::uint32_t kMaxFrameLength = 1U << 24;

struct Frame {
  MsgType type = MsgType::Challenge;
  std::vector<std::uint8_t> payload;

  bool operator==(const Frame&) const = default;
};

std::vector<std::uint8_t> encode_frame(const Frame& frame);
/// Decodes exactly one frame occupying all of `bytes`. Throws FramingError on a
/// truncated buffer, trailing bytes, a length mismatch or an unknown msg_type.
Frame decode_frame(std::span<const std::uint8_t> bytes);

/// CHALLENGE and NONCE_HASH_FROM_ALICE payload:
///   u32 nonce_bits, ceil(nonce_bits / 8) nonce bytes (MSB-first), u64 hash_seed,
///   u32 in_len, u32 d.
/// The hash function travels only as (seed, in_len, d).
struct ChallengeMsg {
  BitString nonce;
  std::uint64_t hash_seed = 0;
  std::uint32_t in_len = 0;
  std::uint32_t d = 0;
  bool from_alice = false;  // selects NONCE_HASH_FROM_ALICE

  bool operator==(const ChallengeMsg&) const = default;
};

/// One serialized qubit: u64 token id, then one state byte (basis << 1 | value).
struct QubitToken {
  std::uint64_t id = 0;
  Basis basis = Basis::Rectilinear;
  bool value = false;

  bool operator==(const QubitToken&) const = default;
};

/// QUBITS payload: u32 count, then count tokens of 9 bytes each.
struct QubitsMsg {
  std::vector<QubitToken> tokens;
  bool operator==(const QubitsMsg&) const = default;
};

/// MODE_ANNOUNCE payload: empty when the verifier confirms reception of the last
/// qubit; one byte (0 authentication, 1 security) when the prover announces its mode.
struct ModeAnnounceMsg {
  std::optional<Mode> mode;
  bool operator==(const ModeAnnounceMsg&) const = default;
};

/// RESULT payload: one byte, 1 accept, 0 reject.
struct ResultMsg {
  Outcome outcome = Outcome::Reject;
  bool operator==(const ResultMsg&) const = default;
};

using Message = std::variant<ChallengeMsg, QubitsMsg, ModeAnnounceMsg, ResultMsg>;

MsgType message_type(const Message& m) noexcept;
Frame to_frame(const Message& m);
Message from_frame(const Frame& f);

inline std::vector<std::uint8_t> encode_message(const Message& m) {
  return encode_frame(to_frame(m));
}
inline Message decode_message(std::span<const std::uint8_t> bytes) {
  return from_frame(decode_frame(bytes));
}

/// Consumes the qubit into a token for transmission.
QubitToken to_token(Qubit& q, std::uint64_t id);

/// Single-consumption rule at honest endpoints: each token id is admitted once.
class TokenLedger {
 public:
  /// Throws ReplayError for a token id already admitted.
  Qubit admit(const QubitToken& token);

 private:
  std::unordered_set<std::uint64_t> seen_;
};

}  // namespace qia
