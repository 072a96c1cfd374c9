#pragma once

#include <cstdint>
#include <string_view>
#include <utility>

#include "qia/rng.hpp"

namespace qia {

enum class Basis : std::uint8_t {
  Rectilinear = 0,  // |0>, |1>
  Diagonal = 1,     // |+>, |->
};

constexpr Basis basis_from_bit(bool bit) noexcept {
  return bit ? Basis::Diagonal : Basis::Rectilinear;
}
constexpr bool basis_bit(Basis b) noexcept { return b == Basis::Diagonal; }
std::string_view basis_name(Basis b) noexcept;

/// One of the four conjugate-coding states, stored exactly as (basis, value).
///
/// A Qubit is move-only. Moving from it or measuring it consumes the record, and any
/// later read or measurement of a consumed record throws ContractViolation. This is
/// how the simulator enforces no-cloning: the only way to obtain a second record is
/// measurement, which yields a collapsed state.
class Qubit {
 public:
  Qubit(Basis basis, bool value) noexcept : basis_(basis), value_(value) {}

  Qubit(const Qubit&) = delete;
  Qubit& operator=(const Qubit&) = delete;
  Qubit(Qubit&& other) noexcept;
  Qubit& operator=(Qubit&& other) noexcept;
  ~Qubit() = default;

  bool consumed() const noexcept { return consumed_; }
  Basis basis() const;
  bool value() const;
  /// "|0>", "|1>", "|+>" or "|->".
  std::string_view name() const;

  /// Consumes the record and hands back its classical description. Used only where
  /// the physical state leaves the simulator's custody (wire serialization, quantum
  /// memory handoff).
  std::pair<Basis, bool> release();

 private:
  void require_live() const;

  Basis basis_;
  bool value_;
  bool consumed_ = false;
};

struct Measurement {
  bool outcome;
  Qubit post;  // collapsed state (measured basis, outcome), unconsumed
};

/// Q(b1, b2): the first bit selects the basis, the second the value within it.
Qubit embed(bool b1, bool b2) noexcept;

/// Projective measurement with collapse. Same-basis measurement is deterministic and
/// draws nothing from `rng`; cross-basis measurement draws one fair bit.
Measurement measure(Qubit& q, Basis meas_basis, Rng& rng);

/// Uniform over the four states; draws basis then value.
Qubit random_qubit(Rng& rng);

}  // namespace qia
