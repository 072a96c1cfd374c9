#include "qia/qstate.hpp"

#include "qia/errors.hpp"

namespace qia {

std::string_view basis_name(Basis b) noexcept {
  return b == Basis::Rectilinear ? "rectilinear" : "diagonal";
}

Qubit::Qubit(Qubit&& other) noexcept
    : basis_(other.basis_), value_(other.value_), consumed_(other.consumed_) {
  other.consumed_ = true;
}

Qubit& Qubit::operator=(Qubit&& other) noexcept {
  if (this != &other) {
    basis_ = other.basis_;
    value_ = other.value_;
    consumed_ = other.consumed_;
    other.consumed_ = true;
  }
  return *this;
}

void Qubit::require_live() const {
  if (consumed_) throw ContractViolation("qubit record already consumed");
}

Basis Qubit::basis() const {
  require_live();
  return basis_;
}

bool Qubit::value() const {
  require_live();
  return value_;
}

std::string_view Qubit::name() const {
  require_live();
  static constexpr std::string_view kNames[2][2] = {{"|0>", "|1>"}, {"|+>", "|->"}};
  return kNames[basis_bit(basis_)][value_];
}

std::pair<Basis, bool> Qubit::release() {
  require_live();
  consumed_ = true;
  return {basis_, value_};
}

Qubit embed(bool b1, bool b2) noexcept { return Qubit(basis_from_bit(b1), b2); }

Measurement measure(Qubit& q, Basis meas_basis, Rng& rng) {
  const auto [basis, value] = q.release();
  const bool outcome = basis == meas_basis ? value : rng.next_bit();
  return {outcome, Qubit(meas_basis, outcome)};
}

Qubit random_qubit(Rng& rng) {
  const bool b = rng.next_bit();
  const bool v = rng.next_bit();
  return embed(b, v);
}

}  // namespace qia
