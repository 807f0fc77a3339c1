#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <gmpxx.h>

namespace tower {

struct field_error : std::runtime_error {
  explicit field_error(const std::string& what) : std::runtime_error(what) {}
};

/// Scalar in a fixed field: F_p for a prime characteristic p, or Q when
/// the characteristic is 0.  Residues are kept reduced in [0, p); rationals
/// are kept normalized with positive denominator (mpq canonical form).
class FieldScalar {
 public:
  FieldScalar() = default;

  static FieldScalar zero(std::int64_t characteristic);
  static FieldScalar one(std::int64_t characteristic);
  static FieldScalar from_int(std::int64_t characteristic, std::int64_t value);
  static FieldScalar from_mpz(std::int64_t characteristic, const mpz_class& value);

  std::int64_t characteristic() const { return ch_; }
  bool is_zero() const;
  bool is_one() const;

  FieldScalar operator+(const FieldScalar& o) const;
  FieldScalar operator-(const FieldScalar& o) const;
  FieldScalar operator*(const FieldScalar& o) const;
  FieldScalar operator-() const;
  FieldScalar inverse() const;  // throws field_error on zero

  bool operator==(const FieldScalar& o) const;
  bool operator!=(const FieldScalar& o) const { return !(*this == o); }

  /// Residue value in [0, p); only valid in positive characteristic.
  std::int64_t residue() const;
  /// Rational value; only valid in characteristic 0.
  const mpq_class& rational() const;

  std::string str() const;
  static FieldScalar parse(std::int64_t characteristic, const std::string& text);

 private:
  FieldScalar(std::int64_t ch, std::int64_t res, mpq_class rat)
      : ch_(ch), res_(res), rat_(std::move(rat)) {}
  void check_same_field(const FieldScalar& o) const;

  std::int64_t ch_ = 0;  // 0 = rationals, otherwise a prime
  std::int64_t res_ = 0;
  mpq_class rat_ = 0;
};

/// True if n is a prime (trial division; n is always small here).
bool is_prime(std::int64_t n);

/// Validates a field characteristic tag: 0 or a prime.
void validate_characteristic(std::int64_t ch);

}  // namespace tower
