#include "tower/field.hpp"

namespace tower {

bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

void validate_characteristic(std::int64_t ch) {
  if (ch != 0 && !is_prime(ch)) {
    throw field_error("characteristic must be 0 or a prime, got " + std::to_string(ch));
  }
}

namespace {
std::int64_t mod_reduce(std::int64_t v, std::int64_t p) {
  std::int64_t r = v % p;
  if (r < 0) r += p;
  return r;
}
}  // namespace

FieldScalar FieldScalar::zero(std::int64_t characteristic) {
  validate_characteristic(characteristic);
  return FieldScalar(characteristic, 0, mpq_class(0));
}

FieldScalar FieldScalar::one(std::int64_t characteristic) {
  return from_int(characteristic, 1);
}

FieldScalar FieldScalar::from_int(std::int64_t characteristic, std::int64_t value) {
  validate_characteristic(characteristic);
  if (characteristic == 0) return FieldScalar(0, 0, mpq_class(static_cast<long>(value)));
  return FieldScalar(characteristic, mod_reduce(value, characteristic), mpq_class(0));
}

FieldScalar FieldScalar::from_mpz(std::int64_t characteristic, const mpz_class& value) {
  validate_characteristic(characteristic);
  if (characteristic == 0) return FieldScalar(0, 0, mpq_class(value));
  mpz_class r = value % characteristic;
  std::int64_t res = r.get_si();
  if (res < 0) res += characteristic;
  return FieldScalar(characteristic, res, mpq_class(0));
}

bool FieldScalar::is_zero() const {
  return ch_ == 0 ? rat_ == 0 : res_ == 0;
}

bool FieldScalar::is_one() const {
  return ch_ == 0 ? rat_ == 1 : res_ == 1 % ch_;
}

void FieldScalar::check_same_field(const FieldScalar& o) const {
  if (ch_ != o.ch_) {
    throw field_error("field mismatch: characteristic " + std::to_string(ch_) +
                      " vs " + std::to_string(o.ch_));
  }
}

FieldScalar FieldScalar::operator+(const FieldScalar& o) const {
  check_same_field(o);
  if (ch_ == 0) return FieldScalar(0, 0, rat_ + o.rat_);
  return FieldScalar(ch_, mod_reduce(res_ + o.res_, ch_), mpq_class(0));
}

FieldScalar FieldScalar::operator-(const FieldScalar& o) const {
  check_same_field(o);
  if (ch_ == 0) return FieldScalar(0, 0, rat_ - o.rat_);
  return FieldScalar(ch_, mod_reduce(res_ - o.res_, ch_), mpq_class(0));
}

FieldScalar FieldScalar::operator*(const FieldScalar& o) const {
  check_same_field(o);
  if (ch_ == 0) return FieldScalar(0, 0, rat_ * o.rat_);
  return FieldScalar(ch_, mod_reduce(res_ * o.res_, ch_), mpq_class(0));
}

FieldScalar FieldScalar::operator-() const {
  if (ch_ == 0) return FieldScalar(0, 0, -rat_);
  return FieldScalar(ch_, mod_reduce(-res_, ch_), mpq_class(0));
}

FieldScalar FieldScalar::inverse() const {
  if (is_zero()) throw field_error("inverse of zero");
  if (ch_ == 0) return FieldScalar(0, 0, 1 / rat_);
  // extended euclid mod the prime
  std::int64_t a = res_, b = ch_, x0 = 1, x1 = 0;
  while (b != 0) {
    std::int64_t q = a / b;
    std::int64_t t = a - q * b;
    a = b;
    b = t;
    t = x0 - q * x1;
    x0 = x1;
    x1 = t;
  }
  return FieldScalar(ch_, mod_reduce(x0, ch_), mpq_class(0));
}

bool FieldScalar::operator==(const FieldScalar& o) const {
  if (ch_ != o.ch_) return false;
  return ch_ == 0 ? rat_ == o.rat_ : res_ == o.res_;
}

std::int64_t FieldScalar::residue() const {
  if (ch_ == 0) throw field_error("residue() called on a rational scalar");
  return res_;
}

const mpq_class& FieldScalar::rational() const {
  if (ch_ != 0) throw field_error("rational() called on a residue scalar");
  return rat_;
}

std::string FieldScalar::str() const {
  if (ch_ == 0) return rat_.get_str();
  return std::to_string(res_);
}

FieldScalar FieldScalar::parse(std::int64_t characteristic, const std::string& text) {
  validate_characteristic(characteristic);
  if (text.empty()) throw field_error("empty scalar");
  if (characteristic == 0) {
    mpq_class q;
    if (q.set_str(text, 10) != 0) throw field_error("bad rational: " + text);
    q.canonicalize();
    return FieldScalar(0, 0, q);
  }
  if (text.find('/') != std::string::npos) {
    throw field_error("rational syntax in characteristic " + std::to_string(characteristic) +
                      ": " + text);
  }
  mpz_class z;
  if (z.set_str(text, 10) != 0) throw field_error("bad integer: " + text);
  return from_mpz(characteristic, z);
}

}  // namespace tower
