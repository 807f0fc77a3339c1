#pragma once

#include <cstdint>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

namespace tower {

struct config_error : std::runtime_error {
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// The prime sequence p_1, ..., p_L defining the tower, plus the run seed.
/// Consecutive primes must differ; repeats at distance >= 2 are allowed.
struct TowerConfig {
  std::vector<std::int64_t> primes;
  int max_level = 0;  // == primes.size()
  std::uint64_t rng_seed = 0;

  static TowerConfig make(std::vector<std::int64_t> primes, std::uint64_t seed = 0);
  void validate() const;  // throws config_error
};

/// Parses the key = value config format:
///   primes = 2 3 2 3 2
///   max_level = 5        (optional; must match the prime count)
///   seed = 42            (optional; default 0)
/// '#' starts a comment.
TowerConfig parse_config_text(std::istream& in);
TowerConfig load_config_file(const std::string& path);

}  // namespace tower
