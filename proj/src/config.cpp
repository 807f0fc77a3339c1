#include "tower/config.hpp"

#include <fstream>
#include <sstream>

#include "tower/field.hpp"

namespace tower {

TowerConfig TowerConfig::make(std::vector<std::int64_t> primes, std::uint64_t seed) {
  TowerConfig cfg;
  cfg.primes = std::move(primes);
  cfg.max_level = static_cast<int>(cfg.primes.size());
  cfg.rng_seed = seed;
  cfg.validate();
  return cfg;
}

void TowerConfig::validate() const {
  if (primes.empty() || max_level < 1) {
    throw config_error("config needs at least one prime");
  }
  if (max_level != static_cast<int>(primes.size())) {
    throw config_error("max_level " + std::to_string(max_level) + " does not match " +
                       std::to_string(primes.size()) + " primes");
  }
  for (std::size_t i = 0; i < primes.size(); ++i) {
    if (!is_prime(primes[i])) {
      throw config_error("entry " + std::to_string(i + 1) + " is not prime: " +
                         std::to_string(primes[i]));
    }
  }
  for (std::size_t i = 0; i + 1 < primes.size(); ++i) {
    if (primes[i] == primes[i + 1]) {
      throw config_error("consecutive primes must differ: p_" + std::to_string(i + 1) +
                         " = p_" + std::to_string(i + 2) + " = " + std::to_string(primes[i]));
    }
  }
}

TowerConfig parse_config_text(std::istream& in) {
  TowerConfig cfg;
  bool saw_primes = false;
  bool saw_max_level = false;
  int declared_max_level = 0;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    std::string eq;
    if (!(ls >> eq) || eq != "=") {
      throw config_error("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    if (key == "primes") {
      std::int64_t p;
      while (ls >> p) cfg.primes.push_back(p);
      if (cfg.primes.empty()) {
        throw config_error("line " + std::to_string(lineno) + ": empty prime list");
      }
      saw_primes = true;
    } else if (key == "max_level") {
      if (!(ls >> declared_max_level)) {
        throw config_error("line " + std::to_string(lineno) + ": bad max_level");
      }
      saw_max_level = true;
    } else if (key == "seed") {
      if (!(ls >> cfg.rng_seed)) {
        throw config_error("line " + std::to_string(lineno) + ": bad seed");
      }
    } else {
      throw config_error("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  if (!saw_primes) throw config_error("config missing 'primes'");
  cfg.max_level = static_cast<int>(cfg.primes.size());
  if (saw_max_level && declared_max_level != cfg.max_level) {
    throw config_error("max_level " + std::to_string(declared_max_level) +
                       " does not match " + std::to_string(cfg.max_level) + " primes");
  }
  cfg.validate();
  return cfg;
}

TowerConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  return parse_config_text(in);
}

}  // namespace tower
