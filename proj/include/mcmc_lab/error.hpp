#pragma once

#include <stdexcept>
#include <string>

namespace mcmc_lab {

/// Invalid configuration or parameters (bad family name, dimension, weights...).
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// A simulation could not be carried out (infeasible ladder, chain outside support...).
class SimulationError : public std::runtime_error {
 public:
  explicit SimulationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mcmc_lab
