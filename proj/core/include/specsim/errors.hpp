#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace specsim {

// Invalid configuration, bad dimensions, unknown keys, out-of-range
// parameters. CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A run failed while executing (solver did not converge, I/O failed, ...).
// CLI maps this to exit code 1.
class RuntimeFailure : public std::runtime_error {
 public:
  explicit RuntimeFailure(const std::string& what) : std::runtime_error(what) {}
};

// A rollout produced a non-finite state. Carries the step at which the
// state blew up and, when raised inside the sampling engine, the sample
// index and seed needed to replay it.
class DivergenceError : public RuntimeFailure {
 public:
  DivergenceError(const std::string& what, int step)
      : RuntimeFailure(what), step_(step) {}

  int step() const { return step_; }

  void annotate_sample(std::int64_t index, std::uint64_t seed) {
    sample_index_ = index;
    sample_seed_ = seed;
  }
  std::int64_t sample_index() const { return sample_index_; }
  std::uint64_t sample_seed() const { return sample_seed_; }

 private:
  int step_ = -1;
  std::int64_t sample_index_ = -1;
  std::uint64_t sample_seed_ = 0;
};

}  // namespace specsim
