#pragma once

#include <stdexcept>
#include <string>

namespace deit {

// Exit code 1 at the CLI.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exit code 2 at the CLI.
struct PhysicsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularityError : PhysicsError {
  using PhysicsError::PhysicsError;
};

struct IntegrationError : PhysicsError {
  IntegrationError(const std::string& what, double t, double step, double breach = 0.0)
      : PhysicsError(what), time(t), last_step(step), magnitude(breach) {}
  double time;
  double last_step;
  double magnitude;
};

struct Cancelled : std::runtime_error {
  Cancelled() : std::runtime_error("cancelled") {}
};

} // namespace deit
