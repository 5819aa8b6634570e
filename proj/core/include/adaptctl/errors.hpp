#pragma once

#include <stdexcept>
#include <string>

namespace adaptctl {

// Exit-code mapping used by the CLI: config 2, invariant 3, numeric 4.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StabilityError : NumericError {
  using NumericError::NumericError;
};

struct IntegrationError : NumericError {
  double t;
  int index;
  IntegrationError(const std::string& msg, double t_, int index_)
      : NumericError(msg), t(t_), index(index_) {}
};

struct InvariantError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EnvelopeViolation : InvariantError {
  double t;
  int channel;
  double e;
  double rho;
  EnvelopeViolation(const std::string& msg, double t_, int channel_, double e_,
                    double rho_)
      : InvariantError(msg), t(t_), channel(channel_), e(e_), rho(rho_) {}
  EnvelopeViolation(double t_, int channel_, double e_, double rho_)
      : EnvelopeViolation("envelope violation at t=" + std::to_string(t_) +
                              " channel=" + std::to_string(channel_) +
                              " e=" + std::to_string(e_) +
                              " rho=" + std::to_string(rho_),
                          t_, channel_, e_, rho_) {}
};

struct ProjectionDomainError : InvariantError {
  using InvariantError::InvariantError;
};

}  // namespace adaptctl
