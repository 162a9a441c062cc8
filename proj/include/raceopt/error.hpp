#pragma once

#include <stdexcept>
#include <string>

namespace raceopt {

// Root of every exception the library throws on contract violations.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DecodeError : public Error {
 public:
  using Error::Error;
};

class EncodeError : public Error {
 public:
  using Error::Error;
};

class LoadError : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  using Error::Error;
};

// Non-finite state or input inside the vehicle integrator.
class SimulationFault : public Error {
 public:
  using Error::Error;
};

// Tracking controller could not produce a command (e.g. Riccati divergence).
class ControllerFault : public Error {
 public:
  using Error::Error;
};

// ask/tell called out of order or with a foreign batch.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace raceopt
