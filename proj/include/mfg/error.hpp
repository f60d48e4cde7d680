#pragma once

#include <stdexcept>
#include <string>

namespace mfg {

// Invalid problem, grid, basis or run configuration.
class ConfigError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

// The iteration produced a non-finite value.
class DivergenceError : public std::runtime_error
{
public:
  DivergenceError(std::string const &what, std::string iterate, long iteration)
    : std::runtime_error(what)
    , iterate_(std::move(iterate))
    , iteration_(iteration)
  {
  }

  std::string const &iterate() const { return iterate_; }
  long iteration() const { return iteration_; }

private:
  std::string iterate_;
  long iteration_;
};

class IoError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

} // namespace mfg
