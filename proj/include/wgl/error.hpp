#pragma once

#include <stdexcept>
#include <string>

namespace wgl {

enum class Errc {
  precondition,
  coprimality,
  delta_too_large,
  nonpositive_n,
  unsolvable,
  grid_too_small,
  overflow,
  resource,
};

const char* to_string(Errc code) noexcept;

// All library failures are reported through this exception. The CLI maps
// `resource` to exit code 3 and every other code to exit code 2.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

inline const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::precondition: return "PRECONDITION";
    case Errc::coprimality: return "COPRIMALITY";
    case Errc::delta_too_large: return "DELTA_TOO_LARGE";
    case Errc::nonpositive_n: return "NONPOSITIVE_N";
    case Errc::unsolvable: return "UNSOLVABLE";
    case Errc::grid_too_small: return "GRID_TOO_SMALL";
    case Errc::overflow: return "OVERFLOW";
    case Errc::resource: return "RESOURCE";
  }
  return "UNKNOWN";
}

}  // namespace wgl
