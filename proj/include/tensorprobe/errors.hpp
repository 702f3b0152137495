#pragma once

#include <stdexcept>
#include <string>

namespace tensorprobe {

// File and stream failures. The CLI maps this to its I/O exit code.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tensorprobe
