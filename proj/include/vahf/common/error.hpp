#pragma once

#include <stdexcept>
#include <string>

namespace vahf {

/// Error carrying a stable machine-readable code (e.g. "segment-too-short")
/// alongside the human-readable message.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& detail)
      : std::runtime_error(code + ": " + detail), code_(std::move(code)) {}
  explicit Error(std::string code) : std::runtime_error(code), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

inline void require(bool cond, const char* code, const std::string& detail = {}) {
  if (!cond) throw Error(code, detail);
}

}  // namespace vahf
