#pragma once

#include <string>
#include <vector>

#include "holo/core.hpp"

namespace testing {

/// Collects warnings for its lifetime, then restores the previous handler.
class WarningCapture {
 public:
  WarningCapture()
      : previous_(holo::set_warning_handler([this](std::string_view m) { messages.emplace_back(m); })) {}
  ~WarningCapture() { holo::set_warning_handler(previous_); }
  WarningCapture(const WarningCapture&) = delete;
  WarningCapture& operator=(const WarningCapture&) = delete;

  std::vector<std::string> messages;

 private:
  holo::WarningHandler previous_;
};

}  // namespace testing
