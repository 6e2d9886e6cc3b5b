#include "qqm/diagnostics.hpp"

#include <iostream>

namespace qqm {

namespace {
WarningSink& sink() {
  static WarningSink s = [](const std::string& m) { std::cerr << "warning: " << m << '\n'; };
  return s;
}
}  // namespace

void set_warning_sink(WarningSink s) { sink() = std::move(s); }

void warn(const std::string& message) {
  if (sink()) sink()(message);
}

}  // namespace qqm
