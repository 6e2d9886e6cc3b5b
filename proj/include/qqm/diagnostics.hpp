#pragma once

#include <functional>
#include <string>

namespace qqm {

/// Receives non-fatal warnings (CFL, normalization of q0, ...). The default
/// sink writes "warning: <msg>" to stderr.
using WarningSink = std::function<void(const std::string&)>;

void set_warning_sink(WarningSink sink);
void warn(const std::string& message);

}  // namespace qqm
