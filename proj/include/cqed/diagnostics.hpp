#pragma once

#include <functional>
#include <string>

namespace cqed {

/// Receives non-fatal numerical warnings (clamped eigenvalues, weak dispersive
/// separation). The default sink prints to stderr.
using WarningSink = std::function<void(const std::string&)>;

/// Installs `sink` and returns the previous one. An empty sink silences output.
WarningSink set_warning_sink(WarningSink sink);
void warn(const std::string& message);

}  // namespace cqed
