#pragma once

#include <functional>
#include <string>
#include <string_view>

namespace viewrank {

using WarningHandler = std::function<void(std::string_view)>;

/// Installs a process-wide warning sink and returns the previous one.
/// Passing an empty handler restores the default (stderr).
WarningHandler set_warning_handler(WarningHandler handler);

/// Reports a recoverable condition. Thread-safe.
void warn(std::string_view message);

}  // namespace viewrank
