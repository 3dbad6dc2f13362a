#pragma once

#include <functional>
#include <string_view>

namespace falldet {

using LogSink = std::function<void(std::string_view)>;

/// Replaces the warning sink (default: stderr); returns the previous one.
LogSink set_warning_sink(LogSink sink);
void log_warning(std::string_view message);

}  // namespace falldet
