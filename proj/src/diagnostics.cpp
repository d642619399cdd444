#include "cqed/diagnostics.hpp"

#include <iostream>
#include <mutex>

namespace cqed {
namespace {

std::mutex sink_mutex;

WarningSink& current_sink() {
  static WarningSink sink = [](const std::string& message) {
    std::cerr << "warning: " << message << '\n';
  };
  return sink;
}

}  // namespace

WarningSink set_warning_sink(WarningSink sink) {
  std::lock_guard lock(sink_mutex);
  WarningSink previous = std::move(current_sink());
  current_sink() = std::move(sink);
  return previous;
}

void warn(const std::string& message) {
  std::lock_guard lock(sink_mutex);
  if (current_sink()) current_sink()(message);
}

}  // namespace cqed
