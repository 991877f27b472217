#pragma once
#include <functional>
#include <iostream>
#include <mutex>
#include <string>

namespace dnls {

using WarningSink = std::function<void(const std::string &)>;

namespace detail {
inline WarningSink &warning_sink_ref() {
  static WarningSink sink = [](const std::string &msg) { std::clog << "warning: " << msg << '\n'; };
  return sink;
}
inline std::mutex &warning_mutex() {
  static std::mutex m;
  return m;
}
} // namespace detail

inline void set_warning_sink(WarningSink sink) {
  std::lock_guard<std::mutex> lock(detail::warning_mutex());
  detail::warning_sink_ref() = std::move(sink);
}

inline void warn(const std::string &msg) {
  std::lock_guard<std::mutex> lock(detail::warning_mutex());
  if (detail::warning_sink_ref())
    detail::warning_sink_ref()(msg);
}

} // namespace dnls
