#include "viewrank/diagnostics.hpp"

#include <iostream>
#include <mutex>

namespace viewrank {
namespace {

std::mutex& handler_mutex() {
    static std::mutex m;
    return m;
}

WarningHandler& current_handler() {
    static WarningHandler h;
    return h;
}

}  // namespace

WarningHandler set_warning_handler(WarningHandler handler) {
    std::lock_guard lock(handler_mutex());
    auto previous = std::move(current_handler());
    current_handler() = std::move(handler);
    return previous;
}

void warn(std::string_view message) {
    std::lock_guard lock(handler_mutex());
    if (current_handler()) {
        current_handler()(message);
    } else {
        std::cerr << "warning: " << message << '\n';
    }
}

}  // namespace viewrank
