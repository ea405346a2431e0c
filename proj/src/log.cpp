#include "privstory/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace privstory {

namespace {
std::atomic<bool> g_verbose{false};
std::mutex g_mutex;

void emit(std::string_view level, std::string_view message) {
    std::lock_guard lock(g_mutex);
    std::cerr << "[" << level << "] " << message << '\n';
}
}  // namespace

void set_verbose(bool v) {
    g_verbose = v;
}

bool verbose() {
    return g_verbose;
}

void log_info(std::string_view message) {
    emit("info", message);
}

void log_debug(std::string_view message) {
    if (g_verbose) {
        emit("debug", message);
    }
}

void log_warn(std::string_view message) {
    emit("warn", message);
}

}  // namespace privstory
