#include "intentfill/log.hpp"

#include <iostream>
#include <mutex>

namespace intentfill::log {

namespace {

std::mutex& mu() {
    static std::mutex m;
    return m;
}

const char* label(Level l) {
    switch (l) {
        case Level::Debug: return "debug";
        case Level::Info: return "info";
        case Level::Warn: return "warn";
        case Level::Error: return "error";
    }
    return "?";
}

Sink& sink() {
    static Sink s = [](Level l, std::string_view msg) { std::cerr << "[" << label(l) << "] " << msg << '\n'; };
    return s;
}

Level& min_level() {
    static Level l = Level::Info;
    return l;
}

}  // namespace

Sink set_sink(Sink s) {
    std::lock_guard lock(mu());
    auto old = std::move(sink());
    sink() = std::move(s);
    return old;
}

void set_min_level(Level level) {
    std::lock_guard lock(mu());
    min_level() = level;
}

void write(Level level, std::string_view msg) {
    std::lock_guard lock(mu());
    if (level < min_level() || !sink()) return;
    sink()(level, msg);
}

}  // namespace intentfill::log
