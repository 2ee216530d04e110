#pragma once

#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <string>

namespace gbmos::log {

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

/// Threshold from GBMOS_LOG (error, warn, info, debug); default warn.
inline Level threshold() {
    const char* env = std::getenv("GBMOS_LOG");
    if (!env) return Level::Warn;
    const std::string s(env);
    if (s == "error") return Level::Error;
    if (s == "info") return Level::Info;
    if (s == "debug") return Level::Debug;
    return Level::Warn;
}

inline void write(Level level, const std::string& msg) {
    if (level > threshold()) return;
    static std::mutex m;
    static const char* tags[] = {"error", "warn", "info", "debug"};
    std::lock_guard lock(m);
    std::fprintf(stderr, "[gbmos %s] %s\n", tags[static_cast<int>(level)], msg.c_str());
}

inline void error(const std::string& msg) { write(Level::Error, msg); }
inline void warn(const std::string& msg) { write(Level::Warn, msg); }
inline void info(const std::string& msg) { write(Level::Info, msg); }
inline void debug(const std::string& msg) { write(Level::Debug, msg); }

} // namespace gbmos::log
