#include "nicki/log.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>

namespace nicki {

spdlog::logger& log()
{
    static const std::shared_ptr<spdlog::logger> instance = [] {
        auto logger = spdlog::stderr_color_mt("nicki");
        const char* level = std::getenv("NICKI_LOG_LEVEL");
        logger->set_level(level ? spdlog::level::from_str(level) : spdlog::level::warn);
        logger->set_pattern("[%l] %v");
        return logger;
    }();
    return *instance;
}

} // namespace nicki
