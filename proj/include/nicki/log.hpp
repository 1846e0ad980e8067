#pragma once

#include <spdlog/logger.h>

#include <memory>

namespace nicki {

// Shared stderr logger. Level comes from NICKI_LOG_LEVEL (trace..off), default "warn".
spdlog::logger& log();

} // namespace nicki
