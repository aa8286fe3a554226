#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <string>

#include "diagq/predictor.hpp"

namespace diagq::cli {

enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };

/// Level comes from DIAGQ_LOG (error|warn|info|debug, default info).
LogLevel log_level();
void log_line(LogLevel level, const std::string& message);

inline void log_info(const std::string& m) { log_line(LogLevel::info, m); }
inline void log_warn(const std::string& m) { log_line(LogLevel::warn, m); }
inline void log_debug(const std::string& m) { log_line(LogLevel::debug, m); }

/// "0.8,0.1,0.1" -> array; validation happens downstream.
std::array<double, 3> parse_fractions(const std::string& text);

/// Resolves a model artifact path. A directory is searched for exactly one
/// file with the model_task_4_ prefix; a file must carry the prefix itself.
std::filesystem::path resolve_model_artifact(const std::filesystem::path& path);

std::unique_ptr<models::Predictor> load_artifact(const std::filesystem::path& path);

}  // namespace diagq::cli
