#include "cli_util.hpp"

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "diagq/model_io.hpp"

namespace diagq::cli {

LogLevel log_level() {
  static LogLevel level = [] {
    const char* env = std::getenv("DIAGQ_LOG");
    if (env == nullptr) return LogLevel::info;
    std::string value(env);
    if (value == "error" || value == "0") return LogLevel::error;
    if (value == "warn" || value == "1") return LogLevel::warn;
    if (value == "debug" || value == "3") return LogLevel::debug;
    return LogLevel::info;
  }();
  return level;
}

void log_line(LogLevel level, const std::string& message) {
  if (level > log_level()) return;
  static const char* names[] = {"error", "warn", "info", "debug"};
  std::cerr << "[" << names[static_cast<int>(level)] << "] " << message << "\n";
}

std::array<double, 3> parse_fractions(const std::string& text) {
  std::array<double, 3> fractions{};
  std::istringstream in(text);
  std::string part;
  std::size_t i = 0;
  while (std::getline(in, part, ',')) {
    if (i >= 3) throw std::invalid_argument("expected three comma-separated fractions");
    fractions[i++] = std::stod(part);
  }
  if (i != 3) throw std::invalid_argument("expected three comma-separated fractions");
  return fractions;
}

std::filesystem::path resolve_model_artifact(const std::filesystem::path& path) {
  const std::string prefix = "model_task_4_";
  if (std::filesystem::is_directory(path)) {
    std::filesystem::path found;
    for (const auto& entry : std::filesystem::directory_iterator(path)) {
      if (!entry.is_regular_file()) continue;
      if (entry.path().filename().string().rfind(prefix, 0) != 0) continue;
      if (!found.empty()) {
        throw std::runtime_error("multiple " + prefix + "* files in " + path.string());
      }
      found = entry.path();
    }
    if (found.empty()) {
      throw std::runtime_error("no " + prefix + "* file found in " + path.string());
    }
    return found;
  }
  if (path.filename().string().rfind(prefix, 0) != 0) {
    throw std::runtime_error("model artifact '" + path.filename().string() +
                             "' must use the " + prefix + " file-name prefix");
  }
  return path;
}

std::unique_ptr<models::Predictor> load_artifact(const std::filesystem::path& path) {
  return models::load_predictor(resolve_model_artifact(path));
}

}  // namespace diagq::cli
