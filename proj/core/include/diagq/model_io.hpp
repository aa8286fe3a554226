#pragma once

#include <filesystem>
#include <memory>

#include "diagq/irt.hpp"
#include "diagq/majority.hpp"
#include "diagq/mf.hpp"

namespace diagq::models {

// Checkpoint container: 8-byte magic "DIAGQMDL", then little-endian u32
// schema version (currently 1) and u32 model kind, then the model payload.
// The payload layout per kind is documented in the repository README.

enum class ModelKind : std::uint32_t { majority = 1, irt = 2, mf = 3 };

void save_model(const std::filesystem::path& path, const MajorityModel& model);
void save_model(const std::filesystem::path& path, const IrtModel& model);
void save_model(const std::filesystem::path& path, const MfModel& model);

/// Reads just the header; throws on bad magic or unsupported version.
ModelKind peek_model_kind(const std::filesystem::path& path);

MajorityModel load_majority(const std::filesystem::path& path);
IrtModel load_irt(const std::filesystem::path& path);
MfModel load_mf(const std::filesystem::path& path);

/// Loads any checkpoint behind the common prediction interface.
std::unique_ptr<Predictor> load_predictor(const std::filesystem::path& path);

}  // namespace diagq::models
