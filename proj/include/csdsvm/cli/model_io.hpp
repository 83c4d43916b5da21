#pragma once

#include "csdsvm/dataset.hpp"
#include "csdsvm/solver.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

namespace csdsvm::cli {

inline constexpr int kModelFormatVersion = 1;

/// Model file unreadable, malformed or of an unsupported version.
class ModelFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// FNV-1a over the raw bytes of covariates, times, status and tau.
std::uint64_t data_digest(const Dataset& data);

struct ModelFile {
    FittedModel model;
    std::uint64_t digest = 0;
};

nlohmann::json model_to_json(const FittedModel& model, std::uint64_t digest);
ModelFile model_from_json(const nlohmann::json& doc);

void save_model(const std::filesystem::path& path, const FittedModel& model, std::uint64_t digest);
ModelFile load_model(const std::filesystem::path& path);

}  // namespace csdsvm::cli
