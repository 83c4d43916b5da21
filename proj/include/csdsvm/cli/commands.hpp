#pragma once

#include "csdsvm/censoring.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace csdsvm::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kNumerical = 3 };

/// Parses "uniform:<tau>[,floor=<f>]" or "kde[:beta=<b>,floor=<f>]". KDE
/// models are fitted on `times`.
CensoringModel parse_censoring(const std::string& spec, std::span<const double> times);

/// Horizon implied by a censoring spec: tau for uniform, otherwise nullopt.
std::optional<double> censoring_horizon(const std::string& spec);

/// Entry point for the csdsvm tool; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace csdsvm::cli
