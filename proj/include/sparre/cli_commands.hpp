#pragma once

#include "sparre/config.hpp"

#include <iosfwd>

namespace sparre::cli {

// Exit codes: 0 pass, 1 assertion/statistical failure, 2 usage/config error
// (the latter via ConfigError propagating to the caller).
int cmd_verify(const ExperimentConfig& cfg, std::ostream& log);
int cmd_enumerate(const ExperimentConfig& cfg, std::ostream& log);
int cmd_simulate(const ExperimentConfig& cfg, std::ostream& log);
int cmd_scaling(const ExperimentConfig& cfg, std::ostream& log);
int cmd_constants(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace sparre::cli
