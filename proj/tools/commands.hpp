#pragma once

#include "CLI11.hpp"
#include "support.hpp"

namespace fpsel::cli {

void add_data_commands(CLI::App& app, RunConfig& config);
void add_model_commands(CLI::App& app, RunConfig& config);

}  // namespace fpsel::cli
