// fpsel command-line entry point.
//
// Exit codes: 0 success, 2 usage or invalid argument, 3 missing or
// malformed data, 4 anything else.

#include <cstring>
#include <exception>
#include <iostream>

#include "commands.hpp"
#include "fpsel/common/error.hpp"

namespace {

// --config is applied before parsing so explicit flags override it.
void apply_config_file(int argc, char** argv, fpsel::cli::RunConfig& config) {
  for (int i = 1; i < argc; ++i) {
    std::string path;
    if (std::strcmp(argv[i], "--config") == 0 && i + 1 < argc) {
      path = argv[i + 1];
    } else if (std::strncmp(argv[i], "--config=", 9) == 0) {
      path = argv[i] + 9;
    }
    if (path.empty()) continue;
    const auto text = fpsel::cli::read_text(fpsel::cli::resolve(path));
    try {
      config.merge_json(fpsel::cli::json::parse(text));
    } catch (const fpsel::cli::json::parse_error& e) {
      throw fpsel::InvalidArgument("config " + path + ": " + e.what());
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  fpsel::cli::RunConfig config;
  CLI::App app{"Transient-event feature selection and fault prediction"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON run configuration (flags override it)");
  app.add_option("--threads", config.threads, "Worker threads (results do not depend on it)")
      ->check(CLI::PositiveNumber);
  fpsel::cli::add_data_commands(app, config);
  fpsel::cli::add_model_commands(app, config);
  try {
    apply_config_file(argc, argv, config);
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const fpsel::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const fpsel::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
