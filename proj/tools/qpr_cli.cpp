#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "qpr/config.hpp"
#include "qpr/error.hpp"
#include "qpr/pipeline.hpp"

namespace {

int exit_code(qpr::ErrorKind kind) {
  using qpr::ErrorKind;
  switch (kind) {
    case ErrorKind::config:
    case ErrorKind::invalid_parameter:
    case ErrorKind::geometry:
      return 2;
    case ErrorKind::convergence:
    case ErrorKind::timeout:
    case ErrorKind::step_size:
    case ErrorKind::accuracy:
    case ErrorKind::extraction:
    case ErrorKind::basis_construction:
      return 3;
    case ErrorKind::io:
    case ErrorKind::integrity:
      return 4;
    default:
      return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Charge-qubit readout by single-electron scattering"};
  app.require_subcommand(1, 1);
  std::string config_path;
  std::string out_dir;
  std::size_t threads = 0;
  bool force = false;
  bool quiet = false;
  for (const char* name : {"dot-solve", "couplings", "scan", "kraus", "protocol", "all"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "INI configuration file");
    sub->add_option("--out", out_dir, "output directory (overrides run.output_dir)");
    sub->add_option("--threads", threads, "worker threads (overrides run.threads)")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--force", force, "recompute every stage, ignoring cached snapshots");
    sub->add_flag("--quiet", quiet, "no progress output");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    qpr::RunConfig cfg = config_path.empty() ? qpr::default_config() : qpr::load_config(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (threads > 0) cfg.threads = threads;
    qpr::PipelineOptions opts;
    opts.force = force;
    opts.log = quiet ? nullptr : &std::cerr;
    qpr::Pipeline pipeline(cfg, opts);
    pipeline.run(qpr::parse_command(command));
  } catch (const qpr::Error& e) {
    std::cerr << "error (" << qpr::to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
