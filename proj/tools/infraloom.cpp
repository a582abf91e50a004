// infraloom: declaration sources -> Terraform, bundles, local emulator.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "infraloom/cli.hpp"

int main(int argc, char** argv) {
  namespace cli = infraloom::cli;

  CLI::App app{"Synthesize, bundle, deploy and emulate annotated serverless applications"};
  app.require_subcommand(1);

  std::string config = "infraloom.conf";
  int port = 8080;
  std::string workload;
  std::string pricing;
  std::string stubs;
  std::string batch;
  bool apply = false;

  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config, "Project configuration file")->capture_default_str();
  };

  auto* synth = app.add_subcommand("synth", "Parse, validate and generate deploy/main.tf");
  add_config(synth);
  auto* bundle = app.add_subcommand("bundle", "Package static files and schema.json");
  add_config(bundle);

  auto* deploy = app.add_subcommand("deploy", "Hand the generated code to terraform");
  add_config(deploy);
  bool dry_run = false;
  auto* dry_flag = deploy->add_flag("--dry-run", dry_run, "Run terraform validate (default)");
  deploy->add_flag("--apply", apply, "Run terraform apply")->excludes(dry_flag);

  auto* serve = app.add_subcommand("serve", "Run the local emulator");
  add_config(serve);
  serve->add_option("--port", port, "Port on 127.0.0.1")->capture_default_str();
  serve->add_option("--stubs", stubs, "Stub mapping file (handler = response)");
  serve->add_option("--batch", batch, "Answer newline-delimited JSON events from a file ('-' = stdin)");

  auto* simulate = app.add_subcommand("simulate", "Run the warm-pool simulation");
  add_config(simulate);
  simulate->add_option("--workload", workload, "CSV workload: arrival_ms,concurrency")->required();

  auto* estimate = app.add_subcommand("estimate", "Estimate monthly cost");
  add_config(estimate);
  estimate->add_option("--pricing", pricing, "Pricing file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : cli::kInvalidInput;
  }

  auto& out = std::cout;
  auto& err = std::cerr;
  if (*synth) return cli::cmd_synth(config, out, err);
  if (*bundle) return cli::cmd_bundle(config, out, err);
  if (*deploy) return cli::cmd_deploy(config, !apply, out, err);
  if (*serve) {
    std::optional<std::filesystem::path> stubs_path;
    std::optional<std::filesystem::path> batch_path;
    if (!stubs.empty()) stubs_path = stubs;
    if (!batch.empty()) batch_path = batch;
    return cli::cmd_serve(config, port, stubs_path, batch_path, out, err);
  }
  if (*simulate) return cli::cmd_simulate(config, workload, out, err);
  if (*estimate) return cli::cmd_estimate(config, pricing, out, err);
  return cli::kInvalidInput;
}
