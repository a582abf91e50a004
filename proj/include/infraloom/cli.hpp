#pragma once

// Commands behind the `infraloom` executable. Each returns a process exit
// code; diagnostics go to `err`, machine-readable output to `out`.
//
//   0  success
//   1  invalid input: configuration, parse, validation, workload or pricing
//      errors, missing static files
//   2  I/O errors: unreadable config or sources, unwritable outputs, missing
//      synth artifacts, port in use
//   3  no terraform binary found
//   4  terraform reported a failure

#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "infraloom/bundle.hpp"
#include "infraloom/config.hpp"
#include "infraloom/dsl.hpp"
#include "infraloom/permissions.hpp"
#include "infraloom/runtime.hpp"
#include "infraloom/schema.hpp"
#include "infraloom/schema_json.hpp"
#include "infraloom/server.hpp"
#include "infraloom/simulator.hpp"
#include "infraloom/synthesizer.hpp"

namespace infraloom::cli {

namespace fs = std::filesystem;

enum ExitCode : int {
  kOk = 0,
  kInvalidInput = 1,
  kIoError = 2,
  kNoTerraform = 3,
  kTerraformFailed = 4,
};

// Carries an exit code out of the helpers below; the message has already
// been printed.
struct Failure {
  int code;
};

namespace detail {

inline std::optional<std::string> read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) return std::nullopt;
  return ss.str();
}

inline bool write_text(const fs::path& p, const std::string& data) {
  std::error_code ec;
  if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) return false;
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  return static_cast<bool>(out);
}

inline ProjectConfig load(const fs::path& config_path, std::ostream& err) {
  try {
    if (fs::is_directory(config_path)) {
      err << config_path.string() << ": cannot read configuration: is a directory\n";
      throw Failure{kIoError};
    }
    return load_config(config_path);
  } catch (const fs::filesystem_error& e) {
    err << config_path.string() << ": cannot read configuration: " << e.code().message() << "\n";
    throw Failure{kIoError};
  } catch (const ConfigError& e) {
    err << e.what() << "\n";
    throw Failure{kInvalidInput};
  }
}

// All `.kls` files under the configured source directories, parsed. Paths
// are recorded relative to the project root with '/' separators.
inline std::vector<dsl::SourceFile> load_sources(const ProjectConfig& cfg, std::ostream& err) {
  std::vector<fs::path> paths;
  for (const auto& dir : cfg.source_dirs) {
    fs::path abs = cfg.resolve(dir);
    std::error_code ec;
    if (!fs::is_directory(abs, ec)) {
      err << abs.string() << ": source directory not found\n";
      throw Failure{kIoError};
    }
    for (auto it = fs::recursive_directory_iterator(abs, ec); !ec && it != fs::recursive_directory_iterator();
         it.increment(ec)) {
      if (it->is_regular_file() && it->path().extension() == ".kls") paths.push_back(it->path());
    }
    if (ec) {
      err << abs.string() << ": " << ec.message() << "\n";
      throw Failure{kIoError};
    }
  }
  std::sort(paths.begin(), paths.end());

  std::vector<dsl::SourceFile> files;
  bool failed = false;
  for (const auto& p : paths) {
    std::string rel = p.lexically_relative(cfg.root).generic_string();
    auto text = read_text(p);
    if (!text) {
      err << rel << ": cannot read source file\n";
      throw Failure{kIoError};
    }
    try {
      files.push_back(dsl::parse_file(*text, rel));
    } catch (const DslError& e) {
      err << e.what() << "\n";
      failed = true;
    }
  }
  if (failed) throw Failure{kInvalidInput};
  return files;
}

inline Schema load_schema(const ProjectConfig& cfg, std::ostream& err) {
  auto files = load_sources(cfg, err);
  try {
    return build_schema(std::move(files), cfg);
  } catch (const SchemaValidationError& e) {
    for (const auto& se : e.errors()) err << se.to_string() << "\n";
    throw Failure{kInvalidInput};
  }
}

inline hcl::ProviderConfig provider_for(const ProjectConfig& cfg) {
  hcl::ProviderConfig p;
  p.name = cfg.provider;
  p.region = cfg.region;
  p.bucket = cfg.bucket;
  p.memory_mb = static_cast<int>(std::lround(cfg.memory_gb * 1024));
  fs::path statics = fs::path(cfg.static_dir).lexically_normal();
  fs::path out = fs::path(cfg.out_dir).lexically_normal();
  std::string rel = statics.lexically_relative(out).generic_string();
  p.static_source_prefix = rel.empty() ? statics.generic_string() : rel;
  if (!p.static_source_prefix.empty() && p.static_source_prefix.back() == '/') {
    p.static_source_prefix.pop_back();
  }
  return p;
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const Failure& f) {
    return f.code;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kInvalidInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  }
}

}  // namespace detail

// Parses, validates and synthesizes; writes main.tf, policy.txt and
// schema.json into the output directory.
inline int cmd_synth(const fs::path& config_path, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    ProjectConfig cfg = detail::load(config_path, err);
    Schema schema = detail::load_schema(cfg, err);
    std::string hcl_text;
    try {
      hcl_text = hcl::synthesize_hcl(schema, detail::provider_for(cfg));
    } catch (const Error& e) {
      err << e.what() << "\n";
      return int{kInvalidInput};
    }
    fs::path out_dir = cfg.resolve(cfg.out_dir);
    const std::pair<const char*, std::string> outputs[] = {
        {"main.tf", hcl_text},
        {"policy.txt", render_policy_text(derive_policy(schema))},
        {"schema.json", canonical_schema_json(schema)},
    };
    for (const auto& [name, data] : outputs) {
      if (!detail::write_text(out_dir / name, data)) {
        err << (out_dir / name).string() << ": cannot write\n";
        return int{kIoError};
      }
      out << (out_dir / name).string() << "\n";
    }
    return int{kOk};
  });
}

// Packs static files and schema.json into bundle.zip and writes
// manifest.json. Requires a previous synth.
inline int cmd_bundle(const fs::path& config_path, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    ProjectConfig cfg = detail::load(config_path, err);
    fs::path out_dir = cfg.resolve(cfg.out_dir);
    auto schema_text = detail::read_text(out_dir / "schema.json");
    if (!schema_text) {
      err << (out_dir / "schema.json").string() << ": not found; run `infraloom synth` first\n";
      return int{kIoError};
    }
    Schema schema = schema_from_json_text(*schema_text);

    std::map<std::string, bundle::ZipEntry> archive;
    bundle::BundleManifest manifest;
    bool missing = false;
    for (const auto& s : schema.static_routes) {
      fs::path src = cfg.resolve(cfg.static_dir) / s.source_file;
      auto data = detail::read_text(src);
      if (!data || !fs::is_regular_file(src)) {
        err << "MissingStaticFile: " << src.generic_string() << "\n";
        missing = true;
        continue;
      }
      std::string logical = s.path.substr(1);
      manifest.entries.push_back({logical, s.source_file, bundle::sha256_hex(*data)});
      archive["static/" + logical] = {"static/" + logical, std::move(*data)};
    }
    if (missing) return int{kInvalidInput};

    manifest.schema_digest = bundle::sha256_hex(*schema_text);
    manifest.entries.push_back({"schema.json", "schema.json", manifest.schema_digest});
    std::sort(manifest.entries.begin(), manifest.entries.end(),
              [](const auto& a, const auto& b) { return a.logical_name < b.logical_name; });
    archive["schema.json"] = {"schema.json", *schema_text};

    std::vector<bundle::ZipEntry> entries;
    for (auto& [name, entry] : archive) entries.push_back(std::move(entry));

    if (!detail::write_text(out_dir / "bundle.zip", bundle::write_zip(entries)) ||
        !detail::write_text(out_dir / "manifest.json", bundle::render_manifest(manifest))) {
      err << out_dir.string() << ": cannot write bundle\n";
      return int{kIoError};
    }
    out << (out_dir / "bundle.zip").string() << "\n" << (out_dir / "manifest.json").string() << "\n";
    return int{kOk};
  });
}

// ---------------------------------------------------------------------------
// deploy

// INFRALOOM_TERRAFORM if set, otherwise the first executable `terraform` on
// PATH.
inline std::optional<fs::path> locate_terraform() {
  if (const char* env = std::getenv("INFRALOOM_TERRAFORM"); env && *env) {
    fs::path p(env);
    if (fs::is_regular_file(p) && ::access(p.c_str(), X_OK) == 0) return fs::absolute(p);
    return std::nullopt;
  }
  const char* path = std::getenv("PATH");
  if (!path) return std::nullopt;
  std::string_view rest(path);
  while (true) {
    auto colon = rest.find(':');
    std::string dir(rest.substr(0, colon));
    if (dir.empty()) dir = ".";
    fs::path candidate = fs::path(dir) / "terraform";
    std::error_code ec;
    if (fs::is_regular_file(candidate, ec) && ::access(candidate.c_str(), X_OK) == 0) return fs::absolute(candidate);
    if (colon == std::string_view::npos) break;
    rest.remove_prefix(colon + 1);
  }
  return std::nullopt;
}

// Runs `binary args...` in `cwd` with its stdout redirected to stderr.
// Returns the exit status, or -1 if it could not be started.
inline int run_process(const fs::path& binary, const std::vector<std::string>& args, const fs::path& cwd) {
  std::vector<std::string> argv_storage{binary.string()};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());
  argv.push_back(nullptr);

  std::cout.flush();
  std::cerr.flush();
  pid_t pid = ::fork();
  if (pid < 0) return -1;
  if (pid == 0) {
    if (::chdir(cwd.c_str()) != 0) ::_exit(127);
    ::dup2(STDERR_FILENO, STDOUT_FILENO);
    ::execv(argv[0], argv.data());
    ::_exit(127);
  }
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR) return -1;
  }
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// dry_run: `terraform init -backend=false` + `terraform validate`;
// otherwise `terraform init` + `terraform apply -auto-approve`.
inline int cmd_deploy(const fs::path& config_path, bool dry_run, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    ProjectConfig cfg = detail::load(config_path, err);
    fs::path out_dir = cfg.resolve(cfg.out_dir);
    if (!fs::is_regular_file(out_dir / "main.tf")) {
      err << (out_dir / "main.tf").string() << ": not found; run `infraloom synth` first\n";
      return int{kIoError};
    }
    auto terraform = locate_terraform();
    if (!terraform) {
      err << "terraform binary not found: install Terraform and put it on PATH, or set "
             "INFRALOOM_TERRAFORM to its location\n";
      return int{kNoTerraform};
    }
    std::vector<std::vector<std::string>> steps;
    if (dry_run) {
      steps = {{"init", "-backend=false", "-input=false", "-no-color"}, {"validate", "-no-color"}};
    } else {
      steps = {{"init", "-input=false", "-no-color"}, {"apply", "-auto-approve", "-input=false", "-no-color"}};
    }
    for (const auto& step : steps) {
      int status = run_process(*terraform, step, out_dir);
      if (status != 0) {
        err << "terraform " << step.front() << " failed (status " << status << ")\n";
        return int{kTerraformFailed};
      }
    }
    out << (dry_run ? "validate" : "apply") << " ok\n";
    return int{kOk};
  });
}

// ---------------------------------------------------------------------------
// serve

// Stub handlers for every dynamic route. A route named in `stubs` returns the
// mapped text (parsed as the route's return type); any other route echoes its
// handler name when it returns String, or a zero value otherwise.
//
// Throws Error("InvalidStub") when a mapped text does not parse.
inline runtime::HandlerRegistry stub_handlers(const Schema& schema,
                                              const std::map<std::string, std::string>& stubs) {
  runtime::HandlerRegistry registry;
  for (const auto& r : schema.dynamic_routes) {
    runtime::Value result;
    if (auto it = stubs.find(r.handler.name); it != stubs.end()) {
      if (r.return_type == "Unit") {
        result = std::monostate{};
      } else if (auto v = runtime::parse_primitive(r.return_type, it->second)) {
        result = *v;
      } else {
        throw Error("InvalidStub", "InvalidStub: '" + it->second + "' is not a " + r.return_type +
                                       " for " + r.handler.name);
      }
    } else if (r.return_type == "String") {
      result = r.handler.name;
    } else if (r.return_type == "Int" || r.return_type == "Long") {
      result = std::int64_t{0};
    } else if (r.return_type == "Float" || r.return_type == "Double") {
      result = 0.0;
    } else if (r.return_type == "Boolean") {
      result = false;
    }
    registry[r.handler.name] = [result](const std::vector<runtime::Value>&) { return result; };
  }
  return registry;
}

// Schema from sources plus stub handlers, ready to serve.
inline runtime::DispatchTable prepare_serve(const ProjectConfig& cfg, const std::optional<fs::path>& stubs_path,
                                            std::ostream& err) {
  Schema schema = detail::load_schema(cfg, err);
  std::map<std::string, std::string> stubs;
  if (stubs_path) {
    std::ifstream in(*stubs_path);
    if (!in) {
      err << stubs_path->string() << ": cannot read stub mapping\n";
      throw Failure{kIoError};
    }
    try {
      for (auto& [k, v] : infraloom::detail::read_key_values(in, stubs_path->string())) stubs[k] = v.first;
    } catch (const ConfigError& e) {
      err << e.what() << "\n";
      throw Failure{kInvalidInput};
    }
  }
  runtime::Extensions ext;
  ext.static_root = cfg.resolve(cfg.static_dir);
  return runtime::load_dispatch_table(schema, stub_handlers(schema, stubs), std::move(ext));
}

// With `batch` set, answers newline-delimited JSON events from that file
// ("-" for standard input) on `out`; otherwise listens on 127.0.0.1:port
// until killed.
inline int cmd_serve(const fs::path& config_path, int port, const std::optional<fs::path>& stubs_path,
                     const std::optional<fs::path>& batch, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    ProjectConfig cfg = detail::load(config_path, err);
    runtime::DispatchTable table = prepare_serve(cfg, stubs_path, err);
    if (batch) {
      if (*batch == "-") {
        runtime::serve_batch(std::cin, out, table);
      } else {
        std::ifstream in(*batch);
        if (!in) {
          err << batch->string() << ": cannot read events\n";
          return int{kIoError};
        }
        runtime::serve_batch(in, out, table);
      }
      return int{kOk};
    }
    runtime::HttpEmulator server(table);
    if (!server.bind("127.0.0.1", port)) {
      err << "cannot listen on 127.0.0.1:" << port << " (port in use?)\n";
      return int{kIoError};
    }
    err << "serving " << cfg.app_name << " on http://127.0.0.1:" << server.port() << "/\n";
    server.listen();
    return int{kOk};
  });
}

// ---------------------------------------------------------------------------
// simulate / estimate

inline nlohmann::json metrics_to_json(const sim::Metrics& m) {
  return {{"requests", m.requests},
          {"cold_starts", m.cold_starts},
          {"cold_fraction", m.cold_fraction},
          {"p50_latency_ms", m.p50_latency_ms},
          {"p99_latency_ms", m.p99_latency_ms},
          {"max_throughput_rps", m.max_throughput_rps},
          {"served_rps", m.served_rps},
          {"peak_instances", m.peak_instances},
          {"dropped", m.dropped},
          {"warming_invocations", m.warming_invocations},
          {"makespan_ms", m.makespan_ms}};
}

inline int cmd_simulate(const fs::path& config_path, const fs::path& workload_path, std::ostream& out,
                        std::ostream& err) {
  return detail::guarded(err, [&] {
    ProjectConfig cfg = detail::load(config_path, err);
    std::ifstream in(workload_path);
    if (!in) {
      err << workload_path.string() << ": cannot read workload\n";
      return int{kIoError};
    }
    auto workload = sim::parse_workload_csv(in);
    sim::WarmPoolState state = sim::state_from_config(cfg);
    auto metrics = sim::simulate_warm_pool(workload, state, {cfg.warming_enabled, cfg.warming_period_minutes});
    out << metrics_to_json(metrics).dump(2) << "\n";
    return int{kOk};
  });
}

inline int cmd_estimate(const fs::path& config_path, const fs::path& pricing_path, std::ostream& out,
                        std::ostream& err) {
  return detail::guarded(err, [&] {
    ProjectConfig cfg = detail::load(config_path, err);
    std::ifstream in(pricing_path);
    if (!in) {
      err << pricing_path.string() << ": cannot read pricing file\n";
      return int{kIoError};
    }
    sim::CostParams p;
    try {
      p = sim::parse_pricing(in, pricing_path.string(), cfg);
    } catch (const ConfigError& e) {
      err << e.what() << "\n";
      return int{kInvalidInput};
    }
    nlohmann::json j = {{"monthly_cost", sim::estimate_cost(p)},
                        {"requests_per_month", p.requests_per_month},
                        {"warming_per_month", p.warming_per_month},
                        {"memory_gb", p.memory_gb}};
    out << j.dump(2) << "\n";
    return int{kOk};
  });
}

}  // namespace infraloom::cli
