#pragma once

// Helpers shared by the test binaries: scratch directories, fixture copies,
// running the CLI and generating random projects.

#include <netinet/in.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "infraloom/config.hpp"
#include "infraloom/dsl.hpp"
#include "infraloom/schema.hpp"

namespace testing_support {

namespace fs = std::filesystem;

inline fs::path fixture(const std::string& name) { return fs::path(INFRALOOM_FIXTURES) / name; }

class ScratchDir {
 public:
  ScratchDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("infraloom-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  fs::path path_;
};

// Copies a fixture project into a fresh scratch directory.
inline fs::path copy_fixture(const ScratchDir& dir, const std::string& name) {
  fs::path dest = dir / name;
  fs::copy(fixture(name), dest, fs::copy_options::recursive);
  return dest;
}

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << text;
}

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr combined
};

inline RunResult run(const std::string& command) {
  RunResult r;
  FILE* pipe = ::popen((command + " 2>&1").c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
  int status = ::pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

inline std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

inline RunResult run_cli(const std::string& args) { return run(shell_quote(INFRALOOM_CLI) + " " + args); }

// A port that was free a moment ago.
inline int free_port() {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  ::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
  socklen_t len = sizeof addr;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  ::close(fd);
  return ntohs(addr.sin_port);
}

// Starts the CLI in the background with output discarded.
class BackgroundCli {
 public:
  explicit BackgroundCli(const std::vector<std::string>& args) {
    std::vector<std::string> storage{INFRALOOM_CLI};
    storage.insert(storage.end(), args.begin(), args.end());
    pid_ = ::fork();
    if (pid_ == 0) {
      std::vector<char*> argv;
      for (auto& a : storage) argv.push_back(a.data());
      argv.push_back(nullptr);
      FILE* devnull = std::fopen("/dev/null", "w");
      if (devnull) {
        ::dup2(fileno(devnull), STDOUT_FILENO);
        ::dup2(fileno(devnull), STDERR_FILENO);
      }
      ::execv(argv[0], argv.data());
      ::_exit(127);
    }
  }
  ~BackgroundCli() {
    if (pid_ > 0) {
      ::kill(pid_, SIGTERM);
      int status;
      ::waitpid(pid_, &status, 0);
    }
  }
  BackgroundCli(const BackgroundCli&) = delete;
  BackgroundCli& operator=(const BackgroundCli&) = delete;

 private:
  pid_t pid_ = -1;
};

// ---------------------------------------------------------------------------
// Random projects

// A generated project: source files plus the reference edges that were
// written into the bodies, so oracles do not need the parser.
struct RandomProject {
  std::vector<std::pair<std::string, std::string>> files;  // (path, text)
  std::vector<std::string> names;                          // all declaration names
  std::vector<std::vector<int>> edges;                     // edges[i] = referenced decl indices
  std::vector<int> handlers;                               // indices of routed functions
  struct Grant {
    int decl;
    std::string table;
    infraloom::AccessMode mode;
  };
  std::vector<Grant> grants;

  std::vector<infraloom::dsl::SourceFile> parse() const {
    std::vector<infraloom::dsl::SourceFile> out;
    for (const auto& [path, text] : files) out.push_back(infraloom::dsl::parse_file(text, path));
    return out;
  }
};

inline const char* mode_name(infraloom::AccessMode m) { return infraloom::to_string(m); }

// Up to `max_decls` declarations spread over 1-3 files, random references
// (cycles allowed), random routes, grants and static files.
inline RandomProject random_project(std::mt19937& rng, int max_decls = 12, bool with_statics = true) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  RandomProject p;
  int n = pick(1, max_decls);
  int nfiles = pick(1, 3);
  std::vector<std::string> bodies(nfiles);
  p.edges.resize(n);

  std::vector<int> kind(n);  // 0 fun, 1 object
  for (int i = 0; i < n; ++i) {
    kind[i] = pick(0, 1);
    p.names.push_back((kind[i] == 0 ? "fn" : "Obj") + std::to_string(i));
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (pick(0, 3) == 0) p.edges[i].push_back(j);
    }
  }

  static const char* tables[] = {"t1", "t2", "users", "orders"};
  static const char* segments[] = {"a", "b", "items", "{id}"};
  std::set<std::pair<std::string, std::string>> used_routes;
  for (int i = 0; i < n; ++i) {
    std::string text;
    if (pick(0, 2) == 0) {
      auto mode = static_cast<infraloom::AccessMode>(pick(0, 2));
      std::string table = tables[pick(0, 3)];
      p.grants.push_back({i, table, mode});
      text += "@DynamoDBTable(\"" + table + "\", " + mode_name(mode) + ")\n";
    }
    bool has_id = false;
    if (kind[i] == 0 && pick(0, 1) == 0) {
      std::string method = pick(0, 1) ? "Get" : "Post";
      std::string path;
      int depth = pick(0, 2);
      bool id_used = false;
      for (int d = 0; d < depth; ++d) {
        std::string seg = segments[pick(0, 3)];
        if (seg == "{id}") {
          if (id_used) seg = "x";
          id_used = true;
        }
        path += "/" + seg;
      }
      if (path.empty()) path = "/";
      if (used_routes.insert({method, path}).second) {
        text += "@" + method + "(\"" + path + "\")\n";
        has_id = id_used;
        p.handlers.push_back(i);
      }
    }
    std::string refs;
    for (int j : p.edges[i]) refs += " " + p.names[j] + "()";
    if (kind[i] == 0) {
      text += "fun " + p.names[i] + "(" + (has_id ? "id: Int" : "") + "): String {" + refs + " }\n";
    } else {
      text += "object " + p.names[i] + " {" + refs + " }\n";
    }
    bodies[pick(0, nfiles - 1)] += text;
  }
  if (with_statics) {
    int nstatic = pick(0, 2);
    for (int s = 0; s < nstatic; ++s) {
      bodies[0] += "@StaticGet(\"/assets/f" + std::to_string(s) + ".css\", MimeType.CSS)\nval asset" +
                   std::to_string(s) + " = File(\"f" + std::to_string(s) + ".css\")\n";
    }
  }
  for (int f = 0; f < nfiles; ++f) p.files.push_back({"src/f" + std::to_string(f) + ".kls", bodies[f]});
  return p;
}

inline infraloom::ProjectConfig test_config(const std::string& app = "rand") {
  infraloom::ProjectConfig c;
  c.app_name = app;
  c.bucket = app + "-assets";
  return c;
}

}  // namespace testing_support
