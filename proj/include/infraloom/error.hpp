#pragma once

#include <stdexcept>
#include <string>

namespace infraloom {

// Base class of every exception thrown by the toolchain. `code()` is a
// stable identifier (e.g. "UnterminatedString") that tests and the CLI
// match on; `what()` carries a human readable message.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

// Errors raised by the declaration-language front end. Line and column are
// 1-based; column 0 means "not known".
class DslError : public Error {
 public:
  DslError(std::string code, std::string file, int line, int col, const std::string& detail)
      : Error(code, format(code, file, line, col, detail)),
        file_(std::move(file)),
        line_(line),
        col_(col) {}

  const std::string& file() const noexcept { return file_; }
  int line() const noexcept { return line_; }
  int col() const noexcept { return col_; }

 private:
  static std::string format(const std::string& code, const std::string& file, int line, int col,
                            const std::string& detail) {
    std::string out = file.empty() ? std::string("<input>") : file;
    out += ":" + std::to_string(line);
    if (col > 0) out += ":" + std::to_string(col);
    out += ": " + code;
    if (!detail.empty()) out += ": " + detail;
    return out;
  }

  std::string file_;
  int line_;
  int col_;
};

}  // namespace infraloom
