#pragma once

// The cloud-agnostic serverless schema: the intermediate representation
// produced from parsed source files and consumed by both the HCL
// synthesizer and the local runtime.

#include <algorithm>
#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "infraloom/config.hpp"
#include "infraloom/dsl.hpp"
#include "infraloom/error.hpp"

namespace infraloom {

enum class HttpMethod { GET, POST };

inline const char* to_string(HttpMethod m) { return m == HttpMethod::GET ? "GET" : "POST"; }

inline std::optional<HttpMethod> parse_method(std::string_view s) {
  if (s == "GET") return HttpMethod::GET;
  if (s == "POST") return HttpMethod::POST;
  return std::nullopt;
}

enum class MimeType { CSS, HTML, JS, PNG, JPEG, JSON, TXT, BIN };

inline constexpr MimeType kAllMimeTypes[] = {MimeType::CSS, MimeType::HTML, MimeType::JS,
                                             MimeType::PNG, MimeType::JPEG, MimeType::JSON,
                                             MimeType::TXT, MimeType::BIN};

inline const char* mime_name(MimeType m) {
  switch (m) {
    case MimeType::CSS: return "CSS";
    case MimeType::HTML: return "HTML";
    case MimeType::JS: return "JS";
    case MimeType::PNG: return "PNG";
    case MimeType::JPEG: return "JPEG";
    case MimeType::JSON: return "JSON";
    case MimeType::TXT: return "TXT";
    case MimeType::BIN: return "BIN";
  }
  return "?";
}

inline const char* content_type(MimeType m) {
  switch (m) {
    case MimeType::CSS: return "text/css";
    case MimeType::HTML: return "text/html";
    case MimeType::JS: return "application/javascript";
    case MimeType::PNG: return "image/png";
    case MimeType::JPEG: return "image/jpeg";
    case MimeType::JSON: return "application/json";
    case MimeType::TXT: return "text/plain";
    case MimeType::BIN: return "application/octet-stream";
  }
  return "application/octet-stream";
}

// Accepts `MimeType.CSS` as written in source, or the bare `CSS`.
inline std::optional<MimeType> mime_from_identifier(std::string_view ident) {
  constexpr std::string_view prefix = "MimeType.";
  if (ident.substr(0, prefix.size()) == prefix) ident.remove_prefix(prefix.size());
  for (MimeType m : kAllMimeTypes) {
    if (ident == mime_name(m)) return m;
  }
  return std::nullopt;
}

enum class Service { DynamoDB };

inline const char* to_string(Service) { return "DynamoDB"; }

enum class AccessMode { Read, Write, ReadWrite };

inline const char* to_string(AccessMode m) {
  switch (m) {
    case AccessMode::Read: return "Read";
    case AccessMode::Write: return "Write";
    case AccessMode::ReadWrite: return "ReadWrite";
  }
  return "?";
}

inline std::optional<AccessMode> parse_access_mode(std::string_view s) {
  if (s == "Read") return AccessMode::Read;
  if (s == "Write") return AccessMode::Write;
  if (s == "ReadWrite") return AccessMode::ReadWrite;
  return std::nullopt;
}

inline AccessMode combine(AccessMode a, AccessMode b) { return a == b ? a : AccessMode::ReadWrite; }

// Parameter and return types a route may use without a converter.
inline bool is_primitive_type(std::string_view t) {
  return t == "Int" || t == "Long" || t == "Float" || t == "Double" || t == "Boolean" ||
         t == "String";
}

struct DeclRef {
  std::string file;
  std::string name;

  auto operator<=>(const DeclRef&) const = default;
  bool operator==(const DeclRef&) const = default;
};

struct DynamicRoute {
  HttpMethod method = HttpMethod::GET;
  std::string path;
  DeclRef handler;
  std::vector<dsl::Param> params;
  std::string return_type = "Unit";
  int line = 0;

  // Names bound by `{param}` path segments.
  std::vector<std::string> path_params() const;
  bool operator==(const DynamicRoute&) const = default;
};

struct StaticRoute {
  std::string path;
  // Identifier as written, e.g. `MimeType.CSS`; resolved by `mime()`.
  std::string mime_identifier;
  std::string source_file;
  DeclRef decl;
  int line = 0;

  std::optional<MimeType> mime() const { return mime_from_identifier(mime_identifier); }
  bool operator==(const StaticRoute&) const = default;
};

struct PermissionGrant {
  DeclRef entity;
  Service service = Service::DynamoDB;
  std::string resource_name;
  AccessMode mode = AccessMode::Read;
  int line = 0;

  bool operator==(const PermissionGrant&) const = default;
};

struct WarmingConfig {
  bool enabled = true;
  int period_minutes = 5;

  bool operator==(const WarmingConfig&) const = default;
};

struct Schema {
  std::string app_name;
  std::vector<DynamicRoute> dynamic_routes;
  std::vector<StaticRoute> static_routes;
  std::vector<PermissionGrant> grants;
  WarmingConfig warming;
  std::vector<dsl::SourceFile> declarations;

  const dsl::Declaration* find_declaration(const DeclRef& ref) const {
    for (const auto& f : declarations) {
      if (f.path == ref.file) return f.find(ref.name);
    }
    return nullptr;
  }

  bool operator==(const Schema&) const = default;
};

struct SchemaError {
  // DuplicateRoute, UnknownMime, EmptyStaticSource, UnresolvedHandler,
  // UnsupportedParamType, PathParamMismatch, InvalidPath,
  // MalformedInitializer or EmptyResourceName.
  std::string kind;
  std::string detail;
  std::string file;
  int line = 0;

  std::string to_string() const {
    return (file.empty() ? std::string("<schema>") : file) + ":" + std::to_string(line) + ": " +
           kind + ": " + detail;
  }
  bool operator==(const SchemaError&) const = default;
};

class SchemaValidationError : public Error {
 public:
  explicit SchemaValidationError(std::vector<SchemaError> errors)
      : Error(errors.empty() ? "SchemaError" : errors.front().kind, join(errors)),
        errors_(std::move(errors)) {}

  const std::vector<SchemaError>& errors() const noexcept { return errors_; }

 private:
  static std::string join(const std::vector<SchemaError>& errors) {
    std::string out;
    for (const auto& e : errors) {
      if (!out.empty()) out += "\n";
      out += e.to_string();
    }
    return out;
  }
  std::vector<SchemaError> errors_;
};

// ---------------------------------------------------------------------------
// Paths

namespace detail {

inline bool is_param_segment(std::string_view seg) {
  if (seg.size() < 3 || seg.front() != '{' || seg.back() != '}') return false;
  std::string_view ident = seg.substr(1, seg.size() - 2);
  if (!dsl::detail::is_ident_start(ident[0])) return false;
  return std::all_of(ident.begin(), ident.end(), dsl::detail::is_ident_char);
}

inline bool is_literal_segment(std::string_view seg) {
  return !seg.empty() && std::all_of(seg.begin(), seg.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '.' || c == '_' || c == '-';
  });
}

}  // namespace detail

inline std::vector<std::string_view> path_segments(std::string_view path) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < path.size()) {
    std::size_t j = path.find('/', i);
    if (j == std::string_view::npos) j = path.size();
    if (j > i) out.push_back(path.substr(i, j - i));
    i = j + 1;
  }
  return out;
}

// Canonical form of a route path: leading '/', no trailing '/' (except the
// root), no empty segments. Segments are taken literally and must be
// [A-Za-z0-9._-]+ or a whole `{ident}`.
//
// Throws Error("InvalidPath").
inline std::string normalize_path(std::string_view raw) {
  auto invalid = [&](const std::string& reason) {
    return Error("InvalidPath", "InvalidPath: '" + std::string(raw) + "': " + reason);
  };
  if (raw.empty()) throw invalid("path is empty");
  std::string out;
  for (std::string_view seg : path_segments(raw)) {
    if (!detail::is_literal_segment(seg) && !detail::is_param_segment(seg)) {
      throw invalid("segment '" + std::string(seg) + "' has characters outside [A-Za-z0-9._-]");
    }
    out += "/";
    out += seg;
  }
  return out.empty() ? "/" : out;
}

inline std::vector<std::string> DynamicRoute::path_params() const {
  std::vector<std::string> out;
  for (std::string_view seg : path_segments(path)) {
    if (detail::is_param_segment(seg)) out.emplace_back(seg.substr(1, seg.size() - 2));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Validation

inline std::vector<SchemaError> validate_schema(const Schema& schema) {
  std::vector<SchemaError> errors;
  auto report = [&](std::string kind, std::string detail, const std::string& file, int line) {
    errors.push_back({std::move(kind), std::move(detail), file, line});
  };

  auto check_path = [&](const std::string& path, const std::string& file, int line) {
    try {
      if (normalize_path(path) != path) {
        report("InvalidPath", "'" + path + "' is not normalized", file, line);
        return false;
      }
    } catch (const Error& e) {
      report("InvalidPath", e.what(), file, line);
      return false;
    }
    return true;
  };

  std::map<std::pair<HttpMethod, std::string>, const DynamicRoute*> dynamic_keys;
  for (const auto& r : schema.dynamic_routes) {
    const std::string& file = r.handler.file;
    bool path_ok = check_path(r.path, file, r.line);
    auto [it, inserted] = dynamic_keys.emplace(std::make_pair(r.method, r.path), &r);
    if (!inserted) {
      report("DuplicateRoute", std::string(to_string(r.method)) + " " + r.path, file, r.line);
    }

    const dsl::Declaration* decl = schema.find_declaration(r.handler);
    if (!decl || decl->kind != dsl::DeclKind::Function) {
      report("UnresolvedHandler", r.handler.name, file, r.line);
    }

    for (const auto& p : r.params) {
      if (!is_primitive_type(p.type_name)) {
        report("UnsupportedParamType", p.name + ": " + p.type_name, file, r.line);
      }
    }
    if (r.return_type != "Unit" && !is_primitive_type(r.return_type)) {
      report("UnsupportedParamType", "return: " + r.return_type, file, r.line);
    }

    if (path_ok) {
      std::set<std::string> seen;
      for (const auto& name : r.path_params()) {
        bool declared = std::any_of(r.params.begin(), r.params.end(),
                                    [&](const dsl::Param& p) { return p.name == name; });
        if (!seen.insert(name).second) {
          report("PathParamMismatch",
                 std::string(to_string(r.method)) + " " + r.path + ": '{" + name +
                     "}' appears twice",
                 file, r.line);
        } else if (!declared) {
          report("PathParamMismatch",
                 std::string(to_string(r.method)) + " " + r.path + ": '{" + name +
                     "}' has no matching parameter",
                 file, r.line);
        }
      }
    }
  }

  std::set<std::string> static_paths;
  for (const auto& s : schema.static_routes) {
    const std::string& file = s.decl.file;
    check_path(s.path, file, s.line);
    if (!static_paths.insert(s.path).second || dynamic_keys.count({HttpMethod::GET, s.path})) {
      report("DuplicateRoute", "GET " + s.path, file, s.line);
    }
    if (!s.mime()) report("UnknownMime", s.mime_identifier, file, s.line);
    if (s.source_file.empty()) report("EmptyStaticSource", s.path, file, s.line);
  }

  for (const auto& g : schema.grants) {
    if (g.resource_name.empty()) {
      report("EmptyResourceName", g.entity.name, g.entity.file, g.line);
    }
  }
  return errors;
}

// ---------------------------------------------------------------------------
// Construction

inline bool route_less(const DynamicRoute& a, const DynamicRoute& b) {
  return std::tie(a.method, a.path, a.handler) < std::tie(b.method, b.path, b.handler);
}

// Builds the schema from parsed files. Output is independent of the order of
// `files`: files are sorted by path and every route list is sorted.
//
// Throws SchemaValidationError if the result does not validate.
inline Schema build_schema(std::vector<dsl::SourceFile> files, const ProjectConfig& config) {
  Schema schema;
  schema.app_name = config.app_name;
  schema.warming = WarmingConfig{config.warming_enabled, config.warming_period_minutes};
  std::sort(files.begin(), files.end(),
            [](const dsl::SourceFile& a, const dsl::SourceFile& b) { return a.path < b.path; });

  std::vector<SchemaError> construction_errors;
  std::map<std::tuple<DeclRef, Service, std::string>, std::size_t> grant_index;

  for (const auto& file : files) {
    for (const auto& decl : file.declarations) {
      DeclRef ref{file.path, decl.name};
      for (const auto& a : decl.annotations) {
        if (a.name == "Get" || a.name == "Post") {
          DynamicRoute r;
          r.method = a.name == "Get" ? HttpMethod::GET : HttpMethod::POST;
          r.handler = ref;
          r.params = decl.params;
          r.return_type = decl.return_type.value_or("Unit");
          r.line = a.line;
          try {
            r.path = normalize_path(a.args[0].value);
          } catch (const Error& e) {
            construction_errors.push_back({"InvalidPath", e.what(), file.path, a.line});
            continue;
          }
          schema.dynamic_routes.push_back(std::move(r));
        } else if (a.name == "StaticGet") {
          StaticRoute s;
          s.mime_identifier = a.args[1].value;
          s.decl = ref;
          s.line = a.line;
          try {
            s.path = normalize_path(a.args[0].value);
            s.source_file = dsl::extract_static_path(decl);
          } catch (const Error& e) {
            construction_errors.push_back({e.code(), e.what(), file.path, a.line});
            continue;
          }
          schema.static_routes.push_back(std::move(s));
        } else if (a.name == "DynamoDBTable") {
          PermissionGrant g;
          g.entity = ref;
          g.service = Service::DynamoDB;
          g.resource_name = a.args[0].value;
          g.mode = *parse_access_mode(a.args[1].value);
          g.line = a.line;
          auto key = std::make_tuple(g.entity, g.service, g.resource_name);
          if (auto it = grant_index.find(key); it != grant_index.end()) {
            auto& existing = schema.grants[it->second];
            existing.mode = combine(existing.mode, g.mode);
          } else {
            grant_index.emplace(key, schema.grants.size());
            schema.grants.push_back(std::move(g));
          }
        }
      }
    }
  }

  std::sort(schema.dynamic_routes.begin(), schema.dynamic_routes.end(), route_less);
  std::sort(schema.static_routes.begin(), schema.static_routes.end(),
            [](const StaticRoute& a, const StaticRoute& b) {
              return std::tie(a.path, a.decl) < std::tie(b.path, b.decl);
            });
  std::sort(schema.grants.begin(), schema.grants.end(),
            [](const PermissionGrant& a, const PermissionGrant& b) {
              return std::tie(a.entity, a.service, a.resource_name) <
                     std::tie(b.entity, b.service, b.resource_name);
            });
  schema.declarations = std::move(files);

  auto errors = validate_schema(schema);
  errors.insert(errors.begin(), construction_errors.begin(), construction_errors.end());
  if (!errors.empty()) throw SchemaValidationError(std::move(errors));
  return schema;
}

}  // namespace infraloom
