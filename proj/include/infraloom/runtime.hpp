#pragma once

// Local emulator of the dispatcher function: loads a Schema into a dispatch
// table and serves HTTP and warming events against registered handlers.

#include <any>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

#include "infraloom/error.hpp"
#include "infraloom/schema.hpp"

namespace infraloom::runtime {

// Handler argument / result. Int and Long map to int64_t, Float and Double to
// double. std::any carries values produced by registered converters.
using Value = std::variant<std::monostate, std::int64_t, double, bool, std::string, std::any>;

using Headers = std::map<std::string, std::string>;

struct Event {
  enum class Type { Http, Warming };

  Type type = Type::Http;
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  Headers headers;
  std::optional<std::string> body;
  std::int64_t sequence = 0;  // warming only

  static Event http(std::string method, std::string path, std::map<std::string, std::string> query = {}) {
    Event e;
    e.method = std::move(method);
    e.path = std::move(path);
    e.query = std::move(query);
    return e;
  }
  static Event warming(std::int64_t sequence) {
    Event e;
    e.type = Type::Warming;
    e.sequence = sequence;
    return e;
  }
};

struct Response {
  int status = 200;
  Headers headers;
  std::string body;

  static Response text(int status, std::string body) {
    return {status, {{"Content-Type", "text/plain"}}, std::move(body)};
  }
  bool operator==(const Response&) const = default;
};

using Handler = std::function<Value(const std::vector<Value>&)>;
using HandlerRegistry = std::map<std::string, Handler>;
// Returns a Response to short-circuit the request, nullopt to continue.
using Interceptor = std::function<std::optional<Response>(const Event&)>;
// Parses the raw text of a non-primitive parameter; throws on bad input.
using Converter = std::function<Value(const std::string&)>;
using Hook = std::function<void()>;

struct HandlerEntry {
  std::string name;
  HttpMethod method = HttpMethod::GET;
  std::string path;
  std::vector<dsl::Param> params;
  std::string return_type;
  Handler handler;
};

struct StaticEntry {
  std::string path;
  std::string source_file;
  MimeType mime = MimeType::BIN;
};

// Optional runtime extensions supplied when loading a table.
struct Extensions {
  std::vector<Interceptor> interceptors;
  std::map<std::string, Converter> converters;
  std::vector<Hook> init_hooks;     // run once, before the first event
  std::vector<Hook> warming_hooks;  // run on every warming event
  std::filesystem::path static_root = ".";
};

class DispatchTable {
 public:
  std::map<std::pair<HttpMethod, std::string>, HandlerEntry> exact;
  std::vector<HandlerEntry> parameterized;
  std::map<std::string, StaticEntry> statics;
  Extensions ext;

  bool empty() const { return exact.empty() && parameterized.empty() && statics.empty(); }

  // Runs the init hooks exactly once per loaded table, even when several
  // threads deliver their first event concurrently.
  void ensure_initialized() const {
    std::call_once(lifecycle_->once, [this] {
      for (const auto& hook : ext.init_hooks) hook();
    });
  }

 private:
  struct Lifecycle {
    std::once_flag once;
  };
  std::shared_ptr<Lifecycle> lifecycle_ = std::make_shared<Lifecycle>();
};

class UnresolvedHandlerError : public Error {
 public:
  explicit UnresolvedHandlerError(std::vector<std::string> names)
      : Error("UnresolvedHandler", message(names)), names_(std::move(names)) {}
  const std::vector<std::string>& names() const noexcept { return names_; }

 private:
  static std::string message(const std::vector<std::string>& names) {
    std::string out = "UnresolvedHandler: no handler registered for";
    for (const auto& n : names) out += " " + n;
    return out;
  }
  std::vector<std::string> names_;
};

inline bool has_param_segment(const std::string& path) { return path.find('{') != std::string::npos; }

// Throws UnresolvedHandlerError listing every route without a handler.
inline DispatchTable load_dispatch_table(const Schema& schema, const HandlerRegistry& handlers,
                                         Extensions ext = {}) {
  DispatchTable table;
  std::vector<std::string> missing;
  for (const auto& r : schema.dynamic_routes) {
    auto it = handlers.find(r.handler.name);
    if (it == handlers.end() || !it->second) {
      missing.push_back(r.handler.name);
      continue;
    }
    HandlerEntry entry{r.handler.name, r.method, r.path, r.params, r.return_type, it->second};
    if (has_param_segment(r.path)) {
      table.parameterized.push_back(std::move(entry));
    } else {
      table.exact.emplace(std::make_pair(r.method, r.path), std::move(entry));
    }
  }
  if (!missing.empty()) throw UnresolvedHandlerError(std::move(missing));
  for (const auto& s : schema.static_routes) {
    table.statics.emplace(s.path, StaticEntry{s.path, s.source_file, s.mime().value_or(MimeType::BIN)});
  }
  table.ext = std::move(ext);
  return table;
}

// ---------------------------------------------------------------------------
// Matching

struct RouteMatch {
  enum class Kind { Handler, Static, NotFound };

  Kind kind = Kind::NotFound;
  const HandlerEntry* handler = nullptr;
  const StaticEntry* static_entry = nullptr;
  std::map<std::string, std::string> path_params;

  bool found() const { return kind != Kind::NotFound; }
};

// Binds `path` against a parameterized route. Returns the number of literal
// segments on success.
inline std::optional<int> bind_segments(std::string_view pattern, std::string_view path,
                                        std::map<std::string, std::string>* params) {
  auto pat = path_segments(pattern);
  auto segs = path_segments(path);
  if (pat.size() != segs.size()) return std::nullopt;
  int literals = 0;
  for (std::size_t i = 0; i < pat.size(); ++i) {
    if (pat[i].front() == '{') {
      if (params) (*params)[std::string(pat[i].substr(1, pat[i].size() - 2))] = std::string(segs[i]);
    } else if (pat[i] == segs[i]) {
      ++literals;
    } else {
      return std::nullopt;
    }
  }
  return literals;
}

// Precedence: exact route, then the parameterized route with the most literal
// segments (ties go to the lexicographically smallest route path), then
// static files for GET, else NotFound.
inline RouteMatch match_route(const DispatchTable& table, HttpMethod method, const std::string& path) {
  RouteMatch m;
  if (auto it = table.exact.find({method, path}); it != table.exact.end()) {
    m.kind = RouteMatch::Kind::Handler;
    m.handler = &it->second;
    return m;
  }
  const HandlerEntry* best = nullptr;
  int best_literals = -1;
  for (const auto& entry : table.parameterized) {
    if (entry.method != method) continue;
    auto literals = bind_segments(entry.path, path, nullptr);
    if (!literals) continue;
    if (*literals > best_literals || (*literals == best_literals && entry.path < best->path)) {
      best = &entry;
      best_literals = *literals;
    }
  }
  if (best) {
    m.kind = RouteMatch::Kind::Handler;
    m.handler = best;
    bind_segments(best->path, path, &m.path_params);
    return m;
  }
  if (method == HttpMethod::GET) {
    if (auto it = table.statics.find(path); it != table.statics.end()) {
      m.kind = RouteMatch::Kind::Static;
      m.static_entry = &it->second;
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// (De)serialization

class ParamError : public Error {
 public:
  ParamError(std::string code, std::string name, const std::string& message)
      : Error(std::move(code), message), name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

namespace detail {

inline bool looks_decimal(std::string_view s, bool allow_fraction) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-') ? 1 : 0;
  if (i == s.size()) return false;
  bool digits = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (c >= '0' && c <= '9') {
      digits = true;
    } else if (!allow_fraction) {
      return false;
    } else if (c != '.' && c != 'e' && c != 'E' && c != '-' && c != '+') {
      return false;
    }
  }
  return digits;
}

template <typename Int>
std::optional<std::int64_t> parse_integer(std::string_view s) {
  if (!looks_decimal(s, false)) return std::nullopt;
  Int v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return static_cast<std::int64_t>(v);
}

template <typename Float>
std::optional<double> parse_floating(std::string_view s) {
  if (!looks_decimal(s, true)) return std::nullopt;
  Float v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return static_cast<double>(v);
}

}  // namespace detail

inline std::optional<Value> parse_primitive(const std::string& type, const std::string& raw) {
  if (type == "Int") {
    if (auto v = detail::parse_integer<std::int32_t>(raw)) return Value{*v};
  } else if (type == "Long") {
    if (auto v = detail::parse_integer<std::int64_t>(raw)) return Value{*v};
  } else if (type == "Float") {
    if (auto v = detail::parse_floating<float>(raw)) return Value{*v};
  } else if (type == "Double") {
    if (auto v = detail::parse_floating<double>(raw)) return Value{*v};
  } else if (type == "Boolean") {
    if (raw == "true") return Value{true};
    if (raw == "false") return Value{false};
  } else if (type == "String") {
    return Value{raw};
  }
  return std::nullopt;
}

// Typed arguments in signature order. Types without a primitive parser are
// looked up in `converters`.
//
// Throws ParamError with code MissingParam or TypeMismatch.
inline std::vector<Value> deserialize_params(const std::vector<dsl::Param>& sig,
                                             const std::map<std::string, std::string>& raw,
                                             const std::map<std::string, Converter>& converters = {}) {
  std::vector<Value> out;
  out.reserve(sig.size());
  for (const auto& p : sig) {
    auto it = raw.find(p.name);
    if (it == raw.end()) {
      throw ParamError("MissingParam", p.name, "MissingParam: '" + p.name + "'");
    }
    auto mismatch = [&] {
      return ParamError("TypeMismatch", p.name,
                        "TypeMismatch: '" + p.name + "' expects " + p.type_name + ", got '" + it->second + "'");
    };
    if (is_primitive_type(p.type_name)) {
      auto v = parse_primitive(p.type_name, it->second);
      if (!v) throw mismatch();
      out.push_back(std::move(*v));
      continue;
    }
    auto conv = converters.find(p.type_name);
    if (conv == converters.end()) throw mismatch();
    try {
      out.push_back(conv->second(it->second));
    } catch (const std::exception&) {
      throw mismatch();
    }
  }
  return out;
}

// Text rendering of a primitive value as declared by `type`. Floats use the
// shortest representation that parses back to the same value.
inline std::string render_primitive(const std::string& type, const Value& v) {
  char buf[64];
  if (type == "String") return std::get<std::string>(v);
  if (type == "Boolean") return std::get<bool>(v) ? "true" : "false";
  if (type == "Int" || type == "Long") return std::to_string(std::get<std::int64_t>(v));
  if (type == "Float") {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, static_cast<float>(std::get<double>(v)));
    return std::string(buf, ptr);
  }
  if (type == "Double") {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, std::get<double>(v));
    return std::string(buf, ptr);
  }
  throw Error("UnsupportedReturnType", "cannot render value of type " + type);
}

// ---------------------------------------------------------------------------
// Events

namespace detail {

inline std::optional<std::string> read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

// Never throws: every failure is encoded as a Response.
inline Response handle_event(const Event& event, const DispatchTable& table) {
  try {
    table.ensure_initialized();
    if (event.type == Event::Type::Warming) {
      for (const auto& hook : table.ext.warming_hooks) hook();
      return Response::text(200, "warm");
    }

    for (const auto& interceptor : table.ext.interceptors) {
      if (auto r = interceptor(event)) return *r;
    }

    auto method = parse_method(event.method);
    if (!method) return Response::text(404, "no route for " + event.method + " " + event.path);
    std::string path;
    try {
      path = normalize_path(event.path.empty() ? "/" : event.path);
    } catch (const Error& e) {
      return Response::text(400, e.what());
    }

    RouteMatch m = match_route(table, *method, path);
    if (m.kind == RouteMatch::Kind::NotFound) {
      return Response::text(404, "no route for " + event.method + " " + path);
    }
    if (m.kind == RouteMatch::Kind::Static) {
      auto content = detail::read_file(table.ext.static_root / m.static_entry->source_file);
      if (!content) return Response::text(500, "static file missing: " + m.static_entry->source_file);
      return {200, {{"Content-Type", content_type(m.static_entry->mime)}}, std::move(*content)};
    }

    const HandlerEntry& h = *m.handler;
    std::map<std::string, std::string> raw = m.path_params;
    for (const auto& [k, v] : event.query) raw.emplace(k, v);  // path parameters win
    std::vector<Value> args;
    try {
      args = deserialize_params(h.params, raw, table.ext.converters);
    } catch (const ParamError& e) {
      return Response::text(400, e.what());
    }

    Value result;
    try {
      result = h.handler(args);
    } catch (const std::exception& e) {
      return Response::text(500, std::string("handler failed: ") + e.what());
    } catch (...) {
      return Response::text(500, "handler failed");
    }
    if (h.return_type == "Unit") return {204, {}, ""};
    return Response::text(200, render_primitive(h.return_type, result));
  } catch (const std::exception& e) {
    return Response::text(500, e.what());
  } catch (...) {
    return Response::text(500, "internal error");
  }
}

}  // namespace infraloom::runtime
