#pragma once

// Transports for the emulator: newline-delimited JSON batches and a plain
// HTTP/1.1 listener on localhost.

#include <atomic>
#include <istream>
#include <ostream>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "infraloom/runtime.hpp"

namespace infraloom::runtime {

// {"type":"http","method":"GET","path":"/","query":{},"headers":{},"body":null}
// {"type":"warming","sequence":0}
//
// Throws Error("MalformedEvent").
inline Event event_from_json(const nlohmann::json& j) {
  try {
    const std::string type = j.at("type").get<std::string>();
    if (type == "warming") {
      std::int64_t seq = j.value("sequence", std::int64_t{0});
      if (seq < 0) throw Error("MalformedEvent", "MalformedEvent: negative sequence");
      return Event::warming(seq);
    }
    if (type != "http") throw Error("MalformedEvent", "MalformedEvent: unknown type '" + type + "'");
    Event e;
    e.method = j.at("method").get<std::string>();
    e.path = j.at("path").get<std::string>();
    if (j.contains("query") && !j.at("query").is_null()) {
      e.query = j.at("query").get<std::map<std::string, std::string>>();
    }
    if (j.contains("headers") && !j.at("headers").is_null()) {
      e.headers = j.at("headers").get<Headers>();
    }
    if (j.contains("body") && !j.at("body").is_null()) e.body = j.at("body").get<std::string>();
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw Error("MalformedEvent", std::string("MalformedEvent: ") + ex.what());
  }
}

inline nlohmann::json response_to_json(const Response& r) {
  return {{"status", r.status}, {"headers", r.headers}, {"body", r.body}};
}

// One response line per input line; blank lines are skipped. A line that
// is not a valid event yields a 400 response. Returns the number of events.
inline std::size_t serve_batch(std::istream& in, std::ostream& out, const DispatchTable& table) {
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Response r;
    try {
      r = handle_event(event_from_json(nlohmann::json::parse(line)), table);
    } catch (const std::exception& e) {
      r = Response::text(400, e.what());
    }
    out << response_to_json(r).dump() << "\n";
    ++n;
  }
  out.flush();
  return n;
}

// HTTP front end. httplib serves each connection from its worker pool; the
// table is only read, so handlers run concurrently.
class HttpEmulator {
 public:
  explicit HttpEmulator(const DispatchTable& table) : table_(table) {
    // httplib defaults to SO_REUSEPORT, which would let a second listener
    // share an occupied port instead of failing.
    server_.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    auto handle = [this](const httplib::Request& req, httplib::Response& res) {
      Event e;
      e.method = req.method;
      e.path = req.path;
      for (const auto& [k, v] : req.params) e.query.emplace(k, v);
      for (const auto& [k, v] : req.headers) e.headers.emplace(k, v);
      if (!req.body.empty()) e.body = req.body;
      Response r = handle_event(e, table_);
      res.status = r.status;
      std::string type = "text/plain";
      for (const auto& [k, v] : r.headers) {
        if (k == "Content-Type") {
          type = v;
        } else {
          res.set_header(k, v);
        }
      }
      if (r.status != 204) res.set_content(r.body, type);
    };
    server_.Get(".*", handle);
    server_.Post(".*", handle);
  }

  // Returns false when the port cannot be bound. Port 0 picks a free port.
  bool bind(const std::string& host, int port) {
    if (port == 0) {
      port_ = server_.bind_to_any_port(host);
      return port_ > 0;
    }
    if (!server_.bind_to_port(host, port)) return false;
    port_ = port;
    return true;
  }

  int port() const { return port_; }

  // Blocks until stop() is called.
  bool listen() { return server_.listen_after_bind(); }

  void start() {
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  void stop() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  ~HttpEmulator() { stop(); }

 private:
  const DispatchTable& table_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace infraloom::runtime
