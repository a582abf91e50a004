#pragma once

// Canonical JSON form of a Schema (`schema.json`). Object keys are sorted,
// there is no insignificant whitespace and the text ends with a single LF,
// so the bytes are stable across runs and platforms.

#include <string>

#include <json.hpp>

#include "infraloom/schema.hpp"

namespace infraloom {

namespace detail {

using nlohmann::json;

inline json to_json(const DeclRef& r) { return {{"file", r.file}, {"name", r.name}}; }

inline DeclRef decl_ref_from_json(const json& j) {
  return {j.at("file").get<std::string>(), j.at("name").get<std::string>()};
}

inline json params_to_json(const std::vector<dsl::Param>& params) {
  json out = json::array();
  for (const auto& p : params) out.push_back({{"name", p.name}, {"type", p.type_name}});
  return out;
}

inline std::vector<dsl::Param> params_from_json(const json& j) {
  std::vector<dsl::Param> out;
  for (const auto& p : j) out.push_back({p.at("name").get<std::string>(), p.at("type").get<std::string>()});
  return out;
}

inline const char* arg_kind_name(dsl::ArgKind k) {
  switch (k) {
    case dsl::ArgKind::String: return "string";
    case dsl::ArgKind::Int: return "int";
    case dsl::ArgKind::Ident: return "ident";
  }
  return "?";
}

inline dsl::ArgKind arg_kind_from(const std::string& s) {
  if (s == "string") return dsl::ArgKind::String;
  if (s == "int") return dsl::ArgKind::Int;
  if (s == "ident") return dsl::ArgKind::Ident;
  throw Error("SchemaFormat", "unknown annotation argument kind '" + s + "'");
}

inline dsl::DeclKind decl_kind_from(const std::string& s) {
  if (s == "Function") return dsl::DeclKind::Function;
  if (s == "Value") return dsl::DeclKind::Value;
  if (s == "Object") return dsl::DeclKind::Object;
  throw Error("SchemaFormat", "unknown declaration kind '" + s + "'");
}

inline json to_json(const dsl::Declaration& d) {
  json annotations = json::array();
  for (const auto& a : d.annotations) {
    json args = json::array();
    for (const auto& arg : a.args) args.push_back({{"kind", arg_kind_name(arg.kind)}, {"value", arg.value}});
    annotations.push_back({{"name", a.name}, {"args", args}, {"line", a.line}});
  }
  json j = {{"kind", dsl::to_string(d.kind)},
            {"name", d.name},
            {"line", d.line},
            {"annotations", annotations},
            {"body_refs", d.body_refs}};
  if (d.kind == dsl::DeclKind::Function) {
    j["params"] = params_to_json(d.params);
    j["return_type"] = d.return_type ? json(*d.return_type) : json(nullptr);
  }
  if (d.kind == dsl::DeclKind::Value) j["initializer"] = d.initializer;
  return j;
}

inline dsl::Declaration declaration_from_json(const json& j, const std::string& file) {
  dsl::Declaration d;
  d.kind = decl_kind_from(j.at("kind").get<std::string>());
  d.name = j.at("name").get<std::string>();
  d.line = j.at("line").get<int>();
  d.file = file;
  for (const auto& a : j.at("annotations")) {
    dsl::Annotation ann;
    ann.name = a.at("name").get<std::string>();
    ann.line = a.at("line").get<int>();
    ann.file = file;
    for (const auto& arg : a.at("args")) {
      ann.args.push_back({arg_kind_from(arg.at("kind").get<std::string>()), arg.at("value").get<std::string>()});
    }
    d.annotations.push_back(std::move(ann));
  }
  d.body_refs = j.at("body_refs").get<std::set<std::string>>();
  if (j.contains("params")) d.params = params_from_json(j.at("params"));
  if (j.contains("return_type") && !j.at("return_type").is_null()) {
    d.return_type = j.at("return_type").get<std::string>();
  }
  if (j.contains("initializer")) d.initializer = j.at("initializer").get<std::string>();
  return d;
}

}  // namespace detail

inline nlohmann::json schema_to_json(const Schema& s) {
  using detail::json;
  json dynamic = json::array();
  for (const auto& r : s.dynamic_routes) {
    dynamic.push_back({{"method", to_string(r.method)},
                       {"path", r.path},
                       {"handler", detail::to_json(r.handler)},
                       {"params", detail::params_to_json(r.params)},
                       {"return_type", r.return_type},
                       {"line", r.line}});
  }
  json statics = json::array();
  for (const auto& r : s.static_routes) {
    statics.push_back({{"path", r.path},
                       {"mime", r.mime_identifier},
                       {"source_file", r.source_file},
                       {"decl", detail::to_json(r.decl)},
                       {"line", r.line}});
  }
  json grants = json::array();
  for (const auto& g : s.grants) {
    grants.push_back({{"entity", detail::to_json(g.entity)},
                      {"service", to_string(g.service)},
                      {"resource", g.resource_name},
                      {"mode", to_string(g.mode)},
                      {"line", g.line}});
  }
  json files = json::array();
  for (const auto& f : s.declarations) {
    json decls = json::array();
    for (const auto& d : f.declarations) decls.push_back(detail::to_json(d));
    files.push_back({{"path", f.path}, {"declarations", decls}});
  }
  return {{"app_name", s.app_name},
          {"dynamic_routes", dynamic},
          {"static_routes", statics},
          {"grants", grants},
          {"warming", {{"enabled", s.warming.enabled}, {"period_minutes", s.warming.period_minutes}}},
          {"files", files}};
}

inline std::string canonical_schema_json(const Schema& s) { return schema_to_json(s).dump() + "\n"; }

// Throws Error("SchemaFormat") on structurally invalid input.
inline Schema schema_from_json(const nlohmann::json& j) {
  try {
    Schema s;
    s.app_name = j.at("app_name").get<std::string>();
    for (const auto& r : j.at("dynamic_routes")) {
      DynamicRoute route;
      auto method = parse_method(r.at("method").get<std::string>());
      if (!method) throw Error("SchemaFormat", "unknown HTTP method");
      route.method = *method;
      route.path = r.at("path").get<std::string>();
      route.handler = detail::decl_ref_from_json(r.at("handler"));
      route.params = detail::params_from_json(r.at("params"));
      route.return_type = r.at("return_type").get<std::string>();
      route.line = r.at("line").get<int>();
      s.dynamic_routes.push_back(std::move(route));
    }
    for (const auto& r : j.at("static_routes")) {
      StaticRoute route;
      route.path = r.at("path").get<std::string>();
      route.mime_identifier = r.at("mime").get<std::string>();
      route.source_file = r.at("source_file").get<std::string>();
      route.decl = detail::decl_ref_from_json(r.at("decl"));
      route.line = r.at("line").get<int>();
      s.static_routes.push_back(std::move(route));
    }
    for (const auto& g : j.at("grants")) {
      PermissionGrant grant;
      grant.entity = detail::decl_ref_from_json(g.at("entity"));
      if (g.at("service").get<std::string>() != "DynamoDB") {
        throw Error("SchemaFormat", "unknown service");
      }
      auto mode = parse_access_mode(g.at("mode").get<std::string>());
      if (!mode) throw Error("SchemaFormat", "unknown access mode");
      grant.mode = *mode;
      grant.resource_name = g.at("resource").get<std::string>();
      grant.line = g.at("line").get<int>();
      s.grants.push_back(std::move(grant));
    }
    s.warming.enabled = j.at("warming").at("enabled").get<bool>();
    s.warming.period_minutes = j.at("warming").at("period_minutes").get<int>();
    for (const auto& f : j.at("files")) {
      dsl::SourceFile file;
      file.path = f.at("path").get<std::string>();
      for (const auto& d : f.at("declarations")) {
        file.declarations.push_back(detail::declaration_from_json(d, file.path));
      }
      s.declarations.push_back(std::move(file));
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error("SchemaFormat", std::string("malformed schema JSON: ") + e.what());
  }
}

inline Schema schema_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error("SchemaFormat", std::string("malformed schema JSON: ") + e.what());
  }
  return schema_from_json(j);
}

}  // namespace infraloom
