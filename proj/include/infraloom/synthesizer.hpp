#pragma once

// Schema -> Terraform synthesis.
//
// synthesize() maps a validated Schema onto AWS resources, order_resources()
// groups them by service and sorts each group by dependencies, and
// render_hcl() pretty-prints the result. References between resources use
// the classic `${type.name.attr}` interpolation syntax so that dependency
// detection stays purely lexical.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "infraloom/error.hpp"
#include "infraloom/permissions.hpp"
#include "infraloom/schema.hpp"

namespace infraloom::hcl {

enum class Group { Provider, Iam, Lambda, ApiGateway, S3, CloudWatch };

inline constexpr Group kGroupOrder[] = {Group::Provider, Group::Iam,    Group::Lambda,
                                        Group::ApiGateway, Group::S3, Group::CloudWatch};

inline const char* to_string(Group g) {
  switch (g) {
    case Group::Provider: return "Provider";
    case Group::Iam: return "Iam";
    case Group::Lambda: return "Lambda";
    case Group::ApiGateway: return "ApiGateway";
    case Group::S3: return "S3";
    case Group::CloudWatch: return "CloudWatch";
  }
  return "?";
}

inline Group group_for_type(std::string_view type) {
  auto starts = [&](std::string_view p) { return type.substr(0, p.size()) == p; };
  if (type == "provider") return Group::Provider;
  if (starts("aws_iam_")) return Group::Iam;
  if (starts("aws_lambda_")) return Group::Lambda;
  if (starts("aws_api_gateway_")) return Group::ApiGateway;
  if (starts("aws_s3_")) return Group::S3;
  if (starts("aws_cloudwatch_")) return Group::CloudWatch;
  throw Error("UnknownResourceType", "no service group for resource type '" + std::string(type) + "'");
}

struct HclValue;
using Attribute = std::pair<std::string, HclValue>;

struct HclValue {
  enum class Kind { String, Number, Bool, Ref, List, Map, Block };

  Kind kind = Kind::String;
  // String content, decimal number, or `type.name` for a bare reference.
  std::string text;
  bool boolean = false;
  std::vector<HclValue> items;
  std::vector<Attribute> fields;

  static HclValue str(std::string s) { return {Kind::String, std::move(s), false, {}, {}}; }
  static HclValue num(std::int64_t n) { return {Kind::Number, std::to_string(n), false, {}, {}}; }
  static HclValue flag(bool b) { return {Kind::Bool, {}, b, {}, {}}; }
  static HclValue ref(const std::string& type, const std::string& name) {
    return {Kind::Ref, type + "." + name, false, {}, {}};
  }
  static HclValue list(std::vector<HclValue> v) { return {Kind::List, {}, false, std::move(v), {}}; }
  static HclValue map(std::vector<Attribute> f) { return {Kind::Map, {}, false, {}, std::move(f)}; }
  static HclValue block(std::vector<Attribute> f) { return {Kind::Block, {}, false, {}, std::move(f)}; }

  bool operator==(const HclValue&) const = default;
};

// `${type.name.attr}` as a string value.
inline std::string interp(const std::string& type, const std::string& name, const std::string& attr) {
  return "${" + type + "." + name + "." + attr + "}";
}

using ResourceKey = std::pair<std::string, std::string>;  // (type, name)

struct TfResource {
  std::string type;
  std::string name;
  Group group = Group::Provider;
  std::vector<Attribute> attributes;

  ResourceKey key() const { return {type, name}; }
  bool operator==(const TfResource&) const = default;
};

inline TfResource make_resource(std::string type, std::string name, std::vector<Attribute> attrs) {
  Group g = group_for_type(type);
  return TfResource{std::move(type), std::move(name), g, std::move(attrs)};
}

class ResourceGraph {
 public:
  // Throws Error("DuplicateResource") if (type, name) is already present.
  void add(TfResource r) {
    if (index_.count(r.key())) {
      throw Error("DuplicateResource", "duplicate resource " + r.type + "." + r.name);
    }
    index_.emplace(r.key(), resources_.size());
    resources_.push_back(std::move(r));
  }

  const std::vector<TfResource>& resources() const { return resources_; }
  std::size_t size() const { return resources_.size(); }
  bool contains(const ResourceKey& k) const { return index_.count(k) > 0; }

  const TfResource* find(const ResourceKey& k) const {
    auto it = index_.find(k);
    return it == index_.end() ? nullptr : &resources_[it->second];
  }

  std::size_t count_type(std::string_view type) const {
    return std::count_if(resources_.begin(), resources_.end(),
                         [&](const TfResource& r) { return r.type == type; });
  }

 private:
  std::vector<TfResource> resources_;
  std::map<ResourceKey, std::size_t> index_;
};

// ---------------------------------------------------------------------------
// Dependencies

namespace detail {

inline bool is_name_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

inline bool is_attr_char(char c) { return is_name_char(c) || (c >= 'A' && c <= 'Z'); }

// Parses the inside of `${...}`: type.name.attr{.attr}.
inline std::optional<ResourceKey> parse_reference(std::string_view body) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t dot = body.find('.', start);
    parts.push_back(body.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start));
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  if (parts.size() < 3) return std::nullopt;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    auto ok = i < 2 ? is_name_char : is_attr_char;
    if (parts[i].empty() || !std::all_of(parts[i].begin(), parts[i].end(), ok)) return std::nullopt;
  }
  return ResourceKey{std::string(parts[0]), std::string(parts[1])};
}

inline void collect_string_refs(const std::string& s, std::set<ResourceKey>& out) {
  std::size_t i = 0;
  while ((i = s.find("${", i)) != std::string::npos) {
    if (i > 0 && s[i - 1] == '$') {  // `$${` is a literal
      i += 2;
      continue;
    }
    std::size_t close = s.find('}', i + 2);
    if (close == std::string::npos) {
      throw Error("MalformedInterpolation", "MalformedInterpolation: unterminated '" + s.substr(i) + "'");
    }
    auto ref = parse_reference(std::string_view(s).substr(i + 2, close - i - 2));
    if (!ref) {
      throw Error("MalformedInterpolation",
                  "MalformedInterpolation: '" + s.substr(i, close - i + 1) + "'");
    }
    out.insert(std::move(*ref));
    i = close + 1;
  }
}

inline void collect_refs(const HclValue& v, std::set<ResourceKey>& out) {
  switch (v.kind) {
    case HclValue::Kind::String: collect_string_refs(v.text, out); break;
    case HclValue::Kind::Ref: {
      auto dot = v.text.find('.');
      out.insert({v.text.substr(0, dot), v.text.substr(dot + 1)});
      break;
    }
    case HclValue::Kind::List:
      for (const auto& item : v.items) collect_refs(item, out);
      break;
    case HclValue::Kind::Map:
    case HclValue::Kind::Block:
      for (const auto& [k, field] : v.fields) collect_refs(field, out);
      break;
    default: break;
  }
}

}  // namespace detail

// Every resource referenced from `resource`'s attributes, through `${...}`
// interpolations or bare references (e.g. in depends_on).
//
// Throws Error("MalformedInterpolation").
inline std::set<ResourceKey> detect_dependencies(const TfResource& resource) {
  std::set<ResourceKey> out;
  for (const auto& [key, value] : resource.attributes) detail::collect_refs(value, out);
  return out;
}

// ---------------------------------------------------------------------------
// Ordering

// Resources group by group in the fixed group order. Within a group the
// order is topological with respect to intra-group references (a referenced
// resource comes first), ties broken by ascending (type, name).
//
// Throws Error("CyclicDependency") naming the cycle.
inline std::vector<TfResource> order_resources(const ResourceGraph& graph) {
  const auto& resources = graph.resources();
  std::map<ResourceKey, std::size_t> index;
  for (std::size_t i = 0; i < resources.size(); ++i) index.emplace(resources[i].key(), i);

  std::vector<std::vector<std::size_t>> deps(resources.size());
  for (std::size_t i = 0; i < resources.size(); ++i) {
    for (const auto& k : detect_dependencies(resources[i])) {
      if (auto it = index.find(k); it != index.end()) deps[i].push_back(it->second);
    }
  }

  // Cycle check over the whole graph, cross-group edges included.
  std::vector<int> state(resources.size(), 0);
  std::vector<std::size_t> stack;
  auto name_of = [&](std::size_t i) { return resources[i].type + "." + resources[i].name; };
  std::function<void(std::size_t)> visit = [&](std::size_t i) {
    state[i] = 1;
    stack.push_back(i);
    for (std::size_t d : deps[i]) {
      if (state[d] == 1) {
        std::string path;
        auto from = std::find(stack.begin(), stack.end(), d);
        for (auto it = from; it != stack.end(); ++it) path += name_of(*it) + " -> ";
        path += name_of(d);
        throw Error("CyclicDependency", "CyclicDependency: " + path);
      }
      if (state[d] == 0) visit(d);
    }
    stack.pop_back();
    state[i] = 2;
  };
  for (std::size_t i = 0; i < resources.size(); ++i) {
    if (state[i] == 0) visit(i);
  }

  std::vector<TfResource> out;
  out.reserve(resources.size());
  for (Group g : kGroupOrder) {
    std::map<std::size_t, std::size_t> pending;  // resource -> unmet intra-group deps
    std::map<std::size_t, std::vector<std::size_t>> dependents;
    for (std::size_t i = 0; i < resources.size(); ++i) {
      if (resources[i].group != g) continue;
      std::size_t n = 0;
      for (std::size_t d : deps[i]) {
        if (resources[d].group == g && d != i) {
          ++n;
          dependents[d].push_back(i);
        }
      }
      pending[i] = n;
    }
    auto less = [&](std::size_t a, std::size_t b) { return resources[a].key() < resources[b].key(); };
    std::set<std::size_t, decltype(less)> ready(less);
    for (const auto& [i, n] : pending) {
      if (n == 0) ready.insert(i);
    }
    while (!ready.empty()) {
      std::size_t i = *ready.begin();
      ready.erase(ready.begin());
      out.push_back(resources[i]);
      for (std::size_t dep : dependents[i]) {
        if (--pending[dep] == 0) ready.insert(dep);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rendering

namespace detail {

inline std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
  return out + "\"";
}

inline bool is_bare_key(const std::string& k) {
  return !k.empty() && !(k[0] >= '0' && k[0] <= '9') &&
         std::all_of(k.begin(), k.end(), [](char c) { return is_attr_char(c) || c == '-'; });
}

inline std::string render_key(const std::string& k) { return is_bare_key(k) ? k : quote(k); }

inline void render_fields(const std::vector<Attribute>& fields, int indent, std::string& out);

// Renders `value` as the right-hand side of an assignment. Multi-line values
// continue on following lines at `indent`.
inline void render_value(const HclValue& v, int indent, std::string& out) {
  const std::string pad(indent, ' ');
  switch (v.kind) {
    case HclValue::Kind::String:
      if (v.text.find('\n') != std::string::npos) {
        // Heredoc; the content is emitted verbatim.
        out += "<<EOF\n" + v.text;
        if (v.text.back() != '\n') out += "\n";
        out += "EOF";
      } else {
        out += quote(v.text);
      }
      break;
    case HclValue::Kind::Number: out += v.text; break;
    case HclValue::Kind::Bool: out += v.boolean ? "true" : "false"; break;
    case HclValue::Kind::Ref: out += v.text; break;
    case HclValue::Kind::List:
      if (v.items.empty()) {
        out += "[]";
        break;
      }
      out += "[\n";
      for (const auto& item : v.items) {
        out += pad + "  ";
        render_value(item, indent + 2, out);
        out += ",\n";
      }
      out += pad + "]";
      break;
    case HclValue::Kind::Map:
      if (v.fields.empty()) {
        out += "{}";
        break;
      }
      out += "{\n";
      render_fields(v.fields, indent + 2, out);
      out += pad + "}";
      break;
    case HclValue::Kind::Block:
      out += "{\n";
      render_fields(v.fields, indent + 2, out);
      out += pad + "}";
      break;
  }
}

inline void render_fields(const std::vector<Attribute>& fields, int indent, std::string& out) {
  const std::string pad(indent, ' ');
  std::size_t width = 0;
  for (const auto& [k, v] : fields) {
    if (v.kind != HclValue::Kind::Block) width = std::max(width, render_key(k).size());
  }
  for (const auto& [k, v] : fields) {
    std::string key = render_key(k);
    out += pad + key;
    if (v.kind == HclValue::Kind::Block) {
      out += " ";
    } else {
      out += std::string(width - key.size(), ' ') + " = ";
    }
    render_value(v, indent, out);
    out += "\n";
  }
}

}  // namespace detail

// Canonical HCL text for an ordered resource list. A `# ---- <group> ----`
// comment precedes each group, resources are separated by one blank line and
// `=` signs are aligned within each block.
inline std::string render_hcl(const std::vector<TfResource>& ordered) {
  std::string out;
  std::optional<Group> current;
  for (const auto& r : ordered) {
    if (!out.empty()) out += "\n";
    if (!current || *current != r.group) {
      out += "# ---- " + std::string(to_string(r.group)) + " ----\n";
      current = r.group;
    }
    if (r.group == Group::Provider) {
      out += r.type + " " + detail::quote(r.name) + " {\n";
    } else {
      out += "resource " + detail::quote(r.type) + " " + detail::quote(r.name) + " {\n";
    }
    detail::render_fields(r.attributes, 2, out);
    out += "}\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthesis

struct ProviderConfig {
  std::string name = "aws";
  std::string region = "us-east-1";
  std::string bucket;
  // Path prepended to a static route's source file to locate it from the
  // directory Terraform runs in.
  std::string static_source_prefix = "../static";
  std::string bundle_path = "bundle.zip";
  int memory_mb = 3072;
  int timeout_seconds = 30;
};

namespace detail {

inline std::string identifier_for(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (is_name_char(c)) {
      out.push_back(c);
    } else if (c == '{' || c == '}') {
      continue;
    } else if (!out.empty() && out.back() != '_') {
      out.push_back('_');
    }
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

// Hands out resource names unique per resource type.
class NameAllocator {
 public:
  std::string take(const std::string& type, const std::string& base) {
    auto& used = used_[type];
    std::string name = base;
    for (int n = 2; used.count(name); ++n) name = base + "_" + std::to_string(n);
    used.insert(name);
    return name;
  }

 private:
  std::map<std::string, std::set<std::string>> used_;
};

inline std::string path_identifier(const std::string& path) {
  std::string id = identifier_for(path);
  return id.empty() ? "root" : id;
}

inline std::string assume_role_policy() {
  nlohmann::ordered_json doc = {
      {"Version", "2012-10-17"},
      {"Statement",
       {{{"Action", "sts:AssumeRole"},
         {"Effect", "Allow"},
         {"Principal", {{"Service", {"apigateway.amazonaws.com", "lambda.amazonaws.com"}}}}}}}};
  return doc.dump(2) + "\n";
}

inline std::string role_policy(const PolicyDocument& policy, const std::string& region) {
  nlohmann::ordered_json statements = nlohmann::ordered_json::array();
  statements.push_back({{"Effect", "Allow"},
                        {"Action", {"logs:CreateLogGroup", "logs:CreateLogStream", "logs:PutLogEvents"}},
                        {"Resource", "arn:aws:logs:*:*:*"}});
  for (const auto& s : policy.statements) {
    statements.push_back({{"Effect", "Allow"},
                          {"Action", s.actions},
                          {"Resource", "arn:aws:dynamodb:" + region + ":*:table/" + s.resource_pattern}});
  }
  nlohmann::ordered_json doc = {{"Version", "2012-10-17"}, {"Statement", statements}};
  return doc.dump(2) + "\n";
}

inline std::string rate_expression(int minutes) {
  return "rate(" + std::to_string(minutes) + (minutes == 1 ? " minute)" : " minutes)");
}

}  // namespace detail

// Maps a validated schema onto AWS resources: one dispatcher lambda for the
// whole application, an API Gateway tree for the dynamic routes, S3 objects
// for static routes and, when warming is enabled, a scheduled CloudWatch
// rule that invokes the lambda every N minutes.
//
// Throws Error("UnsupportedProvider") for providers other than "aws".
inline ResourceGraph synthesize(const Schema& schema, const ProviderConfig& provider) {
  if (provider.name != "aws") {
    throw Error("UnsupportedProvider", "UnsupportedProvider: '" + provider.name + "'");
  }
  ResourceGraph graph;
  detail::NameAllocator names;
  const std::string app = detail::identifier_for(schema.app_name).empty()
                              ? std::string("app")
                              : detail::identifier_for(schema.app_name);

  graph.add(make_resource("provider", "aws", {{"region", HclValue::str(provider.region)}}));

  // IAM
  const std::string role = names.take("aws_iam_role", app);
  graph.add(make_resource("aws_iam_role", role,
                          {{"name", HclValue::str(schema.app_name)},
                           {"assume_role_policy", HclValue::str(detail::assume_role_policy())}}));
  graph.add(make_resource(
      "aws_iam_role_policy", names.take("aws_iam_role_policy", app),
      {{"name", HclValue::str(schema.app_name + "-policy")},
       {"role", HclValue::str(interp("aws_iam_role", role, "id"))},
       {"policy", HclValue::str(detail::role_policy(derive_policy(schema), provider.region))}}));

  // Lambda
  const std::string fn = names.take("aws_lambda_function", app);
  graph.add(make_resource(
      "aws_lambda_function", fn,
      {{"function_name", HclValue::str(schema.app_name)},
       {"filename", HclValue::str(provider.bundle_path)},
       {"handler", HclValue::str("infraloom.Dispatcher::handle")},
       {"runtime", HclValue::str("java11")},
       {"role", HclValue::str(interp("aws_iam_role", role, "arn"))},
       {"memory_size", HclValue::num(provider.memory_mb)},
       {"timeout", HclValue::num(provider.timeout_seconds)},
       {"environment",
        HclValue::block({{"variables", HclValue::map({{"INFRALOOM_SCHEMA", HclValue::str("schema.json")},
                                                      {"INFRALOOM_APP", HclValue::str(schema.app_name)}})}})}}));

  // API Gateway
  const std::string api = names.take("aws_api_gateway_rest_api", app);
  graph.add(make_resource("aws_api_gateway_rest_api", api,
                          {{"name", HclValue::str(schema.app_name)},
                           {"description", HclValue::str("HTTP API of " + schema.app_name)}}));
  graph.add(make_resource("aws_lambda_permission", names.take("aws_lambda_permission", app + "_api"),
                          {{"statement_id", HclValue::str("AllowApiGatewayInvoke")},
                           {"action", HclValue::str("lambda:InvokeFunction")},
                           {"function_name", HclValue::str(interp("aws_lambda_function", fn, "function_name"))},
                           {"principal", HclValue::str("apigateway.amazonaws.com")},
                           {"source_arn", HclValue::str(interp("aws_api_gateway_rest_api", api, "execution_arn") + "/*/*")}}));

  // One gateway resource per distinct non-root path prefix, parent-linked.
  std::set<std::string> prefixes;
  for (const auto& r : schema.dynamic_routes) {
    std::string prefix;
    for (auto seg : path_segments(r.path)) {
      prefix += "/";
      prefix += seg;
      prefixes.insert(prefix);
    }
  }
  std::map<std::string, std::string> resource_id;  // path -> interpolation of its id
  resource_id["/"] = interp("aws_api_gateway_rest_api", api, "root_resource_id");
  for (const auto& prefix : prefixes) {  // parents sort before children
    std::string parent = prefix.substr(0, prefix.rfind('/'));
    if (parent.empty()) parent = "/";
    std::string part = prefix.substr(prefix.rfind('/') + 1);
    std::string name = names.take("aws_api_gateway_resource", "path_" + detail::path_identifier(prefix));
    graph.add(make_resource("aws_api_gateway_resource", name,
                            {{"rest_api_id", HclValue::str(interp("aws_api_gateway_rest_api", api, "id"))},
                             {"parent_id", HclValue::str(resource_id.at(parent))},
                             {"path_part", HclValue::str(part)}}));
    resource_id[prefix] = interp("aws_api_gateway_resource", name, "id");
  }

  std::vector<HclValue> deployment_deps;
  for (const auto& r : schema.dynamic_routes) {
    std::string method = to_string(r.method);
    std::string base = detail::identifier_for(method) + "_" + detail::path_identifier(r.path);
    std::string name = names.take("aws_api_gateway_method", base);
    names.take("aws_api_gateway_integration", name);

    std::vector<Attribute> method_attrs = {
        {"rest_api_id", HclValue::str(interp("aws_api_gateway_rest_api", api, "id"))},
        {"resource_id", HclValue::str(resource_id.at(r.path))},
        {"http_method", HclValue::str(method)},
        {"authorization", HclValue::str("NONE")}};
    auto path_params = r.path_params();
    std::vector<Attribute> request_params;
    for (const auto& p : r.params) {
      bool in_path = std::find(path_params.begin(), path_params.end(), p.name) != path_params.end();
      request_params.push_back({std::string("method.request.") + (in_path ? "path." : "querystring.") + p.name,
                                HclValue::flag(in_path)});
    }
    if (!request_params.empty()) method_attrs.push_back({"request_parameters", HclValue::map(request_params)});
    graph.add(make_resource("aws_api_gateway_method", name, std::move(method_attrs)));

    graph.add(make_resource(
        "aws_api_gateway_integration", name,
        {{"rest_api_id", HclValue::str(interp("aws_api_gateway_rest_api", api, "id"))},
         {"resource_id", HclValue::str(resource_id.at(r.path))},
         {"http_method", HclValue::str(interp("aws_api_gateway_method", name, "http_method"))},
         {"integration_http_method", HclValue::str("POST")},
         {"type", HclValue::str("AWS_PROXY")},
         {"uri", HclValue::str(interp("aws_lambda_function", fn, "invoke_arn"))}}));
    deployment_deps.push_back(HclValue::ref("aws_api_gateway_integration", name));
  }

  std::vector<Attribute> deployment = {
      {"rest_api_id", HclValue::str(interp("aws_api_gateway_rest_api", api, "id"))},
      {"stage_name", HclValue::str("prod")}};
  if (!deployment_deps.empty()) deployment.push_back({"depends_on", HclValue::list(std::move(deployment_deps))});
  graph.add(make_resource("aws_api_gateway_deployment", names.take("aws_api_gateway_deployment", app),
                          std::move(deployment)));

  // S3
  for (const auto& s : schema.static_routes) {
    std::string key = s.path.substr(1);
    std::string source = provider.static_source_prefix.empty()
                             ? s.source_file
                             : provider.static_source_prefix + "/" + s.source_file;
    graph.add(make_resource("aws_s3_bucket_object",
                            names.take("aws_s3_bucket_object", "static_" + detail::path_identifier(s.path)),
                            {{"bucket", HclValue::str(provider.bucket)},
                             {"key", HclValue::str(key)},
                             {"source", HclValue::str(source)},
                             {"content_type", HclValue::str(content_type(*s.mime()))},
                             {"acl", HclValue::str("private")}}));
  }

  // CloudWatch warming schedule
  if (schema.warming.enabled) {
    std::string rule = names.take("aws_cloudwatch_event_rule", app + "_warming");
    graph.add(make_resource("aws_cloudwatch_event_rule", rule,
                            {{"name", HclValue::str(schema.app_name + "-warming")},
                             {"schedule_expression", HclValue::str(detail::rate_expression(schema.warming.period_minutes))}}));
    graph.add(make_resource("aws_cloudwatch_event_target",
                            names.take("aws_cloudwatch_event_target", app + "_warming"),
                            {{"rule", HclValue::str(interp("aws_cloudwatch_event_rule", rule, "name"))},
                             {"arn", HclValue::str(interp("aws_lambda_function", fn, "arn"))},
                             {"input", HclValue::str(R"({"type":"warming","sequence":0})")}}));
    graph.add(make_resource("aws_lambda_permission", names.take("aws_lambda_permission", app + "_warming"),
                            {{"statement_id", HclValue::str("AllowWarmingInvoke")},
                             {"action", HclValue::str("lambda:InvokeFunction")},
                             {"function_name", HclValue::str(interp("aws_lambda_function", fn, "function_name"))},
                             {"principal", HclValue::str("events.amazonaws.com")},
                             {"source_arn", HclValue::str(interp("aws_cloudwatch_event_rule", rule, "arn"))}}));
  }
  return graph;
}

inline std::string synthesize_hcl(const Schema& schema, const ProviderConfig& provider) {
  return render_hcl(order_resources(synthesize(schema, provider)));
}

}  // namespace infraloom::hcl
