#pragma once

// Least-privilege policy derivation.
//
// A handler is granted the permissions of every declaration it can reach
// through identifier references. References are lexical (see dsl.hpp), so the
// reachable set may over-approximate real usage; it never misses a
// declaration the handler names.

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "infraloom/dsl.hpp"
#include "infraloom/error.hpp"
#include "infraloom/schema.hpp"

namespace infraloom {

struct PolicyStatement {
  Service service = Service::DynamoDB;
  std::set<std::string> actions;
  std::string resource_pattern;

  bool operator==(const PolicyStatement&) const = default;
};

struct PolicyDocument {
  // Sorted by (service, resource_pattern), at most one per pair.
  std::vector<PolicyStatement> statements;

  bool empty() const { return statements.empty(); }
  bool operator==(const PolicyDocument&) const = default;
};

inline std::set<std::string> actions_for(Service, AccessMode mode) {
  static const std::set<std::string> kRead = {"dynamodb:BatchGetItem", "dynamodb:GetItem",
                                              "dynamodb:Query", "dynamodb:Scan"};
  static const std::set<std::string> kWrite = {"dynamodb:BatchWriteItem", "dynamodb:DeleteItem",
                                               "dynamodb:PutItem", "dynamodb:UpdateItem"};
  std::set<std::string> out;
  if (mode != AccessMode::Write) out.insert(kRead.begin(), kRead.end());
  if (mode != AccessMode::Read) out.insert(kWrite.begin(), kWrite.end());
  return out;
}

// Least fixpoint of "A's body references B's name" starting from `root`
// (included). Declarations are matched by name across all files.
//
// Throws Error("UnknownDeclaration") if no declaration is named `root`.
inline std::set<std::string> reference_closure(const std::string& root,
                                               const std::vector<dsl::SourceFile>& files) {
  std::map<std::string, std::set<std::string>> refs;
  for (const auto& f : files) {
    for (const auto& d : f.declarations) {
      auto& r = refs[d.name];
      r.insert(d.body_refs.begin(), d.body_refs.end());
    }
  }
  if (!refs.count(root)) {
    throw Error("UnknownDeclaration", "UnknownDeclaration: '" + root + "'");
  }

  std::set<std::string> reached{root};
  std::deque<std::string> work{root};
  while (!work.empty()) {
    std::string name = std::move(work.front());
    work.pop_front();
    for (const auto& next : refs[name]) {
      if (refs.count(next) && reached.insert(next).second) work.push_back(next);
    }
  }
  return reached;
}

inline PolicyDocument merge_policies(const PolicyDocument& a, const PolicyDocument& b) {
  std::map<std::pair<Service, std::string>, std::set<std::string>> merged;
  for (const auto* doc : {&a, &b}) {
    for (const auto& s : doc->statements) {
      merged[{s.service, s.resource_pattern}].insert(s.actions.begin(), s.actions.end());
    }
  }
  PolicyDocument out;
  for (auto& [key, actions] : merged) {
    if (actions.empty()) continue;
    out.statements.push_back({key.first, std::move(actions), key.second});
  }
  return out;
}

inline PolicyDocument policy_for_grants(const std::vector<const PermissionGrant*>& grants) {
  PolicyDocument doc;
  for (const auto* g : grants) {
    PolicyDocument single;
    single.statements.push_back({g->service, actions_for(g->service, g->mode), g->resource_name});
    doc = merge_policies(doc, single);
  }
  return doc;
}

// Policy for a single handler. Exposed for per-function deployment; the
// synthesizer uses the merged document from derive_policy.
inline PolicyDocument derive_handler_policy(const Schema& schema, const DeclRef& handler) {
  auto closure = reference_closure(handler.name, schema.declarations);
  std::vector<const PermissionGrant*> reachable;
  for (const auto& g : schema.grants) {
    if (closure.count(g.entity.name)) reachable.push_back(&g);
  }
  return policy_for_grants(reachable);
}

inline PolicyDocument derive_policy(const Schema& schema) {
  PolicyDocument doc;
  for (const auto& route : schema.dynamic_routes) {
    doc = merge_policies(doc, derive_handler_policy(schema, route.handler));
  }
  return doc;
}

// Text form written to `policy.txt`:
//
//   statement DynamoDB "id"
//     dynamodb:BatchGetItem
//     ...
inline std::string render_policy_text(const PolicyDocument& doc) {
  std::string out;
  for (const auto& s : doc.statements) {
    if (!out.empty()) out += "\n";
    out += "statement ";
    out += to_string(s.service);
    out += " \"" + s.resource_pattern + "\"\n";
    for (const auto& a : s.actions) out += "  " + a + "\n";
  }
  return out;
}

}  // namespace infraloom
