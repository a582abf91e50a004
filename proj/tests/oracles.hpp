#pragma once

// Brute-force oracles shared by the unit tests and the acceptance binary.
// Each `*_mismatches` function returns the number of cases where the library
// disagrees with the oracle.

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "infraloom/permissions.hpp"
#include "infraloom/runtime.hpp"
#include "infraloom/synthesizer.hpp"
#include "support.hpp"

namespace oracles {

using namespace infraloom;

// ---------------------------------------------------------------------------
// Route matching

struct RouteSpec {
  HttpMethod method;
  std::string path;
};

struct MatchOutcome {
  std::string kind;  // handler, static, none
  std::string target;
  std::map<std::string, std::string> params;
  bool operator==(const MatchOutcome&) const = default;
};

inline std::vector<std::string> split_path(const std::string& p) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : p + "/") {
    if (c == '/') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  return out;
}

// Scans every route and applies the precedence definition directly.
inline MatchOutcome linear_scan(const std::vector<RouteSpec>& routes, const std::set<std::string>& statics,
                                HttpMethod method, const std::string& path) {
  auto req = split_path(path);
  std::optional<std::size_t> exact;
  std::optional<std::size_t> best;
  int best_literals = -1;
  std::map<std::string, std::string> best_params;
  for (std::size_t i = 0; i < routes.size(); ++i) {
    const auto& r = routes[i];
    if (r.method != method) continue;
    auto pat = split_path(r.path);
    if (pat.size() != req.size()) continue;
    bool ok = true;
    bool has_param = false;
    int literals = 0;
    std::map<std::string, std::string> params;
    for (std::size_t k = 0; k < pat.size() && ok; ++k) {
      if (pat[k][0] == '{') {
        has_param = true;
        params[pat[k].substr(1, pat[k].size() - 2)] = req[k];
      } else if (pat[k] == req[k]) {
        ++literals;
      } else {
        ok = false;
      }
    }
    if (!ok) continue;
    if (!has_param) {
      exact = i;
      continue;
    }
    if (literals > best_literals || (literals == best_literals && r.path < routes[*best].path)) {
      best = i;
      best_literals = literals;
      best_params = params;
    }
  }
  if (exact) return {"handler", "h" + std::to_string(*exact), {}};
  if (best) return {"handler", "h" + std::to_string(*best), best_params};
  if (method == HttpMethod::GET && statics.count(path)) return {"static", path, {}};
  return {"none", "", {}};
}

inline runtime::DispatchTable build_table(const std::vector<RouteSpec>& routes,
                                          const std::set<std::string>& statics) {
  Schema s;
  runtime::HandlerRegistry handlers;
  for (std::size_t i = 0; i < routes.size(); ++i) {
    DynamicRoute r;
    r.method = routes[i].method;
    r.path = routes[i].path;
    r.handler = {"gen.kls", "h" + std::to_string(i)};
    for (const auto& seg : split_path(r.path)) {
      if (seg[0] == '{') r.params.push_back({seg.substr(1, seg.size() - 2), "String"});
    }
    s.dynamic_routes.push_back(r);
    handlers[r.handler.name] = [](const std::vector<runtime::Value>&) { return runtime::Value{}; };
  }
  for (const auto& p : statics) {
    StaticRoute st;
    st.path = p;
    st.mime_identifier = "MimeType.TXT";
    st.source_file = "x.txt";
    s.static_routes.push_back(st);
  }
  return runtime::load_dispatch_table(s, handlers);
}

inline MatchOutcome library_match(const runtime::DispatchTable& table, HttpMethod method, const std::string& path) {
  auto m = runtime::match_route(table, method, path);
  switch (m.kind) {
    case runtime::RouteMatch::Kind::Handler: return {"handler", m.handler->name, m.path_params};
    case runtime::RouteMatch::Kind::Static: return {"static", m.static_entry->path, {}};
    default: return {"none", "", {}};
  }
}

inline std::vector<std::string> all_paths(const std::vector<std::vector<std::string>>& choices, int max_depth) {
  std::vector<std::string> out{"/"};
  std::vector<std::string> frontier{""};
  for (int d = 0; d < max_depth; ++d) {
    std::vector<std::string> next;
    for (const auto& prefix : frontier)
      for (const auto& seg : choices[d]) next.push_back(prefix + "/" + seg);
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

// Every table of at most 4 distinct routes over patterns of up to 2 segments,
// against every request path of up to 2 segments.
inline long match_mismatches_exhaustive(long* cases = nullptr) {
  auto patterns = all_paths({{"a", "b", "{p}"}, {"a", "b", "{q}"}}, 2);
  auto requests = all_paths({{"a", "b", "c"}, {"a", "b", "c"}}, 2);
  std::vector<RouteSpec> universe;
  for (HttpMethod m : {HttpMethod::GET, HttpMethod::POST})
    for (const auto& p : patterns) universe.push_back({m, p});

  long mismatches = 0;
  long count = 0;
  std::vector<std::size_t> chosen;
  auto check = [&] {
    std::vector<RouteSpec> routes;
    for (auto i : chosen) routes.push_back(universe[i]);
    auto table = build_table(routes, {});
    for (HttpMethod m : {HttpMethod::GET, HttpMethod::POST}) {
      for (const auto& path : requests) {
        ++count;
        if (!(library_match(table, m, path) == linear_scan(routes, {}, m, path))) ++mismatches;
      }
    }
  };
  // Subsets of size 0..4 in increasing index order.
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    check();
    if (chosen.size() == 4) return;
    for (std::size_t i = start; i < universe.size(); ++i) {
      chosen.push_back(i);
      rec(i + 1);
      chosen.pop_back();
    }
  };
  rec(0);
  if (cases) *cases = count;
  return mismatches;
}

inline long match_mismatches_random(int cases, unsigned seed) {
  std::mt19937 rng(seed);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  static const char* literals[] = {"a", "b", "c", "items"};
  static const char* params[] = {"{p}", "{q}", "{r}"};
  long mismatches = 0;
  for (int c = 0; c < cases; ++c) {
    std::vector<RouteSpec> routes;
    std::set<std::pair<HttpMethod, std::string>> seen;
    int n = pick(0, 8);
    for (int i = 0; i < n; ++i) {
      int depth = pick(0, 3);
      std::string path;
      for (int d = 0; d < depth; ++d) path += "/" + std::string(pick(0, 2) ? literals[pick(0, 3)] : params[d]);
      if (path.empty()) path = "/";
      HttpMethod m = pick(0, 1) ? HttpMethod::GET : HttpMethod::POST;
      if (seen.insert({m, path}).second) routes.push_back({m, path});
    }
    std::set<std::string> statics;
    int ns = pick(0, 3);
    for (int i = 0; i < ns; ++i) {
      std::string path = "/" + std::string(literals[pick(0, 3)]);
      if (pick(0, 1)) path += "/" + std::string(literals[pick(0, 3)]);
      if (!seen.count({HttpMethod::GET, path})) statics.insert(path);
    }
    auto table = build_table(routes, statics);
    for (int q = 0; q < 20; ++q) {
      int depth = pick(0, 3);
      std::string path;
      for (int d = 0; d < depth; ++d) path += "/" + std::string(literals[pick(0, 3)]);
      if (path.empty()) path = "/";
      HttpMethod m = pick(0, 1) ? HttpMethod::GET : HttpMethod::POST;
      if (!(library_match(table, m, path) == linear_scan(routes, statics, m, path))) ++mismatches;
    }
  }
  return mismatches;
}

// ---------------------------------------------------------------------------
// Reference closure

using Matrix = std::vector<std::vector<bool>>;

// Reflexive-transitive closure by repeated boolean squaring of (I + A).
inline Matrix transitive_closure(const std::vector<std::vector<int>>& edges) {
  std::size_t n = edges.size();
  Matrix m(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    m[i][i] = true;
    for (int j : edges[i]) m[i][j] = true;
  }
  for (std::size_t step = 1; step < n; step *= 2) {
    Matrix sq(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k)
        if (m[i][k])
          for (std::size_t j = 0; j < n; ++j)
            if (m[k][j]) sq[i][j] = true;
    m = std::move(sq);
  }
  return m;
}

inline long closure_mismatches(int graphs, unsigned seed) {
  std::mt19937 rng(seed);
  long mismatches = 0;
  for (int g = 0; g < graphs; ++g) {
    auto p = testing_support::random_project(rng, 12, false);
    auto files = p.parse();
    Matrix m = transitive_closure(p.edges);
    for (std::size_t root = 0; root < p.names.size(); ++root) {
      std::set<std::string> expected;
      for (std::size_t j = 0; j < p.names.size(); ++j)
        if (m[root][j]) expected.insert(p.names[j]);
      if (reference_closure(p.names[root], files) != expected) ++mismatches;
    }
  }
  return mismatches;
}

// ---------------------------------------------------------------------------
// Resource ordering

struct OrderCase {
  std::vector<std::string> types;
  std::vector<std::string> names;
  std::vector<std::vector<int>> deps;  // deps[i]: resources i references
};

inline hcl::ResourceGraph graph_of(const OrderCase& c) {
  hcl::ResourceGraph g;
  for (std::size_t i = 0; i < c.names.size(); ++i) {
    std::vector<hcl::Attribute> attrs;
    for (int d : c.deps[i]) {
      attrs.push_back({"dep_" + std::to_string(d), hcl::HclValue::str(hcl::interp(c.types[d], c.names[d], "id"))});
    }
    g.add(hcl::make_resource(c.types[i], c.names[i], std::move(attrs)));
  }
  return g;
}

// Is `order` (indices) consistent with every edge among its members?
inline bool respects(const OrderCase& c, const std::vector<int>& order) {
  std::vector<int> pos(c.names.size(), -1);
  for (std::size_t k = 0; k < order.size(); ++k) pos[order[k]] = static_cast<int>(k);
  for (int i : order)
    for (int d : c.deps[i])
      if (pos[d] >= 0 && pos[d] > pos[i]) return false;
  return true;
}

inline bool acyclic(const OrderCase& c) {
  std::vector<int> all(c.names.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  do {
    if (respects(c, all)) return true;
  } while (std::next_permutation(all.begin(), all.end()));
  return false;
}

// Groups in fixed order; inside each group the lexicographically smallest
// (type, name) sequence among all permutations that respect the intra-group
// edges.
inline std::vector<std::pair<std::string, std::string>> expected_order(const OrderCase& c) {
  std::vector<std::pair<std::string, std::string>> out;
  for (hcl::Group g : hcl::kGroupOrder) {
    std::vector<int> members;
    for (std::size_t i = 0; i < c.names.size(); ++i)
      if (hcl::group_for_type(c.types[i]) == g) members.push_back(static_cast<int>(i));
    auto key_less = [&](int a, int b) { return std::tie(c.types[a], c.names[a]) < std::tie(c.types[b], c.names[b]); };
    std::sort(members.begin(), members.end(), key_less);
    do {
      if (respects(c, members)) break;
    } while (std::next_permutation(members.begin(), members.end(), key_less));
    for (int i : members) out.push_back({c.types[i], c.names[i]});
  }
  return out;
}

// Returns mismatches; `cases` receives the number of graphs checked.
inline long order_mismatches(unsigned seed, long* cases = nullptr) {
  static const char* kTypes[] = {"aws_lambda_function", "aws_lambda_permission", "aws_iam_role",
                                 "aws_s3_bucket_object"};
  std::mt19937 rng(seed);
  long mismatches = 0;
  long count = 0;
  auto run_case = [&](OrderCase& c) {
    ++count;
    bool ok_expected = acyclic(c);
    try {
      auto ordered = hcl::order_resources(graph_of(c));
      if (!ok_expected) {
        ++mismatches;
        return;
      }
      std::vector<std::pair<std::string, std::string>> got;
      for (const auto& r : ordered) got.push_back({r.type, r.name});
      if (got != expected_order(c)) ++mismatches;
    } catch (const Error& e) {
      if (ok_expected || e.code() != "CyclicDependency") ++mismatches;
    }
  };
  auto make = [&](int n, bool single_group) {
    OrderCase c;
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int i = 0; i < n; ++i) {
      c.types.push_back(single_group ? "aws_lambda_function" : kTypes[rng() % 4]);
      c.names.push_back("r" + std::to_string(perm[i]));
    }
    c.deps.assign(n, {});
    return c;
  };

  // All directed graphs (cycles included) on up to 4 nodes.
  for (int n = 0; n <= 4; ++n) {
    int pairs = n * (n - 1);
    for (long mask = 0; mask < (1L << pairs); ++mask) {
      for (bool single : {true, false}) {
        OrderCase c = make(n, single);
        int bit = 0;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            if (mask & (1L << bit)) c.deps[i].push_back(j);
            ++bit;
          }
        run_case(c);
      }
    }
  }
  // Every DAG shape on 5 and 6 nodes (edges from higher to lower index under
  // a random relabelling).
  for (int n = 5; n <= 6; ++n) {
    int pairs = n * (n - 1) / 2;
    for (long mask = 0; mask < (1L << pairs); ++mask) {
      OrderCase c = make(n, mask % 2 == 0);
      int bit = 0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) {
          if (mask & (1L << bit)) c.deps[i].push_back(j);
          ++bit;
        }
      run_case(c);
    }
  }
  // Arbitrary directed graphs on 5 and 6 nodes, cycles included, sampled
  // across edge densities.
  for (int iter = 0; iter < 20000; ++iter) {
    int n = 5 + iter % 2;
    unsigned density = 1 + rng() % 6;
    OrderCase c = make(n, iter % 3 == 0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && rng() % 12 < density) c.deps[i].push_back(j);
    run_case(c);
  }
  if (cases) *cases = count;
  return mismatches;
}

}  // namespace oracles
