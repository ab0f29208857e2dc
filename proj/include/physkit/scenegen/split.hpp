#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "physkit/error.hpp"
#include "physkit/random.hpp"
#include "physkit/scenegen/scene.hpp"

namespace physkit::scenegen {

enum class Split { train = 0, val = 1, test = 2 };

inline std::string to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "unknown";
}

/// What splitting needs to know about a scene.
struct SceneRecord {
  std::string id;
  std::vector<std::string> asset_ids;
  std::vector<int> phenomena;
};

inline SceneRecord record_of(const SceneSpec& s) {
  const auto assets = s.asset_ids();
  return {s.id, {assets.begin(), assets.end()}, s.activity.phenomena};
}

struct DatasetSplit {
  std::map<std::string, Split> assignments;
  std::map<int, std::array<int, 3>> strata;  // phenomenon -> per-split scene counts
  std::array<int, 3> totals{};
};

/// Integer targets proportional to `ratios` summing to n (largest remainder).
inline std::array<int, 3> split_targets(int n, const std::array<double, 3>& ratios) {
  const double sum = ratios[0] + ratios[1] + ratios[2];
  std::array<int, 3> t{};
  std::array<double, 3> rem{};
  int used = 0;
  for (int s = 0; s < 3; ++s) {
    const double exact = n * ratios[s] / sum;
    t[s] = static_cast<int>(std::floor(exact));
    rem[s] = exact - t[s];
    used += t[s];
  }
  while (used < n) {
    int best = 0;
    for (int s = 1; s < 3; ++s)
      if (rem[s] > rem[best]) best = s;
    ++t[best];
    rem[best] = -1.0;
    ++used;
  }
  return t;
}

namespace detail {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

struct Group {
  std::vector<std::size_t> scenes;
  std::map<int, int> phenomena;  // phenomenon -> scenes in the group carrying it
};

}  // namespace detail

/// Asset-exclusive split: scenes sharing any asset are grouped (union-find),
/// groups are placed largest first into the split with the greatest remaining
/// deficit (per-phenomenon balance breaks ties), then equal-size groups are
/// swapped between splits while that reduces the per-phenomenon imbalance.
inline DatasetSplit split_dataset(const std::vector<SceneRecord>& scenes, std::array<double, 3> ratios = {8.0, 1.0, 1.0},
                                  std::uint64_t seed = 0) {
  const std::size_t n = scenes.size();
  if (n < 10) throw Error(Errc::invalid_config, "split_dataset needs at least 10 scenes, got " + std::to_string(n));
  for (double r : ratios)
    if (!(r > 0.0)) throw Error(Errc::invalid_config, "split ratios must be positive");
  {
    std::set<std::string> ids;
    for (const auto& s : scenes)
      if (!ids.insert(s.id).second) throw Error(Errc::invalid_config, "duplicate scene id '" + s.id + "'");
  }

  detail::UnionFind uf(n);
  std::map<std::string, std::size_t> owner;
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& a : scenes[i].asset_ids) {
      auto [it, fresh] = owner.emplace(a, i);
      if (!fresh) uf.unite(i, it->second);
    }
  std::map<std::size_t, detail::Group> by_root;
  for (std::size_t i = 0; i < n; ++i) {
    auto& g = by_root[uf.find(i)];
    g.scenes.push_back(i);
    for (int p : scenes[i].phenomena) ++g.phenomena[p];
  }
  std::vector<detail::Group> groups;
  for (auto& [root, g] : by_root) groups.push_back(std::move(g));

  const double share_train = ratios[0] / (ratios[0] + ratios[1] + ratios[2]);
  for (const auto& g : groups)
    if (static_cast<double>(g.scenes.size()) > share_train * static_cast<double>(n)) {
      std::map<std::string, int> uses;
      for (auto i : g.scenes)
        for (const auto& a : scenes[i].asset_ids) ++uses[a];
      std::vector<std::pair<int, std::string>> ranked;
      for (const auto& [a, c] : uses) ranked.emplace_back(-c, a);
      std::sort(ranked.begin(), ranked.end());
      std::string names;
      for (std::size_t k = 0; k < ranked.size() && k < 8; ++k) names += (k ? ", " : "") + ranked[k].second;
      if (ranked.size() > 8) names += ", ...";
      throw Error(Errc::infeasible, "asset group of " + std::to_string(g.scenes.size()) + " of " + std::to_string(n) +
                                        " scenes (most shared assets: " + names + ") exceeds the largest split share");
    }

  Rng rng(seed);
  rng.shuffle(groups.begin(), groups.end());
  std::stable_sort(groups.begin(), groups.end(),
                   [](const auto& a, const auto& b) { return a.scenes.size() > b.scenes.size(); });

  const auto targets = split_targets(static_cast<int>(n), ratios);
  std::map<int, int> phen_total;
  for (const auto& s : scenes)
    for (int p : s.phenomena) ++phen_total[p];
  const double rsum = ratios[0] + ratios[1] + ratios[2];
  auto phen_target = [&](int p, int s) { return phen_total[p] * ratios[s] / rsum; };

  std::map<int, std::array<int, 3>> counts;
  for (const auto& [p, t] : phen_total) counts[p] = {0, 0, 0};
  std::array<int, 3> totals{};
  // Change in squared stratification error from adding (sign +1) or removing (-1) a group.
  auto delta = [&](const detail::Group& g, int s, int sign) {
    double d = 0.0;
    for (const auto& [p, c] : g.phenomena) {
      const double before = counts[p][s] - phen_target(p, s);
      const double after = before + sign * c;
      d += after * after - before * before;
    }
    return d;
  };
  std::vector<int> placed(groups.size(), 0);
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const auto& g = groups[gi];
    int best = 0;
    for (int s = 1; s < 3; ++s) {
      const int deficit_s = targets[s] - totals[s], deficit_b = targets[best] - totals[best];
      if (deficit_s > deficit_b || (deficit_s == deficit_b && delta(g, s, 1) < delta(g, best, 1))) best = s;
    }
    placed[gi] = best;
    totals[best] += static_cast<int>(g.scenes.size());
    for (const auto& [p, c] : g.phenomena) counts[p][best] += c;
  }

  // Local search: swaps of equal-size groups keep split totals fixed.
  auto apply = [&](std::size_t gi, int to) {
    for (const auto& [p, c] : groups[gi].phenomena) {
      counts[p][placed[gi]] -= c;
      counts[p][to] += c;
    }
    placed[gi] = to;
  };
  auto local_error = [&](const detail::Group& a, const detail::Group& b) {
    std::set<int> touched;
    for (const auto& [p, c] : a.phenomena) touched.insert(p);
    for (const auto& [p, c] : b.phenomena) touched.insert(p);
    double e = 0.0;
    for (int p : touched)
      for (int s = 0; s < 3; ++s) {
        const double d = counts[p][s] - phen_target(p, s);
        e += d * d;
      }
    return e;
  };
  for (int pass = 0; pass < 50; ++pass) {
    bool improved = false;
    for (std::size_t a = 0; a < groups.size(); ++a)
      for (std::size_t b = a + 1; b < groups.size(); ++b) {
        if (placed[a] == placed[b] || groups[a].scenes.size() != groups[b].scenes.size()) continue;
        if (groups[a].phenomena == groups[b].phenomena) continue;
        const int sa = placed[a], sb = placed[b];
        const double before = local_error(groups[a], groups[b]);
        apply(a, sb);
        apply(b, sa);
        if (local_error(groups[a], groups[b]) < before - 1e-9) {
          improved = true;
        } else {
          apply(a, sa);
          apply(b, sb);
        }
      }
    if (!improved) break;
  }

  DatasetSplit out;
  out.totals = totals;
  for (std::size_t gi = 0; gi < groups.size(); ++gi)
    for (auto i : groups[gi].scenes) out.assignments[scenes[i].id] = static_cast<Split>(placed[gi]);
  out.strata = counts;
  return out;
}

inline DatasetSplit split_dataset(const std::vector<SceneSpec>& scenes, std::array<double, 3> ratios = {8.0, 1.0, 1.0},
                                  std::uint64_t seed = 0) {
  std::vector<SceneRecord> records;
  records.reserve(scenes.size());
  for (const auto& s : scenes) records.push_back(record_of(s));
  return split_dataset(records, ratios, seed);
}

inline nlohmann::json split_to_json(const DatasetSplit& split) {
  nlohmann::json j;
  j["totals"] = {{"train", split.totals[0]}, {"val", split.totals[1]}, {"test", split.totals[2]}};
  nlohmann::json a = nlohmann::json::object();
  for (const auto& [id, s] : split.assignments) a[id] = to_string(s);
  j["assignments"] = std::move(a);
  nlohmann::json st = nlohmann::json::object();
  for (const auto& [p, c] : split.strata) st[std::to_string(p)] = c;
  j["strata"] = std::move(st);
  return j;
}

}  // namespace physkit::scenegen
