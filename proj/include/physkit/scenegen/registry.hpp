#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "physkit/error.hpp"

namespace physkit::scenegen {

inline constexpr int phenomenon_count = 71;

struct Phenomenon {
  int index = 0;
  std::string name;
  std::vector<std::string> laws;
};

/// Phenomenon table plus the user-supplied composition rules.
struct PhenomenonRegistry {
  std::vector<Phenomenon> entries;
  std::vector<std::uint8_t> compatibility;  // row-major n x n, indices shifted by one
  std::optional<std::set<std::array<int, 3>>> valid_triples;  // overrides pairwise-AND when set

  int size() const { return static_cast<int>(entries.size()); }

  bool compatible(int a, int b) const {
    if (a < 1 || b < 1 || a > size() || b > size()) return false;
    return compatibility[static_cast<std::size_t>((a - 1) * size() + (b - 1))] != 0;
  }

  void set_compatible(int a, int b, bool value) {
    if (a < 1 || b < 1 || a > size() || b > size() || a == b)
      throw Error(Errc::invalid_config, "compatibility pair out of range: " + std::to_string(a) + "," + std::to_string(b));
    compatibility[static_cast<std::size_t>((a - 1) * size() + (b - 1))] = value;
    compatibility[static_cast<std::size_t>((b - 1) * size() + (a - 1))] = value;
  }

  /// Sets every off-diagonal entry to `value`.
  void fill_compatibility(bool value) {
    const auto n = static_cast<std::size_t>(size());
    compatibility.assign(n * n, value);
    for (std::size_t i = 0; i < n; ++i) compatibility[i * n + i] = 0;
  }

  bool triple_valid(int a, int b, int c) const {
    std::array<int, 3> t{a, b, c};
    std::sort(t.begin(), t.end());
    if (valid_triples) return valid_triples->count(t) > 0;
    return compatible(t[0], t[1]) && compatible(t[0], t[2]) && compatible(t[1], t[2]);
  }
};

inline void validate(const PhenomenonRegistry& reg) {
  const int n = reg.size();
  for (int i = 0; i < n; ++i)
    if (reg.entries[static_cast<std::size_t>(i)].index != i + 1)
      throw Error(Errc::invalid_config, "phenomenon indices must be dense 1.." + std::to_string(n));
  if (reg.compatibility.size() != static_cast<std::size_t>(n * n))
    throw Error(Errc::invalid_config, "compatibility matrix must be " + std::to_string(n) + "x" + std::to_string(n));
  for (int a = 1; a <= n; ++a) {
    if (reg.compatible(a, a)) throw Error(Errc::invalid_config, "compatibility diagonal must be false");
    for (int b = a + 1; b <= n; ++b)
      if (reg.compatible(a, b) != reg.compatible(b, a)) throw Error(Errc::invalid_config, "compatibility must be symmetric");
  }
}

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_failure, "cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::invalid_config, path.string() + ": " + e.what());
  }
}

/// Builds a registry from the phenomenon table; the matrix starts all-false.
inline PhenomenonRegistry registry_from_json(const nlohmann::json& table) {
  PhenomenonRegistry reg;
  try {
    for (const auto& e : table.at("phenomena"))
      reg.entries.push_back({e.at("index").get<int>(), e.at("name").get<std::string>(),
                             e.value("laws", std::vector<std::string>{})});
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::invalid_config, std::string("phenomenon table: ") + e.what());
  }
  std::sort(reg.entries.begin(), reg.entries.end(), [](const auto& a, const auto& b) { return a.index < b.index; });
  reg.fill_compatibility(false);
  validate(reg);
  return reg;
}

/// Applies {"pairs": [[a, b], ...], "triples": [[a, b, c], ...]}; triples are optional.
inline void apply_compatibility(PhenomenonRegistry& reg, const nlohmann::json& doc) {
  try {
    for (const auto& p : doc.at("pairs")) reg.set_compatible(p.at(0).get<int>(), p.at(1).get<int>(), true);
    if (doc.contains("triples")) {
      std::set<std::array<int, 3>> triples;
      for (const auto& t : doc.at("triples")) {
        std::array<int, 3> k{t.at(0).get<int>(), t.at(1).get<int>(), t.at(2).get<int>()};
        std::sort(k.begin(), k.end());
        triples.insert(k);
      }
      reg.valid_triples = std::move(triples);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::invalid_config, std::string("compatibility: ") + e.what());
  }
  validate(reg);
}

inline PhenomenonRegistry load_registry(const std::filesystem::path& table,
                                        const std::optional<std::filesystem::path>& compatibility = std::nullopt) {
  auto reg = registry_from_json(read_json_file(table));
  if (compatibility) apply_compatibility(reg, read_json_file(*compatibility));
  return reg;
}

enum class Arity { single = 1, double_ = 2, triple = 3 };

inline Arity parse_arity(const std::string& s) {
  if (s == "single") return Arity::single;
  if (s == "double") return Arity::double_;
  if (s == "triple") return Arity::triple;
  throw Error(Errc::invalid_config, "unknown arity '" + s + "'");
}

inline std::string to_string(Arity a) {
  switch (a) {
    case Arity::single: return "single";
    case Arity::double_: return "double";
    case Arity::triple: return "triple";
  }
  return "unknown";
}

struct Activity {
  std::vector<int> phenomena;  // sorted, distinct
  Arity arity = Arity::single;

  bool operator==(const Activity&) const = default;
};

/// Every activity of the given arity allowed by the registry, in lexicographic order.
inline std::vector<Activity> enumerate_activities(const PhenomenonRegistry& reg, Arity arity) {
  validate(reg);
  const int n = reg.size();
  std::vector<Activity> out;
  switch (arity) {
    case Arity::single:
      for (int a = 1; a <= n; ++a) out.push_back({{a}, arity});
      break;
    case Arity::double_:
      for (int a = 1; a <= n; ++a)
        for (int b = a + 1; b <= n; ++b)
          if (reg.compatible(a, b)) out.push_back({{a, b}, arity});
      break;
    case Arity::triple:
      for (int a = 1; a <= n; ++a)
        for (int b = a + 1; b <= n; ++b)
          for (int c = b + 1; c <= n; ++c)
            if (reg.triple_valid(a, b, c)) out.push_back({{a, b, c}, arity});
      break;
  }
  return out;
}

/// Checks an activity against the registry's composition rules.
inline void validate(const Activity& act, const PhenomenonRegistry& reg) {
  const auto& p = act.phenomena;
  if (p.empty() || p.size() > 3 || static_cast<int>(p.size()) != static_cast<int>(act.arity))
    throw Error(Errc::invalid_scene, "activity arity does not match its phenomenon count");
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < 1 || p[i] > reg.size()) throw Error(Errc::invalid_scene, "unknown phenomenon " + std::to_string(p[i]));
    if (i > 0 && p[i] <= p[i - 1]) throw Error(Errc::invalid_scene, "activity phenomena must be sorted and distinct");
  }
  if (p.size() == 2 && !reg.compatible(p[0], p[1]))
    throw Error(Errc::invalid_scene, "phenomena " + std::to_string(p[0]) + " and " + std::to_string(p[1]) + " are not compatible");
  if (p.size() == 3 && !reg.triple_valid(p[0], p[1], p[2])) throw Error(Errc::invalid_scene, "triple is not valid");
}

}  // namespace physkit::scenegen
