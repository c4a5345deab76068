// Copyright 2026 The Mutbench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mutbench/scheduler.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"
#include "mutbench/rng.hpp"

namespace mutbench {

namespace {

// Per-mutation bitset over coverage rows.
class RowSets {
 public:
  RowSets(std::size_t n_mutations, const CoverageMatrix& cov)
      : words_((cov.rows.size() + 63) / 64), bits_(n_mutations * words_, 0) {
    for (std::size_t r = 0; r < cov.rows.size(); ++r)
      for (MutationId id : cov.rows[r])
        bits_[id * words_ + (r >> 6)] |= 1ull << (r & 63);
  }

  bool covered(MutationId id) const {
    for (std::size_t w = 0; w < words_; ++w)
      if (bits_[id * words_ + w]) return true;
    return false;
  }

  bool intersect(MutationId a, MutationId b) const {
    for (std::size_t w = 0; w < words_; ++w)
      if (bits_[a * words_ + w] & bits_[b * words_ + w]) return true;
    return false;
  }

 private:
  std::size_t words_;
  std::vector<std::uint64_t> bits_;
};

void validate_rows(const std::vector<MutationPoint>& points, const CoverageMatrix& cov) {
  for (const auto& row : cov.rows)
    for (MutationId id : row)
      if (id >= points.size())
        throw std::invalid_argument("coverage row references unknown mutation id " +
                                    std::to_string(id));
}

}  // namespace

bool independent(MutationId a, MutationId b, const CoverageMatrix& cov) {
  if (a == b) throw std::invalid_argument("a mutation is never independent of itself");
  for (const auto& row : cov.rows) {
    bool has_a = std::find(row.begin(), row.end(), a) != row.end();
    bool has_b = std::find(row.begin(), row.end(), b) != row.end();
    if (has_a && has_b) return false;
  }
  return true;
}

std::string_view origin_name(Supermutant::Origin o) {
  switch (o) {
    case Supermutant::Origin::covered_group: return "covered_group";
    case Supermutant::Origin::uncovered_batch: return "uncovered_batch";
    case Supermutant::Origin::split_child: return "split_child";
  }
  return "?";
}

std::vector<Supermutant> build_supermutants(const std::vector<MutationPoint>& points,
                                            const CoverageMatrix& cov,
                                            std::uint32_t batch_size,
                                            std::uint64_t rng_seed) {
  if (points.empty()) throw std::invalid_argument("no mutation points to group");
  if (batch_size == 0) throw std::invalid_argument("batch_size must be positive");
  validate_rows(points, cov);

  // Map function names to dense ids once; the constraint checks below stay
  // integer-only.
  std::unordered_map<std::string, std::uint32_t> fn_ids;
  std::vector<std::uint32_t> fn_of(points.size());
  for (const auto& mp : points)
    fn_of[mp.id] = fn_ids.emplace(mp.function, static_cast<std::uint32_t>(fn_ids.size()))
                       .first->second;

  RowSets rows(points.size(), cov);

  struct Group {
    std::vector<MutationId> ids;
    std::vector<std::uint32_t> fns;
  };

  // Covered mutations: greedy first-fit, ascending id.
  std::vector<Group> groups;
  std::vector<MutationId> uncovered;
  for (const auto& mp : points) {
    if (!rows.covered(mp.id)) {
      uncovered.push_back(mp.id);
      continue;
    }
    bool placed = false;
    for (Group& g : groups) {
      bool ok = true;
      for (std::size_t k = 0; k < g.ids.size() && ok; ++k) {
        if (g.fns[k] == fn_of[mp.id] || rows.intersect(g.ids[k], mp.id)) ok = false;
      }
      if (ok) {
        g.ids.push_back(mp.id);
        g.fns.push_back(fn_of[mp.id]);
        placed = true;
        break;
      }
    }
    if (!placed) groups.push_back(Group{{mp.id}, {fn_of[mp.id]}});
  }

  // Uncovered mutations: seeded shuffle, then first-fit batches.
  Rng rng(rng_seed);
  for (std::size_t i = uncovered.size(); i > 1; --i)
    std::swap(uncovered[i - 1], uncovered[rng.below(i)]);

  std::vector<Group> batches;
  for (MutationId id : uncovered) {
    bool placed = false;
    for (Group& b : batches) {
      if (b.ids.size() >= batch_size) continue;
      bool ok = true;
      for (std::uint32_t f : b.fns)
        if (f == fn_of[id]) {
          ok = false;
          break;
        }
      if (ok) {
        b.ids.push_back(id);
        b.fns.push_back(fn_of[id]);
        placed = true;
        break;
      }
    }
    if (!placed) batches.push_back(Group{{id}, {fn_of[id]}});
  }

  std::vector<Supermutant> out;
  out.reserve(groups.size() + batches.size());
  std::uint32_t next = 0;
  for (auto& g : groups) {
    std::sort(g.ids.begin(), g.ids.end());
    out.push_back(Supermutant{next++, std::move(g.ids), Supermutant::Origin::covered_group, -1});
  }
  for (auto& b : batches) {
    std::sort(b.ids.begin(), b.ids.end());
    out.push_back(
        Supermutant{next++, std::move(b.ids), Supermutant::Origin::uncovered_batch, -1});
  }
  return out;
}

std::vector<Supermutant> split_supermutant(const Supermutant& s,
                                           const std::vector<MutationId>& multi_covered,
                                           std::uint32_t& next_id) {
  if (multi_covered.empty())
    throw std::invalid_argument("split requires at least one covered mutation");
  if (multi_covered.size() < 2 && s.origin != Supermutant::Origin::uncovered_batch)
    throw std::invalid_argument(
        "splitting a covered group requires at least two interacting mutations");

  std::vector<MutationId> singles = multi_covered;
  std::sort(singles.begin(), singles.end());
  singles.erase(std::unique(singles.begin(), singles.end()), singles.end());
  for (MutationId id : singles)
    if (!std::binary_search(s.ids.begin(), s.ids.end(), id))
      throw std::invalid_argument("split set contains id " + std::to_string(id) +
                                  " outside the supermutant");

  std::vector<Supermutant> children;
  for (MutationId id : singles)
    children.push_back(Supermutant{next_id++, {id}, Supermutant::Origin::split_child,
                                   static_cast<std::int64_t>(s.id)});
  std::vector<MutationId> rest;
  for (MutationId id : s.ids)
    if (!std::binary_search(singles.begin(), singles.end(), id)) rest.push_back(id);
  if (!rest.empty())
    children.push_back(Supermutant{next_id++, std::move(rest),
                                   Supermutant::Origin::split_child,
                                   static_cast<std::int64_t>(s.id)});
  return children;
}

std::string supermutants_to_json(const std::vector<Supermutant>& sms) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& s : sms) {
    nlohmann::json e;
    e["id"] = s.id;
    e["ids"] = s.ids;
    e["origin"] = std::string(origin_name(s.origin));
    if (s.origin == Supermutant::Origin::split_child) e["parent"] = s.parent;
    arr.push_back(std::move(e));
  }
  return arr.dump(2) + "\n";
}

}  // namespace mutbench
