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

// Brute-force O(G * k^2) verifier for supermutant partitions, kept
// deliberately independent of the scheduler's bitset machinery: pairwise
// checks scan the raw coverage rows.

#pragma once

#include <set>
#include <string>

#include "mutbench/mutation.hpp"
#include "mutbench/scheduler.hpp"

namespace mutbench::testutil {

// Returns an empty string when the partition is valid, else a description
// of the first violation found.
inline std::string verify_partition(const std::vector<MutationPoint>& points,
                                    const CoverageMatrix& cov,
                                    const std::vector<Supermutant>& sms,
                                    std::uint32_t batch_size) {
  std::set<MutationId> covered_ids;
  for (const auto& row : cov.rows) covered_ids.insert(row.begin(), row.end());

  std::set<MutationId> seen;
  for (const auto& s : sms) {
    for (MutationId id : s.ids) {
      if (id >= points.size()) return "unknown id " + std::to_string(id);
      if (!seen.insert(id).second) return "id " + std::to_string(id) + " in two supermutants";
    }
    // Per-function constraint for every origin.
    std::set<std::string> fns;
    for (MutationId id : s.ids)
      if (!fns.insert(points[id].function).second)
        return "supermutant " + std::to_string(s.id) + " has two mutations in " +
               points[id].function;

    if (s.origin == Supermutant::Origin::covered_group) {
      for (std::size_t i = 0; i < s.ids.size(); ++i) {
        if (!covered_ids.count(s.ids[i]))
          return "uncovered id " + std::to_string(s.ids[i]) + " in covered group";
        for (std::size_t j = i + 1; j < s.ids.size(); ++j) {
          for (const auto& row : cov.rows) {
            bool a = false, b = false;
            for (MutationId id : row) {
              a |= id == s.ids[i];
              b |= id == s.ids[j];
            }
            if (a && b)
              return "ids " + std::to_string(s.ids[i]) + "," + std::to_string(s.ids[j]) +
                     " covered together in group " + std::to_string(s.id);
          }
        }
      }
    } else if (s.origin == Supermutant::Origin::uncovered_batch) {
      if (s.ids.size() > batch_size)
        return "batch " + std::to_string(s.id) + " exceeds batch size";
      for (MutationId id : s.ids)
        if (covered_ids.count(id))
          return "covered id " + std::to_string(id) + " in uncovered batch";
    }
  }
  if (seen.size() != points.size()) return "partition does not cover all mutations";
  return "";
}

}  // namespace mutbench::testutil
