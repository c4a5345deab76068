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

// Groups mutations into supermutants. Two covered mutations may share a
// supermutant only if they are independent (no seed input covers both) and
// live in different functions; uncovered mutations are pooled into shuffled
// batches under the same per-function constraint. Observed interactions are
// removed by splitting.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mutbench/mutation.hpp"

namespace mutbench {

// One row per seed input: the set of mutation ids that input covers on the
// location build.
struct CoverageMatrix {
  std::vector<std::vector<MutationId>> rows;
};

// True iff no row covers both `a` and `b`. Requires a != b (a mutation is
// never independent of itself).
bool independent(MutationId a, MutationId b, const CoverageMatrix& cov);

struct Supermutant {
  enum class Origin : std::uint8_t { covered_group, uncovered_batch, split_child };

  std::uint32_t id = 0;
  std::vector<MutationId> ids;  // ascending
  Origin origin = Origin::covered_group;
  std::int64_t parent = -1;  // id of the split parent, -1 otherwise
};

std::string_view origin_name(Supermutant::Origin o);

// Greedy grouping over the conflict graph (edge = covered together or same
// function), smallest id first; uncovered mutations are shuffled with
// `rng_seed` and batched first-fit into groups of at most `batch_size`.
// Every mutation id ends up in exactly one supermutant.
std::vector<Supermutant> build_supermutants(const std::vector<MutationPoint>& points,
                                            const CoverageMatrix& cov,
                                            std::uint32_t batch_size,
                                            std::uint64_t rng_seed);

// Splits `s`: each id in `multi_covered` becomes a singleton child, the
// remaining ids stay grouped. Children ids are drawn from `next_id`.
// Requires multi_covered ⊆ s.ids and |multi_covered| >= 2, or >= 1 when `s`
// is an uncovered batch.
std::vector<Supermutant> split_supermutant(const Supermutant& s,
                                           const std::vector<MutationId>& multi_covered,
                                           std::uint32_t& next_id);

std::string supermutants_to_json(const std::vector<Supermutant>& sms);

}  // namespace mutbench
