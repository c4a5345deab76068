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

// Fault-injection catalog: enumerates mutation points over a program and
// materializes mutants. Every operator has exactly one documented rewrite
// rule; see docs/operators.md.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mutbench/ir.hpp"
#include "mutbench/vm.hpp"

namespace mutbench {

enum class OperatorKind : std::uint8_t {
  SIGNED_LT,
  SIGNED_LE,
  SIGNED_GT,
  SIGNED_GE,
  UNSIGNED_LT,
  UNSIGNED_LE,
  UNSIGNED_GT,
  UNSIGNED_GE,
  COMPARE_EQ,
  REDIRECT_BRANCH,
  SWITCH_PLUS_MINUS,
  SWITCH_SHIFT,
  DELETE_STORE,
  DELETE_LOCAL_STORE,
  REASSIGN_STORE,
  DELETE_CALL,
  DELETE_FUNCTION_ARGUMENT,
  FREE_FUNCTION_ARGUMENT,
  ALLOC_SIZE,
  ALLOC_ZEROED_SIZE,
  NEW_ARRAY_SIZE,
  SIGNED_TO_UNSIGNED,
  UNSIGNED_TO_SIGNED,
  CONST_OFFSET,
};

inline constexpr int kOperatorKindCount = 24;

std::string_view operator_name(OperatorKind k);
std::optional<OperatorKind> operator_from_name(std::string_view name);

// Operator-specific immediate data attached to a point. `variant`
// distinguishes alternate rewrites of the same operator (UNSIGNED_GE offers
// the boundary complement and the constant-to-zero form), `arg_index`
// selects a call argument, and `replacement` carries the substitute address
// operand for store reassignment.
struct MutationPayload {
  std::int32_t variant = 0;
  std::int32_t arg_index = -1;
  std::optional<Operand> replacement;

  friend bool operator==(const MutationPayload&, const MutationPayload&) = default;
};

struct MutationPoint {
  MutationId id = 0;
  SiteId site = 0;
  std::string function;
  OperatorKind op = OperatorKind::SIGNED_LT;
  MutationPayload payload;

  friend bool operator==(const MutationPoint&, const MutationPoint&) = default;
};

// A mutant: the set of mutation ids applied together. At most one id per
// function.
struct MutantSpec {
  std::vector<MutationId> ids;  // kept sorted and unique

  static MutantSpec of(std::vector<MutationId> ids);
  bool empty() const { return ids.empty(); }
};

struct CatalogOptions {
  // Cap on enumerated payloads per (site, kind) for operators with several
  // candidates (call-argument selection). UNSIGNED_GE's two documented
  // variants are part of the catalog and not subject to the cap.
  int payload_cap = 1;
  // Restrict enumeration to these kinds (CLI filter). Ids stay dense over
  // the filtered list.
  std::optional<std::vector<OperatorKind>> only;
};

// Exhaustive, deterministic enumeration: one point per applicable
// (site, kind, payload), in site order and kind order within a site.
std::vector<MutationPoint> find_mutations(const Program& p,
                                          const CatalogOptions& options = {});

struct RewriteResult {
  enum class Kind { replace, remove, insert_before };
  Kind kind = Kind::replace;
  Instruction instruction;  // replacement or inserted instruction
};

// Applies one operator to a matching instruction. Throws
// std::invalid_argument when the instruction does not match the operator's
// pattern.
RewriteResult operator_rewrite(OperatorKind kind, const Instruction& instr,
                               const MutationPayload& payload);

// Returns a new program with all of `spec` applied; `p` is untouched.
// Mutated sites keep their original site ids (removals become nops, the
// inserted free of FREE_FUNCTION_ARGUMENT shares the call's site). Throws
// std::invalid_argument on unknown ids or two ids in one function.
Program apply_mutations(const Program& p, const MutantSpec& spec,
                        const std::vector<MutationPoint>& points);
Program apply_mutations(const Program& p, const MutantSpec& spec);

// Site -> mutation-id instrumentation tables for BuildMode.
std::vector<std::pair<SiteId, MutationId>> site_map(
    const std::vector<MutationPoint>& points);
std::vector<std::pair<SiteId, MutationId>> site_map(
    const std::vector<MutationPoint>& points, const MutantSpec& spec);

// mutations.json: array of {id, site, function, operator, payload,
// source_line} with source_line referring to the canonical serialization.
std::string mutations_to_json(const Program& p,
                              const std::vector<MutationPoint>& points);

}  // namespace mutbench
