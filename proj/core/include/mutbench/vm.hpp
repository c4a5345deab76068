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

// Deterministic interpreter for subject programs.
//
// Every abnormal condition is a status, never a host-side error; two
// executions with identical (program, build, input, limits, seed) produce
// byte-identical outcomes. The sanitizer flag turns silent memory-safety
// violations (reads/writes past an object but inside its allocation region,
// and use-after-free accesses) into traps. Execution is reentrant: any
// number of executions may run concurrently.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mutbench/ir.hpp"

namespace mutbench {

using MutationId = std::uint32_t;

struct ExecLimits {
  std::uint64_t max_steps = 1'000'000;
  std::uint64_t max_heap = 1u << 20;    // live bytes, allocations plus frames
  std::uint64_t max_output = 1u << 16;  // further output is discarded

  void validate() const;
};

enum class TrapKind : std::uint8_t {
  div_zero,
  oob_read,
  oob_write,
  double_free,
  invalid_free,
  explicit_abort,
  step_limit,
  heap_limit,
};

std::string_view trap_name(TrapKind k);

struct ExecStatus {
  std::optional<TrapKind> trap;  // empty means a clean exit
  int exit_code = 0;             // meaningful only for clean exits, 0..127

  bool is_exit() const { return !trap.has_value(); }
  bool is_limit() const {
    return trap && (*trap == TrapKind::step_limit || *trap == TrapKind::heap_limit);
  }

  static ExecStatus exited(int code) { return {std::nullopt, code & 0x7f}; }
  static ExecStatus trapped(TrapKind k) { return {k, 0}; }

  friend bool operator==(const ExecStatus&, const ExecStatus&) = default;
};

// Injective status -> small-integer mapping used for kill comparison:
// clean exits map to 0..127, traps to fixed codes in 128..191 and resource
// limits to fixed codes in 192..199.
int status_code(const ExecStatus& s);

struct Edge {
  SiteId from = 0;
  SiteId to = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Distinguishes comparison-progress pseudo edges from block edges.
inline constexpr SiteId kPseudoEdgeBase = 0x8000'0000u;

// Which executable of a subject is being run. Mutant modes execute an
// already-mutated program; `site_mutations` maps instrumented sites to the
// mutation ids hosted there (every enumerated point for the location build,
// the applied ids for mutant builds).
struct BuildMode {
  enum class Kind : std::uint8_t { baseline, location, mutant, mutant_instrumented };

  Kind kind = Kind::baseline;
  bool sanitize = false;
  std::vector<std::pair<SiteId, MutationId>> site_mutations;  // sorted by site

  bool wants_edges() const {
    return kind == Kind::location || kind == Kind::mutant_instrumented;
  }
  bool wants_mutations() const { return kind != Kind::baseline; }

  static BuildMode baseline_mode(bool sanitize = false);
  static BuildMode location_mode(std::vector<std::pair<SiteId, MutationId>> sites,
                                 bool sanitize = false);
  static BuildMode mutant_mode(std::vector<std::pair<SiteId, MutationId>> sites,
                               bool sanitize = false);
  static BuildMode mutant_instrumented_mode(
      std::vector<std::pair<SiteId, MutationId>> sites, bool sanitize = false);

  void validate() const;
};

struct ExecOutcome {
  ExecStatus status;
  std::vector<std::uint8_t> output;
  std::vector<SiteId> covered_sites;           // ascending
  std::vector<MutationId> covered_mutations;   // ascending, mutant/location builds
  std::vector<Edge> covered_edges;             // ascending, feedback builds
  std::uint64_t steps = 0;
};

// Runs `program` under `build` on `input`. `rng_seed` is part of the
// determinism contract but the interpreter itself is currently seed-free.
ExecOutcome execute(const Program& program, const BuildMode& build,
                    std::span<const std::uint8_t> input, const ExecLimits& limits,
                    std::uint64_t rng_seed = 0);

}  // namespace mutbench
