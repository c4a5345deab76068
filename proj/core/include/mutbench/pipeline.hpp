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

// Two-phase supermutant evaluation. Phase I replays the coverage seeds
// against each supermutant and compares statuses with the baseline; Phase II
// fuzzes the remaining stubborn supermutants. Kills are only ever recorded
// after re-executing the input on the uninstrumented baseline and mutant
// (the bench never trusts a fuzzer's claim), and attribution uses the
// covered mutation sites of the confirming run. Supermutants with observed
// interactions are split and re-evaluated until none remain.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mutbench/fuzzer.hpp"
#include "mutbench/mutation.hpp"
#include "mutbench/scheduler.hpp"
#include "mutbench/vm.hpp"

namespace mutbench {

struct MutationVerdict {
  MutationId id = 0;
  bool covered_phase1 = false;
  bool killed_phase1 = false;
  bool covered_phase2 = false;  // covered during Phase II (raw, may overlap Phase I)
  bool killed_phase2 = false;
  std::optional<Bytes> killing_input;
  std::optional<std::pair<int, int>> status_pair;  // (baseline, mutant) codes

  bool killed() const { return killed_phase1 || killed_phase2; }
};

struct SeedSelection {
  struct Run {
    int index = 0;
    std::vector<CorpusEntry> corpus;       // minimized
    std::size_t covered_mutations = 0;
  };
  std::vector<Run> runs;
  int chosen = 0;  // median by covered mutations, lower-middle on even counts

  const std::vector<CorpusEntry>& chosen_corpus() const;
};

struct PipelineBudgets {
  int seed_instances = 5;
  std::uint64_t seed_budget = 1'000'000;        // per seed-collection instance
  std::uint64_t phase2_budget = 50'000;         // per supermutant and fuzz round
  std::uint64_t long_singleton_budget = 500'000;
};

struct PipelineConfig {
  ExecLimits limits;
  PipelineBudgets budgets;
  std::uint32_t batch_size = 100;
  std::uint64_t rng_seed = 1;
  int workers = 0;  // 0 = hardware concurrency
  std::size_t max_input_len = 1024;
  // Treat differing output bytes as a kill even when exit codes agree.
  // Off by default: the kill rule compares exit codes only.
  bool output_oracle = false;
};

struct CostLedger {
  std::uint64_t execs = 0;
  std::uint64_t steps = 0;

  void add(const ExecOutcome& out) {
    ++execs;
    steps += out.steps;
  }
  CostLedger& operator+=(const CostLedger& o) {
    execs += o.execs;
    steps += o.steps;
    return *this;
  }
};

struct SplitRecord {
  std::uint32_t parent = 0;
  std::vector<std::uint32_t> children;
  std::vector<MutationId> trigger;
  std::string phase;  // "phase1" or "phase2"
};

// Evolving evaluation state for one (subject, fuzzer, sanitize-mode) run.
struct EvalState {
  std::vector<Supermutant> supermutants;  // initial partition plus split children
  std::vector<char> retired;              // parallel: split parents no longer evaluated
  std::vector<MutationVerdict> verdicts;  // indexed by mutation id
  std::vector<SplitRecord> splits;
  CostLedger phase1_cost;
  CostLedger phase2_cost;
  std::uint32_t next_sm_id = 0;

  static EvalState init(std::size_t mutation_count, std::vector<Supermutant> partition);
  std::size_t alive_count() const;
};

// True iff the baseline exits cleanly and the mutant's status code differs
// (or, with the output oracle enabled, the output bytes differ).
bool kill_rule(const ExecOutcome& baseline, const ExecOutcome& mutant, bool output_oracle);

// Replays `input` on the uninstrumented baseline and mutant builds. Returns
// the (baseline, mutant) status-code pair iff the kill rule fires. When
// `mutant_outcome` is non-null it receives the mutant run for attribution.
std::optional<std::pair<int, int>> confirm_kill(
    const Program& p, const std::vector<MutationPoint>& points, const MutantSpec& spec,
    const Bytes& input, bool sanitize, const PipelineConfig& cfg,
    CostLedger* cost = nullptr, ExecOutcome* mutant_outcome = nullptr);

struct Attribution {
  bool single = false;
  MutationId id = 0;                     // valid when single
  std::vector<MutationId> interacting;   // valid when !single (>= 2 ids)
};

// Maps a confirmed kill to the mutation whose site the input covered.
// Throws std::logic_error when no instrumented site was covered: a
// divergence without reaching a mutated site breaks mode neutrality and
// means an engine bug.
Attribution attribute_kill(const ExecOutcome& mutant_outcome, const MutantSpec& spec);

// Index of the median value (lower middle for even counts), stable over the
// input order. Used to pick the seed-collection run.
std::size_t median_run_index(std::span<const std::size_t> covered_counts);

// Runs `instances` seed-collection fuzzing rounds on the location build and
// picks the median run by covered mutations.
SeedSelection collect_seeds(const Program& p, const std::vector<MutationPoint>& points,
                            std::string_view fuzzer, std::span<const Bytes> initial_seeds,
                            const Dictionary* dict, const PipelineConfig& cfg,
                            std::uint64_t stream, CostLedger& cost);

// Phase I: seed replay over every live supermutant, with split-and-rerun on
// interactions. Marks covered_phase1 from the seed corpus coverage.
void phase1(EvalState& state, const Program& p, const std::vector<MutationPoint>& points,
            const std::vector<CorpusEntry>& seeds, bool sanitize,
            const PipelineConfig& cfg);

// Phase II: fuzz every stubborn supermutant, confirm and attribute reported
// crashers, split on interactions or uncovered-batch coverage.
void phase2(EvalState& state, const Program& p, const std::vector<MutationPoint>& points,
            const std::vector<CorpusEntry>& seeds, std::string_view fuzzer, bool sanitize,
            const PipelineConfig& cfg, const Dictionary* dict, std::uint64_t stream);

}  // namespace mutbench
