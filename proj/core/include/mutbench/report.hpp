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

// Evaluation artifacts: per-fuzzer kill/coverage tables with combined rows,
// per-operator breakdowns for both sanitizer modes, Venn region counts,
// computational-reduction accounting and a residual-defect estimate.

#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "mutbench/mutation.hpp"
#include "mutbench/pipeline.hpp"

namespace mutbench {

struct FuzzerRow {
  std::string fuzzer;
  std::uint64_t phase1_covered = 0;
  std::uint64_t phase1_killed = 0;
  std::uint64_t phase2_covered = 0;  // beyond Phase I
  std::uint64_t phase2_killed = 0;
  std::uint64_t total_covered = 0;
  std::uint64_t total_killed = 0;
};

struct OperatorRow {
  std::string op;
  std::string fuzzer;
  std::uint64_t covered_default = 0;
  std::uint64_t covered_sanitize = 0;
  std::uint64_t killed_default = 0;
  std::uint64_t killed_sanitize = 0;
};

struct Reduction {
  std::uint64_t mutants = 0;
  std::uint64_t supermutants = 0;
  double grouping_reduction = 0;
  double naive_cost = 0;   // executions if each mutation were fuzzed alone
  double actual_cost = 0;  // measured executions
  double cost_reduction = 0;
};

struct VennRegion {
  std::vector<std::string> fuzzers;  // the exact subset this region counts
  std::uint64_t count = 0;
};

struct PairwiseCell {
  std::string a;
  std::string b;
  std::uint64_t count = 0;
};

struct Chao1Estimate {
  std::uint64_t s_obs = 0;
  std::uint64_t f1 = 0;
  std::uint64_t f2 = 0;
  double estimate = 0;
};

struct SanitizeDelta {
  std::string fuzzer;
  std::uint64_t killed_default = 0;
  std::uint64_t killed_sanitize = 0;
};

struct SubjectReport {
  std::string subject;
  std::uint64_t mutations = 0;
  std::vector<FuzzerRow> rows;  // primary mode, one per fuzzer
  FuzzerRow combined;           // "killed by any fuzzer"
  std::vector<OperatorRow> operators;
  Reduction reduction;
  std::vector<VennRegion> venn;        // up to four fuzzers
  std::vector<PairwiseCell> pairwise;  // fallback beyond four
  Chao1Estimate residual;
  std::vector<SanitizeDelta> sanitize_effect;
};

struct EvalReport {
  bool primary_sanitize = false;
  std::vector<SubjectReport> subjects;
  Reduction totals;  // sums; reduction columns are ratios of the sums
};

// Everything build_report needs about one evaluated subject.
struct SubjectEvalData {
  std::string subject;
  const std::vector<MutationPoint>* points = nullptr;
  std::uint64_t initial_supermutants = 0;
  struct FuzzerData {
    std::string name;
    const std::vector<MutationVerdict>* verdicts_default = nullptr;
    const std::vector<MutationVerdict>* verdicts_sanitize = nullptr;
    CostLedger seed_cost;
    CostLedger default_cost;   // phase1 + phase2 + confirms, default mode
    CostLedger sanitize_cost;  // same, sanitizer mode
  };
  std::vector<FuzzerData> fuzzers;
};

// Exclusive Venn regions, keyed by the subset bitmask over the kill sets'
// indices. Throws std::invalid_argument for more than four sets (the
// caller exports a pairwise matrix instead).
std::map<std::uint32_t, std::uint64_t> venn_sets(
    const std::vector<std::set<MutationId>>& kill_sets);

// Chao1 species-richness estimate from a per-mutation kill-frequency
// histogram: S_obs + f1^2/(2 f2) when f2 > 0, else S_obs + f1(f1-1)/2.
Chao1Estimate chao1(std::span<const std::uint32_t> kill_frequency);

EvalReport build_report(const std::vector<SubjectEvalData>& data, bool primary_sanitize,
                        std::uint64_t phase2_budget);

std::string report_to_json(const EvalReport& r);
std::string report_to_csv(const EvalReport& r);       // Table-shaped rows
std::string operators_to_csv(const EvalReport& r);
std::string reduction_to_csv(const EvalReport& r);
std::string venn_to_json(const EvalReport& r);
// Minimal SVG of the region counts for up to three fuzzers; empty string
// otherwise.
std::string venn_to_svg(const SubjectReport& s);
std::string report_summary(const EvalReport& r);      // one-line-per-subject digest

}  // namespace mutbench
