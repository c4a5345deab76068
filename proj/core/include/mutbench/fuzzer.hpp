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

// Reference fuzzers behind a pluggable adapter registry. "random" performs
// blind byte-level havoc over the seeds; "covguided" keeps an edge-feedback
// queue in the usual coverage-guided style. Both are fully deterministic
// under the budget's rng seed, and both report crashing inputs that the
// bench re-verifies itself.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mutbench/vm.hpp"

namespace mutbench {

using Bytes = std::vector<std::uint8_t>;

struct FuzzTarget {
  const Program* program = nullptr;
  BuildMode build;       // location for seed collection, mutant_instrumented for mutants
  ExecLimits limits;
  std::size_t max_input_len = 1024;
};

struct FuzzBudget {
  std::uint64_t executions = 0;  // deterministic stand-in for wall-clock time
  std::uint64_t rng_seed = 0;
};

struct CorpusEntry {
  Bytes input;
  std::vector<Edge> edges;
  std::vector<MutationId> mutations;
};

struct FuzzReport {
  std::vector<CorpusEntry> corpus;
  std::vector<Bytes> crashers;
  std::uint64_t executions_used = 0;
  std::uint64_t steps_used = 0;
  // Union over every execution, retained or not.
  std::vector<MutationId> covered_mutations;
};

struct Dictionary {
  std::vector<Bytes> tokens;

  // One token per line; '#' lines are comments. Empty lines are skipped.
  static Dictionary parse(std::string_view text);
};

// Runs the named adapter. Seeds may be empty: a single empty input is
// injected. Throws std::invalid_argument for unknown adapter names or a
// zero budget.
FuzzReport fuzz(const FuzzTarget& target, std::span<const Bytes> seeds,
                const FuzzBudget& budget, std::string_view fuzzer,
                const Dictionary* dict = nullptr);

// Greedy set cover over covered edges, smallest inputs first (ties broken
// lexicographically); the union of covered edges is preserved exactly.
std::vector<CorpusEntry> minimize_corpus(std::vector<CorpusEntry> corpus);

std::vector<std::string> fuzzer_names();

}  // namespace mutbench
