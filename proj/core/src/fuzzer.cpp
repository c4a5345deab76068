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

#include "mutbench/fuzzer.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_set>

#include "mutbench/rng.hpp"

namespace mutbench {

namespace {

constexpr std::size_t kMaxCrashSignatures = 128;
constexpr int kHavocEnergy = 32;  // mutants tried per queue entry and cycle

std::uint64_t pack(const Edge& e) {
  return (static_cast<std::uint64_t>(e.from) << 32) | e.to;
}

const std::uint8_t kInterestingBytes[] = {0, 1, 16, 32, 64, 100,
                                          127, 128, 200, 254, 255};

Bytes havoc(const Bytes& base, Rng& rng, const std::vector<CorpusEntry>& corpus,
            const Dictionary* dict, std::size_t max_len) {
  Bytes out = base;
  const int rounds = 1 + static_cast<int>(rng.below(8));
  for (int r = 0; r < rounds; ++r) {
    const std::uint64_t choice = rng.below(dict && !dict->tokens.empty() ? 9 : 8);
    switch (choice) {
      case 0: {  // flip one bit
        if (out.empty()) break;
        out[rng.below(out.size())] ^= static_cast<std::uint8_t>(1u << rng.below(8));
        break;
      }
      case 1: {  // overwrite with a random byte
        if (out.empty()) break;
        out[rng.below(out.size())] = static_cast<std::uint8_t>(rng.below(256));
        break;
      }
      case 2: {  // arithmetic nudge
        if (out.empty()) break;
        std::uint8_t& b = out[rng.below(out.size())];
        b = static_cast<std::uint8_t>(b + static_cast<std::uint8_t>(rng.range(1, 35)) *
                                              (rng.chance(1, 2) ? 1 : -1));
        break;
      }
      case 3: {  // interesting byte
        if (out.empty()) break;
        out[rng.below(out.size())] =
            kInterestingBytes[rng.below(sizeof(kInterestingBytes))];
        break;
      }
      case 4: {  // delete a range
        if (out.empty()) break;
        const std::size_t at = rng.below(out.size());
        const std::size_t len = 1 + rng.below(std::min<std::size_t>(out.size() - at, 8));
        out.erase(out.begin() + static_cast<long>(at),
                  out.begin() + static_cast<long>(at + len));
        break;
      }
      case 5: {  // insert random bytes
        const std::size_t at = rng.below(out.size() + 1);
        const std::size_t len = 1 + rng.below(8);
        Bytes chunk(len);
        for (auto& b : chunk) b = static_cast<std::uint8_t>(rng.below(256));
        out.insert(out.begin() + static_cast<long>(at), chunk.begin(), chunk.end());
        break;
      }
      case 6: {  // copy a range within the input
        if (out.size() < 2) break;
        const std::size_t from = rng.below(out.size());
        const std::size_t len = 1 + rng.below(std::min<std::size_t>(out.size() - from, 8));
        const std::size_t to = rng.below(out.size());
        Bytes chunk(out.begin() + static_cast<long>(from),
                    out.begin() + static_cast<long>(from + len));
        out.insert(out.begin() + static_cast<long>(to), chunk.begin(), chunk.end());
        break;
      }
      case 7: {  // splice with another corpus input
        if (corpus.empty()) break;
        const Bytes& other = corpus[rng.below(corpus.size())].input;
        if (other.empty()) break;
        const std::size_t keep = out.empty() ? 0 : rng.below(out.size() + 1);
        const std::size_t from = rng.below(other.size());
        out.resize(keep);
        out.insert(out.end(), other.begin() + static_cast<long>(from), other.end());
        break;
      }
      case 8: {  // dictionary token insert/overwrite
        const Bytes& tok = dict->tokens[rng.below(dict->tokens.size())];
        if (rng.chance(1, 2) && out.size() >= tok.size()) {
          const std::size_t at = rng.below(out.size() - tok.size() + 1);
          std::copy(tok.begin(), tok.end(), out.begin() + static_cast<long>(at));
        } else {
          const std::size_t at = rng.below(out.size() + 1);
          out.insert(out.begin() + static_cast<long>(at), tok.begin(), tok.end());
        }
        break;
      }
    }
    if (out.size() > max_len) out.resize(max_len);
  }
  return out;
}

// Shared per-run bookkeeping: crash deduplication by (status code, covered
// mutation set) signature, and the coverage union.
class RunState {
 public:
  explicit RunState(const FuzzTarget& target) : target_(target) {}

  ExecOutcome run_one(const Bytes& input, FuzzReport& report) {
    ExecOutcome out = execute(*target_.program, target_.build, input, target_.limits);
    report.executions_used++;
    report.steps_used += out.steps;
    mutation_union_.insert(out.covered_mutations.begin(), out.covered_mutations.end());
    if (!out.status.is_exit()) record_crash(input, out, report);
    return out;
  }

  void finish(FuzzReport& report) {
    report.covered_mutations.assign(mutation_union_.begin(), mutation_union_.end());
  }

 private:
  void record_crash(const Bytes& input, const ExecOutcome& out, FuzzReport& report) {
    if (signatures_.size() >= kMaxCrashSignatures) return;
    std::pair<int, std::vector<MutationId>> sig{status_code(out.status),
                                                out.covered_mutations};
    if (signatures_.insert(std::move(sig)).second) report.crashers.push_back(input);
  }

  const FuzzTarget& target_;
  std::set<std::pair<int, std::vector<MutationId>>> signatures_;
  std::set<MutationId> mutation_union_;
};

std::vector<Bytes> effective_seeds(std::span<const Bytes> seeds) {
  std::vector<Bytes> out;
  std::set<Bytes> seen;
  for (const Bytes& s : seeds)
    if (seen.insert(s).second) out.push_back(s);
  if (out.empty()) out.push_back(Bytes{});
  return out;
}

FuzzReport run_random(const FuzzTarget& target, std::span<const Bytes> seeds,
                      const FuzzBudget& budget, const Dictionary* dict) {
  FuzzReport report;
  RunState state(target);
  Rng rng(budget.rng_seed);

  // Blind fuzzing: the corpus is exactly the seeds; executions are havoc
  // over random seed picks with no feedback.
  std::vector<Bytes> seed_list = effective_seeds(seeds);
  for (const Bytes& s : seed_list) {
    if (report.executions_used >= budget.executions) break;
    ExecOutcome out = state.run_one(s, report);
    report.corpus.push_back(
        CorpusEntry{s, std::move(out.covered_edges), std::move(out.covered_mutations)});
  }
  while (report.executions_used < budget.executions) {
    const Bytes& base = report.corpus.empty()
                            ? seed_list[rng.below(seed_list.size())]
                            : report.corpus[rng.below(report.corpus.size())].input;
    Bytes cand = havoc(base, rng, report.corpus, dict, target.max_input_len);
    state.run_one(cand, report);
  }
  state.finish(report);
  return report;
}

FuzzReport run_covguided(const FuzzTarget& target, std::span<const Bytes> seeds,
                         const FuzzBudget& budget, const Dictionary* dict) {
  FuzzReport report;
  RunState state(target);
  Rng rng(budget.rng_seed);

  std::unordered_set<std::uint64_t> seen_edges;
  auto merge_edges = [&](const std::vector<Edge>& edges) {
    bool fresh = false;
    for (const Edge& e : edges) fresh |= seen_edges.insert(pack(e)).second;
    return fresh;
  };

  for (const Bytes& s : effective_seeds(seeds)) {
    if (report.executions_used >= budget.executions) break;
    ExecOutcome out = state.run_one(s, report);
    merge_edges(out.covered_edges);
    report.corpus.push_back(
        CorpusEntry{s, std::move(out.covered_edges), std::move(out.covered_mutations)});
  }

  std::size_t cursor = 0;
  while (report.executions_used < budget.executions && !report.corpus.empty()) {
    const std::size_t pick = cursor++ % report.corpus.size();
    for (int i = 0; i < kHavocEnergy && report.executions_used < budget.executions; ++i) {
      Bytes cand =
          havoc(report.corpus[pick].input, rng, report.corpus, dict, target.max_input_len);
      ExecOutcome out = state.run_one(cand, report);
      if (out.status.is_exit() && merge_edges(out.covered_edges)) {
        report.corpus.push_back(CorpusEntry{std::move(cand), std::move(out.covered_edges),
                                            std::move(out.covered_mutations)});
      }
    }
  }
  state.finish(report);
  return report;
}

}  // namespace

Dictionary Dictionary::parse(std::string_view text) {
  Dictionary d;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line =
        eol == std::string_view::npos ? text.substr(pos) : text.substr(pos, eol - pos);
    if (!line.empty() && line[0] != '#') d.tokens.emplace_back(line.begin(), line.end());
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  return d;
}

FuzzReport fuzz(const FuzzTarget& target, std::span<const Bytes> seeds,
                const FuzzBudget& budget, std::string_view fuzzer,
                const Dictionary* dict) {
  if (budget.executions == 0)
    throw std::invalid_argument("fuzz budget must allow at least one execution");
  if (target.program == nullptr) throw std::invalid_argument("fuzz target has no program");
  if (fuzzer == "random") return run_random(target, seeds, budget, dict);
  if (fuzzer == "covguided") return run_covguided(target, seeds, budget, dict);
  throw std::invalid_argument("unknown fuzzer adapter '" + std::string(fuzzer) + "'");
}

std::vector<CorpusEntry> minimize_corpus(std::vector<CorpusEntry> corpus) {
  std::stable_sort(corpus.begin(), corpus.end(), [](const auto& a, const auto& b) {
    if (a.input.size() != b.input.size()) return a.input.size() < b.input.size();
    return a.input < b.input;
  });
  std::unordered_set<std::uint64_t> covered;
  std::vector<CorpusEntry> kept;
  for (auto& e : corpus) {
    bool fresh = false;
    for (const Edge& edge : e.edges) fresh |= !covered.count(pack(edge));
    if (fresh || kept.empty()) {
      for (const Edge& edge : e.edges) covered.insert(pack(edge));
      kept.push_back(std::move(e));
    }
  }
  return kept;
}

std::vector<std::string> fuzzer_names() { return {"random", "covguided"}; }

}  // namespace mutbench
