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

#include "mutbench/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "mutbench/rng.hpp"

namespace mutbench {

namespace {

int effective_workers(int configured) {
  if (configured > 0) return configured;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(0..n-1) on a worker pool. Results are whatever fn writes into
// caller-owned slots; the call sites then merge them in index order so the
// outcome is schedule-independent.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  workers = std::min<std::size_t>(static_cast<std::size_t>(effective_workers(workers)), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct Phase1Kill {
  MutationId id;
  std::size_t seed_index;
  std::pair<int, int> codes;
};

struct Phase1Result {
  std::vector<Phase1Kill> kills;
  std::vector<MutationId> split_trigger;
  CostLedger cost;
};

struct Phase2Kill {
  MutationId id;
  Bytes input;
  std::pair<int, int> codes;
};

struct Phase2Result {
  std::vector<Phase2Kill> kills;
  std::vector<MutationId> covered;
  std::vector<MutationId> split_trigger;
  CostLedger cost;
};

void record_kill(MutationVerdict& v, bool phase1, const Bytes& input,
                 std::pair<int, int> codes) {
  if (v.killed()) return;  // the ledger is monotone; first evidence wins
  if (phase1) v.killed_phase1 = true;
  else v.killed_phase2 = true;
  v.killing_input = input;
  v.status_pair = codes;
}

std::vector<MutationId> merge_ids(std::vector<MutationId> a,
                                  const std::vector<MutationId>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

}  // namespace

const std::vector<CorpusEntry>& SeedSelection::chosen_corpus() const {
  return runs[static_cast<std::size_t>(chosen)].corpus;
}

EvalState EvalState::init(std::size_t mutation_count, std::vector<Supermutant> partition) {
  EvalState s;
  s.supermutants = std::move(partition);
  s.retired.assign(s.supermutants.size(), 0);
  s.verdicts.resize(mutation_count);
  for (std::size_t i = 0; i < mutation_count; ++i)
    s.verdicts[i].id = static_cast<MutationId>(i);
  for (const auto& sm : s.supermutants) s.next_sm_id = std::max(s.next_sm_id, sm.id + 1);
  return s;
}

std::size_t EvalState::alive_count() const {
  std::size_t n = 0;
  for (const auto& v : verdicts) n += !v.killed();
  return n;
}

bool kill_rule(const ExecOutcome& baseline, const ExecOutcome& mutant, bool output_oracle) {
  if (!baseline.status.is_exit()) return false;  // original must exit cleanly
  const int base_code = status_code(baseline.status);
  const int mut_code = status_code(mutant.status);
  if (base_code != mut_code) return true;
  return output_oracle && baseline.output != mutant.output;
}

std::optional<std::pair<int, int>> confirm_kill(
    const Program& p, const std::vector<MutationPoint>& points, const MutantSpec& spec,
    const Bytes& input, bool sanitize, const PipelineConfig& cfg, CostLedger* cost,
    ExecOutcome* mutant_outcome) {
  ExecOutcome base = execute(p, BuildMode::baseline_mode(sanitize), input, cfg.limits);
  Program mutant = apply_mutations(p, spec, points);
  ExecOutcome mut = execute(mutant, BuildMode::mutant_mode(site_map(points, spec), sanitize),
                            input, cfg.limits);
  if (cost) {
    cost->add(base);
    cost->add(mut);
  }
  const bool killed = kill_rule(base, mut, cfg.output_oracle);
  const int base_code = status_code(base.status);
  const int mut_code = status_code(mut.status);
  if (mutant_outcome) *mutant_outcome = std::move(mut);
  if (!killed) return std::nullopt;
  return std::make_pair(base_code, mut_code);
}

Attribution attribute_kill(const ExecOutcome& mutant_outcome, const MutantSpec& spec) {
  std::vector<MutationId> covered;
  for (MutationId id : mutant_outcome.covered_mutations)
    if (std::binary_search(spec.ids.begin(), spec.ids.end(), id)) covered.push_back(id);
  if (covered.empty())
    throw std::logic_error(
        "status divergence without covering any mutated site: mode-neutrality violation");
  if (covered.size() == 1) return Attribution{true, covered[0], {}};
  return Attribution{false, 0, std::move(covered)};
}

SeedSelection collect_seeds(const Program& p, const std::vector<MutationPoint>& points,
                            std::string_view fuzzer, std::span<const Bytes> initial_seeds,
                            const Dictionary* dict, const PipelineConfig& cfg,
                            std::uint64_t stream, CostLedger& cost) {
  if (cfg.budgets.seed_instances < 1)
    throw std::invalid_argument("seed_instances must be at least 1");

  FuzzTarget target;
  target.program = &p;
  target.build = BuildMode::location_mode(site_map(points));
  target.limits = cfg.limits;
  target.max_input_len = cfg.max_input_len;

  const std::size_t n = static_cast<std::size_t>(cfg.budgets.seed_instances);
  std::vector<SeedSelection::Run> runs(n);
  std::vector<CostLedger> costs(n);
  parallel_for(n, cfg.workers, [&](std::size_t k) {
    FuzzBudget budget{cfg.budgets.seed_budget, derive_seed(cfg.rng_seed, stream, k)};
    FuzzReport rep = fuzz(target, initial_seeds, budget, fuzzer, dict);
    costs[k].execs = rep.executions_used;
    costs[k].steps = rep.steps_used;
    SeedSelection::Run run;
    run.index = static_cast<int>(k);
    run.corpus = minimize_corpus(std::move(rep.corpus));
    std::vector<MutationId> covered;
    for (const auto& e : run.corpus) covered = merge_ids(std::move(covered), e.mutations);
    run.covered_mutations = covered.size();
    runs[k] = std::move(run);
  });
  for (const auto& c : costs) cost += c;

  std::vector<std::size_t> counts(n);
  for (std::size_t i = 0; i < n; ++i) counts[i] = runs[i].covered_mutations;

  SeedSelection sel;
  sel.chosen = static_cast<int>(median_run_index(counts));
  sel.runs = std::move(runs);
  return sel;
}

std::size_t median_run_index(std::span<const std::size_t> covered_counts) {
  std::vector<std::size_t> order(covered_counts.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return covered_counts[a] < covered_counts[b];
  });
  return order[(order.size() - 1) / 2];
}

void phase1(EvalState& state, const Program& p, const std::vector<MutationPoint>& points,
            const std::vector<CorpusEntry>& seeds, bool sanitize,
            const PipelineConfig& cfg) {
  // Coverage ledger straight from the location-build seed corpus.
  for (const auto& entry : seeds)
    for (MutationId id : entry.mutations) state.verdicts[id].covered_phase1 = true;

  // Baseline outcomes per seed, computed once.
  std::vector<ExecOutcome> base(seeds.size());
  parallel_for(seeds.size(), cfg.workers, [&](std::size_t i) {
    base[i] = execute(p, BuildMode::baseline_mode(sanitize), seeds[i].input, cfg.limits);
  });
  for (const auto& out : base) state.phase1_cost.add(out);

  std::vector<std::size_t> queue;
  for (std::size_t i = 0; i < state.supermutants.size(); ++i)
    if (!state.retired[i]) queue.push_back(i);

  while (!queue.empty()) {
    std::vector<Phase1Result> results(queue.size());
    parallel_for(queue.size(), cfg.workers, [&](std::size_t qi) {
      const Supermutant& sm = state.supermutants[queue[qi]];
      Phase1Result res;
      MutantSpec spec = MutantSpec::of(sm.ids);
      Program mutant = apply_mutations(p, spec, points);
      BuildMode build = BuildMode::mutant_mode(site_map(points, spec), sanitize);
      for (std::size_t s = 0; s < seeds.size(); ++s) {
        ExecOutcome out = execute(mutant, build, seeds[s].input, cfg.limits);
        res.cost.add(out);
        if (kill_rule(base[s], out, cfg.output_oracle)) {
          Attribution attr = attribute_kill(out, spec);
          if (attr.single) {
            res.kills.push_back(Phase1Kill{
                attr.id, s, {status_code(base[s].status), status_code(out.status)}});
          } else {
            res.split_trigger = std::move(attr.interacting);
            break;
          }
        } else if (sm.origin == Supermutant::Origin::uncovered_batch &&
                   !out.covered_mutations.empty()) {
          // A batch of supposedly unreachable mutations was reached: an
          // interaction, even without a divergence.
          res.split_trigger = out.covered_mutations;
          break;
        }
      }
      results[qi] = std::move(res);
    });

    std::vector<std::size_t> next_queue;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      Phase1Result& res = results[qi];
      state.phase1_cost += res.cost;
      for (const Phase1Kill& k : res.kills)
        record_kill(state.verdicts[k.id], /*phase1=*/true, seeds[k.seed_index].input,
                    k.codes);
      if (!res.split_trigger.empty()) {
        const std::size_t sm_idx = queue[qi];
        const Supermutant sm = state.supermutants[sm_idx];
        auto children = split_supermutant(sm, res.split_trigger, state.next_sm_id);
        state.retired[sm_idx] = 1;
        SplitRecord rec{sm.id, {}, res.split_trigger, "phase1"};
        for (auto& child : children) {
          rec.children.push_back(child.id);
          next_queue.push_back(state.supermutants.size());
          state.supermutants.push_back(std::move(child));
          state.retired.push_back(0);
        }
        state.splits.push_back(std::move(rec));
      }
    }
    queue = std::move(next_queue);
  }
}

void phase2(EvalState& state, const Program& p, const std::vector<MutationPoint>& points,
            const std::vector<CorpusEntry>& seeds, std::string_view fuzzer, bool sanitize,
            const PipelineConfig& cfg, const Dictionary* dict, std::uint64_t stream) {
  std::vector<Bytes> seed_inputs;
  seed_inputs.reserve(seeds.size());
  for (const auto& e : seeds) seed_inputs.push_back(e.input);

  auto stubborn = [&](const Supermutant& sm) {
    for (MutationId id : sm.ids)
      if (!state.verdicts[id].killed()) return true;
    return false;
  };

  std::vector<std::size_t> queue;
  for (std::size_t i = 0; i < state.supermutants.size(); ++i)
    if (!state.retired[i] && stubborn(state.supermutants[i])) queue.push_back(i);

  while (!queue.empty()) {
    std::vector<Phase2Result> results(queue.size());
    parallel_for(queue.size(), cfg.workers, [&](std::size_t qi) {
      const Supermutant& sm = state.supermutants[queue[qi]];
      Phase2Result res;
      MutantSpec spec = MutantSpec::of(sm.ids);
      Program mutant = apply_mutations(p, spec, points);
      auto imap = site_map(points, spec);

      FuzzTarget target;
      target.program = &mutant;
      target.build = BuildMode::mutant_instrumented_mode(imap, sanitize);
      target.limits = cfg.limits;
      target.max_input_len = cfg.max_input_len;
      FuzzBudget budget{cfg.budgets.phase2_budget,
                        derive_seed(cfg.rng_seed, stream, sm.id)};
      FuzzReport rep = fuzz(target, seed_inputs, budget, fuzzer, dict);
      res.cost.execs += rep.executions_used;
      res.cost.steps += rep.steps_used;
      res.covered = rep.covered_mutations;

      std::vector<MutationId> interactions;
      BuildMode confirm_build = BuildMode::mutant_mode(imap, sanitize);
      for (const Bytes& crasher : rep.crashers) {
        ExecOutcome base = execute(p, BuildMode::baseline_mode(sanitize), crasher, cfg.limits);
        ExecOutcome mut = execute(mutant, confirm_build, crasher, cfg.limits);
        res.cost.add(base);
        res.cost.add(mut);
        res.covered = merge_ids(std::move(res.covered), mut.covered_mutations);
        if (!kill_rule(base, mut, cfg.output_oracle)) continue;
        Attribution attr = attribute_kill(mut, spec);
        if (attr.single) {
          res.kills.push_back(Phase2Kill{
              attr.id, crasher, {status_code(base.status), status_code(mut.status)}});
        } else {
          interactions = merge_ids(std::move(interactions), attr.interacting);
        }
      }

      if (!interactions.empty()) {
        res.split_trigger = std::move(interactions);
      } else if (sm.origin == Supermutant::Origin::uncovered_batch && !res.covered.empty()) {
        res.split_trigger = res.covered;
      }
      results[qi] = std::move(res);
    });

    std::vector<std::size_t> next_queue;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      Phase2Result& res = results[qi];
      state.phase2_cost += res.cost;
      for (MutationId id : res.covered) state.verdicts[id].covered_phase2 = true;
      for (const Phase2Kill& k : res.kills)
        record_kill(state.verdicts[k.id], /*phase1=*/false, k.input, k.codes);
      if (!res.split_trigger.empty()) {
        const std::size_t sm_idx = queue[qi];
        const Supermutant sm = state.supermutants[sm_idx];
        auto children = split_supermutant(sm, res.split_trigger, state.next_sm_id);
        state.retired[sm_idx] = 1;
        SplitRecord rec{sm.id, {}, res.split_trigger, "phase2"};
        for (auto& child : children) {
          rec.children.push_back(child.id);
          if (stubborn(child)) next_queue.push_back(state.supermutants.size());
          state.supermutants.push_back(std::move(child));
          state.retired.push_back(0);
        }
        state.splits.push_back(std::move(rec));
      }
    }
    queue = std::move(next_queue);
  }
}

}  // namespace mutbench
