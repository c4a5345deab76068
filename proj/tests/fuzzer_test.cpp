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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "mutbench/fuzzer.hpp"
#include "mutbench/ir.hpp"
#include "test_util.hpp"

using namespace mutbench;
namespace tu = mutbench::testutil;

namespace {

FuzzTarget location_target(const Program& p) {
  FuzzTarget t;
  t.program = &p;
  t.build = BuildMode::location_mode({});
  return t;
}

}  // namespace

TEST_CASE("budget and adapter validation") {
  Program p = parse_program("fn main {\n ret 0\n}\n");
  FuzzTarget t = location_target(p);
  CHECK_THROWS_AS(fuzz(t, {}, FuzzBudget{0, 1}, "random"), std::invalid_argument);
  CHECK_THROWS_AS(fuzz(t, {}, FuzzBudget{10, 1}, "wat"), std::invalid_argument);
  CHECK(fuzzer_names() == std::vector<std::string>{"random", "covguided"});
}

TEST_CASE("a budget of one yields at most one corpus entry and no crashers") {
  Program p = parse_program("fn main {\n ret 0\n}\n");
  FuzzTarget t = location_target(p);
  for (const char* name : {"random", "covguided"}) {
    FuzzReport r = fuzz(t, {}, FuzzBudget{1, 1}, name);
    CHECK(r.executions_used == 1);
    CHECK(r.corpus.size() <= 1);
    CHECK(r.crashers.empty());
  }
}

TEST_CASE("guided beats blind on a four-byte magic gate") {
  Program p = tu::load_subject("magic4.mir");
  FuzzTarget t = location_target(p);
  FuzzBudget budget{200'000, 1};

  FuzzReport guided = fuzz(t, {}, budget, "covguided");
  FuzzReport blind = fuzz(t, {}, budget, "random");
  CHECK(!guided.crashers.empty());
  CHECK(blind.crashers.empty());

  // Reported crashers reproduce deterministically on the same build.
  for (const Bytes& c : guided.crashers) {
    ExecOutcome out = execute(p, t.build, c, t.limits);
    CHECK(!out.status.is_exit());
  }
}

TEST_CASE("reports are reproducible for identical budgets") {
  Program p = tu::load_subject("msgframe.mir");
  FuzzTarget t = location_target(p);
  for (const char* name : {"random", "covguided"}) {
    CAPTURE(name);
    FuzzReport a = fuzz(t, {}, FuzzBudget{5'000, 7}, name);
    FuzzReport b = fuzz(t, {}, FuzzBudget{5'000, 7}, name);
    REQUIRE(a.corpus.size() == b.corpus.size());
    for (std::size_t i = 0; i < a.corpus.size(); ++i)
      CHECK(a.corpus[i].input == b.corpus[i].input);
    CHECK(a.crashers == b.crashers);
    CHECK(a.executions_used == b.executions_used);
    CHECK(a.covered_mutations == b.covered_mutations);
  }
}

TEST_CASE("covguided corpus grows monotonically in covered edges") {
  Program p = tu::load_subject("base64.mir");
  FuzzTarget t = location_target(p);
  auto seeds = std::vector<Bytes>{tu::bytes("TWFu")};
  FuzzReport r = fuzz(t, seeds, FuzzBudget{20'000, 3}, "covguided");
  std::set<std::uint64_t> seen;
  std::size_t last = 0;
  for (const CorpusEntry& e : r.corpus) {
    for (const Edge& edge : e.edges)
      seen.insert((static_cast<std::uint64_t>(edge.from) << 32) | edge.to);
    CHECK(seen.size() >= last);
    last = seen.size();
  }
  // Each retained non-seed entry contributed something new overall.
  CHECK(seen.size() > 0);
}

TEST_CASE("minimize_corpus: identity, tie-break, union preservation") {
  CorpusEntry a{tu::bytes("aa"), {Edge{1, 2}}, {}};
  SUBCASE("single input unchanged") {
    auto kept = minimize_corpus({a});
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].input == a.input);
  }
  SUBCASE("identical edge sets keep the shorter then lexicographic input") {
    CorpusEntry b{tu::bytes("z"), {Edge{1, 2}}, {}};
    auto kept = minimize_corpus({a, b});
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].input == tu::bytes("z"));

    CorpusEntry c{tu::bytes("ab"), {Edge{1, 2}}, {}};
    auto kept2 = minimize_corpus({a, c});
    REQUIRE(kept2.size() == 1);
    CHECK(kept2[0].input == tu::bytes("aa"));
  }
  SUBCASE("edge union is identical before and after on a real corpus") {
    Program p = tu::load_subject("ini_parse.mir");
    FuzzTarget t = location_target(p);
    FuzzReport r = fuzz(t, std::vector<Bytes>{tu::bytes("[s]\nk=v\n")},
                        FuzzBudget{20'000, 11}, "covguided");
    std::set<Edge> before, after;
    for (const auto& e : r.corpus) before.insert(e.edges.begin(), e.edges.end());
    auto kept = minimize_corpus(r.corpus);
    for (const auto& e : kept) after.insert(e.edges.begin(), e.edges.end());
    CHECK(before == after);
    CHECK(kept.size() <= r.corpus.size());
  }
}

TEST_CASE("a dictionary token cracks the gate quickly") {
  Program p = tu::load_subject("magic4.mir");
  FuzzTarget t = location_target(p);
  Dictionary dict = Dictionary::parse("# tokens\nFUZZ\n");
  FuzzReport r = fuzz(t, {}, FuzzBudget{4'000, 5}, "covguided", &dict);
  CHECK(!r.crashers.empty());
}

TEST_CASE("blind fuzzing still reports real crashes when they are easy") {
  // Any nonzero first byte divides by zero: trivially crashable.
  Program p = parse_program(
      "fn main(u64) locals 2 {\n"
      "  %1 = read_input 0\n"
      "  %2 = div_u 7 %1\n"
      "  ret 0\n"
      "}\n");
  FuzzTarget t = location_target(p);
  FuzzReport r = fuzz(t, {}, FuzzBudget{2'000, 2}, "random");
  CHECK(!r.crashers.empty());
  for (const Bytes& c : r.crashers) {
    ExecOutcome out = execute(p, t.build, c, t.limits);
    CHECK(!out.status.is_exit());
  }
}
