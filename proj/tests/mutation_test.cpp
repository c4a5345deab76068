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

#include <algorithm>
#include <map>

#include "json.hpp"
#include "mutbench/ir.hpp"
#include "mutbench/mutation.hpp"
#include "mutbench/vm.hpp"
#include "pattern_count_oracle.hpp"
#include "test_util.hpp"

using namespace mutbench;
namespace tu = mutbench::testutil;

namespace {

std::vector<MutationId> ids_of(const std::vector<MutationPoint>& pts, OperatorKind k) {
  std::vector<MutationId> out;
  for (const auto& p : pts)
    if (p.op == k) out.push_back(p.id);
  return out;
}

ExecOutcome run(const Program& p, const std::vector<std::uint8_t>& input,
                bool sanitize = false) {
  return execute(p, BuildMode::baseline_mode(sanitize), input, ExecLimits{});
}

// Line-level diff: how many lines changed/inserted between two texts.
std::pair<int, int> line_diff(const std::string& a, const std::string& b) {
  std::vector<std::string> la, lb;
  std::istringstream ia(a), ib(b);
  for (std::string l; std::getline(ia, l);) la.push_back(l);
  for (std::string l; std::getline(ib, l);) lb.push_back(l);
  if (la.size() == lb.size()) {
    int changed = 0;
    for (std::size_t i = 0; i < la.size(); ++i) changed += la[i] != lb[i];
    return {changed, 0};
  }
  // b should have exactly one extra line; verify alignment with one skip.
  if (lb.size() != la.size() + 1) return {-1, -1};
  std::size_t i = 0, j = 0;
  int skips = 0;
  while (i < la.size() && j < lb.size()) {
    if (la[i] == lb[j]) {
      ++i;
      ++j;
    } else {
      ++j;
      ++skips;
      if (skips > 1) return {-1, -1};
    }
  }
  return {0, 1};
}

}  // namespace

TEST_CASE("program with no matching instructions yields no points") {
  Program p = parse_program("fn main {\n ret 0\n}\n");
  CHECK(find_mutations(p).empty());
}

TEST_CASE("length-check subject carries the comparison swap and +16 points") {
  const char* text =
      "fn main(u64) locals 3 {\n"
      "entry:\n"
      "  %1 = read_input 0\n"
      "  %1 = cast_u2s %1\n"
      "  %2 = cmp_slt %1 10\n"
      "  br_cond %2 @then @else\n"
      "then:\n"
      "  ret 10\n"
      "else:\n"
      "  ret 20\n"
      "}\n";
  Program p = parse_program(text);
  auto pts = find_mutations(p);

  auto slt = ids_of(pts, OperatorKind::SIGNED_LT);
  REQUIRE(slt.size() == 1);
  auto table = site_table(p);
  const auto& cmp_ref = table[pts[slt[0]].site];
  const Instruction& cmp = p.functions[cmp_ref.function].blocks[cmp_ref.block].insns[cmp_ref.index];
  RewriteResult rr = operator_rewrite(OperatorKind::SIGNED_LT, cmp, pts[slt[0]].payload);
  CHECK(rr.instruction.op == Opcode::cmp_sge);  // '<' becomes '>='

  auto off = ids_of(pts, OperatorKind::CONST_OFFSET);
  REQUIRE(off.size() == 1);
  RewriteResult rr2 = operator_rewrite(OperatorKind::CONST_OFFSET, cmp, pts[off[0]].payload);
  CHECK(rr2.instruction.args[1] == Operand::imm(26));  // bound + 16

  // Behavior: a length of 5 takes the then-branch on the baseline and the
  // else-branch on the comparison-swap mutant.
  Program mutant = apply_mutations(p, MutantSpec::of({slt[0]}), pts);
  CHECK(run(p, {5}).status == ExecStatus::exited(10));
  CHECK(run(mutant, {5}).status == ExecStatus::exited(20));
}

TEST_CASE("point counts match the text-level pattern counter on every subject") {
  for (const char* name :
       {"expr_eval.mir", "ini_parse.mir", "base64.mir", "msgframe.mir",
        "gatekeeper.mir", "router.mir", "magic4.mir", "oob_demo.mir"}) {
    CAPTURE(name);
    Program p = tu::load_subject(name);
    auto pts = find_mutations(p);
    auto expected = tu::count_patterns_from_text(serialize_program(p));

    std::map<std::string, int> got;
    for (const auto& mp : pts) got[std::string(operator_name(mp.op))]++;
    CHECK(got == expected);
    CHECK(static_cast<int>(pts.size()) == tu::total_pattern_count(expected));

    // Dense ids in enumeration order.
    for (std::size_t i = 0; i < pts.size(); ++i) CHECK(pts[i].id == i);
    CHECK(std::is_sorted(pts.begin(), pts.end(),
                         [](const auto& a, const auto& b) { return a.site < b.site; }));
  }
}

TEST_CASE("empty spec returns an identical program") {
  Program p = tu::load_subject("msgframe.mir");
  Program m = apply_mutations(p, MutantSpec::of({}), find_mutations(p));
  CHECK(p == m);
}

TEST_CASE("two mutations in one function are rejected") {
  Program p = tu::load_subject("msgframe.mir");
  auto pts = find_mutations(p);
  // Two points hosted by main.
  std::vector<MutationId> in_main;
  for (const auto& mp : pts)
    if (mp.function == "main") in_main.push_back(mp.id);
  REQUIRE(in_main.size() >= 2);
  CHECK_THROWS_WITH_AS(
      apply_mutations(p, MutantSpec::of({in_main[0], in_main[1]}), pts),
      doctest::Contains("per-function"), std::invalid_argument);
  CHECK_THROWS_AS(apply_mutations(p, MutantSpec::of({999999}), pts), std::invalid_argument);
}

TEST_CASE("composability and order independence across functions") {
  Program p = tu::load_subject("msgframe.mir");
  auto pts = find_mutations(p);
  std::vector<MutationId> in_main = ids_of(pts, OperatorKind::SIGNED_LT);
  MutationId a = in_main.at(0);  // lives in main
  MutationId b = 0;
  bool found = false;
  for (const auto& mp : pts)
    if (mp.function == "checksum" && !found) {
      b = mp.id;
      found = true;
    }
  REQUIRE(found);
  Program both = apply_mutations(p, MutantSpec::of({a, b}), pts);
  Program ab = apply_mutations(apply_mutations(p, MutantSpec::of({a}), pts),
                               MutantSpec::of({b}), pts);
  Program ba = apply_mutations(apply_mutations(p, MutantSpec::of({b}), pts),
                               MutantSpec::of({a}), pts);
  CHECK(both == ab);
  CHECK(both == ba);
}

TEST_CASE("find_mutations is a pure function of the program") {
  Program p = tu::load_subject("expr_eval.mir");
  CHECK(find_mutations(p) == find_mutations(p));
}

TEST_CASE("every single mutant differs in exactly one instruction line") {
  for (const char* name : {"msgframe.mir", "gatekeeper.mir"}) {
    CAPTURE(name);
    Program p = tu::load_subject(name);
    std::string base = serialize_program(p);
    auto pts = find_mutations(p);
    for (const auto& mp : pts) {
      CAPTURE(mp.id);
      Program m = apply_mutations(p, MutantSpec::of({mp.id}), pts);
      auto [changed, inserted] = line_diff(base, serialize_program(m));
      if (mp.op == OperatorKind::FREE_FUNCTION_ARGUMENT) {
        CHECK(changed == 0);
        CHECK(inserted == 1);
      } else {
        CHECK(changed == 1);
        CHECK(inserted == 0);
      }
      // Site ids of surviving instructions are untouched.
      for (const auto& fn : m.functions)
        for (const auto& blk : fn.blocks)
          for (const auto& ins : blk.insns) CHECK(ins.site < p.site_count);
    }
  }
}

TEST_CASE("UNSIGNED_GE offers the boundary complement and constant-to-zero") {
  Program p = parse_program(
      "fn main(u64) locals 2 {\n"
      "  %1 = read_input 0\n"
      "  %2 = cmp_uge %1 2\n"
      "  br_cond %2 @a @b\n"
      "a:\n ret 1\n"
      "b:\n ret 2\n"
      "}\n");
  auto pts = find_mutations(p);
  auto ids = ids_of(pts, OperatorKind::UNSIGNED_GE);
  REQUIRE(ids.size() == 2);
  CHECK(pts[ids[0]].payload.variant == 0);
  CHECK(pts[ids[1]].payload.variant == 1);

  auto table = site_table(p);
  const auto& ref = table[pts[ids[0]].site];
  const Instruction& cmp = p.functions[ref.function].blocks[ref.block].insns[ref.index];
  CHECK(operator_rewrite(OperatorKind::UNSIGNED_GE, cmp, pts[ids[0]].payload).instruction.op ==
        Opcode::cmp_ult);
  CHECK(operator_rewrite(OperatorKind::UNSIGNED_GE, cmp, pts[ids[1]].payload)
            .instruction.args[1] == Operand::imm(0));

  // Slot RHS only yields the complement variant.
  Program q = parse_program(
      "fn main(u64) locals 2 {\n"
      "  %1 = read_input 0\n"
      "  %2 = cmp_uge %1 %0\n"
      "  ret %2\n"
      "}\n");
  CHECK(ids_of(find_mutations(q), OperatorKind::UNSIGNED_GE).size() == 1);
}

TEST_CASE("redirect branch inverts the outcome") {
  Program p = parse_program(
      "fn main(u64) locals 2 {\n"
      "  %1 = read_input 0\n"
      "  %1 = cmp_eq %1 7\n"
      "  br_cond %1 @y @n\n"
      "y:\n ret 1\n"
      "n:\n ret 2\n"
      "}\n");
  auto pts = find_mutations(p);
  auto ids = ids_of(pts, OperatorKind::REDIRECT_BRANCH);
  REQUIRE(ids.size() == 1);
  Program m = apply_mutations(p, MutantSpec::of({ids[0]}), pts);
  CHECK(run(p, {7}).status == ExecStatus::exited(1));
  CHECK(run(m, {7}).status == ExecStatus::exited(2));
  CHECK(run(m, {8}).status == ExecStatus::exited(1));
}

TEST_CASE("alloc halving surfaces as an overflow under the sanitizer") {
  const char* text =
      "fn main(u64) locals 3 {\n"
      "entry:\n"
      "  %1 = alloc 64\n"
      "  %2 = const 0\n"
      "  br @loop\n"
      "loop:\n"
      "  %3 = cmp_ult %2 40\n"
      "  br_cond %3 @w @done\n"
      "w:\n"
      "  %3 = add %1 %2\n"
      "  store %3 0 1\n"
      "  %2 = add %2 1\n"
      "  br @loop\n"
      "done:\n"
      "  ret 0\n"
      "}\n";
  Program p = parse_program(text);
  auto pts = find_mutations(p);
  auto ids = ids_of(pts, OperatorKind::ALLOC_SIZE);
  REQUIRE(ids.size() == 1);
  Program m = apply_mutations(p, MutantSpec::of({ids[0]}), pts);

  // The mutated allocation is 32 bytes.
  auto table = site_table(p);
  const auto& ref = table[pts[ids[0]].site];
  CHECK(m.functions[ref.function].blocks[ref.block].insns[ref.index].args[0] ==
        Operand::imm(32));

  CHECK(run(p, {}, true).status == ExecStatus::exited(0));
  CHECK(run(m, {}, true).status == ExecStatus::trapped(TrapKind::oob_write));
}

TEST_CASE("inserted free keeps the call's site and poisons the callee") {
  Program p = tu::load_subject("msgframe.mir");
  auto pts = find_mutations(p);
  auto ids = ids_of(pts, OperatorKind::FREE_FUNCTION_ARGUMENT);
  REQUIRE(ids.size() == 1);
  const MutationPoint& mp = pts[ids[0]];
  Program m = apply_mutations(p, MutantSpec::of({mp.id}), pts);

  // One extra instruction, same site as the call.
  int with_site = 0;
  for (const auto& fn : m.functions)
    for (const auto& blk : fn.blocks)
      for (const auto& ins : blk.insns)
        if (ins.site == mp.site) ++with_site;
  CHECK(with_site == 2);

  auto input = tu::bytes("\x05HELLO");
  ExecOutcome base_d = run(p, input, false);
  ExecOutcome mut_d = run(m, input, false);
  CHECK(base_d.status == mut_d.status);  // stale reads keep the same bytes
  CHECK(base_d.output == mut_d.output);
  CHECK(run(m, input, true).status == ExecStatus::trapped(TrapKind::oob_read));

  // Coverage attribution sees the mutation when the call executes.
  auto mode = BuildMode::mutant_mode(site_map(pts, MutantSpec::of({mp.id})));
  ExecOutcome cov = execute(m, mode, input, ExecLimits{});
  CHECK(cov.covered_mutations == std::vector<MutationId>{mp.id});
}

TEST_CASE("delete call substitutes zero or disappears") {
  Program p = parse_program(
      "fn main(u64) locals 2 {\n"
      "  %1 = call @five\n"
      "  call @noise\n"
      "  ret %1\n"
      "}\n"
      "fn five {\n ret 5\n}\n"
      "fn noise {\n write_output 33\n ret 0\n}\n");
  auto pts = find_mutations(p);
  auto ids = ids_of(pts, OperatorKind::DELETE_CALL);
  REQUIRE(ids.size() == 2);

  Program m1 = apply_mutations(p, MutantSpec::of({ids[0]}), pts);
  CHECK(run(p, {}).status == ExecStatus::exited(5));
  CHECK(run(m1, {}).status == ExecStatus::exited(0));

  Program m2 = apply_mutations(p, MutantSpec::of({ids[1]}), pts);
  CHECK(run(p, {}).output.size() == 1);
  CHECK(run(m2, {}).output.empty());
}

TEST_CASE("delete argument zeroes exactly one call argument") {
  Program p = tu::load_subject("msgframe.mir");
  auto pts = find_mutations(p);
  auto ids = ids_of(pts, OperatorKind::DELETE_FUNCTION_ARGUMENT);
  REQUIRE(ids.size() == 1);
  CHECK(pts[ids[0]].payload.arg_index == 0);
  Program m = apply_mutations(p, MutantSpec::of({ids[0]}), pts);
  // checksum(0, len) dereferences the null pointer in both modes.
  auto input = tu::bytes("\x05HELLO");
  CHECK(run(m, input, false).status == ExecStatus::trapped(TrapKind::oob_read));
  CHECK(run(m, input, true).status == ExecStatus::trapped(TrapKind::oob_read));
}

TEST_CASE("reassign store redirects to the previously stored-to address") {
  Program p = parse_program(
      "fn main(u64) locals 4 {\n"
      "  %1 = alloc 8\n"
      "  %2 = alloc 8\n"
      "  store %1 11 1\n"
      "  store %2 22 1\n"
      "  %3 = load %1 1\n"
      "  write_output %3\n"
      "  %3 = load %2 1\n"
      "  write_output %3\n"
      "  ret 0\n"
      "}\n");
  auto pts = find_mutations(p);
  auto ids = ids_of(pts, OperatorKind::REASSIGN_STORE);
  REQUIRE(ids.size() == 1);
  CHECK(pts[ids[0]].payload.replacement == Operand::slot(1));
  Program m = apply_mutations(p, MutantSpec::of({ids[0]}), pts);
  CHECK(run(p, {}).output == std::vector<std::uint8_t>{11, 22});
  CHECK(run(m, {}).output[0] == 22);  // second store clobbered the first
}

TEST_CASE("deletion operators leave a covering placeholder") {
  Program p = tu::load_subject("gatekeeper.mir");
  auto pts = find_mutations(p);
  auto ids = ids_of(pts, OperatorKind::DELETE_LOCAL_STORE);
  REQUIRE(!ids.empty());
  const MutationPoint& mp = pts[ids[0]];
  Program m = apply_mutations(p, MutantSpec::of({mp.id}), pts);
  auto mode = BuildMode::mutant_mode(site_map(pts, MutantSpec::of({mp.id})));
  //

  // "GATE" + argument byte reaches low_path for small scrambled values.
  auto input = tu::bytes("GATE\x02");  // scramble(2)=17 -> low_path
  ExecOutcome cov = execute(m, mode, input, ExecLimits{});
  CHECK(cov.covered_mutations == std::vector<MutationId>{mp.id});
}

TEST_CASE("operator filter restricts the catalog") {
  Program p = tu::load_subject("msgframe.mir");
  CatalogOptions opt;
  opt.only = std::vector<OperatorKind>{OperatorKind::SIGNED_LT};
  auto pts = find_mutations(p, opt);
  CHECK(!pts.empty());
  for (const auto& mp : pts) CHECK(mp.op == OperatorKind::SIGNED_LT);
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK(pts[i].id == i);
}

TEST_CASE("pattern mismatch is rejected") {
  Program p = parse_program("fn main {\n ret 0\n}\n");
  const Instruction& ret = p.functions[0].blocks[0].insns[0];
  CHECK_THROWS_AS(operator_rewrite(OperatorKind::SIGNED_LT, ret, {}), std::invalid_argument);
}

TEST_CASE("mutations.json is well formed and points at real lines") {
  Program p = tu::load_subject("msgframe.mir");
  auto pts = find_mutations(p);
  std::string json_text = mutations_to_json(p, pts);
  auto doc = nlohmann::json::parse(json_text);
  REQUIRE(doc.is_array());
  REQUIRE(doc.size() == pts.size());

  std::vector<std::string> lines;
  {
    std::istringstream in(serialize_program(p));
    for (std::string l; std::getline(in, l);) lines.push_back(l);
  }
  for (const auto& e : doc) {
    CHECK(e.contains("id"));
    CHECK(e.contains("site"));
    CHECK(e.contains("function"));
    CHECK(e.contains("operator"));
    CHECK(e.contains("payload"));
    int line = e["source_line"].get<int>();
    REQUIRE(line >= 1);
    REQUIRE(line <= static_cast<int>(lines.size()));
    CHECK(lines[static_cast<std::size_t>(line - 1)].find("  ") == 0);  // an instruction line
  }
}
