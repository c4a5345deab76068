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

#include "mutbench/mutation.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>
#include <unordered_set>

#include "json.hpp"

namespace mutbench {

namespace {

struct KindName {
  OperatorKind kind;
  std::string_view name;
};

constexpr std::array<KindName, kOperatorKindCount> kKindNames = {{
    {OperatorKind::SIGNED_LT, "SIGNED_LT"},
    {OperatorKind::SIGNED_LE, "SIGNED_LE"},
    {OperatorKind::SIGNED_GT, "SIGNED_GT"},
    {OperatorKind::SIGNED_GE, "SIGNED_GE"},
    {OperatorKind::UNSIGNED_LT, "UNSIGNED_LT"},
    {OperatorKind::UNSIGNED_LE, "UNSIGNED_LE"},
    {OperatorKind::UNSIGNED_GT, "UNSIGNED_GT"},
    {OperatorKind::UNSIGNED_GE, "UNSIGNED_GE"},
    {OperatorKind::COMPARE_EQ, "COMPARE_EQ"},
    {OperatorKind::REDIRECT_BRANCH, "REDIRECT_BRANCH"},
    {OperatorKind::SWITCH_PLUS_MINUS, "SWITCH_PLUS_MINUS"},
    {OperatorKind::SWITCH_SHIFT, "SWITCH_SHIFT"},
    {OperatorKind::DELETE_STORE, "DELETE_STORE"},
    {OperatorKind::DELETE_LOCAL_STORE, "DELETE_LOCAL_STORE"},
    {OperatorKind::REASSIGN_STORE, "REASSIGN_STORE"},
    {OperatorKind::DELETE_CALL, "DELETE_CALL"},
    {OperatorKind::DELETE_FUNCTION_ARGUMENT, "DELETE_FUNCTION_ARGUMENT"},
    {OperatorKind::FREE_FUNCTION_ARGUMENT, "FREE_FUNCTION_ARGUMENT"},
    {OperatorKind::ALLOC_SIZE, "ALLOC_SIZE"},
    {OperatorKind::ALLOC_ZEROED_SIZE, "ALLOC_ZEROED_SIZE"},
    {OperatorKind::NEW_ARRAY_SIZE, "NEW_ARRAY_SIZE"},
    {OperatorKind::SIGNED_TO_UNSIGNED, "SIGNED_TO_UNSIGNED"},
    {OperatorKind::UNSIGNED_TO_SIGNED, "UNSIGNED_TO_SIGNED"},
    {OperatorKind::CONST_OFFSET, "CONST_OFFSET"},
}};

std::optional<Opcode> comparison_complement(Opcode op) {
  switch (op) {
    case Opcode::cmp_slt: return Opcode::cmp_sge;
    case Opcode::cmp_sle: return Opcode::cmp_sgt;
    case Opcode::cmp_sgt: return Opcode::cmp_sle;
    case Opcode::cmp_sge: return Opcode::cmp_slt;
    case Opcode::cmp_ult: return Opcode::cmp_uge;
    case Opcode::cmp_ule: return Opcode::cmp_ugt;
    case Opcode::cmp_ugt: return Opcode::cmp_ule;
    case Opcode::cmp_uge: return Opcode::cmp_ult;
    case Opcode::cmp_eq: return Opcode::cmp_ne;
    case Opcode::cmp_ne: return Opcode::cmp_eq;
    default: return std::nullopt;
  }
}

// The opcode family each comparison operator matches.
Opcode kind_pattern_opcode(OperatorKind k) {
  switch (k) {
    case OperatorKind::SIGNED_LT: return Opcode::cmp_slt;
    case OperatorKind::SIGNED_LE: return Opcode::cmp_sle;
    case OperatorKind::SIGNED_GT: return Opcode::cmp_sgt;
    case OperatorKind::SIGNED_GE: return Opcode::cmp_sge;
    case OperatorKind::UNSIGNED_LT: return Opcode::cmp_ult;
    case OperatorKind::UNSIGNED_LE: return Opcode::cmp_ule;
    case OperatorKind::UNSIGNED_GT: return Opcode::cmp_ugt;
    case OperatorKind::UNSIGNED_GE: return Opcode::cmp_uge;
    default: return Opcode::nop;
  }
}

std::optional<Opcode> signedness_swap(Opcode op, bool signed_to_unsigned) {
  if (signed_to_unsigned) {
    switch (op) {
      case Opcode::cast_s2u: return Opcode::cast_u2s;
      case Opcode::cmp_slt: return Opcode::cmp_ult;
      case Opcode::cmp_sle: return Opcode::cmp_ule;
      case Opcode::cmp_sgt: return Opcode::cmp_ugt;
      case Opcode::cmp_sge: return Opcode::cmp_uge;
      case Opcode::div_s: return Opcode::div_u;
      default: return std::nullopt;
    }
  }
  switch (op) {
    case Opcode::cast_u2s: return Opcode::cast_s2u;
    case Opcode::cmp_ult: return Opcode::cmp_slt;
    case Opcode::cmp_ule: return Opcode::cmp_sle;
    case Opcode::cmp_ugt: return Opcode::cmp_sgt;
    case Opcode::cmp_uge: return Opcode::cmp_sge;
    case Opcode::div_u: return Opcode::div_s;
    default: return std::nullopt;
  }
}

[[noreturn]] void mismatch(OperatorKind kind, const Instruction& instr) {
  throw std::invalid_argument(std::string("operator ") +
                              std::string(operator_name(kind)) +
                              " does not match instruction opcode " +
                              std::string(opcode_name(instr.op)));
}

bool cmp_has_imm_rhs(const Instruction& ins) {
  return is_comparison(ins.op) && ins.args.size() == 2 && ins.args[1].is_imm();
}

// Enumerates candidate payloads for (kind, instr). Context arguments feed
// the store-reassignment and call-argument operators.
std::vector<MutationPayload> candidates(OperatorKind kind, const Program& p,
                                        const Instruction& ins,
                                        const Instruction* previous_store,
                                        const CatalogOptions& opt) {
  std::vector<MutationPayload> out;
  auto one = [&] { out.push_back(MutationPayload{}); };
  switch (kind) {
    case OperatorKind::SIGNED_LT:
    case OperatorKind::SIGNED_LE:
    case OperatorKind::SIGNED_GT:
    case OperatorKind::SIGNED_GE:
    case OperatorKind::UNSIGNED_LT:
    case OperatorKind::UNSIGNED_LE:
    case OperatorKind::UNSIGNED_GT:
      if (ins.op == kind_pattern_opcode(kind)) one();
      break;
    case OperatorKind::UNSIGNED_GE:
      if (ins.op == Opcode::cmp_uge) {
        out.push_back(MutationPayload{0, -1, std::nullopt});
        if (cmp_has_imm_rhs(ins)) out.push_back(MutationPayload{1, -1, std::nullopt});
      }
      break;
    case OperatorKind::COMPARE_EQ:
      if (ins.op == Opcode::cmp_eq || ins.op == Opcode::cmp_ne) one();
      break;
    case OperatorKind::REDIRECT_BRANCH:
      if (ins.op == Opcode::br_cond) one();
      break;
    case OperatorKind::SWITCH_PLUS_MINUS:
      if (ins.op == Opcode::add || ins.op == Opcode::sub) one();
      break;
    case OperatorKind::SWITCH_SHIFT:
      if (ins.op == Opcode::shl || ins.op == Opcode::shr) one();
      break;
    case OperatorKind::DELETE_STORE:
      if (ins.op == Opcode::store) one();
      break;
    case OperatorKind::DELETE_LOCAL_STORE:
      if (ins.op == Opcode::store_local) one();
      break;
    case OperatorKind::REASSIGN_STORE:
      if (ins.op == Opcode::store && previous_store)
        out.push_back(MutationPayload{0, -1, previous_store->args[0]});
      break;
    case OperatorKind::DELETE_CALL:
      if (ins.op == Opcode::call) one();
      break;
    case OperatorKind::DELETE_FUNCTION_ARGUMENT:
      if (ins.op == Opcode::call) {
        const int nargs = static_cast<int>(ins.args.size()) - 1;
        for (int i = 0; i < nargs && static_cast<int>(out.size()) < opt.payload_cap; ++i)
          out.push_back(MutationPayload{0, i, std::nullopt});
      }
      break;
    case OperatorKind::FREE_FUNCTION_ARGUMENT:
      if (ins.op == Opcode::call) {
        const auto& callee = p.functions[static_cast<std::size_t>(ins.args[0].value)];
        for (int i = 0; i < static_cast<int>(callee.params.size()) &&
                        static_cast<int>(out.size()) < opt.payload_cap;
             ++i) {
          if (callee.params[static_cast<std::size_t>(i)] == ParamType::ptr)
            out.push_back(MutationPayload{0, i, std::nullopt});
        }
      }
      break;
    case OperatorKind::ALLOC_SIZE:
      if (ins.op == Opcode::alloc && ins.args.size() == 1 && ins.args[0].is_imm()) one();
      break;
    case OperatorKind::ALLOC_ZEROED_SIZE:
      if (ins.op == Opcode::alloc_zeroed && ins.args[0].is_imm()) one();
      break;
    case OperatorKind::NEW_ARRAY_SIZE:
      if (ins.op == Opcode::alloc && ins.args.size() == 2 && ins.args[0].is_imm()) one();
      break;
    case OperatorKind::SIGNED_TO_UNSIGNED:
      if (signedness_swap(ins.op, true)) one();
      break;
    case OperatorKind::UNSIGNED_TO_SIGNED:
      if (signedness_swap(ins.op, false)) one();
      break;
    case OperatorKind::CONST_OFFSET:
      if (cmp_has_imm_rhs(ins)) one();
      break;
  }
  return out;
}

}  // namespace

std::string_view operator_name(OperatorKind k) {
  for (const auto& kn : kKindNames)
    if (kn.kind == k) return kn.name;
  return "?";
}

std::optional<OperatorKind> operator_from_name(std::string_view name) {
  for (const auto& kn : kKindNames)
    if (kn.name == name) return kn.kind;
  return std::nullopt;
}

MutantSpec MutantSpec::of(std::vector<MutationId> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return MutantSpec{std::move(ids)};
}

std::vector<MutationPoint> find_mutations(const Program& p, const CatalogOptions& options) {
  std::vector<OperatorKind> kinds;
  if (options.only) {
    kinds = *options.only;
  } else {
    for (const auto& kn : kKindNames) kinds.push_back(kn.kind);
  }

  std::vector<MutationPoint> points;
  for (const Function& fn : p.functions) {
    const Instruction* previous_store = nullptr;
    for (const Block& block : fn.blocks) {
      for (const Instruction& ins : block.insns) {
        for (OperatorKind kind : kinds) {
          for (const MutationPayload& payload :
               candidates(kind, p, ins, previous_store, options)) {
            MutationPoint mp;
            mp.id = static_cast<MutationId>(points.size());
            mp.site = ins.site;
            mp.function = fn.name;
            mp.op = kind;
            mp.payload = payload;
            points.push_back(std::move(mp));
          }
        }
        if (ins.op == Opcode::store) previous_store = &ins;
      }
    }
  }
  return points;
}

RewriteResult operator_rewrite(OperatorKind kind, const Instruction& instr,
                               const MutationPayload& payload) {
  Instruction out = instr;
  switch (kind) {
    case OperatorKind::SIGNED_LT:
    case OperatorKind::SIGNED_LE:
    case OperatorKind::SIGNED_GT:
    case OperatorKind::SIGNED_GE:
    case OperatorKind::UNSIGNED_LT:
    case OperatorKind::UNSIGNED_LE:
    case OperatorKind::UNSIGNED_GT: {
      if (instr.op != kind_pattern_opcode(kind)) mismatch(kind, instr);
      out.op = *comparison_complement(instr.op);
      return {RewriteResult::Kind::replace, std::move(out)};
    }
    case OperatorKind::UNSIGNED_GE: {
      if (instr.op != Opcode::cmp_uge) mismatch(kind, instr);
      if (payload.variant == 1) {
        if (!cmp_has_imm_rhs(instr)) mismatch(kind, instr);
        out.args[1] = Operand::imm(0);  // defeat the lower-bound check
      } else {
        out.op = Opcode::cmp_ult;
      }
      return {RewriteResult::Kind::replace, std::move(out)};
    }
    case OperatorKind::COMPARE_EQ: {
      if (instr.op != Opcode::cmp_eq && instr.op != Opcode::cmp_ne) mismatch(kind, instr);
      out.op = *comparison_complement(instr.op);
      return {RewriteResult::Kind::replace, std::move(out)};
    }
    case OperatorKind::REDIRECT_BRANCH: {
      if (instr.op != Opcode::br_cond) mismatch(kind, instr);
      std::swap(out.args[1], out.args[2]);  // invert the condition
      return {RewriteResult::Kind::replace, std::move(out)};
    }
    case OperatorKind::SWITCH_PLUS_MINUS: {
      if (instr.op == Opcode::add) out.op = Opcode::sub;
      else if (instr.op == Opcode::sub) out.op = Opcode::add;
      else mismatch(kind, instr);
      return {RewriteResult::Kind::replace, std::move(out)};
    }
    case OperatorKind::SWITCH_SHIFT: {
      if (instr.op == Opcode::shl) out.op = Opcode::shr;
      else if (instr.op == Opcode::shr) out.op = Opcode::shl;
      else mismatch(kind, instr);
      return {RewriteResult::Kind::replace, std::move(out)};
    }
    case OperatorKind::DELETE_STORE:
      if (instr.op != Opcode::store) mismatch(kind, instr);
      return {RewriteResult::Kind::remove, {}};
    case OperatorKind::DELETE_LOCAL_STORE:
      if (instr.op != Opcode::store_local) mismatch(kind, instr);
      return {RewriteResult::Kind::remove, {}};
    case OperatorKind::REASSIGN_STORE: {
      if (instr.op != Opcode::store || !payload.replacement) mismatch(kind, instr);
      out.args[0] = *payload.replacement;
      return {RewriteResult::Kind::replace, std::move(out)};
    }
    case OperatorKind::DELETE_CALL: {
      if (instr.op != Opcode::call) mismatch(kind, instr);
      if (instr.dst < 0) return {RewriteResult::Kind::remove, {}};
      Instruction zero;
      zero.op = Opcode::const_;
      zero.dst = instr.dst;
      zero.args = {Operand::imm(0)};
      zero.site = instr.site;
      return {RewriteResult::Kind::replace, std::move(zero)};
    }
    case OperatorKind::DELETE_FUNCTION_ARGUMENT: {
      if (instr.op != Opcode::call || payload.arg_index < 0 ||
          payload.arg_index + 1 >= static_cast<int>(instr.args.size()))
        mismatch(kind, instr);
      out.args[static_cast<std::size_t>(payload.arg_index) + 1] = Operand::imm(0);
      return {RewriteResult::Kind::replace, std::move(out)};
    }
    case OperatorKind::FREE_FUNCTION_ARGUMENT: {
      if (instr.op != Opcode::call || payload.arg_index < 0 ||
          payload.arg_index + 1 >= static_cast<int>(instr.args.size()))
        mismatch(kind, instr);
      Instruction fr;
      fr.op = Opcode::free_;
      fr.dst = -1;
      fr.args = {instr.args[static_cast<std::size_t>(payload.arg_index) + 1]};
      fr.site = instr.site;
      return {RewriteResult::Kind::insert_before, std::move(fr)};
    }
    case OperatorKind::ALLOC_SIZE: {
      if (instr.op != Opcode::alloc || instr.args.size() != 1 || !instr.args[0].is_imm())
        mismatch(kind, instr);
      out.args[0] = Operand::imm(instr.args[0].value / 2);
      return {RewriteResult::Kind::replace, std::move(out)};
    }
    case OperatorKind::ALLOC_ZEROED_SIZE: {
      if (instr.op != Opcode::alloc_zeroed || !instr.args[0].is_imm()) mismatch(kind, instr);
      out.args[0] = Operand::imm(instr.args[0].value / 2);
      return {RewriteResult::Kind::replace, std::move(out)};
    }
    case OperatorKind::NEW_ARRAY_SIZE: {
      if (instr.op != Opcode::alloc || instr.args.size() != 2 || !instr.args[0].is_imm())
        mismatch(kind, instr);
      out.args[0] = Operand::imm(instr.args[0].value / 2);
      return {RewriteResult::Kind::replace, std::move(out)};
    }
    case OperatorKind::SIGNED_TO_UNSIGNED:
    case OperatorKind::UNSIGNED_TO_SIGNED: {
      auto swapped = signedness_swap(instr.op, kind == OperatorKind::SIGNED_TO_UNSIGNED);
      if (!swapped) mismatch(kind, instr);
      out.op = *swapped;
      return {RewriteResult::Kind::replace, std::move(out)};
    }
    case OperatorKind::CONST_OFFSET: {
      if (!cmp_has_imm_rhs(instr)) mismatch(kind, instr);
      out.args[1] = Operand::imm(instr.args[1].value + 16);
      return {RewriteResult::Kind::replace, std::move(out)};
    }
  }
  mismatch(kind, instr);
}

Program apply_mutations(const Program& p, const MutantSpec& spec,
                        const std::vector<MutationPoint>& points) {
  Program out = p;
  if (spec.empty()) return out;

  const std::vector<SiteRef> table = site_table(p);
  std::unordered_set<std::string> touched_functions;
  for (MutationId id : spec.ids) {
    if (id >= points.size() || points[id].id != id)
      throw std::invalid_argument("unknown mutation id " + std::to_string(id));
    const MutationPoint& mp = points[id];
    if (!touched_functions.insert(mp.function).second)
      throw std::invalid_argument("two mutations in function '" + mp.function +
                                  "' violate the per-function constraint");

    const SiteRef ref = table[mp.site];
    auto& insns = out.functions[ref.function].blocks[ref.block].insns;
    const Instruction original = insns[ref.index];
    RewriteResult rr = operator_rewrite(mp.op, original, mp.payload);
    switch (rr.kind) {
      case RewriteResult::Kind::replace:
        rr.instruction.site = original.site;
        insns[ref.index] = std::move(rr.instruction);
        break;
      case RewriteResult::Kind::remove: {
        Instruction nop;
        nop.op = Opcode::nop;
        nop.site = original.site;
        insns[ref.index] = std::move(nop);
        break;
      }
      case RewriteResult::Kind::insert_before:
        insns.insert(insns.begin() + ref.index, std::move(rr.instruction));
        break;
    }
  }
  return out;
}

Program apply_mutations(const Program& p, const MutantSpec& spec) {
  return apply_mutations(p, spec, find_mutations(p));
}

std::vector<std::pair<SiteId, MutationId>> site_map(
    const std::vector<MutationPoint>& points) {
  std::vector<std::pair<SiteId, MutationId>> out;
  out.reserve(points.size());
  for (const auto& mp : points) out.emplace_back(mp.site, mp.id);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<SiteId, MutationId>> site_map(
    const std::vector<MutationPoint>& points, const MutantSpec& spec) {
  std::vector<std::pair<SiteId, MutationId>> out;
  out.reserve(spec.ids.size());
  for (MutationId id : spec.ids) out.emplace_back(points[id].site, id);
  std::sort(out.begin(), out.end());
  return out;
}

std::string mutations_to_json(const Program& p, const std::vector<MutationPoint>& points) {
  std::vector<int> lines;
  serialize_program(p, lines);

  nlohmann::json arr = nlohmann::json::array();
  for (const auto& mp : points) {
    nlohmann::json payload;
    payload["variant"] = mp.payload.variant;
    payload["arg_index"] = mp.payload.arg_index;
    if (mp.payload.replacement) {
      payload["replacement"] = {
          {"kind", mp.payload.replacement->is_slot() ? "slot" : "imm"},
          {"value", mp.payload.replacement->value},
      };
    } else {
      payload["replacement"] = nullptr;
    }
    arr.push_back({
        {"id", mp.id},
        {"site", mp.site},
        {"function", mp.function},
        {"operator", std::string(operator_name(mp.op))},
        {"payload", payload},
        {"source_line", mp.site < lines.size() ? lines[mp.site] : 0},
    });
  }
  return arr.dump(2) + "\n";
}

}  // namespace mutbench
