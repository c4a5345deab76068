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

// Subject-program representation and its line-oriented text format (.mir).
//
// A program is a list of functions; each function a list of labeled basic
// blocks; each block a list of instructions ending in exactly one
// terminator. Values are raw 64-bit words held in per-frame slots; signed
// and unsigned interpretations are selected by the opcode. The full format
// and semantics are documented in docs/ir.md.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mutbench {

using SiteId = std::uint32_t;

enum class Opcode : std::uint8_t {
  add,
  sub,
  mul,
  div_s,
  div_u,
  rem,
  shl,
  shr,
  cmp_slt,
  cmp_sle,
  cmp_sgt,
  cmp_sge,
  cmp_ult,
  cmp_ule,
  cmp_ugt,
  cmp_uge,
  cmp_eq,
  cmp_ne,
  const_,
  cast_s2u,
  cast_u2s,
  load,
  store,
  store_local,
  alloc,
  alloc_zeroed,
  free_,
  call,
  br,
  br_cond,
  switch_,
  ret,
  abort_,
  read_input,
  write_output,
  // Coverage-preserving placeholder emitted by deletion-style mutation
  // operators; never produced by source programs' authors but a valid
  // instruction in the format.
  nop,
};

std::string_view opcode_name(Opcode op);
std::optional<Opcode> opcode_from_name(std::string_view name);

bool is_terminator(Opcode op);
bool is_comparison(Opcode op);

enum class ParamType : std::uint8_t { i64, u64, ptr };

std::string_view param_type_name(ParamType t);

// One instruction operand: a frame slot, an immediate, a block reference
// (branch target, resolved to a block index) or a function reference (call
// target, resolved to a function index).
struct Operand {
  enum class Kind : std::uint8_t { slot, imm, block, func };

  Kind kind = Kind::imm;
  std::int64_t value = 0;

  static Operand slot(std::int64_t i) { return {Kind::slot, i}; }
  static Operand imm(std::int64_t v) { return {Kind::imm, v}; }
  static Operand block(std::int64_t b) { return {Kind::block, b}; }
  static Operand func(std::int64_t f) { return {Kind::func, f}; }

  bool is_slot() const { return kind == Kind::slot; }
  bool is_imm() const { return kind == Kind::imm; }

  friend bool operator==(const Operand&, const Operand&) = default;
};

// site is a dense program-wide coordinate assigned in source order. Mutated
// programs keep the original sites of surviving instructions so that
// coverage can be attributed against the pristine enumeration.
struct Instruction {
  Opcode op = Opcode::nop;
  std::int32_t dst = -1;  // slot written by the instruction, -1 if none
  std::vector<Operand> args;
  SiteId site = 0;

  friend bool operator==(const Instruction&, const Instruction&) = default;
};

struct Block {
  std::string label;
  std::vector<Instruction> insns;

  friend bool operator==(const Block&, const Block&) = default;
};

struct Function {
  std::string name;
  std::vector<ParamType> params;
  std::uint32_t locals = 0;  // extra slots beyond the parameters
  std::vector<Block> blocks;

  std::size_t slot_count() const { return params.size() + locals; }

  friend bool operator==(const Function&, const Function&) = default;
};

struct Program {
  std::string name;
  std::vector<Function> functions;
  std::uint32_t entry = 0;       // index of the entry function ("main")
  std::size_t site_count = 0;    // dense sites are 0..site_count-1

  const Function& entry_function() const { return functions[entry]; }
  std::optional<std::uint32_t> find_function(std::string_view name) const;

  friend bool operator==(const Program&, const Program&) = default;
};

// Parse/validation failure. `line` and `column` are 1-based; column 0 means
// the error spans the whole line (semantic checks).
class IrError : public std::runtime_error {
 public:
  IrError(std::string message, int line, int column)
      : std::runtime_error(format(message, line, column)),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  static std::string format(const std::string& message, int line, int column);

  int line_;
  int column_;
};

// Parses and validates a textual program. Throws IrError on syntax errors
// (with line/column) and on semantic errors such as unknown call targets or
// duplicate labels.
Program parse_program(std::string_view text);

// Canonical text form. parse_program(serialize_program(p)) is structurally
// equal to p, and serialize . parse is a fixed point on its own output.
std::string serialize_program(const Program& p);

// Same, also reporting the 1-based line number of every site in the emitted
// text (indexed by site id).
std::string serialize_program(const Program& p, std::vector<int>& site_lines);

// Coordinates of one site inside a program.
struct SiteRef {
  std::uint32_t function = 0;
  std::uint32_t block = 0;
  std::uint32_t index = 0;
};

// Dense site -> instruction coordinates for a pristine program.
std::vector<SiteRef> site_table(const Program& p);

}  // namespace mutbench
