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

#include "mutbench/ir.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace mutbench {

namespace {

struct OpcodeInfo {
  Opcode op;
  std::string_view name;
};

constexpr std::array<OpcodeInfo, 36> kOpcodes = {{
    {Opcode::add, "add"},
    {Opcode::sub, "sub"},
    {Opcode::mul, "mul"},
    {Opcode::div_s, "div_s"},
    {Opcode::div_u, "div_u"},
    {Opcode::rem, "rem"},
    {Opcode::shl, "shl"},
    {Opcode::shr, "shr"},
    {Opcode::cmp_slt, "cmp_slt"},
    {Opcode::cmp_sle, "cmp_sle"},
    {Opcode::cmp_sgt, "cmp_sgt"},
    {Opcode::cmp_sge, "cmp_sge"},
    {Opcode::cmp_ult, "cmp_ult"},
    {Opcode::cmp_ule, "cmp_ule"},
    {Opcode::cmp_ugt, "cmp_ugt"},
    {Opcode::cmp_uge, "cmp_uge"},
    {Opcode::cmp_eq, "cmp_eq"},
    {Opcode::cmp_ne, "cmp_ne"},
    {Opcode::const_, "const"},
    {Opcode::cast_s2u, "cast_s2u"},
    {Opcode::cast_u2s, "cast_u2s"},
    {Opcode::load, "load"},
    {Opcode::store, "store"},
    {Opcode::store_local, "store_local"},
    {Opcode::alloc, "alloc"},
    {Opcode::alloc_zeroed, "alloc_zeroed"},
    {Opcode::free_, "free"},
    {Opcode::call, "call"},
    {Opcode::br, "br"},
    {Opcode::br_cond, "br_cond"},
    {Opcode::switch_, "switch"},
    {Opcode::ret, "ret"},
    {Opcode::abort_, "abort"},
    {Opcode::read_input, "read_input"},
    {Opcode::write_output, "write_output"},
    {Opcode::nop, "nop"},
}};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

struct Token {
  enum class Kind {
    ident,
    integer,
    slot,     // %N
    symbol,   // @name
    label,    // name:
    equals,
    lparen,
    rparen,
    comma,
    lbrace,
    rbrace,
  };
  Kind kind;
  std::string text;
  std::int64_t value = 0;
  int col = 0;
};

[[noreturn]] void fail(const std::string& msg, int line, int col = 0) {
  throw IrError(msg, line, col);
}

std::vector<Token> lex_line(std::string_view line, int line_no) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    int col = static_cast<int>(i) + 1;
    if (c == '#') break;  // comment to end of line
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    switch (c) {
      case '(': out.push_back({Token::Kind::lparen, "(", 0, col}); ++i; continue;
      case ')': out.push_back({Token::Kind::rparen, ")", 0, col}); ++i; continue;
      case ',': out.push_back({Token::Kind::comma, ",", 0, col}); ++i; continue;
      case '{': out.push_back({Token::Kind::lbrace, "{", 0, col}); ++i; continue;
      case '}': out.push_back({Token::Kind::rbrace, "}", 0, col}); ++i; continue;
      case '=': out.push_back({Token::Kind::equals, "=", 0, col}); ++i; continue;
      default: break;
    }
    if (c == '%') {
      std::size_t j = i + 1;
      while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
      if (j == i + 1) fail("expected slot index after '%'", line_no, col);
      std::int64_t v = 0;
      auto res = std::from_chars(line.data() + i + 1, line.data() + j, v);
      if (res.ec != std::errc()) fail("slot index out of range", line_no, col);
      out.push_back({Token::Kind::slot, std::string(line.substr(i, j - i)), v, col});
      i = j;
      continue;
    }
    if (c == '@') {
      std::size_t j = i + 1;
      if (j >= line.size() || !ident_start(line[j]))
        fail("expected identifier after '@'", line_no, col);
      while (j < line.size() && ident_char(line[j])) ++j;
      out.push_back({Token::Kind::symbol, std::string(line.substr(i + 1, j - i - 1)), 0, col});
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && i + 1 < line.size() &&
         std::isdigit(static_cast<unsigned char>(line[i + 1])))) {
      std::size_t j = i + (c == '-' ? 1 : 0);
      int base = 10;
      if (j + 1 < line.size() && line[j] == '0' && (line[j + 1] == 'x' || line[j + 1] == 'X')) {
        base = 16;
        j += 2;
      }
      std::size_t digits_start = j;
      while (j < line.size() &&
             (base == 16 ? std::isxdigit(static_cast<unsigned char>(line[j]))
                         : std::isdigit(static_cast<unsigned char>(line[j])))) {
        ++j;
      }
      if (j == digits_start) fail("malformed integer literal", line_no, col);
      std::int64_t v = 0;
      if (base == 16) {
        std::uint64_t u = 0;
        auto res = std::from_chars(line.data() + digits_start, line.data() + j, u, 16);
        if (res.ec != std::errc()) fail("integer literal out of range", line_no, col);
        v = static_cast<std::int64_t>(u);
        if (c == '-') v = -v;
      } else {
        auto res = std::from_chars(line.data() + i, line.data() + j, v, 10);
        if (res.ec != std::errc()) fail("integer literal out of range", line_no, col);
      }
      if (j < line.size() && ident_char(line[j]))
        fail("malformed integer literal", line_no, static_cast<int>(j) + 1);
      out.push_back({Token::Kind::integer, std::string(line.substr(i, j - i)), v, col});
      i = j;
      continue;
    }
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < line.size() && ident_char(line[j])) ++j;
      std::string text(line.substr(i, j - i));
      if (j < line.size() && line[j] == ':') {
        out.push_back({Token::Kind::label, text, 0, col});
        i = j + 1;
      } else {
        out.push_back({Token::Kind::ident, text, 0, col});
        i = j;
      }
      continue;
    }
    fail(std::string("unexpected character '") + c + "'", line_no, col);
  }
  return out;
}

// Operand kinds an opcode position may accept.
enum class Shape { value, imm_only, block, func };

struct InstrShape {
  bool dst_required = false;
  bool dst_allowed = false;
  std::vector<Shape> fixed;       // leading operand shapes
  // Trailing variable section: none, call args (values), or switch cases
  // (imm/block pairs).
  enum class Tail { none, call_args, switch_cases } tail = Tail::none;
  int min_fixed = -1;             // alloc accepts 1 or 2 fixed operands
};

InstrShape shape_of(Opcode op) {
  using S = Shape;
  using T = InstrShape::Tail;
  switch (op) {
    case Opcode::add:
    case Opcode::sub:
    case Opcode::mul:
    case Opcode::div_s:
    case Opcode::div_u:
    case Opcode::rem:
    case Opcode::shl:
    case Opcode::shr:
    case Opcode::cmp_slt:
    case Opcode::cmp_sle:
    case Opcode::cmp_sgt:
    case Opcode::cmp_sge:
    case Opcode::cmp_ult:
    case Opcode::cmp_ule:
    case Opcode::cmp_ugt:
    case Opcode::cmp_uge:
    case Opcode::cmp_eq:
    case Opcode::cmp_ne:
      return {true, true, {S::value, S::value}, T::none};
    case Opcode::const_:
      return {true, true, {S::imm_only}, T::none};
    case Opcode::cast_s2u:
    case Opcode::cast_u2s:
    case Opcode::read_input:
      return {true, true, {S::value}, T::none};
    case Opcode::load:
      return {true, true, {S::value, S::imm_only}, T::none};
    case Opcode::store:
      return {false, false, {S::value, S::value, S::imm_only}, T::none};
    case Opcode::store_local:
      // dst is written via the explicit first slot operand.
      return {false, false, {S::value}, T::none};
    case Opcode::alloc:
      return {true, true, {S::value, S::value}, T::none, 1};
    case Opcode::alloc_zeroed:
      return {true, true, {S::value, S::value}, T::none};
    case Opcode::free_:
      return {false, false, {S::value}, T::none};
    case Opcode::call:
      return {false, true, {S::func}, T::call_args};
    case Opcode::br:
      return {false, false, {S::block}, T::none};
    case Opcode::br_cond:
      return {false, false, {S::value, S::block, S::block}, T::none};
    case Opcode::switch_:
      return {false, false, {S::value, S::block}, T::switch_cases};
    case Opcode::ret:
      return {false, false, {S::value}, T::none};
    case Opcode::abort_:
    case Opcode::nop:
      return {false, false, {}, T::none};
    case Opcode::write_output:
      return {false, false, {S::value}, T::none};
  }
  return {};
}

// Instruction with unresolved @symbols, as parsed.
struct RawOperand {
  enum class Kind { slot, imm, symbol } kind;
  std::int64_t value = 0;
  std::string symbol;
  int col = 0;
};

struct RawInstr {
  Opcode op;
  std::int32_t dst = -1;
  std::vector<RawOperand> ops;
  int line = 0;
};

struct RawBlock {
  std::string label;
  std::vector<RawInstr> insns;
  int line = 0;
};

struct RawFunction {
  std::string name;
  std::vector<ParamType> params;
  std::uint32_t locals = 0;
  std::vector<RawBlock> blocks;
  int line = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Program run() {
    parse_lines();
    return resolve();
  }

 private:
  void parse_lines() {
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text_.size()) {
      std::size_t eol = text_.find('\n', pos);
      std::string_view line = (eol == std::string_view::npos)
                                  ? text_.substr(pos)
                                  : text_.substr(pos, eol - pos);
      ++line_no;
      handle_line(line, line_no);
      if (eol == std::string_view::npos) break;
      pos = eol + 1;
    }
    if (in_function_) fail("unterminated function '" + current_.name + "'", line_no);
  }

  void handle_line(std::string_view line, int line_no) {
    auto toks = lex_line(line, line_no);
    if (toks.empty()) return;
    const Token& head = toks[0];
    if (head.kind == Token::Kind::ident && head.text == "program" && !in_function_) {
      if (toks.size() != 2 || toks[1].kind != Token::Kind::ident)
        fail("expected 'program <name>'", line_no, head.col);
      if (!program_name_.empty()) fail("duplicate program header", line_no, head.col);
      program_name_ = toks[1].text;
      return;
    }
    if (head.kind == Token::Kind::ident && head.text == "fn") {
      if (in_function_) fail("nested function definition", line_no, head.col);
      parse_fn_header(toks, line_no);
      return;
    }
    if (head.kind == Token::Kind::rbrace) {
      if (!in_function_) fail("'}' outside function", line_no, head.col);
      if (toks.size() != 1) fail("unexpected tokens after '}'", line_no, toks[1].col);
      close_function(line_no);
      return;
    }
    if (!in_function_) fail("instruction outside function", line_no, head.col);
    if (head.kind == Token::Kind::label) {
      if (toks.size() != 1) fail("unexpected tokens after label", line_no, toks[1].col);
      start_block(head.text, line_no);
      return;
    }
    parse_instruction(toks, line_no);
  }

  void parse_fn_header(const std::vector<Token>& toks, int line_no) {
    std::size_t i = 1;
    if (i >= toks.size() || toks[i].kind != Token::Kind::ident)
      fail("expected function name after 'fn'", line_no);
    current_ = RawFunction{};
    current_.name = toks[i].text;
    current_.line = line_no;
    ++i;
    if (i < toks.size() && toks[i].kind == Token::Kind::lparen) {
      ++i;
      bool first = true;
      while (i < toks.size() && toks[i].kind != Token::Kind::rparen) {
        if (!first) {
          if (toks[i].kind != Token::Kind::comma)
            fail("expected ',' between parameters", line_no, toks[i].col);
          ++i;
          if (i >= toks.size()) break;
        }
        first = false;
        // Accept "type" or "name: type".
        std::string type_text;
        if (toks[i].kind == Token::Kind::label) {
          ++i;
          if (i >= toks.size() || toks[i].kind != Token::Kind::ident)
            fail("expected parameter type", line_no);
          type_text = toks[i].text;
          ++i;
        } else if (toks[i].kind == Token::Kind::ident) {
          type_text = toks[i].text;
          ++i;
        } else {
          fail("expected parameter", line_no, toks[i].col);
        }
        if (type_text == "i64") current_.params.push_back(ParamType::i64);
        else if (type_text == "u64") current_.params.push_back(ParamType::u64);
        else if (type_text == "ptr") current_.params.push_back(ParamType::ptr);
        else fail("unknown parameter type '" + type_text + "'", line_no);
      }
      if (i >= toks.size() || toks[i].kind != Token::Kind::rparen)
        fail("missing ')' in function header", line_no);
      ++i;
    }
    if (i < toks.size() && toks[i].kind == Token::Kind::ident && toks[i].text == "locals") {
      ++i;
      if (i >= toks.size() || toks[i].kind != Token::Kind::integer || toks[i].value < 0)
        fail("expected local-slot count after 'locals'", line_no);
      current_.locals = static_cast<std::uint32_t>(toks[i].value);
      ++i;
    }
    if (i >= toks.size() || toks[i].kind != Token::Kind::lbrace)
      fail("expected '{' at end of function header", line_no);
    if (i + 1 != toks.size()) fail("unexpected tokens after '{'", line_no, toks[i + 1].col);
    in_function_ = true;
  }

  void start_block(const std::string& label, int line_no) {
    if (!current_.blocks.empty() && current_.blocks.back().insns.empty())
      fail("empty block '" + current_.blocks.back().label + "'", line_no);
    current_.blocks.push_back(RawBlock{label, {}, line_no});
  }

  void close_function(int line_no) {
    if (current_.blocks.empty())
      fail("function '" + current_.name + "' has no blocks", line_no);
    if (current_.blocks.back().insns.empty())
      fail("empty block '" + current_.blocks.back().label + "'", line_no);
    functions_.push_back(std::move(current_));
    in_function_ = false;
  }

  void parse_instruction(const std::vector<Token>& toks, int line_no) {
    if (current_.blocks.empty()) current_.blocks.push_back(RawBlock{"entry", {}, line_no});

    RawInstr ins;
    ins.line = line_no;
    std::size_t i = 0;
    if (toks[0].kind == Token::Kind::slot && toks.size() > 1 &&
        toks[1].kind == Token::Kind::equals) {
      ins.dst = static_cast<std::int32_t>(toks[0].value);
      i = 2;
    }
    if (i >= toks.size() || toks[i].kind != Token::Kind::ident)
      fail("expected opcode", line_no, i < toks.size() ? toks[i].col : 0);
    auto op = opcode_from_name(toks[i].text);
    if (!op) fail("unknown opcode '" + toks[i].text + "'", line_no, toks[i].col);
    ins.op = *op;
    ++i;

    // store_local writes through an explicit leading slot operand.
    if (ins.op == Opcode::store_local) {
      if (ins.dst >= 0) fail("store_local does not take '='", line_no);
      if (i >= toks.size() || toks[i].kind != Token::Kind::slot)
        fail("store_local expects a destination slot", line_no);
      ins.dst = static_cast<std::int32_t>(toks[i].value);
      ++i;
    }

    for (; i < toks.size(); ++i) {
      const Token& t = toks[i];
      RawOperand o;
      o.col = t.col;
      switch (t.kind) {
        case Token::Kind::slot:
          o.kind = RawOperand::Kind::slot;
          o.value = t.value;
          break;
        case Token::Kind::integer:
          o.kind = RawOperand::Kind::imm;
          o.value = t.value;
          break;
        case Token::Kind::symbol:
          o.kind = RawOperand::Kind::symbol;
          o.symbol = t.text;
          break;
        default:
          fail("unexpected token '" + t.text + "' in instruction", line_no, t.col);
      }
      ins.ops.push_back(std::move(o));
    }
    current_.blocks.back().insns.push_back(std::move(ins));
  }

  Program resolve() {
    Program p;
    p.name = program_name_.empty() ? "main" : program_name_;

    std::unordered_map<std::string, std::uint32_t> fn_index;
    for (std::size_t f = 0; f < functions_.size(); ++f) {
      auto [it, inserted] = fn_index.emplace(functions_[f].name, static_cast<std::uint32_t>(f));
      if (!inserted)
        fail("duplicate function '" + functions_[f].name + "'", functions_[f].line);
    }
    auto main_it = fn_index.find("main");
    if (main_it == fn_index.end()) fail("no entry function", 1);
    p.entry = main_it->second;

    SiteId next_site = 0;
    for (auto& rf : functions_) {
      Function fn;
      fn.name = rf.name;
      fn.params = rf.params;
      fn.locals = rf.locals;
      const std::size_t slots = fn.slot_count();

      std::unordered_map<std::string, std::uint32_t> labels;
      for (std::size_t b = 0; b < rf.blocks.size(); ++b) {
        auto [it, inserted] = labels.emplace(rf.blocks[b].label, static_cast<std::uint32_t>(b));
        if (!inserted)
          fail("duplicate label '" + rf.blocks[b].label + "' in function '" + rf.name + "'",
               rf.blocks[b].line);
      }

      for (auto& rb : rf.blocks) {
        Block block;
        block.label = rb.label;
        for (std::size_t k = 0; k < rb.insns.size(); ++k) {
          const RawInstr& ri = rb.insns[k];
          const bool last = (k + 1 == rb.insns.size());
          if (is_terminator(ri.op) && !last)
            fail("terminator before end of block '" + rb.label + "'", ri.line);
          if (last && !is_terminator(ri.op))
            fail("block '" + rb.label + "' does not end in a terminator", ri.line);
          block.insns.push_back(
              resolve_instr(ri, rf, slots, labels, fn_index, next_site++));
        }
        fn.blocks.push_back(std::move(block));
      }
      p.functions.push_back(std::move(fn));
    }
    p.site_count = next_site;

    // Call arity depends on every function being resolved first.
    for (const auto& fn : p.functions) {
      for (const auto& block : fn.blocks) {
        for (const auto& ins : block.insns) {
          if (ins.op != Opcode::call) continue;
          const auto& callee = p.functions[static_cast<std::size_t>(ins.args[0].value)];
          if (ins.args.size() - 1 != callee.params.size())
            fail("call to '" + callee.name + "' passes " +
                     std::to_string(ins.args.size() - 1) + " arguments, expected " +
                     std::to_string(callee.params.size()),
                 line_of_site(ins.site));
        }
      }
    }
    return p;
  }

  int line_of_site(SiteId site) const {
    SiteId s = 0;
    for (const auto& rf : functions_)
      for (const auto& rb : rf.blocks)
        for (const auto& ri : rb.insns)
          if (s++ == site) return ri.line;
    return 0;
  }

  Instruction resolve_instr(const RawInstr& ri, const RawFunction& rf, std::size_t slots,
                            const std::unordered_map<std::string, std::uint32_t>& labels,
                            const std::unordered_map<std::string, std::uint32_t>& fns,
                            SiteId site) {
    const InstrShape shape = shape_of(ri.op);
    Instruction ins;
    ins.op = ri.op;
    ins.dst = ri.dst;
    ins.site = site;

    if (ri.op == Opcode::store_local) {
      if (ins.dst < 0 || static_cast<std::size_t>(ins.dst) >= slots)
        fail("slot %" + std::to_string(ins.dst) + " out of range", ri.line);
    } else if (shape.dst_required && ins.dst < 0) {
      fail(std::string(opcode_name(ri.op)) + " requires a destination slot", ri.line);
    } else if (!shape.dst_allowed && ins.dst >= 0) {
      fail(std::string(opcode_name(ri.op)) + " does not produce a value", ri.line);
    }
    if (ins.dst >= 0 && ri.op != Opcode::store_local &&
        static_cast<std::size_t>(ins.dst) >= slots)
      fail("slot %" + std::to_string(ins.dst) + " out of range", ri.line);

    std::size_t n_fixed = shape.fixed.size();
    if (shape.min_fixed >= 0) {
      if (ri.ops.size() < static_cast<std::size_t>(shape.min_fixed) ||
          ri.ops.size() > n_fixed)
        fail(std::string(opcode_name(ri.op)) + ": wrong operand count", ri.line);
      n_fixed = ri.ops.size();
    } else if (shape.tail == InstrShape::Tail::none) {
      if (ri.ops.size() != n_fixed)
        fail(std::string(opcode_name(ri.op)) + ": wrong operand count", ri.line);
    } else if (ri.ops.size() < n_fixed) {
      fail(std::string(opcode_name(ri.op)) + ": wrong operand count", ri.line);
    }

    auto resolve_one = [&](const RawOperand& ro, Shape want) -> Operand {
      switch (want) {
        case Shape::value:
          if (ro.kind == RawOperand::Kind::slot) {
            if (static_cast<std::size_t>(ro.value) >= slots)
              fail("slot %" + std::to_string(ro.value) + " out of range", ri.line, ro.col);
            return Operand::slot(ro.value);
          }
          if (ro.kind == RawOperand::Kind::imm) return Operand::imm(ro.value);
          fail("expected value operand", ri.line, ro.col);
        case Shape::imm_only:
          if (ro.kind != RawOperand::Kind::imm)
            fail("expected immediate operand", ri.line, ro.col);
          return Operand::imm(ro.value);
        case Shape::block: {
          if (ro.kind != RawOperand::Kind::symbol)
            fail("expected @label operand", ri.line, ro.col);
          auto it = labels.find(ro.symbol);
          if (it == labels.end())
            fail("unknown label '" + ro.symbol + "' in function '" + rf.name + "'", ri.line,
                 ro.col);
          return Operand::block(it->second);
        }
        case Shape::func: {
          if (ro.kind != RawOperand::Kind::symbol)
            fail("expected @function operand", ri.line, ro.col);
          auto it = fns.find(ro.symbol);
          if (it == fns.end())
            fail("unknown call target '" + ro.symbol + "'", ri.line, ro.col);
          return Operand::func(it->second);
        }
      }
      fail("bad operand", ri.line, ro.col);
    };

    for (std::size_t k = 0; k < n_fixed; ++k)
      ins.args.push_back(resolve_one(ri.ops[k], shape.fixed[k]));

    if (shape.tail == InstrShape::Tail::call_args) {
      for (std::size_t k = n_fixed; k < ri.ops.size(); ++k)
        ins.args.push_back(resolve_one(ri.ops[k], Shape::value));
    } else if (shape.tail == InstrShape::Tail::switch_cases) {
      if ((ri.ops.size() - n_fixed) % 2 != 0)
        fail("switch: cases must be <value> @label pairs", ri.line);
      for (std::size_t k = n_fixed; k < ri.ops.size(); k += 2) {
        ins.args.push_back(resolve_one(ri.ops[k], Shape::imm_only));
        ins.args.push_back(resolve_one(ri.ops[k + 1], Shape::block));
      }
    }

    if (ri.op == Opcode::load) {
      std::int64_t w = ins.args[1].value;
      if (w != 1 && w != 2 && w != 4 && w != 8) fail("load: width must be 1, 2, 4 or 8", ri.line);
    }
    if (ri.op == Opcode::store) {
      std::int64_t w = ins.args[2].value;
      if (w != 1 && w != 2 && w != 4 && w != 8) fail("store: width must be 1, 2, 4 or 8", ri.line);
    }
    return ins;
  }

  std::string_view text_;
  std::string program_name_;
  std::vector<RawFunction> functions_;
  RawFunction current_;
  bool in_function_ = false;
};

void write_operand(std::ostringstream& os, const Program& p, const Function& fn,
                   const Operand& o) {
  switch (o.kind) {
    case Operand::Kind::slot: os << '%' << o.value; break;
    case Operand::Kind::imm: os << o.value; break;
    case Operand::Kind::block: os << '@' << fn.blocks[static_cast<std::size_t>(o.value)].label; break;
    case Operand::Kind::func: os << '@' << p.functions[static_cast<std::size_t>(o.value)].name; break;
  }
}

void write_instruction(std::ostringstream& os, const Program& p, const Function& fn,
                       const Instruction& ins) {
  os << "  ";
  if (ins.op == Opcode::store_local) {
    os << "store_local %" << ins.dst;
    for (const auto& a : ins.args) {
      os << ' ';
      write_operand(os, p, fn, a);
    }
    os << '\n';
    return;
  }
  if (ins.dst >= 0) os << '%' << ins.dst << " = ";
  os << opcode_name(ins.op);
  for (const auto& a : ins.args) {
    os << ' ';
    write_operand(os, p, fn, a);
  }
  os << '\n';
}

}  // namespace

std::string_view opcode_name(Opcode op) {
  for (const auto& info : kOpcodes)
    if (info.op == op) return info.name;
  return "?";
}

std::optional<Opcode> opcode_from_name(std::string_view name) {
  for (const auto& info : kOpcodes)
    if (info.name == name) return info.op;
  return std::nullopt;
}

bool is_terminator(Opcode op) {
  switch (op) {
    case Opcode::br:
    case Opcode::br_cond:
    case Opcode::switch_:
    case Opcode::ret:
    case Opcode::abort_:
      return true;
    default:
      return false;
  }
}

bool is_comparison(Opcode op) {
  switch (op) {
    case Opcode::cmp_slt:
    case Opcode::cmp_sle:
    case Opcode::cmp_sgt:
    case Opcode::cmp_sge:
    case Opcode::cmp_ult:
    case Opcode::cmp_ule:
    case Opcode::cmp_ugt:
    case Opcode::cmp_uge:
    case Opcode::cmp_eq:
    case Opcode::cmp_ne:
      return true;
    default:
      return false;
  }
}

std::string_view param_type_name(ParamType t) {
  switch (t) {
    case ParamType::i64: return "i64";
    case ParamType::u64: return "u64";
    case ParamType::ptr: return "ptr";
  }
  return "?";
}

std::optional<std::uint32_t> Program::find_function(std::string_view name) const {
  for (std::size_t i = 0; i < functions.size(); ++i)
    if (functions[i].name == name) return static_cast<std::uint32_t>(i);
  return std::nullopt;
}

std::string IrError::format(const std::string& message, int line, int column) {
  std::ostringstream os;
  os << "line " << line;
  if (column > 0) os << ", col " << column;
  os << ": " << message;
  return os.str();
}

Program parse_program(std::string_view text) { return Parser(text).run(); }

std::string serialize_program(const Program& p, std::vector<int>& site_lines) {
  std::ostringstream os;
  site_lines.clear();
  int line = 1;
  os << "program " << p.name << '\n';
  ++line;
  for (const auto& fn : p.functions) {
    os << '\n';
    ++line;
    os << "fn " << fn.name << '(';
    for (std::size_t i = 0; i < fn.params.size(); ++i) {
      if (i) os << ", ";
      os << param_type_name(fn.params[i]);
    }
    os << ") locals " << fn.locals << " {\n";
    ++line;
    for (const auto& block : fn.blocks) {
      os << block.label << ":\n";
      ++line;
      for (const auto& ins : block.insns) {
        if (ins.site >= site_lines.size()) site_lines.resize(ins.site + 1, 0);
        site_lines[ins.site] = line;
        write_instruction(os, p, fn, ins);
        ++line;
      }
    }
    os << "}\n";
    ++line;
  }
  return os.str();
}

std::string serialize_program(const Program& p) {
  std::vector<int> lines;
  return serialize_program(p, lines);
}

std::vector<SiteRef> site_table(const Program& p) {
  std::vector<SiteRef> table(p.site_count);
  for (std::uint32_t f = 0; f < p.functions.size(); ++f) {
    const Function& fn = p.functions[f];
    for (std::uint32_t b = 0; b < fn.blocks.size(); ++b) {
      const Block& block = fn.blocks[b];
      for (std::uint32_t i = 0; i < block.insns.size(); ++i) {
        const Instruction& ins = block.insns[i];
        if (ins.site < table.size()) table[ins.site] = SiteRef{f, b, i};
      }
    }
  }
  return table;
}

}  // namespace mutbench
