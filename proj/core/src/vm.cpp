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

#include "mutbench/vm.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace mutbench {

namespace {

// Bump allocator with per-object bounds metadata. Regions are 16-byte
// buckets separated by 16-byte gaps, so any access past a region lands in
// unmapped space and traps in every mode; accesses inside the region but
// past the object are the sanitizer-only cases.
constexpr std::uint64_t kHeapBase = 0x10000;
constexpr std::uint64_t kRegionGap = 16;
constexpr std::uint64_t kTotalHeapCap = 64ull << 20;

std::uint8_t unspecified_byte(std::uint32_t alloc_seq, std::uint64_t offset) {
  std::uint64_t z = (static_cast<std::uint64_t>(alloc_seq) << 32) ^ offset;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return static_cast<std::uint8_t>(z >> 56);
}

struct Allocation {
  std::uint64_t base = 0;
  std::uint64_t object = 0;  // requested size
  std::uint64_t region = 0;  // rounded-up backing size
  bool freed = false;
  std::vector<std::uint8_t> bytes;  // region-sized backing store
};

class Vm {
 public:
  Vm(const Program& p, const BuildMode& build, std::span<const std::uint8_t> input,
     const ExecLimits& limits)
      : p_(p),
        build_(build),
        input_(input),
        limits_(limits),
        covered_((p.site_count + 63) / 64, 0) {}

  ExecOutcome run() {
    push_entry_frame();
    if (!trap_) loop();
    return finish();
  }

 private:
  struct Frame {
    std::uint32_t fn = 0;
    std::uint32_t block = 0;
    std::uint32_t ip = 0;
    std::int32_t ret_dst = -1;
    std::vector<std::uint64_t> slots;
  };

  void push_entry_frame() {
    const Function& fn = p_.entry_function();
    Frame fr;
    fr.fn = p_.entry;
    fr.slots.assign(fn.slot_count(), 0);
    if (!fn.params.empty()) fr.slots[0] = input_.size();
    charge_frame(fr);
    if (!trap_) stack_.push_back(std::move(fr));
  }

  void charge_frame(const Frame& fr) {
    const std::uint64_t bytes = fr.slots.size() * 8;
    if (live_bytes_ + bytes > limits_.max_heap) {
      trap_ = TrapKind::heap_limit;
      return;
    }
    live_bytes_ += bytes;
  }

  void refund_frame(const Frame& fr) { live_bytes_ -= fr.slots.size() * 8; }

  std::uint64_t value(const Frame& fr, const Operand& o) const {
    return o.is_slot() ? fr.slots[static_cast<std::size_t>(o.value)]
                       : static_cast<std::uint64_t>(o.value);
  }

  void cover(SiteId site) { covered_[site >> 6] |= 1ull << (site & 63); }

  void edge(SiteId from, SiteId to) {
    if (record_edges_) edges_.insert((static_cast<std::uint64_t>(from) << 32) | to);
  }

  void cmp_progress(SiteId site, std::uint64_t a, std::uint64_t b) {
    if (!record_edges_) return;
    const std::uint64_t x = a ^ b;
    const std::uint32_t k =
        x == 0 ? 8 : static_cast<std::uint32_t>(__builtin_ctzll(x)) / 8;
    edges_.insert((static_cast<std::uint64_t>(site) << 32) | (kPseudoEdgeBase | k));
  }

  SiteId block_head(std::uint32_t fn, std::uint32_t block) const {
    return p_.functions[fn].blocks[block].insns.front().site;
  }

  // Memory access helpers. They return false after setting trap_.
  Allocation* find_alloc(std::uint64_t addr) {
    // Allocations are sorted by base; find the last base <= addr.
    std::size_t lo = 0, hi = heap_.size();
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (heap_[mid].base <= addr) lo = mid + 1;
      else hi = mid;
    }
    if (lo == 0) return nullptr;
    Allocation& a = heap_[lo - 1];
    if (addr >= a.base + a.region) return nullptr;
    return &a;
  }

  bool read_byte(std::uint64_t addr, std::uint8_t& out) {
    Allocation* a = find_alloc(addr);
    if (!a) {
      trap_ = TrapKind::oob_read;
      return false;
    }
    const std::uint64_t off = addr - a->base;
    if (build_.sanitize && (a->freed || off >= a->object)) {
      trap_ = TrapKind::oob_read;
      return false;
    }
    out = a->bytes[off];
    return true;
  }

  bool write_byte(std::uint64_t addr, std::uint8_t v) {
    Allocation* a = find_alloc(addr);
    if (!a) {
      trap_ = TrapKind::oob_write;
      return false;
    }
    const std::uint64_t off = addr - a->base;
    if (build_.sanitize && (a->freed || off >= a->object)) {
      trap_ = TrapKind::oob_write;
      return false;
    }
    a->bytes[off] = v;
    return true;
  }

  std::uint64_t do_alloc(std::uint64_t size, bool zeroed) {
    const std::uint64_t region = std::max<std::uint64_t>(16, (size + 15) & ~15ull);
    if (live_bytes_ + region > limits_.max_heap ||
        total_bytes_ + region > kTotalHeapCap) {
      trap_ = TrapKind::heap_limit;
      return 0;
    }
    live_bytes_ += region;
    total_bytes_ += region;
    Allocation a;
    a.base = next_base_;
    a.object = size;
    a.region = region;
    a.bytes.resize(region);
    const auto seq = static_cast<std::uint32_t>(heap_.size());
    for (std::uint64_t i = 0; i < region; ++i)
      a.bytes[i] = (zeroed && i < size) ? 0 : unspecified_byte(seq, i);
    next_base_ += region + kRegionGap;
    heap_.push_back(std::move(a));
    return heap_.back().base;
  }

  void do_free(std::uint64_t addr) {
    if (addr == 0) return;  // freeing null is a no-op
    Allocation* a = find_alloc(addr);
    if (!a || a->base != addr) {
      trap_ = TrapKind::invalid_free;
      return;
    }
    if (a->freed) {
      trap_ = TrapKind::double_free;
      return;
    }
    a->freed = true;
    live_bytes_ -= a->region;
  }

  void loop() {
    while (!trap_ && !exited_) {
      Frame& fr = stack_.back();
      const Function& fn = p_.functions[fr.fn];
      const Instruction& ins = fn.blocks[fr.block].insns[fr.ip];
      if (steps_ >= limits_.max_steps) {
        trap_ = TrapKind::step_limit;
        return;
      }
      ++steps_;
      cover(ins.site);
      step(fr, ins);
    }
  }

  void step(Frame& fr, const Instruction& ins) {
    const SiteId site = ins.site;
    auto val = [&](std::size_t i) { return value(fr, ins.args[i]); };
    auto set_dst = [&](std::uint64_t v) {
      if (ins.dst >= 0) fr.slots[static_cast<std::size_t>(ins.dst)] = v;
    };
    auto go = [&](std::uint32_t block) {
      edge(site, block_head(fr.fn, block));
      fr.block = block;
      fr.ip = 0;
    };

    switch (ins.op) {
      case Opcode::add: set_dst(val(0) + val(1)); break;
      case Opcode::sub: set_dst(val(0) - val(1)); break;
      case Opcode::mul: set_dst(val(0) * val(1)); break;
      case Opcode::div_s: {
        const auto a = static_cast<std::int64_t>(val(0));
        const auto b = static_cast<std::int64_t>(val(1));
        if (b == 0) {
          trap_ = TrapKind::div_zero;
          return;
        }
        if (a == INT64_MIN && b == -1) set_dst(static_cast<std::uint64_t>(a));
        else set_dst(static_cast<std::uint64_t>(a / b));
        break;
      }
      case Opcode::div_u: {
        const std::uint64_t b = val(1);
        if (b == 0) {
          trap_ = TrapKind::div_zero;
          return;
        }
        set_dst(val(0) / b);
        break;
      }
      case Opcode::rem: {
        const std::uint64_t b = val(1);
        if (b == 0) {
          trap_ = TrapKind::div_zero;
          return;
        }
        set_dst(val(0) % b);
        break;
      }
      case Opcode::shl: set_dst(val(0) << (val(1) & 63)); break;
      case Opcode::shr: set_dst(val(0) >> (val(1) & 63)); break;
      case Opcode::cmp_slt:
      case Opcode::cmp_sle:
      case Opcode::cmp_sgt:
      case Opcode::cmp_sge:
      case Opcode::cmp_ult:
      case Opcode::cmp_ule:
      case Opcode::cmp_ugt:
      case Opcode::cmp_uge:
      case Opcode::cmp_eq:
      case Opcode::cmp_ne: {
        const std::uint64_t a = val(0), b = val(1);
        cmp_progress(site, a, b);
        const auto sa = static_cast<std::int64_t>(a);
        const auto sb = static_cast<std::int64_t>(b);
        bool r = false;
        switch (ins.op) {
          case Opcode::cmp_slt: r = sa < sb; break;
          case Opcode::cmp_sle: r = sa <= sb; break;
          case Opcode::cmp_sgt: r = sa > sb; break;
          case Opcode::cmp_sge: r = sa >= sb; break;
          case Opcode::cmp_ult: r = a < b; break;
          case Opcode::cmp_ule: r = a <= b; break;
          case Opcode::cmp_ugt: r = a > b; break;
          case Opcode::cmp_uge: r = a >= b; break;
          case Opcode::cmp_eq: r = a == b; break;
          default: r = a != b; break;
        }
        set_dst(r ? 1 : 0);
        break;
      }
      case Opcode::const_: set_dst(static_cast<std::uint64_t>(ins.args[0].value)); break;
      case Opcode::cast_s2u:
        // Widen the low 32 bits as a signed value (int32 -> 64-bit).
        set_dst(static_cast<std::uint64_t>(
            static_cast<std::int64_t>(static_cast<std::int32_t>(val(0) & 0xffffffffu))));
        break;
      case Opcode::cast_u2s:
        // Widen the low 32 bits as an unsigned value (uint32 -> 64-bit).
        set_dst(static_cast<std::uint64_t>(static_cast<std::uint32_t>(val(0) & 0xffffffffu)));
        break;
      case Opcode::load: {
        const std::uint64_t addr = val(0);
        const auto width = static_cast<std::uint64_t>(ins.args[1].value);
        std::uint64_t v = 0;
        for (std::uint64_t i = 0; i < width; ++i) {
          std::uint8_t byte = 0;
          if (!read_byte(addr + i, byte)) return;
          v |= static_cast<std::uint64_t>(byte) << (8 * i);
        }
        set_dst(v);
        break;
      }
      case Opcode::store: {
        const std::uint64_t addr = val(0);
        const std::uint64_t v = val(1);
        const auto width = static_cast<std::uint64_t>(ins.args[2].value);
        for (std::uint64_t i = 0; i < width; ++i)
          if (!write_byte(addr + i, static_cast<std::uint8_t>(v >> (8 * i)))) return;
        break;
      }
      case Opcode::store_local:
        fr.slots[static_cast<std::size_t>(ins.dst)] = val(0);
        break;
      case Opcode::alloc: {
        const std::uint64_t size =
            ins.args.size() == 2 ? val(0) * val(1) : val(0);
        const std::uint64_t base = do_alloc(size, /*zeroed=*/false);
        if (trap_) return;
        set_dst(base);
        break;
      }
      case Opcode::alloc_zeroed: {
        const std::uint64_t base = do_alloc(val(0) * val(1), /*zeroed=*/true);
        if (trap_) return;
        set_dst(base);
        break;
      }
      case Opcode::free_:
        do_free(val(0));
        if (trap_) return;
        break;
      case Opcode::call: {
        const auto callee_idx = static_cast<std::uint32_t>(ins.args[0].value);
        const Function& callee = p_.functions[callee_idx];
        Frame next;
        next.fn = callee_idx;
        next.ret_dst = ins.dst;
        next.slots.assign(callee.slot_count(), 0);
        for (std::size_t i = 1; i < ins.args.size(); ++i) next.slots[i - 1] = val(i);
        charge_frame(next);
        if (trap_) return;
        edge(site, block_head(callee_idx, 0));
        ++fr.ip;  // resume after the call
        stack_.push_back(std::move(next));  // invalidates fr
        return;
      }
      case Opcode::br:
        go(static_cast<std::uint32_t>(ins.args[0].value));
        return;
      case Opcode::br_cond:
        go(static_cast<std::uint32_t>(val(0) != 0 ? ins.args[1].value : ins.args[2].value));
        return;
      case Opcode::switch_: {
        const std::uint64_t v = val(0);
        std::uint32_t target = static_cast<std::uint32_t>(ins.args[1].value);
        std::uint32_t best = 0;
        bool any_case = ins.args.size() > 2;
        for (std::size_t i = 2; i + 1 < ins.args.size(); i += 2) {
          const auto key = static_cast<std::uint64_t>(ins.args[i].value);
          const std::uint64_t x = v ^ key;
          const std::uint32_t k =
              x == 0 ? 8 : static_cast<std::uint32_t>(__builtin_ctzll(x)) / 8;
          best = std::max(best, k);
          if (v == key) {
            target = static_cast<std::uint32_t>(ins.args[i + 1].value);
            break;
          }
        }
        if (record_edges_ && any_case)
          edges_.insert((static_cast<std::uint64_t>(site) << 32) | (kPseudoEdgeBase | best));
        go(target);
        return;
      }
      case Opcode::ret: {
        const std::uint64_t v = val(0);
        const std::int32_t dst = fr.ret_dst;
        refund_frame(fr);
        stack_.pop_back();
        if (stack_.empty()) {
          exited_ = true;
          exit_code_ = static_cast<int>(v & 0x7f);
          return;
        }
        if (dst >= 0) stack_.back().slots[static_cast<std::size_t>(dst)] = v;
        return;
      }
      case Opcode::abort_:
        trap_ = TrapKind::explicit_abort;
        return;
      case Opcode::read_input: {
        const std::uint64_t idx = val(0);
        set_dst(idx < input_.size() ? input_[idx] : ~0ull);
        break;
      }
      case Opcode::write_output:
        if (output_.size() < limits_.max_output)
          output_.push_back(static_cast<std::uint8_t>(val(0) & 0xff));
        break;
      case Opcode::nop:
        break;
    }
    ++fr.ip;
  }

  ExecOutcome finish() {
    ExecOutcome out;
    out.status = trap_ ? ExecStatus::trapped(*trap_) : ExecStatus::exited(exit_code_);
    out.output = std::move(output_);
    out.steps = steps_;
    for (SiteId s = 0; s < p_.site_count; ++s)
      if (covered_[s >> 6] & (1ull << (s & 63))) out.covered_sites.push_back(s);
    if (build_.wants_mutations()) {
      for (const auto& [site, id] : build_.site_mutations)
        if (site < p_.site_count && (covered_[site >> 6] & (1ull << (site & 63))))
          out.covered_mutations.push_back(id);
      std::sort(out.covered_mutations.begin(), out.covered_mutations.end());
      out.covered_mutations.erase(
          std::unique(out.covered_mutations.begin(), out.covered_mutations.end()),
          out.covered_mutations.end());
    }
    if (record_edges_) {
      out.covered_edges.reserve(edges_.size());
      for (std::uint64_t e : edges_)
        out.covered_edges.push_back(
            Edge{static_cast<SiteId>(e >> 32), static_cast<SiteId>(e & 0xffffffffu)});
      std::sort(out.covered_edges.begin(), out.covered_edges.end());
    }
    return out;
  }

  const Program& p_;
  const BuildMode& build_;
  std::span<const std::uint8_t> input_;
  const ExecLimits& limits_;
  const bool record_edges_ = build_.wants_edges();

  std::vector<Frame> stack_;
  std::vector<Allocation> heap_;
  std::uint64_t next_base_ = kHeapBase;
  std::uint64_t live_bytes_ = 0;
  std::uint64_t total_bytes_ = 0;
  std::vector<std::uint64_t> covered_;
  std::unordered_set<std::uint64_t> edges_;
  std::vector<std::uint8_t> output_;
  std::uint64_t steps_ = 0;
  std::optional<TrapKind> trap_;
  bool exited_ = false;
  int exit_code_ = 0;
};

}  // namespace

void ExecLimits::validate() const {
  if (max_steps == 0 || max_heap == 0 || max_output == 0)
    throw std::invalid_argument("ExecLimits fields must be strictly positive");
}

std::string_view trap_name(TrapKind k) {
  switch (k) {
    case TrapKind::div_zero: return "div_zero";
    case TrapKind::oob_read: return "oob_read";
    case TrapKind::oob_write: return "oob_write";
    case TrapKind::double_free: return "double_free";
    case TrapKind::invalid_free: return "invalid_free";
    case TrapKind::explicit_abort: return "explicit_abort";
    case TrapKind::step_limit: return "step_limit";
    case TrapKind::heap_limit: return "heap_limit";
  }
  return "?";
}

int status_code(const ExecStatus& s) {
  if (s.is_exit()) return s.exit_code;
  switch (*s.trap) {
    case TrapKind::explicit_abort: return 134;
    case TrapKind::div_zero: return 136;
    case TrapKind::oob_read: return 139;
    case TrapKind::oob_write: return 140;
    case TrapKind::double_free: return 141;
    case TrapKind::invalid_free: return 142;
    case TrapKind::step_limit: return 192;
    case TrapKind::heap_limit: return 193;
  }
  return -1;
}

BuildMode BuildMode::baseline_mode(bool sanitize) {
  return BuildMode{Kind::baseline, sanitize, {}};
}

BuildMode BuildMode::location_mode(std::vector<std::pair<SiteId, MutationId>> sites,
                                   bool sanitize) {
  return BuildMode{Kind::location, sanitize, std::move(sites)};
}

BuildMode BuildMode::mutant_mode(std::vector<std::pair<SiteId, MutationId>> sites,
                                 bool sanitize) {
  return BuildMode{Kind::mutant, sanitize, std::move(sites)};
}

BuildMode BuildMode::mutant_instrumented_mode(
    std::vector<std::pair<SiteId, MutationId>> sites, bool sanitize) {
  return BuildMode{Kind::mutant_instrumented, sanitize, std::move(sites)};
}

void BuildMode::validate() const {
  if ((kind == Kind::mutant || kind == Kind::mutant_instrumented) && site_mutations.empty())
    throw std::invalid_argument("mutant build modes require a non-empty mutation set");
}

ExecOutcome execute(const Program& program, const BuildMode& build,
                    std::span<const std::uint8_t> input, const ExecLimits& limits,
                    std::uint64_t /*rng_seed*/) {
  limits.validate();
  build.validate();
  return Vm(program, build, input, limits).run();
}

}  // namespace mutbench
