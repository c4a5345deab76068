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

// Test-only oracle: counts applicable mutation points straight from the
// canonical program text, line by line, independent of the engine's
// instruction walk. Mirrors the documented catalog under the default
// options (payload cap 1).

#pragma once

#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace mutbench::testutil {

inline std::vector<std::string> split_tokens(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

inline bool is_int_token(const std::string& t) {
  if (t.empty()) return false;
  if (t[0] == '-') return t.size() > 1 && std::isdigit(static_cast<unsigned char>(t[1]));
  return std::isdigit(static_cast<unsigned char>(t[0]));
}

inline std::map<std::string, int> count_patterns_from_text(const std::string& text) {
  std::map<std::string, int> counts;
  auto bump = [&](const char* name, int n = 1) { counts[name] += n; };

  // Pass 1: which functions have a ptr parameter, and where.
  std::map<std::string, std::vector<bool>> fn_ptr_params;
  {
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
      auto toks = split_tokens(line);
      if (toks.size() < 2 || toks[0] != "fn") continue;
      std::string rest = line.substr(line.find("fn") + 2);
      while (!rest.empty() && (rest.front() == ' ' || rest.front() == '\t'))
        rest.erase(rest.begin());
      std::string name = rest.substr(0, rest.find_first_of("({ \t"));
      std::vector<bool> ptrs;
      auto lp = rest.find('(');
      auto rp = rest.find(')');
      if (lp != std::string::npos && rp != std::string::npos && rp > lp) {
        std::string params = rest.substr(lp + 1, rp - lp - 1);
        std::istringstream ps(params);
        for (std::string piece; std::getline(ps, piece, ',');) {
          ptrs.push_back(piece.find("ptr") != std::string::npos);
        }
      }
      fn_ptr_params[name] = ptrs;
    }
  }

  // Pass 2: count per instruction line.
  std::istringstream in(text);
  bool store_seen_in_fn = false;
  for (std::string raw; std::getline(in, raw);) {
    std::string line = raw.substr(0, raw.find('#'));
    auto toks = split_tokens(line);
    if (toks.empty()) continue;
    if (toks[0] == "program" || toks[0] == "}") continue;
    if (toks[0] == "fn") {
      store_seen_in_fn = false;
      continue;
    }
    if (toks.size() == 1 && toks[0].back() == ':') continue;  // label

    std::size_t i = 0;
    if (toks[0][0] == '%' && toks.size() > 1 && toks[1] == "=") i = 2;
    if (i >= toks.size()) continue;
    const std::string& op = toks[i];
    std::vector<std::string> ops(toks.begin() + static_cast<long>(i) + 1, toks.end());

    auto cmp_rhs_imm = [&] { return ops.size() == 2 && is_int_token(ops[1]); };

    if (op == "cmp_slt" || op == "cmp_sle" || op == "cmp_sgt" || op == "cmp_sge") {
      if (op == "cmp_slt") bump("SIGNED_LT");
      if (op == "cmp_sle") bump("SIGNED_LE");
      if (op == "cmp_sgt") bump("SIGNED_GT");
      if (op == "cmp_sge") bump("SIGNED_GE");
      bump("SIGNED_TO_UNSIGNED");
      if (cmp_rhs_imm()) bump("CONST_OFFSET");
    } else if (op == "cmp_ult" || op == "cmp_ule" || op == "cmp_ugt" || op == "cmp_uge") {
      if (op == "cmp_ult") bump("UNSIGNED_LT");
      if (op == "cmp_ule") bump("UNSIGNED_LE");
      if (op == "cmp_ugt") bump("UNSIGNED_GT");
      if (op == "cmp_uge") bump("UNSIGNED_GE", cmp_rhs_imm() ? 2 : 1);
      bump("UNSIGNED_TO_SIGNED");
      if (cmp_rhs_imm()) bump("CONST_OFFSET");
    } else if (op == "cmp_eq" || op == "cmp_ne") {
      bump("COMPARE_EQ");
      if (cmp_rhs_imm()) bump("CONST_OFFSET");
    } else if (op == "br_cond") {
      bump("REDIRECT_BRANCH");
    } else if (op == "add" || op == "sub") {
      bump("SWITCH_PLUS_MINUS");
    } else if (op == "shl" || op == "shr") {
      bump("SWITCH_SHIFT");
    } else if (op == "div_s") {
      bump("SIGNED_TO_UNSIGNED");
    } else if (op == "div_u") {
      bump("UNSIGNED_TO_SIGNED");
    } else if (op == "cast_s2u") {
      bump("SIGNED_TO_UNSIGNED");
    } else if (op == "cast_u2s") {
      bump("UNSIGNED_TO_SIGNED");
    } else if (op == "store") {
      bump("DELETE_STORE");
      if (store_seen_in_fn) bump("REASSIGN_STORE");
      store_seen_in_fn = true;
    } else if (op == "store_local") {
      bump("DELETE_LOCAL_STORE");
    } else if (op == "call") {
      bump("DELETE_CALL");
      const std::size_t nargs = ops.size() - 1;  // ops[0] is @callee
      if (nargs >= 1) bump("DELETE_FUNCTION_ARGUMENT");
      std::string callee = ops[0].substr(1);
      auto it = fn_ptr_params.find(callee);
      if (it != fn_ptr_params.end()) {
        for (bool isptr : it->second) {
          if (isptr) {
            bump("FREE_FUNCTION_ARGUMENT");
            break;  // payload cap 1
          }
        }
      }
    } else if (op == "alloc") {
      if (ops.size() == 1 && is_int_token(ops[0])) bump("ALLOC_SIZE");
      if (ops.size() == 2 && is_int_token(ops[0])) bump("NEW_ARRAY_SIZE");
    } else if (op == "alloc_zeroed") {
      if (!ops.empty() && is_int_token(ops[0])) bump("ALLOC_ZEROED_SIZE");
    }
  }
  return counts;
}

inline int total_pattern_count(const std::map<std::string, int>& counts) {
  int n = 0;
  for (const auto& [_, c] : counts) n += c;
  return n;
}

}  // namespace mutbench::testutil
