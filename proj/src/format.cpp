// Copyright 2026 The Anytime Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "anytime/format.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace anytime {

std::string format_number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

std::string format_exact(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

std::string describe_policy(const StakePolicy& policy) {
  if (const auto* c = std::get_if<ConstantStake>(&policy)) return "c=" + format_exact(c->c);
  if (const auto* s = std::get_if<StakeSchedule>(&policy)) {
    return "schedule[" + std::to_string(s->stakes.size()) + "]";
  }
  if (const auto* p = std::get_if<PowerFamily>(&policy)) {
    return "power:" + format_exact(p->d) + ":" + format_exact(p->r) + ":" + format_exact(p->s) +
           ":" + format_exact(p->m);
  }
  const auto& mix = std::get<MixtureSpec>(policy);
  if (const auto* w = std::get_if<WeightedNodes>(&mix.density)) {
    return "nodes[" + std::to_string(w->nodes.size()) + "]";
  }
  return "uniform:" + format_exact(mix.lo) + ":" + format_exact(mix.hi);
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char ch : text) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace anytime
