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

#include "anytime/distribution.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>

#include "anytime/detail/overloaded.hpp"
#include "anytime/error.hpp"

namespace anytime {
namespace {

using detail::Overloaded;

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    out.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_number(std::string_view token, std::string_view context) {
  double value = 0.0;
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw Error(ErrorCode::kParse,
                "cannot parse number '" + std::string(token) + "' in " + std::string(context));
  }
  return value;
}

std::vector<double> parse_list(std::string_view token, std::string_view context) {
  std::vector<double> out;
  for (auto part : split(token, ',')) out.push_back(parse_number(part, context));
  return out;
}

// Shortest representation that round-trips.
std::string fmt(double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

}  // namespace

double mean(const DistributionSpec& dist) {
  return std::visit(
      Overloaded{
          [](const Alt& d) { return d.nu; },
          [](const ScaledAlt& d) { return d.value * d.prob; },
          [](const BetaDist& d) { return d.a / (d.a + d.b); },
          [](const PointMass& d) { return d.t; },
          [](const FiniteSupport& d) {
            return std::inner_product(d.points.begin(), d.points.end(), d.probs.begin(), 0.0);
          },
      },
      dist);
}

std::optional<FiniteSupport> as_finite(const DistributionSpec& dist) {
  std::map<double, double> merged;
  auto add = [&](double t, double p) {
    if (p > 0.0) merged[t] += p;
  };
  const bool discrete = std::visit(
      Overloaded{
          [&](const Alt& d) {
            add(0.0, 1.0 - d.nu);
            add(1.0, d.nu);
            return true;
          },
          [&](const ScaledAlt& d) {
            add(0.0, 1.0 - d.prob);
            add(d.value, d.prob);
            return true;
          },
          [](const BetaDist&) { return false; },
          [&](const PointMass& d) {
            add(d.t, 1.0);
            return true;
          },
          [&](const FiniteSupport& d) {
            for (std::size_t i = 0; i < d.points.size(); ++i) add(d.points[i], d.probs[i]);
            return true;
          },
      },
      dist);
  if (!discrete) return std::nullopt;
  FiniteSupport out;
  for (const auto& [t, p] : merged) {
    out.points.push_back(t);
    out.probs.push_back(p);
  }
  return out;
}

double lower_support(const DistributionSpec& dist) {
  if (std::holds_alternative<BetaDist>(dist)) return 0.0;
  return as_finite(dist)->points.front();
}

double upper_support(const DistributionSpec& dist) {
  if (std::holds_alternative<BetaDist>(dist)) return 1.0;
  return as_finite(dist)->points.back();
}

void validate(const DistributionSpec& dist, const TestConfig* cfg) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kInvalidConfig, msg); };
  std::visit(Overloaded{
                 [&](const Alt& d) {
                   if (!(d.nu >= 0.0 && d.nu <= 1.0)) fail("alt: nu must lie in [0,1]");
                 },
                 [&](const ScaledAlt& d) {
                   if (!(d.prob >= 0.0 && d.prob <= 1.0)) fail("scaled-alt: prob must lie in [0,1]");
                   if (!std::isfinite(d.value)) fail("scaled-alt: value must be finite");
                 },
                 [&](const BetaDist& d) {
                   if (!(d.a > 0.0 && d.b > 0.0)) fail("beta: shape parameters must be positive");
                 },
                 [&](const PointMass& d) {
                   if (!std::isfinite(d.t)) fail("point: value must be finite");
                 },
                 [&](const FiniteSupport& d) {
                   if (d.points.empty() || d.points.size() != d.probs.size()) {
                     fail("finite: need equal, non-zero numbers of points and probabilities");
                   }
                   for (double p : d.probs) {
                     if (!(p >= 0.0)) fail("finite: probabilities must be non-negative");
                   }
                   const double total = std::accumulate(d.probs.begin(), d.probs.end(), 0.0);
                   if (std::abs(total - 1.0) > 1e-12) fail("finite: probabilities must sum to 1");
                 },
             },
             dist);
  if (cfg) {
    if ((cfg->tau0 && lower_support(dist) < *cfg->tau0) ||
        (cfg->tau1 && upper_support(dist) > *cfg->tau1)) {
      fail("distribution support exceeds the configured bounds");
    }
  }
}

DistributionSpec parse_distribution(std::string_view text) {
  const auto parts = split(text, ':');
  const std::string_view kind = parts.front();
  auto need = [&](std::size_t n) {
    if (parts.size() != n + 1) {
      throw Error(ErrorCode::kParse, "distribution '" + std::string(text) + "' expects " +
                                         std::to_string(n) + " parameter(s)");
    }
  };
  DistributionSpec out;
  if (kind == "alt") {
    need(1);
    out = Alt{parse_number(parts[1], text)};
  } else if (kind == "scaled-alt") {
    need(2);
    out = ScaledAlt{parse_number(parts[1], text), parse_number(parts[2], text)};
  } else if (kind == "beta") {
    need(2);
    out = BetaDist{parse_number(parts[1], text), parse_number(parts[2], text)};
  } else if (kind == "point") {
    need(1);
    out = PointMass{parse_number(parts[1], text)};
  } else if (kind == "finite") {
    need(2);
    out = FiniteSupport{parse_list(parts[1], text), parse_list(parts[2], text)};
  } else {
    throw Error(ErrorCode::kParse, "unknown distribution kind '" + std::string(kind) + "'");
  }
  validate(out);
  return out;
}

std::string describe(const DistributionSpec& dist) {
  return std::visit(
      Overloaded{
          [](const Alt& d) { return "alt:" + fmt(d.nu); },
          [](const ScaledAlt& d) { return "scaled-alt:" + fmt(d.value) + ":" + fmt(d.prob); },
          [](const BetaDist& d) { return "beta:" + fmt(d.a) + ":" + fmt(d.b); },
          [](const PointMass& d) { return "point:" + fmt(d.t); },
          [](const FiniteSupport& d) {
            std::string pts;
            std::string prs;
            for (std::size_t i = 0; i < d.points.size(); ++i) {
              pts += (i ? "," : "") + fmt(d.points[i]);
              prs += (i ? "," : "") + fmt(d.probs[i]);
            }
            return "finite:" + pts + ":" + prs;
          },
      },
      dist);
}

}  // namespace anytime
