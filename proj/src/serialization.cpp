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

#include "anytime/serialization.hpp"

#include <charconv>
#include <cmath>

#include "anytime/error.hpp"

namespace anytime {
namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::kParse, msg); }

const Json& field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) bad(std::string("missing field '") + name + "'");
  return j.at(name);
}

std::optional<double> optional_number(const Json& j, const char* name) {
  if (!j.contains(name) || j.at(name).is_null()) return std::nullopt;
  return number_from_json(j.at(name), name);
}

std::vector<double> number_list(const Json& j, const std::string& name) {
  if (!j.is_array()) bad("field '" + name + "' must be an array");
  std::vector<double> out;
  for (const auto& x : j) out.push_back(number_from_json(x, name));
  return out;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::size_t count_field(const Json& j, const char* name, std::size_t fallback) {
  if (!j.contains(name)) return fallback;
  const Json& v = j.at(name);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    bad(std::string("field '") + name + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

}  // namespace

Json number_to_json(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double number_from_json(const Json& j, const std::string& name) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return kNegInf;
  }
  bad("field '" + name + "' must be a number");
}

Json to_json(const TestConfig& cfg) {
  Json j;
  j["mu"] = cfg.mu;
  j["tau0"] = cfg.tau0 ? Json(*cfg.tau0) : Json(nullptr);
  j["tau1"] = cfg.tau1 ? Json(*cfg.tau1) : Json(nullptr);
  j["alpha"] = cfg.alpha;
  if (std::holds_alternative<UpperNull>(cfg.side)) {
    j["side"] = "upper";
  } else if (std::holds_alternative<LowerNull>(cfg.side)) {
    j["side"] = "lower";
  } else {
    j["side"] = "two-sided";
    j["rho_plus"] = std::get<TwoSided>(cfg.side).rho_plus;
  }
  return j;
}

TestConfig config_from_json(const Json& j) {
  if (!j.is_object()) bad("config must be a JSON object");
  TestConfig cfg;
  cfg.mu = number_from_json(field(j, "mu"), "mu");
  cfg.tau0 = optional_number(j, "tau0");
  cfg.tau1 = optional_number(j, "tau1");
  if (j.contains("alpha")) cfg.alpha = number_from_json(j.at("alpha"), "alpha");
  const std::string side = j.value("side", std::string("upper"));
  if (side == "upper") {
    cfg.side = UpperNull{};
  } else if (side == "lower") {
    cfg.side = LowerNull{};
  } else if (side == "two-sided") {
    TwoSided two;
    if (j.contains("rho_plus")) two.rho_plus = number_from_json(j.at("rho_plus"), "rho_plus");
    cfg.side = two;
  } else {
    bad("side must be upper, lower or two-sided, got '" + side + "'");
  }
  return cfg;
}

Json to_json(const MartingaleState& state) {
  return Json{{"k", state.k},
              {"log_m", number_to_json(state.log_m)},
              {"log_m_max", number_to_json(state.log_m_max)},
              {"absorbed", state.absorbed}};
}

MartingaleState state_from_json(const Json& j) {
  MartingaleState s;
  s.k = count_field(j, "k", 0);
  s.log_m = number_from_json(field(j, "log_m"), "log_m");
  s.log_m_max = number_from_json(field(j, "log_m_max"), "log_m_max");
  s.absorbed = field(j, "absorbed").get<bool>();
  return s;
}

Json to_json(const MixtureSpec& spec) {
  Json j;
  j["support"] = Json::array({spec.lo, spec.hi});
  if (const auto* w = std::get_if<WeightedNodes>(&spec.density)) {
    j["density"] = Json{{"nodes", w->nodes}, {"weights", w->weights}};
  } else {
    j["density"] = "uniform";
  }
  return j;
}

MixtureSpec mixture_from_json(const Json& j) {
  const Json& support = field(j, "support");
  if (!support.is_array() || support.size() != 2) bad("support must be [a, b]");
  MixtureSpec spec;
  spec.lo = number_from_json(support[0], "support");
  spec.hi = number_from_json(support[1], "support");
  const Json& density = j.contains("density") ? j.at("density") : Json("uniform");
  if (density.is_string()) {
    if (density.get<std::string>() != "uniform") bad("density must be \"uniform\" or nodes");
    spec.density = UniformDensity{};
  } else {
    spec.density = WeightedNodes{number_list(field(density, "nodes"), "nodes"),
                                 number_list(field(density, "weights"), "weights")};
  }
  spec.validate();
  return spec;
}

Json to_json(const StakePolicy& policy) {
  if (const auto* c = std::get_if<ConstantStake>(&policy)) {
    return Json{{"kind", "constant"}, {"c", c->c}};
  }
  if (const auto* s = std::get_if<StakeSchedule>(&policy)) {
    return Json{{"kind", "schedule"}, {"stakes", s->stakes}};
  }
  if (const auto* p = std::get_if<PowerFamily>(&policy)) {
    return Json{{"kind", "power"}, {"d", p->d}, {"r", p->r}, {"s", p->s}, {"m", p->m}};
  }
  Json j = to_json(std::get<MixtureSpec>(policy));
  j["kind"] = "mixture";
  return j;
}

StakePolicy policy_from_json(const Json& j) {
  const Json& kind_field = field(j, "kind");
  if (!kind_field.is_string()) bad("policy kind must be a string");
  const std::string kind = kind_field.get<std::string>();
  if (kind == "constant") return ConstantStake{number_from_json(field(j, "c"), "c")};
  if (kind == "schedule") return StakeSchedule{number_list(field(j, "stakes"), "stakes")};
  if (kind == "power") {
    return PowerFamily{number_from_json(field(j, "d"), "d"), number_from_json(field(j, "r"), "r"),
                       number_from_json(field(j, "s"), "s"), number_from_json(field(j, "m"), "m")};
  }
  if (kind == "mixture") return mixture_from_json(j);
  bad("unknown policy kind '" + kind + "'");
}

Json to_json(const TestSnapshot& snap) {
  return Json{{"k", snap.k},
              {"log_m", number_to_json(snap.log_m)},
              {"log_m_max", number_to_json(snap.log_m_max)},
              {"absorbed", snap.absorbed},
              {"decision", snap.decision == Decision::kReject ? "Reject" : "Continue"},
              {"stake", snap.stake ? number_to_json(*snap.stake) : Json(nullptr)}};
}

TestSnapshot snapshot_from_json(const Json& j) {
  TestSnapshot s;
  s.k = count_field(j, "k", 0);
  s.log_m = number_from_json(field(j, "log_m"), "log_m");
  s.log_m_max = number_from_json(field(j, "log_m_max"), "log_m_max");
  s.absorbed = field(j, "absorbed").get<bool>();
  s.decision = field(j, "decision").get<std::string>() == "Reject" ? Decision::kReject
                                                                    : Decision::kContinue;
  if (j.contains("stake") && !j.at("stake").is_null()) {
    s.stake = number_from_json(j.at("stake"), "stake");
  }
  return s;
}

Scenario scenario_from_json(const Json& j) {
  if (!j.is_object()) bad("scenario must be a JSON object");
  Scenario sc;
  sc.id = j.value("id", sc.id);
  sc.dist = parse_distribution(field(j, "dist").get<std::string>());
  sc.cfg = config_from_json(field(j, "config"));
  sc.policy = policy_from_json(field(j, "policy"));
  if (j.contains("stop_rule")) sc.stop_rule = parse_stop_rule(j.at("stop_rule").get<std::string>());
  if (j.contains("precision_m")) sc.precision_m = number_from_json(j.at("precision_m"), "precision_m");
  sc.min_n = count_field(j, "min_n", sc.min_n);
  sc.cap = count_field(j, "cap", sc.cap);
  sc.runs = count_field(j, "runs", sc.runs);
  if (j.contains("seed")) sc.seed = j.at("seed").get<std::uint64_t>();
  return sc;
}

Json to_json(const Scenario& sc) {
  return Json{{"id", sc.id},
              {"dist", describe(sc.dist)},
              {"config", to_json(sc.cfg)},
              {"policy", to_json(sc.policy)},
              {"stop_rule", to_string(sc.stop_rule)},
              {"precision_m", sc.precision_m},
              {"min_n", sc.min_n},
              {"cap", sc.cap},
              {"runs", sc.runs},
              {"seed", sc.seed}};
}

std::vector<double> read_observations(std::istream& in) {
  std::vector<double> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty()) continue;
    auto fail = [&](const std::string& why) -> double {
      throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) + ": " + why, line_no);
    };
    double t = 0.0;
    if (text.front() == '{') {
      const Json j = Json::parse(text, nullptr, false);
      if (j.is_discarded()) fail("malformed JSON");
      if (!j.contains("t")) fail("missing field 't'");
      if (!j.at("t").is_number()) fail("field 't' must be a number");
      t = j.at("t").get<double>();
    } else {
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), t);
      if (ec != std::errc() || ptr != text.data() + text.size()) {
        fail("expected a number or a {\"t\": x} object, got '" + text + "'");
      }
    }
    if (!std::isfinite(t)) fail("observation must be finite");
    out.push_back(t);
  }
  return out;
}

}  // namespace anytime
