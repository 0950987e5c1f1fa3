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

#include <gtest/gtest.h>

#include <httplib.h>

#include <filesystem>
#include <fstream>
#include <thread>

#include "anytime/error.hpp"
#include "anytime/server.hpp"
#include "anytime/session.hpp"
#include "common.hpp"

namespace anytime {
namespace {

namespace fs = std::filesystem;
using testing::audit_config;

class StoreTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("anytime_sessions_" +
            std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

TEST(SessionId, Validation) {
  EXPECT_TRUE(valid_session_id("0a9f"));
  EXPECT_FALSE(valid_session_id(""));
  EXPECT_FALSE(valid_session_id("ABC"));
  EXPECT_FALSE(valid_session_id("../x"));
  EXPECT_FALSE(valid_session_id(std::string(65, 'a')));
}

TEST(Session, StateCarriesBoundAndInterval) {
  Session s("abc", audit_config(), MixtureSpec::uniform(0.6, 1.0));
  Json state;
  for (int i = 0; i < 70; ++i) state = s.observe(0.02);
  EXPECT_EQ(state.at("k"), 70);
  EXPECT_EQ(state.at("decision"), "Continue");
  EXPECT_EQ(state.at("policy_version"), 0);
  EXPECT_NEAR(state.at("bound").get<double>(), 0.069437224622584424, 2e-8);
  EXPECT_FALSE(state.at("interval").at("empty").get<bool>());
  for (int i = 70; i < 117; ++i) state = s.observe(0.02);
  EXPECT_EQ(state.at("decision"), "Reject");
}

TEST(Session, NoBoundsWithoutSupport) {
  TestConfig cfg = audit_config();
  cfg.tau0.reset();
  Session s("abc", cfg, ConstantStake{0.5});
  const Json state = s.observe(0.0);
  EXPECT_TRUE(state.at("interval").is_null());
  EXPECT_FALSE(state.at("bound").is_null());
}

TEST(Session, RejectsBadInputWithoutChangingState) {
  Session s("abc", audit_config(), ConstantStake{0.5});
  s.observe(0.1);
  const Json before = s.state();
  EXPECT_THROW(s.observe(1.5), Error);
  EXPECT_THROW(s.switch_policy(PowerFamily{10.0, 1.0, 0.5, 0.05}), Error);
  EXPECT_EQ(s.state(), before);
  EXPECT_EQ(s.version(), 0);
}

TEST_F(StoreTest, ConflictsOnStaleExpectedK) {
  SessionStore store(dir_);
  const std::string id = store.create(audit_config(), ConstantStake{0.5});
  EXPECT_TRUE(valid_session_id(id));
  store.append_observation(id, 0.1, 1);
  try {
    store.append_observation(id, 0.1, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConflict);
  }
  EXPECT_THROW(store.change_policy(id, ConstantStake{0.2}, 0), Error);
  EXPECT_EQ(store.change_policy(id, ConstantStake{0.2}, 1), 1);
  EXPECT_EQ(store.state(id).at("k"), 1);
  try {
    store.state("nosuch");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotFound);
  }
}

TEST_F(StoreTest, PolicyChangeComposes) {
  const TestConfig cfg = audit_config();
  SessionStore store(dir_);
  const std::string id = store.create(cfg, ConstantStake{0.6});
  for (std::size_t k = 1; k <= 40; ++k) store.append_observation(id, 0.02, k);
  const double log_m40 = store.state(id).at("log_m").get<double>();
  store.change_policy(id, MixtureSpec::uniform(0.6, 1.0), 40);
  SequentialTest fresh(cfg, MixtureSpec::uniform(0.6, 1.0));
  Json state;
  for (std::size_t k = 41; k <= 60; ++k) {
    state = store.append_observation(id, 0.02, k);
    fresh.observe(0.02);
  }
  EXPECT_NEAR(state.at("log_m").get<double>(), log_m40 + fresh.snapshot().log_m, 1e-12);
  EXPECT_EQ(state.at("policy_version"), 1);
}

TEST_F(StoreTest, ReplayIsBitIdentical) {
  std::vector<std::string> ids;
  std::vector<std::string> states;
  {
    SessionStore store(dir_);
    ids.push_back(store.create(audit_config(), MixtureSpec::uniform(0.0, 1.0), Json{{"who", "a"}}));
    ids.push_back(store.create(audit_config(), PowerFamily{0.2, 1.0, 0.5, 0.05}));
    std::size_t k = 0;
    for (double t : {0.013, 0.0, 0.2, 0.031, 0.0, 0.7, 0.004}) {
      ++k;
      store.append_observation(ids[0], t, k, Json{{"row", k}});
      store.append_observation(ids[1], t, k);
    }
    store.change_policy(ids[0], ConstantStake{0.3}, k);
    store.append_observation(ids[0], 0.1234567890123, k + 1);
    for (const auto& id : ids) states.push_back(store.state(id).dump());
  }
  SessionStore reopened(dir_);
  EXPECT_EQ(reopened.ids(), ids);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    EXPECT_EQ(reopened.state(ids[i]).dump(), states[i]);
    EXPECT_TRUE(reopened.verify_replay(ids[i]));
  }
  const Json traj = reopened.trajectory(ids[0]);
  EXPECT_EQ(traj.at("events").size(), 10u);
  EXPECT_EQ(traj.at("events")[0].at("meta").at("who"), "a");
  EXPECT_EQ(traj.at("events")[8].at("type"), "policy");
}

TEST_F(StoreTest, TamperedLogFailsReplay) {
  std::string id;
  {
    SessionStore store(dir_);
    id = store.create(audit_config(), ConstantStake{0.5});
    store.append_observation(id, 0.1, 1);
    store.append_observation(id, 0.2, 2);
  }
  const fs::path log = dir_ / (id + ".jsonl");
  std::ifstream in(log);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  in.close();
  Json ev = Json::parse(lines[2]);
  ev["t"] = 0.3;
  lines[2] = ev.dump();
  std::ofstream out(log, std::ios::trunc);
  for (const auto& line : lines) out << line << '\n';
  out.close();
  EXPECT_THROW(SessionStore{dir_}, Error);
}

// ---------------------------------------------------------------------------

class HttpTest : public StoreTest {
 protected:
  void start(const std::string& token) {
    store_ = std::make_unique<SessionStore>(dir_);
    server_ = make_server(*store_, token);
    port_ = server_->bind_to_any_port("127.0.0.1");
    ASSERT_GT(port_, 0);
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
  }
  void TearDown() override {
    if (server_) server_->stop();
    if (thread_.joinable()) thread_.join();
    StoreTest::TearDown();
  }
  httplib::Client client() { return httplib::Client("127.0.0.1", port_); }

  std::unique_ptr<SessionStore> store_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
};

TEST_F(HttpTest, SessionLifecycle) {
  start("s3cret");
  auto cli = client();
  const httplib::Headers auth{{"X-Auth-Token", "s3cret"}};
  const std::string create =
      R"({"config": {"mu": 0.05, "tau0": 0, "tau1": 1}, "policy": {"kind": "mixture", "support": [0.6, 1]}})";

  auto denied = cli.Post("/sessions", create, "application/json");
  ASSERT_TRUE(denied);
  EXPECT_EQ(denied->status, 401);

  auto created = cli.Post("/sessions", auth, create, "application/json");
  ASSERT_TRUE(created);
  ASSERT_EQ(created->status, 201) << created->body;
  const std::string id = Json::parse(created->body).at("id");
  EXPECT_EQ(created->get_header_value("Access-Control-Allow-Origin"), "*");

  Json last;
  for (int k = 1; k <= 117; ++k) {
    const Json body{{"t", 0.02}, {"expected_k", k}};
    auto r = cli.Post("/sessions/" + id + "/observations", auth, body.dump(), "application/json");
    ASSERT_TRUE(r);
    ASSERT_EQ(r->status, 200) << r->body;
    last = Json::parse(r->body);
  }
  EXPECT_EQ(last.at("decision"), "Reject");
  EXPECT_EQ(last.at("k"), 117);

  auto stale = cli.Post("/sessions/" + id + "/observations", auth,
                        Json{{"t", 0.02}, {"expected_k", 5}}.dump(), "application/json");
  ASSERT_TRUE(stale);
  EXPECT_EQ(stale->status, 409);

  auto policy = cli.Post("/sessions/" + id + "/policy", auth,
                         R"({"policy": {"kind": "constant", "c": 0.3}, "expected_k": 117})",
                         "application/json");
  ASSERT_TRUE(policy);
  EXPECT_EQ(policy->status, 200) << policy->body;
  EXPECT_EQ(Json::parse(policy->body).at("version"), 1);

  auto bad_policy = cli.Post("/sessions/" + id + "/policy", auth,
                             R"({"policy": {"kind": "constant", "c": 3}, "expected_k": 117})",
                             "application/json");
  ASSERT_TRUE(bad_policy);
  EXPECT_EQ(bad_policy->status, 422);

  auto oob = cli.Post("/sessions/" + id + "/observations", auth,
                      Json{{"t", 2.0}, {"expected_k", 118}}.dump(), "application/json");
  ASSERT_TRUE(oob);
  EXPECT_EQ(oob->status, 422);

  auto garbage = cli.Post("/sessions/" + id + "/observations", auth, "{", "application/json");
  ASSERT_TRUE(garbage);
  EXPECT_EQ(garbage->status, 400);

  auto state = cli.Get("/sessions/" + id + "/state", auth);
  ASSERT_TRUE(state);
  EXPECT_EQ(state->status, 200);
  EXPECT_EQ(Json::parse(state->body).at("k"), 117);
  EXPECT_EQ(Json::parse(state->body).at("id"), id);

  auto traj = cli.Get("/sessions/" + id + "/trajectory", auth);
  ASSERT_TRUE(traj);
  EXPECT_EQ(Json::parse(traj->body).at("events").size(), 119u);

  auto missing = cli.Get("/sessions/ffff/state", auth);
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);

  auto preflight = cli.Options("/sessions");
  ASSERT_TRUE(preflight);
  EXPECT_EQ(preflight->status, 204);
  EXPECT_NE(preflight->get_header_value("Access-Control-Allow-Headers").find("X-Auth-Token"),
            std::string::npos);

  EXPECT_TRUE(store_->verify_replay(id));
}

TEST_F(HttpTest, DefaultPolicyWithoutToken) {
  start("");
  auto cli = client();
  auto created = cli.Post("/sessions", R"({"config": {"mu": 0.05, "tau0": 0, "tau1": 1}})",
                          "application/json");
  ASSERT_TRUE(created);
  ASSERT_EQ(created->status, 201) << created->body;
  const Json state = Json::parse(created->body).at("state");
  EXPECT_EQ(state.at("k"), 0);
  auto bad = cli.Post("/sessions", R"({"policy": {"kind": "constant", "c": 0.5}})",
                      "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);
}

}  // namespace
}  // namespace anytime
