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

#include "anytime/server.hpp"

#include <httplib.h>

#include <iostream>

#include "anytime/error.hpp"

namespace anytime {
namespace {

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConflict: return 409;
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kParse: return 400;
    default: return 422;
  }
}

std::string code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConflict: return "conflict";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kParse: return "bad_request";
    default: return "invalid";
  }
}

void send(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

std::size_t expected_k(const Json& body) {
  if (!body.contains("expected_k")) throw Error(ErrorCode::kParse, "missing field 'expected_k'");
  const Json& v = body.at("expected_k");
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw Error(ErrorCode::kParse, "expected_k must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

template <class F>
httplib::Server::Handler guarded(const std::string& token, F&& handler) {
  return [token, handler](const httplib::Request& req, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    if (!token.empty() && req.get_header_value("X-Auth-Token") != token) {
      send(res, 401, Json{{"error", "unauthorized"}, {"message", "missing or wrong token"}});
      return;
    }
    try {
      handler(req, res);
    } catch (const Error& e) {
      send(res, http_status(e.code()), Json{{"error", code_name(e.code())}, {"message", e.what()}});
    } catch (const nlohmann::json::exception& e) {
      send(res, 400, Json{{"error", "bad_request"}, {"message", e.what()}});
    }
  };
}

Json parse_body(const httplib::Request& req) {
  Json body = Json::parse(req.body, nullptr, false);
  if (body.is_discarded() || !body.is_object()) {
    throw Error(ErrorCode::kParse, "request body must be a JSON object");
  }
  return body;
}

}  // namespace

std::unique_ptr<httplib::Server> make_server(SessionStore& store, const std::string& token) {
  auto server = std::make_unique<httplib::Server>();
  server->Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Headers", "Content-Type, X-Auth-Token");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.status = 204;
  });
  server->Post("/sessions", guarded(token, [&store](const httplib::Request& req,
                                                    httplib::Response& res) {
    const Json body = parse_body(req);
    if (!body.contains("config")) throw Error(ErrorCode::kParse, "missing field 'config'");
    const TestConfig cfg = config_from_json(body.at("config"));
    const StakePolicy policy = body.contains("policy") ? policy_from_json(body.at("policy"))
                                                       : StakePolicy{MixtureSpec::uniform(0.0, 1.0)};
    const std::string id = store.create(cfg, policy, body.value("meta", Json()));
    send(res, 201, Json{{"id", id}, {"state", store.state(id)}});
  }));
  server->Post(R"(/sessions/([0-9a-z]+)/observations)",
               guarded(token, [&store](const httplib::Request& req, httplib::Response& res) {
                 const Json body = parse_body(req);
                 if (!body.contains("t")) throw Error(ErrorCode::kParse, "missing field 't'");
                 const double t = number_from_json(body.at("t"), "t");
                 Json state = store.append_observation(req.matches[1], t, expected_k(body),
                                                       body.value("meta", Json()));
                 state["id"] = std::string(req.matches[1]);
                 send(res, 200, state);
               }));
  server->Post(R"(/sessions/([0-9a-z]+)/policy)",
               guarded(token, [&store](const httplib::Request& req, httplib::Response& res) {
                 const Json body = parse_body(req);
                 if (!body.contains("policy")) throw Error(ErrorCode::kParse, "missing field 'policy'");
                 const std::string id = req.matches[1];
                 const int version =
                     store.change_policy(id, policy_from_json(body.at("policy")), expected_k(body));
                 send(res, 200, Json{{"version", version}, {"state", store.state(id)}});
               }));
  server->Get(R"(/sessions/([0-9a-z]+)/state)",
              guarded(token, [&store](const httplib::Request& req, httplib::Response& res) {
                send(res, 200, store.state(req.matches[1]));
              }));
  server->Get(R"(/sessions/([0-9a-z]+)/trajectory)",
              guarded(token, [&store](const httplib::Request& req, httplib::Response& res) {
                send(res, 200, store.trajectory(req.matches[1]));
              }));
  return server;
}

bool serve_sessions(const ServerOptions& options) {
  SessionStore store(options.data_dir);
  auto server = make_server(store, options.token);
  std::cerr << "listening on " << options.host << ":" << options.port << "\n";
  return server->listen(options.host, options.port);
}

}  // namespace anytime
