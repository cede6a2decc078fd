// Copyright 2026 The vidaudit Authors
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

#include "vidaudit/predict_server.h"

#include <string>

#include "vidaudit/base64.h"
#include "vidaudit/errors.h"
#include "vidaudit/video_io.h"

namespace vidaudit {
namespace {

using nlohmann::json;

void Reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

}  // namespace

void MountPredictHandlers(httplib::Server& server, const Oracle& oracle) {
  server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    Reply(res, 200, json{{"status", "ok"}});
  });
  server.Post("/predict", [&oracle](const httplib::Request& req,
                                    httplib::Response& res) {
    const json body = json::parse(req.body, nullptr, /*allow_exceptions=*/false);
    if (!body.is_object() || !body.contains("id") || !body["id"].is_string() ||
        !body.contains("video_b64") || !body["video_b64"].is_string()) {
      Reply(res, 400, json{{"error", "body must be {\"id\": str, \"video_b64\": str}"}});
      return;
    }
    VideoTensor video;
    try {
      video = DecodeVtr1(Base64Decode(body["video_b64"].get<std::string>()));
    } catch (const Error& e) {
      Reply(res, 400, json{{"error", e.what()}});
      return;
    }
    try {
      Reply(res, 200,
            ResponseToJson(oracle.Query(body["id"].get<std::string>(), video)));
    } catch (const BudgetError& e) {
      Reply(res, 429, json{{"error", "query limit reached"}});
    } catch (const std::exception&) {
      Reply(res, 500, json{{"error", "prediction failed"}});
    }
  });
}

}  // namespace vidaudit
