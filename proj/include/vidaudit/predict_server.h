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

#ifndef VIDAUDIT_PREDICT_SERVER_H_
#define VIDAUDIT_PREDICT_SERVER_H_

#include "httplib.h"
#include "vidaudit/oracle.h"

namespace vidaudit {

// Serves `oracle` over the /predict wire protocol on `server`:
//   POST /predict {"id": str, "video_b64": base64 VTR1} -> 200 response JSON
//   GET  /healthz -> 200
// Malformed requests get 400 with {"error": ...}; oracle failures get 500
// with an opaque message. `oracle` must outlive the server.
void MountPredictHandlers(httplib::Server& server, const Oracle& oracle);

}  // namespace vidaudit

#endif  // VIDAUDIT_PREDICT_SERVER_H_
