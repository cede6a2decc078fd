# Copyright 2026 The vidaudit Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Video dataset-copyright auditing.

Videos are uint8 numpy arrays of shape (t, h, w, c). Errors raised by the
core library are `vidaudit.Error` (a ValueError) whose message starts with
the error kind, e.g. "shape: ...".
"""

from ._vidaudit import (
    AuditConfig,
    Error,
    PerlinParams,
    affected_samples,
    audit_files,
    decode_vtr1,
    delta_w_max,
    encode_vtr1,
    fade,
    fpr_bound,
    fractal,
    generate_field,
    inject_noise,
    modify_video,
    perlin_value,
    postprocess_diff,
    quantize_posterior,
    reference_threshold,
    simulate,
    sine_transform,
    ssim,
    threshold_range,
    true_label_prob,
    wilcoxon_moments,
    wilcoxon_one_sided,
)

__all__ = [
    "AuditConfig",
    "Error",
    "PerlinParams",
    "affected_samples",
    "audit_files",
    "decode_vtr1",
    "delta_w_max",
    "encode_vtr1",
    "fade",
    "fpr_bound",
    "fractal",
    "generate_field",
    "inject_noise",
    "modify_video",
    "perlin_value",
    "postprocess_diff",
    "quantize_posterior",
    "reference_threshold",
    "simulate",
    "sine_transform",
    "ssim",
    "threshold_range",
    "true_label_prob",
    "wilcoxon_moments",
    "wilcoxon_one_sided",
]
