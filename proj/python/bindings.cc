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

// Python bindings. Videos cross the boundary as uint8 numpy arrays of shape
// (t, h, w, c); structured results come back as plain dicts.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "json.hpp"
#include "vidaudit/config.h"
#include "vidaudit/errors.h"
#include "vidaudit/oracle.h"
#include "vidaudit/perlin.h"
#include "vidaudit/pipeline.h"
#include "vidaudit/posterior.h"
#include "vidaudit/sim.h"
#include "vidaudit/theory.h"
#include "vidaudit/verify.h"
#include "vidaudit/video.h"
#include "vidaudit/video_io.h"

namespace py = pybind11;
using vidaudit::AuditConfig;
using vidaudit::VideoShape;
using vidaudit::VideoTensor;

namespace {

py::object ToPython(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

using U8Array = py::array_t<uint8_t, py::array::c_style | py::array::forcecast>;
using F64Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

VideoTensor FromArray(const U8Array& a) {
  if (a.ndim() != 4) {
    throw vidaudit::ShapeError("video array must have shape (t, h, w, c)");
  }
  VideoShape s{int(a.shape(0)), int(a.shape(1)), int(a.shape(2)),
               int(a.shape(3))};
  std::vector<uint8_t> data(a.data(), a.data() + a.size());
  return VideoTensor(s, std::move(data));
}

U8Array ToArray(const VideoTensor& v) {
  U8Array out({v.t(), v.h(), v.w(), v.c()});
  std::memcpy(out.mutable_data(), v.data().data(), v.data().size());
  return out;
}

vidaudit::NoiseField FieldFromArray(const F64Array& a) {
  if (a.ndim() != 3) throw vidaudit::ShapeError("field must have shape (t, h, w)");
  std::vector<double> data(a.data(), a.data() + a.size());
  return vidaudit::NoiseField(int(a.shape(0)), int(a.shape(1)),
                              int(a.shape(2)), std::move(data));
}

F64Array FieldToArray(const vidaudit::NoiseField& f) {
  F64Array out({f.t(), f.h(), f.w()});
  std::memcpy(out.mutable_data(), f.data().data(), f.size() * sizeof(double));
  return out;
}

}  // namespace

PYBIND11_MODULE(_vidaudit, m) {
  m.doc() = "Video dataset-copyright auditing: noise, selection, verification";

  // Every library error surfaces as vidaudit.Error; the message carries the
  // error kind first, e.g. "shape: ...".
  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object>
      error_type;
  error_type.call_once_and_store_result([&m] {
    return py::exception<vidaudit::Error>(m, "Error", PyExc_ValueError);
  });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const vidaudit::Error& e) {
      py::set_error(error_type.get_stored(),
                    (e.kind() + ": " + e.what()).c_str());
    }
  });

  py::class_<vidaudit::PerlinParams>(m, "PerlinParams")
      .def(py::init<>())
      .def_readwrite("lambda_x", &vidaudit::PerlinParams::lambda_x)
      .def_readwrite("lambda_y", &vidaudit::PerlinParams::lambda_y)
      .def_readwrite("lambda_t", &vidaudit::PerlinParams::lambda_t)
      .def_readwrite("phi_sine", &vidaudit::PerlinParams::phi_sine)
      .def_readwrite("omega", &vidaudit::PerlinParams::omega)
      .def_readwrite("seed", &vidaudit::PerlinParams::seed);

  py::class_<AuditConfig>(m, "AuditConfig")
      .def(py::init<>())
      .def_readwrite("epsilon", &AuditConfig::epsilon)
      .def_readwrite("perlin", &AuditConfig::perlin)
      .def_readwrite("r_c", &AuditConfig::r_c)
      .def_readwrite("r_m", &AuditConfig::r_m)
      .def_readwrite("r_r", &AuditConfig::r_r)
      .def_readwrite("H", &AuditConfig::clip_bound)
      .def_readwrite("beta", &AuditConfig::beta)
      .def_readwrite("alpha", &AuditConfig::alpha)
      .def_readwrite("n_c", &AuditConfig::num_classes)
      .def_readwrite("selection_seed", &AuditConfig::selection_seed)
      .def_readwrite("noise_seed", &AuditConfig::noise_seed)
      .def_readwrite("clip", &AuditConfig::clip_threshold)
      .def_readwrite("postprocess", &AuditConfig::postprocess)
      .def("validate", &AuditConfig::Validate)
      .def("hash", &AuditConfig::Hash)
      .def("canonical", &AuditConfig::Canonical);

  m.def("fade", &vidaudit::Fade, py::arg("s"));
  m.def("perlin_value", &vidaudit::PerlinValue, py::arg("x"), py::arg("y"),
        py::arg("t"), py::arg("seed"));
  m.def("fractal", &vidaudit::Fractal, py::arg("x"), py::arg("y"),
        py::arg("t"), py::arg("params"));
  m.def("sine_transform", &vidaudit::SineTransform, py::arg("s"),
        py::arg("phi_sine"));
  m.def(
      "generate_field",
      [](int t, int h, int w, const vidaudit::PerlinParams& p) {
        vidaudit::NoiseField f;
        {
          py::gil_scoped_release release;
          f = vidaudit::GenerateField(t, h, w, p);
        }
        return FieldToArray(f);
      },
      py::arg("t"), py::arg("h"), py::arg("w"), py::arg("params"));

  m.def(
      "inject_noise",
      [](const U8Array& video, const F64Array& field, double epsilon) {
        return ToArray(vidaudit::InjectNoise(FromArray(video),
                                             FieldFromArray(field), epsilon));
      },
      py::arg("video"), py::arg("field"), py::arg("epsilon"));
  m.def(
      "ssim",
      [](const U8Array& a, const U8Array& b) {
        return vidaudit::Ssim(FromArray(a), FromArray(b));
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "modify_video",
      [](const U8Array& video, const std::string& sample_id,
         const AuditConfig& cfg) {
        return ToArray(vidaudit::ModifyVideo(FromArray(video), sample_id, cfg));
      },
      py::arg("video"), py::arg("sample_id"), py::arg("config"));
  m.def(
      "encode_vtr1",
      [](const U8Array& video) {
        const std::vector<uint8_t> bytes = vidaudit::EncodeVtr1(FromArray(video));
        return py::bytes(reinterpret_cast<const char*>(bytes.data()),
                         bytes.size());
      },
      py::arg("video"));
  m.def(
      "decode_vtr1",
      [](const py::bytes& data) {
        const std::string s = data;
        return ToArray(vidaudit::DecodeVtr1(std::span<const uint8_t>(
            reinterpret_cast<const uint8_t*>(s.data()), s.size())));
      },
      py::arg("data"));

  m.def(
      "quantize_posterior",
      [](const std::vector<double>& probs, int decimals) {
        return vidaudit::QuantizePosterior({probs, false}, decimals).probs;
      },
      py::arg("probs"), py::arg("decimals"));
  m.def(
      "true_label_prob",
      [](const py::dict& response, int label, int num_classes) {
        const std::string text =
            py::module_::import("json").attr("dumps")(response).cast<std::string>();
        return vidaudit::TrueLabelProb(
            vidaudit::ResponseFromJson(nlohmann::json::parse(text)), label,
            num_classes);
      },
      py::arg("response"), py::arg("label"), py::arg("n_c"));

  m.def(
      "reference_threshold",
      [](const std::vector<double>& ds, double h_clip, bool clip) {
        const vidaudit::Threshold t = vidaudit::ReferenceThreshold(ds, h_clip, clip);
        return py::make_tuple(t.h_bar, t.h);
      },
      py::arg("delta_s_r"), py::arg("H"), py::arg("clip") = true);
  m.def("postprocess_diff", &vidaudit::PostprocessDiff, py::arg("p_mod"),
        py::arg("p_orig"), py::arg("B"), py::arg("beta"), py::arg("h_bar"));
  m.def(
      "wilcoxon_one_sided",
      [](const std::vector<double>& ds, double h, double alpha) {
        const vidaudit::WilcoxonResult r = vidaudit::WilcoxonOneSided(ds, h, alpha);
        py::dict d;
        d["W"] = r.w;
        d["n_effective"] = r.n_effective;
        d["p_value"] = r.p_value;
        d["reject"] = r.reject;
        d["exact"] = r.exact;
        d["degenerate"] = r.degenerate;
        d["underpowered"] = r.underpowered;
        return d;
      },
      py::arg("delta_s_m"), py::arg("h"), py::arg("alpha"));

  m.def(
      "threshold_range",
      [](double mu0, double sigma0, double mu1, double sigma1, int64_t n,
         double a, double b) {
        return ToPython(vidaudit::ComputeThresholdRange(
                            {mu0, sigma0, mu1, sigma1, n, a, b})
                            .ToJson());
      },
      py::arg("mu0"), py::arg("sigma0"), py::arg("mu1"), py::arg("sigma1"),
      py::arg("n"), py::arg("a"), py::arg("b"));
  m.def(
      "wilcoxon_moments",
      [](int64_t n) {
        const auto w = vidaudit::WilcoxonMomentsOf(n);
        return py::make_tuple(w.mu_w, w.sigma_w_sq);
      },
      py::arg("n_M"));
  m.def("delta_w_max", &vidaudit::DeltaWMax, py::arg("K"), py::arg("n_M"));
  m.def("affected_samples", &vidaudit::AffectedSamples, py::arg("n_M"),
        py::arg("f_max"), py::arg("width"));
  m.def(
      "fpr_bound",
      [](double alpha, int64_t n_m, int64_t n_r, double delta_h, double c_h,
         double h_clip, double mu, double f_max, double k_pp) {
        return ToPython(vidaudit::FprBound({alpha, n_m, n_r, delta_h, c_h,
                                            h_clip, mu, f_max, k_pp})
                            .ToJson());
      },
      py::arg("alpha"), py::arg("n_M"), py::arg("n_R"), py::arg("delta_h"),
      py::arg("c_h"), py::arg("H"), py::arg("mu"), py::arg("f_max"),
      py::arg("k_pp"));

  m.def(
      "audit_files",
      [](const std::string& manifest, const std::string& published_dir,
         const std::string& unpublished_dir, const std::string& predictions,
         const AuditConfig& cfg) {
        nlohmann::json j;
        {
          py::gil_scoped_release release;
          const auto man = vidaudit::DatasetManifest::Read(manifest);
          const auto pair =
              vidaudit::LoadPair(published_dir, unpublished_dir, man);
          const auto oracle = vidaudit::FileOracle::FromFile(predictions);
          j = vidaudit::Audit(oracle, man, pair, cfg).ToJson();
        }
        return ToPython(j);
      },
      py::arg("manifest"), py::arg("published_dir"),
      py::arg("unpublished_dir"), py::arg("predictions"), py::arg("config"));

  m.def(
      "simulate",
      [](const AuditConfig& cfg, uint64_t seed, int n_pos, int n_neg,
         const std::string& negative, std::optional<int> quantize_decimals,
         const std::string& mode) {
        vidaudit::SyntheticOracleSpec pos, neg;
        neg.behavior = vidaudit::ParseBehavior(negative);
        for (auto* s : {&pos, &neg}) {
          s->num_classes = cfg.num_classes;
          s->quantize_decimals = quantize_decimals;
          s->mode = vidaudit::ParseResponseMode(mode);
        }
        vidaudit::EvalOptions opt;
        opt.seed = seed;
        opt.n_pos = n_pos;
        opt.n_neg = n_neg;
        nlohmann::json j;
        {
          py::gil_scoped_release release;
          j = vidaudit::EvaluateAuditor(opt, cfg, pos, neg).ToJson();
        }
        return ToPython(j);
      },
      py::arg("config"), py::arg("seed") = 0, py::arg("n_pos") = 10,
      py::arg("n_neg") = 100, py::arg("negative") = "non_member",
      py::arg("quantize_decimals") = py::none(), py::arg("mode") = "full");
}
