// Copyright 2026 The ayc Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "ayc/annotations/interchange.hpp"
#include "ayc/annotations/store.hpp"
#include "ayc/core/error.hpp"
#include "ayc/dataset/dataset.hpp"
#include "ayc/detection/box.hpp"
#include "ayc/eval/evaluation.hpp"
#include "ayc/project/workspace.hpp"
#include "ayc/runtime/manifest.hpp"
#include "ayc/runtime/preprocess.hpp"

namespace py = pybind11;
using nlohmann::json;
using namespace ayc;

namespace {

using PyBox = std::array<double, 4>;
using PyDetection = std::tuple<PyBox, int, double>;
using PyGroundTruth = std::tuple<PyBox, int>;

detection::BBox to_box(const PyBox& b) { return {b[0], b[1], b[2], b[3]}; }
PyBox from_box(const detection::BBox& b) { return {b.x_min, b.y_min, b.x_max, b.y_max}; }

std::vector<detection::Detection> to_detections(const std::vector<PyDetection>& in) {
  std::vector<detection::Detection> out;
  out.reserve(in.size());
  for (const auto& [b, c, s] : in) out.push_back({to_box(b), c, s});
  return out;
}

std::vector<PyDetection> from_detections(const std::vector<detection::Detection>& in) {
  std::vector<PyDetection> out;
  out.reserve(in.size());
  for (const auto& d : in) out.emplace_back(from_box(d.box), d.class_id, d.confidence);
  return out;
}

std::map<std::string, annotations::ImageDims> to_dims(
    const std::map<std::string, std::pair<int, int>>& dims) {
  std::map<std::string, annotations::ImageDims> out;
  for (const auto& [id, wh] : dims) out[id] = {wh.first, wh.second};
  return out;
}

class PyWorkspace {
 public:
  explicit PyWorkspace(const std::filesystem::path& root)
      : ws_(std::make_shared<project::Workspace>(root)) {}

  std::string register_model(const std::filesystem::path& manifest) {
    return ws_->describe(ws_->register_model(runtime::load_manifest(manifest))).dump();
  }

  std::string activate(const std::string& id) {
    return ws_->describe(ws_->registry().activate_model(id)).dump();
  }

  std::string models() const {
    json list = json::array();
    for (const auto& d : ws_->registry().list_models()) list.push_back(ws_->describe(d));
    const auto active = ws_->registry().active_model_id();
    return json{{"models", list}, {"active", active ? json(*active) : json(nullptr)}}.dump();
  }

  std::string infer(const std::optional<std::string>& image_id,
                    const std::optional<std::filesystem::path>& image_path,
                    const std::optional<std::string>& model_id, std::optional<double> conf,
                    std::optional<double> nms_iou) {
    if (image_id.has_value() == image_path.has_value()) {
      throw Error(ErrorCode::kBadRequest, "give exactly one of image_id and image_path");
    }
    const auto path = image_id ? ws_->image(*image_id).path : *image_path;
    const auto raster = runtime::load_image(path);
    py::gil_scoped_release release;
    return ws_->describe(ws_->registry().run_inference(model_id, raster, {conf, nms_iou})).dump();
  }

  std::string split(std::uint64_t seed, const std::array<double, 3>& ratios) {
    return dataset::split_to_json_text(ws_->split({ratios[0], ratios[1], ratios[2]}, seed));
  }

  std::string benchmark(const std::vector<std::string>& model_ids, const std::string& part) {
    const auto p = dataset::part_from_string(part);
    py::gil_scoped_release release;
    return project::to_json(ws_->benchmark(model_ids, p)).dump();
  }

  std::string images() {
    json list = json::array();
    for (const auto& r : ws_->scan_images()) list.push_back(ws_->describe(r));
    return list.dump();
  }

  std::string annotations(const std::string& image_id) const {
    const auto set = ws_->annotations().get(image_id);
    if (!set) throw Error(ErrorCode::kUnknownImageId, "unknown image id: " + image_id);
    return annotations::to_json(*set).dump();
  }

  std::string commit(const std::string& image_id, const std::string& edit_json) {
    const auto edit = annotations::edit_from_json(json::parse(edit_json));
    return annotations::to_json(ws_->annotations().commit(image_id, edit)).dump();
  }

  std::string audit(const std::string& image_id) const {
    json list = json::array();
    for (const auto& r : ws_->annotations().audit_log(image_id)) list.push_back(annotations::to_json(r));
    return list.dump();
  }

  annotations::Payload export_annotations(const std::string& format) const {
    if (format != "coco" && format != "yolo") throw Error(ErrorCode::kBadRequest, "format must be coco or yolo");
    return ws_->annotations().export_all(format == "coco" ? annotations::Format::kCoco
                                                          : annotations::Format::kYolo);
  }

  std::string ingest_log(const std::string& model_id, const std::string& csv) {
    return eval::to_json(ws_->ingest_log(model_id, csv)).dump();
  }

 private:
  std::shared_ptr<project::Workspace> ws_;
};

}  // namespace

PYBIND11_MODULE(_ayc, m) {
  m.doc() = "Native core of the chromosome detection workbench";

  static py::exception<Error> error_type(m, "NativeError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      error_type(to_api_error(e).dump().c_str());
    } catch (const json::exception& e) {
      error_type(to_api_error(ErrorCode::kBadRequest, e.what()).dump().c_str());
    }
  });

  m.attr("DEFAULT_CONFIDENCE") = detection::kDefaultConfidence;
  m.attr("DEFAULT_NMS_IOU") = detection::kDefaultNmsIou;

  m.def("iou", [](const PyBox& a, const PyBox& b) { return detection::iou(to_box(a), to_box(b)); });
  m.def(
      "filter_by_confidence",
      [](const std::vector<PyDetection>& dets, double threshold) {
        return from_detections(detection::filter_by_confidence(to_detections(dets), threshold));
      },
      py::arg("detections"), py::arg("threshold") = detection::kDefaultConfidence);
  m.def(
      "nms",
      [](const std::vector<PyDetection>& dets, double thr, bool per_class) {
        return from_detections(detection::nms(to_detections(dets), thr, per_class));
      },
      py::arg("detections"), py::arg("iou_threshold") = detection::kDefaultNmsIou,
      py::arg("per_class") = true);

  m.def(
      "evaluate",
      [](const std::vector<std::vector<PyDetection>>& dets,
         const std::vector<std::vector<PyGroundTruth>>& gts, double thr,
         const std::vector<std::string>& class_names, const std::string& model_id) {
        std::vector<eval::ImageDetections> d;
        for (const auto& img : dets) d.push_back(to_detections(img));
        std::vector<eval::ImageGroundTruth> g;
        for (const auto& img : gts) {
          g.emplace_back();
          for (const auto& [b, c] : img) g.back().push_back({to_box(b), c});
        }
        return eval::to_json(eval::map_at_iou(d, g, thr, class_names, model_id)).dump();
      },
      py::arg("detections"), py::arg("ground_truth"), py::arg("iou_threshold") = 0.5,
      py::arg("class_names"), py::arg("model_id") = "");

  m.def(
      "split_dataset",
      [](const std::vector<std::string>& ids, const std::array<double, 3>& ratios, std::uint64_t seed) {
        return dataset::split_to_json_text(dataset::split_dataset(ids, {ratios[0], ratios[1], ratios[2]}, seed));
      },
      py::arg("image_ids"), py::arg("ratios"), py::arg("seed"));

  m.def(
      "coco_to_yolo",
      [](const std::string& coco, const std::vector<std::string>& class_names) {
        const auto imported = annotations::import_coco(coco, class_names);
        return std::make_pair(annotations::export_yolo(imported.sets, imported.class_names),
                              imported.class_names);
      },
      py::arg("coco_text"), py::arg("class_names") = std::vector<std::string>{});
  m.def(
      "yolo_to_coco",
      [](const annotations::Payload& files, const std::map<std::string, std::pair<int, int>>& dims,
         const std::vector<std::string>& class_names) {
        return annotations::export_coco(annotations::import_yolo(files, to_dims(dims)), class_names);
      },
      py::arg("files"), py::arg("dims"), py::arg("class_names"));

  py::class_<PyWorkspace>(m, "Workspace")
      .def(py::init<const std::filesystem::path&>(), py::arg("root"))
      .def("register_model", &PyWorkspace::register_model, py::arg("manifest_path"))
      .def("activate", &PyWorkspace::activate, py::arg("model_id"))
      .def("models", &PyWorkspace::models)
      .def("infer", &PyWorkspace::infer, py::arg("image_id") = py::none(), py::arg("image_path") = py::none(),
           py::arg("model_id") = py::none(), py::arg("confidence") = py::none(),
           py::arg("nms_iou") = py::none())
      .def("split", &PyWorkspace::split, py::arg("seed"),
           py::arg("ratios") = std::array<double, 3>{0.70, 0.15, 0.15})
      .def("benchmark", &PyWorkspace::benchmark, py::arg("model_ids"), py::arg("part") = "test")
      .def("images", &PyWorkspace::images)
      .def("annotations", &PyWorkspace::annotations, py::arg("image_id"))
      .def("commit", &PyWorkspace::commit, py::arg("image_id"), py::arg("edit_json"))
      .def("audit", &PyWorkspace::audit, py::arg("image_id"))
      .def("export_annotations", &PyWorkspace::export_annotations, py::arg("format"))
      .def("ingest_log", &PyWorkspace::ingest_log, py::arg("model_id"), py::arg("csv"));
}
