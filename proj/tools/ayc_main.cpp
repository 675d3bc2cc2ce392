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

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ayc/annotations/interchange.hpp"
#include "ayc/core/error.hpp"
#include "ayc/core/fs.hpp"
#include "ayc/dataset/dataset.hpp"
#include "ayc/project/workspace.hpp"
#include "ayc/runtime/preprocess.hpp"
#include "ayc/service/server.hpp"

namespace {

namespace stdfs = std::filesystem;
using nlohmann::json;
using namespace ayc;

std::vector<std::string> split_list(const std::string& text, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, sep);) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<std::string> read_class_file(const stdfs::path& p) {
  std::vector<std::string> names;
  std::stringstream in(fs::read_text(p));
  for (std::string line; std::getline(in, line);) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!line.empty()) names.push_back(line);
  }
  return names;
}

void emit(const json& doc, const std::string& out_path) {
  const std::string text = doc.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    fs::write_text_atomic(out_path, text);
  }
}

annotations::Format format_from_string(const std::string& s) {
  if (s == "coco") return annotations::Format::kCoco;
  if (s == "yolo") return annotations::Format::kYolo;
  throw Error(ErrorCode::kBadRequest, "format must be coco or yolo");
}

std::string detections_table(const json& result) {
  std::ostringstream out;
  out << "model " << result.at("model_id").get<std::string>() << ", "
      << result.at("detections").size() << " detection(s)\n";
  char line[160];
  std::snprintf(line, sizeof(line), "%-4s %-6s %-10s %10s %10s %10s %10s\n", "#", "class", "conf",
                "x_min", "y_min", "x_max", "y_max");
  out << line;
  int k = 0;
  for (const auto& d : result.at("detections")) {
    const auto& b = d.at("bbox");
    std::snprintf(line, sizeof(line), "%-4d %-6d %-10.4f %10.2f %10.2f %10.2f %10.2f\n", k++,
                  d.at("class_id").get<int>(), d.at("confidence").get<double>(), b[0].get<double>(),
                  b[1].get<double>(), b[2].get<double>(), b[3].get<double>());
    out << line;
  }
  return out.str();
}

struct Options {
  std::string project;
  std::string format = "json";
  std::string bench_format = "table";
  // serve
  int port = service::kDefaultPort;
  std::string ui_dir;
  // infer
  std::string model;
  std::string image;
  std::optional<double> conf;
  std::optional<double> nms_iou;
  std::string out;
  // bench
  std::string models;
  std::string part = "test";
  // split
  std::uint64_t seed = 0;
  std::string ratios = "0.7,0.15,0.15";
  // convert
  std::string from;
  std::string to;
  std::string images;
  std::string in;
  std::string classes;
  // register
  std::string manifest;
};

int run_serve(const Options& o) {
  if (o.port < 0 || o.port > 65535) throw Error(ErrorCode::kBadRequest, "port out of range");
  auto ws = std::make_shared<project::Workspace>(o.project);
  service::Server server(ws);
  if (!o.ui_dir.empty()) server.mount_static(o.ui_dir);
  const int port = server.bind(static_cast<std::uint16_t>(o.port));
  std::cerr << "listening on http://" << service::kLoopbackHost << ":" << port << "\n";
  server.listen();
  return 0;
}

int run_infer(const Options& o) {
  project::Workspace ws(o.project);
  const auto raster = runtime::load_image(o.image);
  runtime::InferenceOptions opts{o.conf, o.nms_iou};
  const json result = ws.describe(ws.registry().run_inference(o.model, raster, opts));
  if (o.format == "table") {
    std::cout << detections_table(result);
    if (!o.out.empty()) emit(result, o.out);
  } else {
    emit(result, o.out);
  }
  return 0;
}

int run_bench(const Options& o) {
  project::Workspace ws(o.project);
  const auto result = ws.benchmark(split_list(o.models), dataset::part_from_string(o.part));
  const json report = project::to_json(result);
  if (!o.out.empty()) emit(report, o.out);
  if (o.bench_format == "json") {
    if (o.out.empty()) emit(report, "");
  } else {
    std::cout << eval::format_ranking_table(result.ranking);
  }
  return 0;
}

int run_split(const Options& o) {
  const auto r = split_list(o.ratios);
  if (r.size() != 3) throw Error(ErrorCode::kBadRatios, "--ratios needs three comma-separated values");
  dataset::SplitRatios ratios;
  try {
    ratios = {std::stod(r[0]), std::stod(r[1]), std::stod(r[2])};
  } catch (const std::exception&) {
    throw Error(ErrorCode::kBadRatios, "--ratios values must be numbers");
  }
  project::Workspace ws(o.project);
  const auto split = ws.split(ratios, o.seed);
  if (o.format == "table") {
    std::cout << "train " << split.train.size() << "\nval   " << split.val.size() << "\ntest  "
              << split.test.size() << "\n";
  } else {
    emit(json::parse(dataset::split_to_json_text(split)), "");
  }
  return 0;
}

int run_convert(const Options& o) {
  const auto from = format_from_string(o.from);
  const auto to = format_from_string(o.to);
  const stdfs::path in = o.in;

  std::vector<std::string> class_names = split_list(o.classes);
  std::map<std::string, annotations::ImageDims> dims;
  std::vector<std::string> image_ids;
  if (!o.images.empty()) {
    for (const auto& r : dataset::scan_directory(o.images)) {
      dims[r.image_id] = {r.width, r.height};
      image_ids.push_back(r.image_id);
    }
  }

  std::vector<annotations::AnnotationSet> sets;
  if (from == annotations::Format::kCoco) {
    auto imported = annotations::import_coco(fs::read_text(in), class_names);
    if (class_names.empty()) class_names = imported.class_names;
    sets = std::move(imported.sets);
  } else {
    if (!stdfs::is_directory(in)) {
      throw Error(ErrorCode::kDirUnreadable, "--in must be a directory of YOLO label files");
    }
    if (class_names.empty() && stdfs::exists(in / "classes.txt")) class_names = read_class_file(in / "classes.txt");
    if (class_names.empty()) class_names = {"chromosome"};
    annotations::Payload files;
    for (const auto& entry : stdfs::directory_iterator(in)) {
      const auto name = entry.path().filename().string();
      if (entry.is_regular_file() && entry.path().extension() == ".txt" && name != "classes.txt") {
        files[name] = fs::read_text(entry.path());
      }
    }
    sets = annotations::import_yolo(files, dims);
    std::set<std::string> labelled;
    for (const auto& s : sets) labelled.insert(s.image_id);
    for (const auto& id : image_ids) {
      if (labelled.contains(id)) continue;
      annotations::AnnotationSet empty;
      empty.image_id = id;
      empty.image_width = dims[id].width;
      empty.image_height = dims[id].height;
      sets.push_back(std::move(empty));
    }
    std::sort(sets.begin(), sets.end(), [](const auto& a, const auto& b) { return a.image_id < b.image_id; });
  }

  const auto payload = annotations::export_annotations(sets, to, class_names, dims);
  const stdfs::path out = o.out;
  if (to == annotations::Format::kCoco) {
    fs::write_text_atomic(out, payload.at(annotations::kCocoFileName));
  } else {
    stdfs::create_directories(out);
    for (const auto& [name, content] : payload) fs::write_text_atomic(out / name, content);
    std::string listing;
    for (const auto& c : class_names) listing += c + "\n";
    fs::write_text_atomic(out / "classes.txt", listing);
  }
  std::size_t boxes = 0;
  for (const auto& s : sets) boxes += s.boxes.size();
  if (o.format == "table") {
    std::cout << sets.size() << " image(s), " << boxes << " box(es)\n";
  } else {
    emit({{"images", sets.size()}, {"boxes", boxes}, {"classes", class_names}}, "");
  }
  return 0;
}

int run_register(const Options& o) {
  project::Workspace ws(o.project);
  const auto descriptor = ws.register_model(runtime::load_manifest(o.manifest));
  emit(ws.describe(descriptor), "");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chromosome detection workbench"};
  app.require_subcommand(1);
  Options o;

  auto add_project = [&](CLI::App* cmd) {
    cmd->add_option("--project", o.project, "Project directory")->envname("AYC_PROJECT")->required();
  };
  auto add_format = [&](CLI::App* cmd, std::string& target) {
    cmd->add_option("--format", target, "Output format")
        ->check(CLI::IsMember({"json", "table"}))
        ->capture_default_str();
  };

  auto* serve = app.add_subcommand("serve", "Run the local HTTP service");
  serve->add_option("--port", o.port, "Port on 127.0.0.1")->capture_default_str();
  serve->add_option("--ui", o.ui_dir, "Static UI directory to serve at /");
  add_project(serve);

  auto* infer = app.add_subcommand("infer", "Detect objects in one image");
  infer->add_option("--model", o.model, "Registered model id")->required();
  infer->add_option("--image", o.image, "Image file")->required();
  infer->add_option("--conf", o.conf, "Confidence threshold");
  infer->add_option("--nms-iou", o.nms_iou, "NMS IoU threshold");
  infer->add_option("--out", o.out, "Write detections JSON here");
  add_project(infer);

  auto* bench = app.add_subcommand("bench", "Evaluate and rank models on a split part");
  bench->add_option("--models", o.models, "Comma-separated model ids")->required();
  bench->add_option("--part", o.part, "train, val or test")->capture_default_str();
  bench->add_option("--out", o.out, "Write the report JSON here");
  add_project(bench);

  auto* split = app.add_subcommand("split", "Write a seeded train/val/test split");
  split->add_option("--seed", o.seed, "Shuffle seed")->required();
  split->add_option("--ratios", o.ratios, "train,val,test")->capture_default_str();
  add_project(split);

  auto* convert = app.add_subcommand("convert", "Convert annotations between COCO and YOLO");
  convert->add_option("--from", o.from, "coco or yolo")->required();
  convert->add_option("--to", o.to, "coco or yolo")->required();
  convert->add_option("--images", o.images, "Image directory (dimensions for YOLO)");
  convert->add_option("--in", o.in, "COCO file or YOLO label directory")->required();
  convert->add_option("--out", o.out, "COCO file or YOLO label directory")->required();
  convert->add_option("--classes", o.classes, "Comma-separated class names");

  auto* reg = app.add_subcommand("register", "Register an ONNX model into a project");
  reg->add_option("--manifest", o.manifest, "Manifest JSON")->required();
  add_project(reg);

  for (auto* cmd : {infer, split, convert, reg}) add_format(cmd, o.format);
  add_format(bench, o.bench_format);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*serve) return run_serve(o);
    if (*infer) return run_infer(o);
    if (*bench) return run_bench(o);
    if (*split) return run_split(o);
    if (*convert) return run_convert(o);
    if (*reg) return run_register(o);
  } catch (const Error& e) {
    std::cerr << to_api_error(e).dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << to_api_error(ErrorCode::kInternal, e.what()).dump() << "\n";
    return 1;
  }
  return 0;
}
