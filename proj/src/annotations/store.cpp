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

#include "ayc/annotations/store.hpp"

#include <fstream>
#include <sstream>

#include "ayc/core/error.hpp"
#include "ayc/core/fs.hpp"

namespace ayc::annotations {
namespace {

constexpr const char* kCurrentFile = "annotations.json";
constexpr const char* kBaselineFile = "annotations.base.json";
constexpr const char* kAuditFile = "audit.log";

void check_edit_classes(const Edit& edit, const std::vector<std::string>& class_names) {
  auto check = [&](int class_id) {
    if (class_id >= static_cast<int>(class_names.size())) {
      throw Error(ErrorCode::kUnknownClass,
                  "class id " + std::to_string(class_id) + " has no entry in the class list");
    }
  };
  if (const auto* add = std::get_if<AddBox>(&edit.op)) check(add->class_id);
  if (const auto* acc = std::get_if<AcceptDetections>(&edit.op)) {
    for (const auto& d : acc->detections) check(d.class_id);
  }
}

}  // namespace

nlohmann::json to_json(const AuditRecord& record) {
  return {{"image_id", record.image_id}, {"revision", record.revision}, {"edit", to_json(record.edit)}};
}

AuditRecord audit_record_from_json(const nlohmann::json& doc) {
  try {
    return {doc.at("image_id").get<std::string>(), doc.at("revision").get<std::int64_t>(),
            edit_from_json(doc.at("edit"))};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("malformed audit record: ") + e.what());
  }
}

AnnotationStore::AnnotationStore(std::filesystem::path project_dir) : dir_(std::move(project_dir)) {
  if (!dir_.empty()) load();
}

void AnnotationStore::load() {
  const auto current_path = path(kCurrentFile);
  if (std::filesystem::exists(current_path)) {
    auto imported = import_coco(fs::read_text(current_path), {}, /*store_fields=*/true);
    if (!imported.class_names.empty()) class_names_ = imported.class_names;
    for (auto& s : imported.sets) {
      auto slot = std::make_shared<Slot>();
      slot->current = std::make_shared<const AnnotationSet>(s);
      slots_[s.image_id] = slot;
    }
    const auto base_path = path(kBaselineFile);
    if (std::filesystem::exists(base_path)) {
      for (auto& s : import_coco(fs::read_text(base_path), class_names_, true).sets) {
        baseline_[s.image_id] = std::move(s);
      }
    } else {
      for (auto& s : imported.sets) baseline_[s.image_id] = std::move(s);
    }
  }
  const auto audit_path = path(kAuditFile);
  if (std::filesystem::exists(audit_path)) {
    std::istringstream lines(fs::read_text(audit_path));
    for (std::string line; std::getline(lines, line);) {
      if (line.empty()) continue;
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::kParseError, std::string("corrupt audit log: ") + e.what());
      }
      audit_.push_back(audit_record_from_json(doc));
    }
  }
}

void AnnotationStore::persist_locked() const {
  if (dir_.empty()) return;
  const auto sets = snapshot();
  fs::write_text_atomic(path(kCurrentFile), export_coco(sets, class_names_, true));
  std::vector<AnnotationSet> base;
  {
    std::shared_lock lock(map_mutex_);
    for (const auto& [id, s] : baseline_) base.push_back(s);
  }
  fs::write_text_atomic(path(kBaselineFile), export_coco(base, class_names_, true));
}

void AnnotationStore::import_sets(std::vector<AnnotationSet> sets,
                                  std::vector<std::string> class_names) {
  std::lock_guard io(io_mutex_);
  {
    std::unique_lock lock(map_mutex_);
    if (!class_names.empty()) class_names_ = std::move(class_names);
    slots_.clear();
    baseline_.clear();
    for (auto& s : sets) {
      s.revision = 0;
      auto slot = std::make_shared<Slot>();
      slot->current = std::make_shared<const AnnotationSet>(s);
      slots_[s.image_id] = slot;
      baseline_[s.image_id] = std::move(s);
    }
    audit_.clear();
  }
  if (!dir_.empty()) {
    fs::write_text_atomic(path(kAuditFile), "");
    persist_locked();
  }
}

void AnnotationStore::ensure_image(const std::string& image_id, int width, int height) {
  std::lock_guard io(io_mutex_);
  {
    std::unique_lock lock(map_mutex_);
    auto it = slots_.find(image_id);
    if (it != slots_.end()) {
      const auto& cur = *it->second->current;
      if (cur.image_width > 0 && cur.image_height > 0) return;
      auto updated = cur;
      updated.image_width = width;
      updated.image_height = height;
      it->second->current = std::make_shared<const AnnotationSet>(std::move(updated));
      auto& base = baseline_[image_id];
      base.image_id = image_id;
      base.image_width = width;
      base.image_height = height;
    } else {
      AnnotationSet empty;
      empty.image_id = image_id;
      empty.image_width = width;
      empty.image_height = height;
      auto slot = std::make_shared<Slot>();
      slot->current = std::make_shared<const AnnotationSet>(empty);
      slots_[image_id] = slot;
      baseline_[image_id] = std::move(empty);
    }
  }
  persist_locked();
}

std::shared_ptr<AnnotationStore::Slot> AnnotationStore::slot(const std::string& image_id) const {
  std::shared_lock lock(map_mutex_);
  auto it = slots_.find(image_id);
  if (it == slots_.end()) {
    throw Error(ErrorCode::kUnknownImageId, "no annotation set for image '" + image_id + "'");
  }
  return it->second;
}

std::shared_ptr<const AnnotationSet> AnnotationStore::get(const std::string& image_id) const {
  std::shared_lock lock(map_mutex_);
  auto it = slots_.find(image_id);
  if (it == slots_.end()) return nullptr;
  return it->second->current;
}

std::vector<std::string> AnnotationStore::image_ids() const {
  std::shared_lock lock(map_mutex_);
  std::vector<std::string> ids;
  for (const auto& [id, s] : slots_) ids.push_back(id);
  return ids;
}

std::vector<AnnotationSet> AnnotationStore::snapshot() const {
  std::shared_lock lock(map_mutex_);
  std::vector<AnnotationSet> out;
  for (const auto& [id, s] : slots_) out.push_back(*s->current);
  return out;
}

AnnotationSet AnnotationStore::commit(const std::string& image_id, const Edit& edit) {
  auto s = slot(image_id);
  std::lock_guard commit_lock(s->commit_mutex);
  std::shared_ptr<const AnnotationSet> current;
  {
    std::shared_lock lock(map_mutex_);
    current = s->current;
  }
  check_edit_classes(edit, class_names_);
  AnnotationSet next = apply_edit(*current, edit);

  std::lock_guard io(io_mutex_);
  AuditRecord record{image_id, next.revision, edit};
  if (!dir_.empty()) fs::append_line(path(kAuditFile), to_json(record).dump());
  audit_.push_back(std::move(record));
  {
    std::unique_lock lock(map_mutex_);
    s->current = std::make_shared<const AnnotationSet>(next);
  }
  persist_locked();
  return next;
}

std::vector<AuditRecord> AnnotationStore::audit_log(const std::string& image_id) const {
  std::lock_guard io(io_mutex_);
  std::vector<AuditRecord> out;
  for (const auto& r : audit_) {
    if (r.image_id == image_id) out.push_back(r);
  }
  return out;
}

AnnotationSet AnnotationStore::replay(const std::string& image_id) const {
  AnnotationSet set;
  {
    std::shared_lock lock(map_mutex_);
    auto it = baseline_.find(image_id);
    if (it == baseline_.end()) {
      throw Error(ErrorCode::kUnknownImageId, "no annotation set for image '" + image_id + "'");
    }
    set = it->second;
  }
  for (const auto& record : audit_log(image_id)) {
    set = apply_edit(set, record.edit);
    if (set.revision != record.revision) {
      throw Error(ErrorCode::kParseError, "audit log revision gap for image '" + image_id + "'");
    }
  }
  return set;
}

Payload AnnotationStore::export_all(Format format) const {
  return export_annotations(snapshot(), format, class_names_);
}

}  // namespace ayc::annotations
