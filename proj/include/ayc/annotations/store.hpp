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

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "ayc/annotations/annotation_set.hpp"
#include "ayc/annotations/interchange.hpp"

namespace ayc::annotations {

/// One committed edit as written to the audit log.
struct AuditRecord {
  std::string image_id;
  std::int64_t revision = 0;  // revision produced by the edit
  Edit edit;
};

nlohmann::json to_json(const AuditRecord& record);
AuditRecord audit_record_from_json(const nlohmann::json& doc);

/// Project ground truth with optimistic revisioning.
///
/// On disk, inside the project directory:
///   annotations.json       current sets (COCO-style, with store fields)
///   annotations.base.json  sets as of revision 0 (last import)
///   audit.log              one JSON AuditRecord per line, append-only
///
/// Commits are serialized per image; readers get immutable snapshots.
/// An empty `project_dir` keeps everything in memory.
class AnnotationStore {
 public:
  explicit AnnotationStore(std::filesystem::path project_dir = {});

  AnnotationStore(const AnnotationStore&) = delete;
  AnnotationStore& operator=(const AnnotationStore&) = delete;

  /// Replaces the whole store with `sets` at revision 0 and clears the
  /// audit log.
  void import_sets(std::vector<AnnotationSet> sets, std::vector<std::string> class_names);

  /// Creates an empty revision-0 set unless one exists; updates unknown
  /// dimensions of an existing set.
  void ensure_image(const std::string& image_id, int width, int height);

  std::shared_ptr<const AnnotationSet> get(const std::string& image_id) const;
  std::vector<std::string> image_ids() const;
  std::vector<AnnotationSet> snapshot() const;
  const std::vector<std::string>& class_names() const { return class_names_; }

  /// Validates and applies `edit` against the latest revision, appends the
  /// audit record and persists. Errors: UnknownImageId, RevisionConflict,
  /// UnknownBoxId, OutOfBounds, UnknownClass.
  AnnotationSet commit(const std::string& image_id, const Edit& edit);

  /// Audit records for one image, in commit order.
  std::vector<AuditRecord> audit_log(const std::string& image_id) const;

  /// Baseline plus every audit record for `image_id`, re-applied.
  AnnotationSet replay(const std::string& image_id) const;

  /// Current state in a single export payload.
  Payload export_all(Format format) const;

 private:
  struct Slot {
    std::mutex commit_mutex;
    std::shared_ptr<const AnnotationSet> current;
  };

  std::shared_ptr<Slot> slot(const std::string& image_id) const;
  void load();
  void persist_locked() const;  // requires io_mutex_
  std::filesystem::path path(const char* name) const { return dir_ / name; }

  std::filesystem::path dir_;
  std::vector<std::string> class_names_{"chromosome"};

  mutable std::shared_mutex map_mutex_;
  std::map<std::string, std::shared_ptr<Slot>> slots_;
  std::map<std::string, AnnotationSet> baseline_;

  mutable std::mutex io_mutex_;
  std::vector<AuditRecord> audit_;
};

}  // namespace ayc::annotations
