# Copyright 2026 The ayc Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Chromosome detection workbench: Python bindings over the native core."""

from __future__ import annotations

import functools
import json
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

from . import _ayc

__all__ = [
    "AycError",
    "DEFAULT_CONFIDENCE",
    "DEFAULT_NMS_IOU",
    "Workspace",
    "coco_to_yolo",
    "evaluate",
    "filter_by_confidence",
    "iou",
    "nms",
    "split_dataset",
    "yolo_to_coco",
]

DEFAULT_CONFIDENCE = _ayc.DEFAULT_CONFIDENCE
DEFAULT_NMS_IOU = _ayc.DEFAULT_NMS_IOU


class AycError(RuntimeError):
    """A typed error from the core, carrying the ApiError fields."""

    def __init__(self, code: str, message: str, details: Any = None):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message
        self.details = details


def _translate(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except _ayc.NativeError as e:
            body = json.loads(str(e))
            raise AycError(body["code"], body["message"], body.get("details")) from None

    return wrapper


iou = _translate(_ayc.iou)
nms = _translate(_ayc.nms)
filter_by_confidence = _translate(_ayc.filter_by_confidence)


@_translate
def evaluate(detections, ground_truth, class_names: Sequence[str], iou_threshold: float = 0.5,
             model_id: str = "") -> dict:
    return json.loads(_ayc.evaluate(detections, ground_truth, iou_threshold, list(class_names), model_id))


@_translate
def split_dataset(image_ids: Iterable[str], seed: int, ratios=(0.70, 0.15, 0.15)) -> dict:
    return json.loads(_ayc.split_dataset(list(image_ids), tuple(ratios), seed))


@_translate
def coco_to_yolo(coco_text: str, class_names: Sequence[str] = ()) -> tuple[dict, list]:
    return _ayc.coco_to_yolo(coco_text, list(class_names))


@_translate
def yolo_to_coco(files: dict, dims: dict, class_names: Sequence[str]) -> dict:
    return json.loads(_ayc.yolo_to_coco(files, dims, list(class_names)))


class Workspace:
    """A project directory: models, images, annotations, split and logs."""

    def __init__(self, root: str | Path):
        self._native = _translate(_ayc.Workspace)(Path(root))

    @_translate
    def register_model(self, manifest_path: str | Path) -> dict:
        return json.loads(self._native.register_model(Path(manifest_path)))

    @_translate
    def activate(self, model_id: str) -> dict:
        return json.loads(self._native.activate(model_id))

    @_translate
    def models(self) -> dict:
        return json.loads(self._native.models())

    @_translate
    def infer(self, image_id: Optional[str] = None, image_path: str | Path | None = None,
              model_id: Optional[str] = None, confidence: Optional[float] = None,
              nms_iou: Optional[float] = None) -> dict:
        path = Path(image_path) if image_path is not None else None
        return json.loads(self._native.infer(image_id, path, model_id, confidence, nms_iou))

    @_translate
    def split(self, seed: int, ratios=(0.70, 0.15, 0.15)) -> dict:
        return json.loads(self._native.split(seed, tuple(ratios)))

    @_translate
    def benchmark(self, model_ids: Sequence[str], part: str = "test") -> dict:
        return json.loads(self._native.benchmark(list(model_ids), part))

    @_translate
    def images(self) -> list:
        return json.loads(self._native.images())

    @_translate
    def annotations(self, image_id: str) -> dict:
        return json.loads(self._native.annotations(image_id))

    @_translate
    def commit(self, image_id: str, edit: dict) -> dict:
        return json.loads(self._native.commit(image_id, json.dumps(edit)))

    @_translate
    def audit(self, image_id: str) -> list:
        return json.loads(self._native.audit(image_id))

    @_translate
    def export_annotations(self, format: str) -> dict:
        return self._native.export_annotations(format)

    @_translate
    def ingest_log(self, model_id: str, csv: str) -> dict:
        return json.loads(self._native.ingest_log(model_id, csv))
