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

"""Writes the constant-output ONNX fixtures under tests/assets.

Each graph ignores its pixels: GlobalAveragePool -> 1x1 Conv with zero
weights and the payload as bias -> Reshape. The output is the payload for
every input image.
"""

import json
import pathlib
import sys

import numpy as np
import onnx
from onnx import TensorProto, helper, numpy_helper

ASSETS = pathlib.Path(__file__).resolve().parent.parent / "tests" / "assets"

GRID_PAYLOAD = np.array(
    [[[320, 100, 322, 500],
      [240, 100, 242, 400],
      [64, 40, 64, 30],
      [32, 40, 32, 30],
      [0.92, 0.30, 0.80, 0.10]]],
    dtype=np.float32,
)

TRIPLET_BOXES = np.array(
    [[[0.10, 0.10, 0.30, 0.20],
      [0.50, 0.50, 0.90, 0.80],
      [0.12, 0.10, 0.30, 0.20]]],
    dtype=np.float32,
)
TRIPLET_SCORES = np.array([[0.90, 0.60, 0.20]], dtype=np.float32)
TRIPLET_LABELS = np.array([[1, 2, 1]], dtype=np.float32)


def constant_branch(tag, payload):
    n = payload.size
    inits = [
        numpy_helper.from_array(np.zeros((n, 3, 1, 1), np.float32), f"{tag}_w"),
        numpy_helper.from_array(payload.reshape(-1), f"{tag}_b"),
        numpy_helper.from_array(np.array(payload.shape, np.int64), f"{tag}_shape"),
    ]
    nodes = [
        helper.make_node("Conv", ["pooled", f"{tag}_w", f"{tag}_b"], [f"{tag}_c"], kernel_shape=[1, 1]),
        helper.make_node("Reshape", [f"{tag}_c", f"{tag}_shape"], [tag]),
    ]
    out = helper.make_tensor_value_info(tag, TensorProto.FLOAT, list(payload.shape))
    return nodes, inits, out


def build(size, outputs):
    x = helper.make_tensor_value_info("images", TensorProto.FLOAT, [1, 3, size, size])
    nodes = [helper.make_node("GlobalAveragePool", ["images"], ["pooled"])]
    inits, outs = [], []
    for tag, payload in outputs:
        n, i, o = constant_branch(tag, payload)
        nodes += n
        inits += i
        outs.append(o)
    graph = helper.make_graph(nodes, "fixture", [x], outs, initializer=inits)
    model = helper.make_model(graph, opset_imports=[helper.make_opsetid("", 13)])
    model.ir_version = 7
    onnx.checker.check_model(model)
    return model


def write(name, model, manifest):
    onnx.save(model, ASSETS / f"{name}.onnx")
    text = json.dumps(manifest, indent=2) + "\n"
    (ASSETS / f"{name}.manifest.json").write_text(text)


def main():
    ASSETS.mkdir(parents=True, exist_ok=True)
    write("fixture_grid", build(640, [("output0", GRID_PAYLOAD)]), {
        "model_id": "fixture-grid",
        "display_name": "Constant grid fixture",
        "file": "fixture_grid.onnx",
        "input": {"width": 640, "height": 640, "channel_order": "rgb",
                  "mean": [0, 0, 0], "scale": [1 / 255, 1 / 255, 1 / 255]},
        "decode": {"variant": "combined_grid", "output": "output0", "layout": "channels_first"},
        "class_names": ["chromosome"],
        "defaults": {"confidence": 0.25, "nms_iou": 0.45},
    })
    write("fixture_triplet", build(320, [("boxes", TRIPLET_BOXES), ("scores", TRIPLET_SCORES),
                                         ("labels", TRIPLET_LABELS)]), {
        "model_id": "fixture-triplet",
        "display_name": "Constant triplet fixture",
        "file": "fixture_triplet.onnx",
        "input": {"width": 320, "height": 320, "channel_order": "bgr"},
        "decode": {"variant": "triplet", "boxes": "boxes", "scores": "scores", "labels": "labels",
                   "coordinate_space": "normalized", "label_offset": 1},
        "class_names": ["chromosome", "nucleus"],
        "defaults": {"confidence": 0.5, "nms_iou": 0.5},
    })
    return 0


if __name__ == "__main__":
    sys.exit(main())
