"""Regenerate the frontend test fixtures from the real Python service.

Run from the repository root after changing the service or the canonical
serializer:

    python3 frontend/tests/fixtures/generate_fixtures.py

Every *.json file written here is the exact byte payload the HTTP
service (or the CLI) produced, so the frontend tests can assert
byte-for-byte display fidelity without a live server.
"""
import json
import pathlib
import subprocess
import sys
import tempfile

from fastapi.testclient import TestClient

from affground import (
    EmbeddingTable,
    EmbeddingVector,
    GraspCandidate,
    GraspRect,
    GroundConfig,
    Scene,
    SceneCandidate,
    build_kb,
)
from affground.dataio import save_embeddings, save_kb, save_scene
from affground.engine import GroundTruth
from affground.service import ServiceState, create_app

import numpy as np

OUT = pathlib.Path(__file__).parent

# Two-candidate desk scene: a pen-like region and a hammer-like region.
FLIP_WEIGHTS = [1.0, 1.0, 0.0]
# Edits that hand the "write" query to the hammer region (under FLIP_WEIGHTS):
# starve the pen's paths and give the hammer a strong tip_shaped path.
FLIP_EDITS = [
    {"kind": "vp", "from": "write", "to": "ink_bearing", "weight": 0.0},
    {"kind": "po", "from": "ink_bearing", "to": "pen", "weight": 0.0},
    {"kind": "po", "from": "tip_shaped", "to": "pen", "weight": 0.0},
    {"kind": "po", "from": "tip_shaped", "to": "hammer", "weight": 1.0},
]


def unit(dim, i, scale=1.0):
    v = np.zeros(dim, dtype=np.float32)
    v[i] = scale
    return v


def make_state():
    kb = build_kb(
        verbs=["write", "cut"],
        properties=["tip_shaped", "ink_bearing", "sharp"],
        objects=["pen", "hammer", "scissors"],
        vp_edges={
            ("write", "tip_shaped"): 0.9,
            ("write", "ink_bearing"): 0.7,
            ("cut", "sharp"): 1.0,
        },
        po_edges={
            ("tip_shaped", "pen"): 0.8,
            ("ink_bearing", "pen"): 0.6,
            ("sharp", "scissors"): 0.9,
        },
    )
    d = 8
    table = EmbeddingTable(
        [
            EmbeddingVector("write", unit(d, 0)),
            EmbeddingVector("cut", unit(d, 1)),
            EmbeddingVector("pen", unit(d, 0) * 0.9 + unit(d, 2) * 0.1),
            EmbeddingVector("hammer", unit(d, 3)),
            EmbeddingVector("scissors", unit(d, 1) * 0.9 + unit(d, 4) * 0.1),
            EmbeddingVector("roi_pen", unit(d, 0) * 0.8 + unit(d, 2) * 0.2),
            EmbeddingVector("roi_hammer", unit(d, 3) * 0.9 + unit(d, 5) * 0.1),
        ]
    )
    scene = Scene(
        scene_id="desk",
        candidates=(
            SceneCandidate(
                roi_id="roi_a",
                bbox=(10, 10, 40, 40),
                grasps=(GraspCandidate(GraspRect(50, 50, 20, 10, 0.0), 0.9),),
                embedding_id="roi_pen",
                hypothesis_label="pen",
            ),
            SceneCandidate(
                roi_id="roi_b",
                bbox=(60, 10, 40, 40),
                grasps=(GraspCandidate(GraspRect(50, 50, 20, 10, 0.0), 0.8),),
                embedding_id="roi_hammer",
                hypothesis_label="hammer",
            ),
        ),
        ground_truth=GroundTruth(
            verb="write",
            target_roi_id="roi_a",
            target_bbox=(10, 10, 40, 40),
            gt_grasp_rects=(GraspRect(50, 50, 20, 10, 0.0),),
        ),
    )
    return ServiceState(
        kb=kb,
        scenes={"desk": scene},
        embeddings=table,
        config=GroundConfig(hypothesis_mode="labels"),
    )


def dump(name, response):
    (OUT / name).write_bytes(response.content)
    return response.status_code


def main():
    state = make_state()
    client = TestClient(create_app(state), raise_server_exceptions=False)
    statuses = {}

    statuses["health.json"] = dump("health.json", client.get("/v1/health"))
    statuses["kb_v1.json"] = dump("kb_v1.json", client.get("/v1/kb"))
    statuses["scene_desk.json"] = dump("scene_desk.json", client.get("/v1/scenes/desk"))
    statuses["ground_write.json"] = dump(
        "ground_write.json",
        client.post("/v1/ground", json={"scene_id": "desk", "verb": "write"}),
    )
    statuses["ground_unknown_verb.json"] = dump(
        "ground_unknown_verb.json",
        client.post("/v1/ground", json={"scene_id": "desk", "verb": "juggle"}),
    )
    statuses["invalid_edit_422.json"] = dump(
        "invalid_edit_422.json",
        client.patch(
            "/v1/kb/edges",
            json={"edits": [{"kind": "po", "from": "no_such_property",
                             "to": "pen", "weight": 0.5}]},
        ),
    )
    statuses["ground_preflip.json"] = dump(
        "ground_preflip.json",
        client.post(
            "/v1/ground",
            json={"scene_id": "desk", "verb": "write", "weights": FLIP_WEIGHTS},
        ),
    )
    statuses["whatif_flip.json"] = dump(
        "whatif_flip.json",
        client.post(
            "/v1/whatif",
            json={"scene_id": "desk", "verb": "write",
                  "weights": FLIP_WEIGHTS, "edits": FLIP_EDITS},
        ),
    )
    # the what-if must not have advanced the version
    assert client.get("/v1/kb/version").json()["version"] == 1

    statuses["patch_flip.json"] = dump(
        "patch_flip.json", client.patch("/v1/kb/edges", json={"edits": FLIP_EDITS})
    )
    statuses["ground_after_commit.json"] = dump(
        "ground_after_commit.json",
        client.post(
            "/v1/ground",
            json={"scene_id": "desk", "verb": "write", "weights": FLIP_WEIGHTS},
        ),
    )
    kb_after = client.get("/v1/kb").content

    # cross-entry-point check: a fresh CLI run on the exported KB must
    # produce the same ranking the UI displays after the commit
    with tempfile.TemporaryDirectory() as td:
        tdp = pathlib.Path(td)
        (tdp / "kb.json").write_bytes(kb_after)
        (tdp / "scene.json").write_bytes(save_scene(state.scenes["desk"]))
        (tdp / "emb.bin").write_bytes(save_embeddings(state.embeddings))
        out = subprocess.run(
            [
                sys.executable, "-m", "affground.cli", "ground",
                "--scene", str(tdp / "scene.json"),
                "--kb", str(tdp / "kb.json"),
                "--embeddings", str(tdp / "emb.bin"),
                "--verb", "write",
                "--weights", ",".join(str(w) for w in FLIP_WEIGHTS),
                "--mode", "labels",
            ],
            capture_output=True, check=True,
        )
        (OUT / "cli_after_commit.json").write_bytes(out.stdout)
        statuses["cli_after_commit.json"] = 0

    (OUT / "manifest.json").write_text(
        json.dumps({"statuses": statuses, "flip_weights": FLIP_WEIGHTS,
                    "flip_edits": FLIP_EDITS}, indent=2, sort_keys=True) + "\n"
    )
    print("wrote", len(statuses) + 1, "fixtures to", OUT)


if __name__ == "__main__":
    main()
