"""Driving the practice service end to end, in process.

Uses the ASGI test client so the demo is self-contained; `signum serve`
hosts the same app over a real socket for the browser frontend.

Run:  python demos/06_service_client.py
"""

import json

from fastapi.testclient import TestClient

from signum.dtree import TreeParams, fit
from signum.features import build_feature_matrix
from signum.service import create_app
from signum.stream import frame_to_dict
from signum.synthdata import GeneratorConfig, SignInstance, generate_corpus, script_stream

cfg = GeneratorConfig(seed=7)
db, _ = generate_corpus(cfg)
canon = [SignInstance(s.id, 0, s) for s in db.signs]
x, y = build_feature_matrix(canon, pad_arity=3)
tree = fit(x, y, TreeParams(max_depth=None, min_samples_split=2,
                            min_samples_leaf=1))

client = TestClient(create_app(db, tree, user_db_path="/tmp/demo_user_signs.json"))

catalog = client.get("/signs").json()
print(f"GET /signs -> {len(catalog)} entries; first:", catalog[0])

word = next(e for e in catalog if e["category"] == "word")
template = client.get(f"/signs/{word['id']}").json()
print(f"GET /signs/{word['id']} -> {len(template['poses'])} poses, "
      f"translations {template['translations']}")

# A test-mode session: stream the sign's frames, then finish; the server
# pushes confidence bars per frame and the event + pass/fail at the end.
sign = db.get(word["id"])
frames, _ = script_stream(sign, cfg.timing)
with client.websocket_connect(f"/session?mode=test&target={sign.id}") as ws:
    received = []
    for frame in frames:
        ws.send_text(json.dumps({"type": "frame", **frame_to_dict(frame)}))
        received.append(json.loads(ws.receive_text()))
        while received[-1]["type"] != "confidence":
            received.append(json.loads(ws.receive_text()))
    ws.send_text(json.dumps({"type": "finish"}))
    received.append(json.loads(ws.receive_text()))
    received.append(json.loads(ws.receive_text()))

for message in received:
    if message["type"] != "confidence":
        print("server:", {k: v for k, v in message.items() if k != "deviation"})
print(f"(plus {sum(m['type'] == 'confidence' for m in received)} confidence messages)")
