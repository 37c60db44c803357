"""Export a recorded practice-session message transcript for frontend tests.

Replays a scripted word-sign stream through the engine in test mode and
dumps every server message verbatim; the frontend's mocked-socket tests
assert that bars, events, and banners show exactly these values.

Run:  python scripts/export_session_fixture.py
"""

import json
from pathlib import Path

from signum.dtree import TreeParams, fit
from signum.features import build_feature_matrix
from signum.stream import PracticeMode, replay_stream
from signum.synthdata import GeneratorConfig, SignInstance, generate_corpus, script_stream

OUT = Path(__file__).resolve().parent.parent / "frontend" / "tests" / "session_fixture.json"


def main() -> None:
    cfg = GeneratorConfig(seed=7, alphabet_count=4, word_count=2,
                          sentence_count=1, instances_per_sign=2,
                          min_feature_separation=1.0)
    db, _ = generate_corpus(cfg)
    canon = [SignInstance(s.id, 0, s) for s in db.signs]
    x, y = build_feature_matrix(canon, pad_arity=3)
    tree = fit(x, y, TreeParams(max_depth=None, min_samples_split=2,
                                min_samples_leaf=1))
    sign = next(s for s in db.signs if s.arity == 2)
    frames, _ = script_stream(sign, cfg.timing)
    messages = replay_stream(frames, tree, db,
                             mode=PracticeMode.TEST, target=sign.id)
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps({
        "target": sign.id,
        "mode": "test",
        "messages": messages,
    }, indent=1) + "\n")
    counts = {}
    for m in messages:
        counts[m["type"]] = counts.get(m["type"], 0) + 1
    print(f"wrote {len(messages)} messages to {OUT}: {counts}")


if __name__ == "__main__":
    main()
