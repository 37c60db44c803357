"""Real-time recognition over a frame stream: dwell detection and matching.

Run:  python demos/05_streaming.py
"""

from signum.dtree import TreeParams, fit
from signum.features import build_feature_matrix
from signum.stream import DwellConfig, PracticeMode, detect_keyposes, replay_stream
from signum.synthdata import GeneratorConfig, SignInstance, generate_corpus, script_stream

cfg = GeneratorConfig(seed=7)
db, _instances = generate_corpus(cfg)

# An overfit tree on the canonical templates: every replayed template must
# come back at confidence 1.0.
canon = [SignInstance(s.id, 0, s) for s in db.signs]
x, y = build_feature_matrix(canon, pad_arity=3)
tree = fit(x, y, TreeParams(max_depth=None, min_samples_split=2,
                            min_samples_leaf=1))

sentence = next(s for s in db.signs if s.arity == 3)
frames, plateaus = script_stream(sentence, cfg.timing)
print(f"scripted {sentence.id}: {len(frames)} frames at "
      f"{cfg.timing.frame_rate:.0f} Hz, plateaus {plateaus}")

# Dwell detection: a keypose is a maximal still interval (feature-space
# velocity under epsilon) held for at least dwell_min seconds.
keyposes = detect_keyposes(frames, DwellConfig())
print(f"dwell detector found {len(keyposes)} keyposes at",
      [round(k.primary_hand.timestamp, 3) for k in keyposes])

# The engine buffers keyposes, checks arity / confidence / translation
# direction, and emits an event (plus practice feedback when a mode is set).
messages = replay_stream(frames, tree, db,
                         mode=PracticeMode.TEST, target=sentence.id)
for message in messages:
    if message["type"] != "confidence":
        compact = {k: v for k, v in message.items() if k != "deviation"}
        print(message["type"], "->", compact)

confidences = [m for m in messages if m["type"] == "confidence"]
print(f"(plus {len(confidences)} per-frame confidence messages for live UI bars)")
