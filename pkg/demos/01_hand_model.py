"""Hands, signs, and the gesture database: build one, save it, load it back.

Run:  python demos/01_hand_model.py
"""

import json
import tempfile
from pathlib import Path

import numpy as np

from signum.handmodel import (
    Category,
    PoseSnapshot,
    SignDatabase,
    build_sign,
    compute_translations,
    load_database,
    save_database,
)
from signum.synthdata import canonical_hand

# A hand is 21 joints: wrist + 5 fingers x (base, proximal, intermediate, tip).
# canonical_hand builds one from five curl fractions and five spread angles.
open_hand = canonical_hand(curl=[0, 0, 0, 0, 0], spread=[0, 0, 0, 0, 0])
fist = canonical_hand(curl=[1, 1, 1, 1, 1], spread=[0, 0, 0, 0, 0])
print("open-hand index tip:", np.round(open_hand.joints[8], 4))
print("fist index tip:     ", np.round(fist.joints[8], 4))

# A static (alphabet) sign is one held pose; a dynamic sign chains 2-3 poses
# and also stores the hand's translation between them.
pose_a = PoseSnapshot(hands=(open_hand,), pose_index=0)
moved = fist.transformed(translation=np.array([0.10, 0.0, 0.0]))
pose_b = PoseSnapshot(hands=(moved,), pose_index=1)

static_sign = build_sign("demo-a", "A", Category.ALPHABET, [pose_a])
dynamic_sign = build_sign("demo-hello", "HELLO", Category.WORD, [pose_a, pose_b])
print("\nstatic sign arity:", static_sign.arity)
# the stored translation is the 21-joint centroid displacement, so it folds
# in the handshape change (open -> fist) on top of the 0.10 m shift
print("dynamic sign translation:",
      np.round(dynamic_sign.translations[0], 4), "(centroid displacement, m)")

# compute_translations is what build_sign used under the hood
print("recomputed:", np.round(compute_translations([pose_a, pose_b])[0], 4))

# Databases are immutable values; persistence round-trips exactly.
db = SignDatabase(version=1, language="LSE", signs=(static_sign, dynamic_sign))
with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "signs.json"
    save_database(db, path)
    head = json.dumps(json.loads(path.read_text()))[:80]
    print("\nfile starts with:", head, "...")
    print("round-trip equal:", load_database(path) == db)
