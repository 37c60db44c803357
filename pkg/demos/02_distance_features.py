"""The 22 distance features: what they measure and what they ignore.

Run:  python demos/02_distance_features.py
"""

import numpy as np

from signum.features import (
    FEATURE_NAMES,
    extract_gesture_features,
    extract_pose_features,
    features_to_csv,
    palm_length,
)
from signum.synthdata import canonical_hand

hand = canonical_hand(curl=[0.0, 0.8, 0.8, 0.8, 0.8], spread=[0.2, 0, 0, 0, 0])
features = extract_pose_features(hand)
print(f"palm length: {palm_length(hand):.3f} m (the normalisation baseline)\n")
for name, value in zip(FEATURE_NAMES, features.values):
    print(f"  {name:<16} {value:.4f}")

# Every feature is a joint-to-joint distance divided by the palm length, so
# moving, rotating, or uniformly scaling the hand changes nothing:
rotated = hand.transformed(
    rotation=np.array([[0, -1, 0], [1, 0, 0], [0, 0, 1]], dtype=float),
    translation=np.array([1.0, -2.0, 0.5]))
doubled = canonical_hand(curl=[0.0, 0.8, 0.8, 0.8, 0.8],
                         spread=[0.2, 0, 0, 0, 0], palm_length=0.18)
print("\nmax |delta| after rotation+translation:",
      float(np.max(np.abs(extract_pose_features(rotated).values - features.values))))
print("max |delta| after doubling hand size:   ",
      float(np.max(np.abs(extract_pose_features(doubled).values - features.values))))

# Multi-pose signs concatenate per-pose features with normalised translations:
# [pose0 (22), t0 (3), pose1 (22), t1 (3), pose2 (22)] -> 22 / 47 / 72 long.
from signum.handmodel import Category, PoseSnapshot, build_sign

second = canonical_hand(curl=[1, 0, 0, 1, 1], spread=[0, 0, 0, 0, 0])
second = second.transformed(translation=np.array([0.09, 0.0, 0.0]))
sign = build_sign("demo", "D", Category.WORD, [
    PoseSnapshot(hands=(hand,), pose_index=0),
    PoseSnapshot(hands=(second,), pose_index=1),
])
flat = extract_gesture_features(sign).flat
print(f"\n2-pose flat vector length: {len(flat)}")
print("translation block (offset / palm):", np.round(flat[22:25], 3))

# CSV export for offline inspection
print("\nCSV head:", features_to_csv([features.values]).split("\n")[0][:60], "...")
