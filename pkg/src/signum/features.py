"""Distance features: 22 values per hand pose, assembled per gesture.

Every feature is a Euclidean distance between two of the 21 joints, divided
by the palm length (wrist to middle-finger base) so that features are
invariant to hand size as well as to rigid motion.  The index layout is a
fixed contract shared by the classifier, the stream engine, and every
serialized model:

    [0..4]    tip-base per finger (thumb, index, middle, ring, pinky)
    [5..14]   tip-tip for the 10 unordered finger pairs, in the order
              T-I, T-M, T-R, T-P, I-M, I-R, I-P, M-R, M-P, R-P
    [15..19]  tip-proximal per finger
    [20]      wrist to middle tip (hand extent)
    [21]      thumb tip to pinky base (hand spread)
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from signum.errors import SignumError
from signum.handmodel import (
    WRIST,
    Finger,
    FINGER_ORDER,
    HandFrame,
    PoseSnapshot,
    SignGesture,
    base_index,
    proximal_index,
    tip_index,
)

N_FEATURES = 22

#: Minimum palm length (metres) below which a hand is considered degenerate.
MIN_PALM_LENGTH = 1e-6

#: Value used to pad shorter flat vectors up to a common dimension when
#: mixing gesture arities in one training matrix.  Distances are >= 0, so a
#: negative pad is linearly separable from every real feature.
FLAT_PAD_VALUE = -1.0

TIP_TIP_PAIRS: tuple[tuple[Finger, Finger], ...] = (
    (Finger.THUMB, Finger.INDEX),
    (Finger.THUMB, Finger.MIDDLE),
    (Finger.THUMB, Finger.RING),
    (Finger.THUMB, Finger.PINKY),
    (Finger.INDEX, Finger.MIDDLE),
    (Finger.INDEX, Finger.RING),
    (Finger.INDEX, Finger.PINKY),
    (Finger.MIDDLE, Finger.RING),
    (Finger.MIDDLE, Finger.PINKY),
    (Finger.RING, Finger.PINKY),
)

_SHORT = {Finger.THUMB: "t", Finger.INDEX: "i", Finger.MIDDLE: "m",
          Finger.RING: "r", Finger.PINKY: "p"}

FEATURE_NAMES: tuple[str, ...] = tuple(
    [f"tipbase_{f.value}" for f in FINGER_ORDER]
    + [f"tiptip_{_SHORT[a]}_{_SHORT[b]}" for a, b in TIP_TIP_PAIRS]
    + [f"tipprox_{f.value}" for f in FINGER_ORDER]
    + ["extent", "spread"]
)

# endpoint joint-row indices for each of the 22 distances, in feature order
_IDX_A = np.array(
    [tip_index(f) for f in FINGER_ORDER]
    + [tip_index(a) for a, _ in TIP_TIP_PAIRS]
    + [tip_index(f) for f in FINGER_ORDER]
    + [WRIST, tip_index(Finger.THUMB)]
)
_IDX_B = np.array(
    [base_index(f) for f in FINGER_ORDER]
    + [tip_index(b) for _, b in TIP_TIP_PAIRS]
    + [proximal_index(f) for f in FINGER_ORDER]
    + [tip_index(Finger.MIDDLE), base_index(Finger.PINKY)]
)


class DegenerateHand(SignumError):
    """Palm length is too small to normalise against."""


class ArityMismatch(SignumError):
    """Pose count and translation count do not fit the 1-3 keypose contract."""


@dataclass(frozen=True)
class PoseFeatures:
    """The 22 normalised distances of one hand in one pose."""

    values: np.ndarray
    hand_side: object  # handmodel.Side

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        values.flags.writeable = False
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class GestureFeatures:
    """Per-pose features plus normalised translations, flattened in order.

    ``flat`` is [pose0, t0, pose1, t1, pose2] truncated to the gesture's
    arity, giving lengths 22 / 47 / 72 for 1 / 2 / 3 poses.
    """

    pose_features: tuple[PoseFeatures, ...]
    translation_features: tuple[np.ndarray, ...]
    flat: np.ndarray

    @property
    def arity(self) -> int:
        return len(self.pose_features)


def flat_length(arity: int) -> int:
    return N_FEATURES * arity + 3 * (arity - 1)


def palm_length(hand: HandFrame) -> float:
    """Wrist to middle-finger-base distance, the normalisation baseline."""
    length = float(np.linalg.norm(
        hand.joints[base_index(Finger.MIDDLE)] - hand.joints[WRIST]))
    if length < MIN_PALM_LENGTH:
        raise DegenerateHand(f"palm length {length:.3e} m below {MIN_PALM_LENGTH} m")
    return length


def extract_pose_features(hand: HandFrame, normalize: bool = True) -> PoseFeatures:
    """The 22 distances of one hand, divided by palm length unless disabled."""
    joints = hand.joints
    distances = np.linalg.norm(joints[_IDX_A] - joints[_IDX_B], axis=1)
    if normalize:
        distances = distances / palm_length(hand)
    return PoseFeatures(values=distances, hand_side=hand.side)


def snapshot_features(pose: PoseSnapshot, two_hands: bool = False,
                      normalize: bool = True) -> np.ndarray:
    """Feature vector of a pose: primary hand only, or the 45-value two-hand
    extension (right 22 + left 22 + normalised inter-wrist distance)."""
    if not two_hands:
        return extract_pose_features(pose.primary_hand, normalize).values
    from signum.handmodel import Side
    right, left = pose.hand(Side.RIGHT), pose.hand(Side.LEFT)
    if right is None or left is None:
        raise ArityMismatch("two-hand features need both hands in the pose")
    scale = palm_length(right) if normalize else 1.0
    wrist_gap = float(np.linalg.norm(right.wrist - left.wrist)) / scale
    return np.concatenate([
        extract_pose_features(right, normalize).values,
        extract_pose_features(left, normalize).values,
        [wrist_gap],
    ])


def extract_gesture_features(
    gesture: SignGesture | Sequence[PoseSnapshot],
    translations: Sequence[np.ndarray] | None = None,
    normalize: bool = True,
) -> GestureFeatures:
    """Assemble the flat vector for a sign template or a captured pose list.

    Translation components are the raw displacement vectors divided by the
    palm length of the first pose's primary hand, keeping motion scale-free.
    """
    if isinstance(gesture, SignGesture):
        poses: Sequence[PoseSnapshot] = gesture.poses
        translations = gesture.translations
    else:
        poses = list(gesture)
        translations = [] if translations is None else list(translations)
    if not 1 <= len(poses) <= 3:
        raise ArityMismatch(f"{len(poses)} poses; 1-3 supported")
    if len(translations) != len(poses) - 1:
        raise ArityMismatch(
            f"{len(translations)} translations for {len(poses)} poses")

    pose_feats = tuple(
        extract_pose_features(p.primary_hand, normalize) for p in poses)
    scale = palm_length(poses[0].primary_hand) if normalize else 1.0
    trans_feats = tuple(
        np.asarray(t, dtype=np.float64) / scale for t in translations)

    parts: list[np.ndarray] = [pose_feats[0].values]
    for t, pf in zip(trans_feats, pose_feats[1:]):
        parts.append(t)
        parts.append(pf.values)
    return GestureFeatures(pose_feats, trans_feats, np.concatenate(parts))


def padded_flat(flat: np.ndarray, arity: int = 3) -> np.ndarray:
    """Pad a flat vector with FLAT_PAD_VALUE up to the given arity's length."""
    target = flat_length(arity)
    if len(flat) > target:
        raise ArityMismatch(f"flat vector of {len(flat)} exceeds target {target}")
    if len(flat) == target:
        return np.asarray(flat, dtype=np.float64)
    out = np.full(target, FLAT_PAD_VALUE)
    out[: len(flat)] = flat
    return out


def build_feature_matrix(instances, pad_arity: int | None = None):
    """Stack labelled gesture instances into (X, y) for training.

    ``instances`` is any iterable of objects with ``gesture`` and ``sign_id``
    attributes (see synthdata.SignInstance).  With mixed arities the vectors
    are padded to the longest arity present, or to ``pad_arity`` if given.
    """
    items = list(instances)
    if not items:
        raise ArityMismatch("no instances to featurise")
    feats = [extract_gesture_features(it.gesture) for it in items]
    arities = {f.arity for f in feats}
    target = pad_arity if pad_arity is not None else max(arities)
    x = np.stack([padded_flat(f.flat, target) for f in feats])
    y = np.array([it.sign_id for it in items], dtype=object)
    return x, y


def features_to_csv(rows, labels: Sequence[str] | None = None) -> str:
    """Render 22-feature rows as CSV with the canonical header names."""
    header = ",".join(FEATURE_NAMES)
    if labels is not None:
        header = "label," + header
    lines = [header]
    for i, row in enumerate(rows):
        values = ",".join(repr(float(v)) for v in row)
        if labels is not None:
            values = f"{labels[i]},{values}"
        lines.append(values)
    return "\n".join(lines) + "\n"
