"""Synthetic sign corpus: parametric hands, jittered instances, frame streams.

Canonical keyposes come from a curl/spread parameter space; signs are placed
by greedy max-min selection in feature space so that classes stay separable
by construction, with the margin checked against the requested minimum.
Instances add per-joint Gaussian jitter plus a random global rotation and
translation, standing in for different signers and hand placements.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from signum.errors import SignumError
from signum.features import extract_gesture_features, extract_pose_features, padded_flat
from signum.handmodel import (
    CATEGORY_ARITY,
    FINGER_ORDER,
    Category,
    Finger,
    HandFrame,
    PoseSnapshot,
    SignDatabase,
    SignGesture,
    Side,
    build_sign,
)


class ParameterOutOfRange(SignumError):
    """A curl or spread parameter is outside its allowed interval."""


class CollisionUnresolvable(SignumError):
    """The parameter lattice cannot place this many mutually distinct signs."""


# finger layout around the palm: direction angle (radians about +z from +y)
# and base distance from the wrist as a fraction of palm length
_BASE_ANGLE = {Finger.THUMB: -0.90, Finger.INDEX: -0.25, Finger.MIDDLE: 0.0,
               Finger.RING: 0.22, Finger.PINKY: 0.45}
_BASE_RADIUS = {Finger.THUMB: 0.45, Finger.INDEX: 0.98, Finger.MIDDLE: 1.0,
                Finger.RING: 0.96, Finger.PINKY: 0.88}
# per-segment lengths (proximal, intermediate, distal) as palm fractions
_SEGMENTS = {
    Finger.THUMB: (0.40, 0.35, 0.30),
    Finger.INDEX: (0.42, 0.26, 0.20),
    Finger.MIDDLE: (0.45, 0.28, 0.22),
    Finger.RING: (0.42, 0.26, 0.20),
    Finger.PINKY: (0.34, 0.20, 0.16),
}
# full curl bends each segment this far (radians); at curl=1 the chain wraps
# far enough that every tip-base distance drops under half its flat value
_CURL_STEP = np.deg2rad(88.0)

MAX_SPREAD = 0.6  # radians, abduction limit

# transition motion directions available to dynamic signs; a coarse set so
# translations alone cannot identify a sign
_MOTION_DIRECTIONS = np.array([
    [1.0, 0.0, 0.0], [-1.0, 0.0, 0.0],
    [0.0, 1.0, 0.0], [0.0, -1.0, 0.0],
    [0.0, 0.0, 1.0], [0.0, 0.0, -1.0],
])


@dataclass(frozen=True)
class StreamTiming:
    """Timing profile for scripted frame streams."""

    frame_rate: float = 60.0
    plateau_duration: float = 0.5   # seconds each keypose is held
    transition_duration: float = 0.15  # seconds of motion between keyposes


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int = 7
    alphabet_count: int = 26
    word_count: int = 14
    sentence_count: int = 10
    instances_per_sign: int = 10
    jitter_sigma: float = 0.005     # metres, per joint coordinate
    palm_length: float = 0.09       # metres
    language: str = "LSE"
    max_rotation_deg: float = 15.0  # global per-instance rotation bound
    pool_size: int = 4000           # candidate poses per category draw
    min_feature_separation: float = 1.3   # L2 floor between alphabet poses
    min_consecutive_linf: float = 0.35    # L-inf floor between a sign's poses
    timing: StreamTiming = field(default_factory=StreamTiming)

    def __post_init__(self):
        if min(self.alphabet_count, self.word_count, self.sentence_count,
               self.instances_per_sign) < 1:
            raise ValueError("sign and instance counts must be >= 1")
        if self.jitter_sigma < 0:
            raise ValueError("jitter_sigma must be >= 0")
        if self.palm_length <= 0:
            raise ValueError("palm_length must be positive")


def _rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, *key]))


def _rotation_about(axis: np.ndarray, angle: float) -> np.ndarray:
    """Rodrigues rotation matrix about a unit axis."""
    x, y, z = axis
    k = np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])
    return np.eye(3) + np.sin(angle) * k + (1.0 - np.cos(angle)) * (k @ k)


def canonical_hand(curl: Sequence[float], spread: Sequence[float],
                   palm_length: float = 0.09, side: Side = Side.RIGHT,
                   timestamp: float = 0.0) -> HandFrame:
    """Deterministic 21-joint hand from five curl fractions and five spread
    angles.

    Fingers grow from their palm base along a fanned direction; curling
    rotates each successive segment further about the finger's in-plane axis,
    bending the chain towards the palm normal.  The wrist sits at the origin
    and the middle-finger base lands exactly ``palm_length`` away.
    """
    curl = np.asarray(curl, dtype=np.float64)
    spread = np.asarray(spread, dtype=np.float64)
    if curl.shape != (5,) or spread.shape != (5,):
        raise ParameterOutOfRange("need 5 curl and 5 spread values")
    if np.any(curl < 0.0) or np.any(curl > 1.0):
        raise ParameterOutOfRange("curl fractions must lie in [0, 1]")
    if np.any(np.abs(spread) > MAX_SPREAD):
        raise ParameterOutOfRange(f"spread angles must lie in [-{MAX_SPREAD}, {MAX_SPREAD}]")

    joints = np.zeros((21, 3))
    normal = np.array([0.0, 0.0, 1.0])  # palm normal; curl bends towards +z
    for f, finger in enumerate(FINGER_ORDER):
        theta = _BASE_ANGLE[finger]
        direction0 = np.array([-np.sin(theta), np.cos(theta), 0.0])
        base = _BASE_RADIUS[finger] * palm_length * direction0
        angle = theta + spread[f]
        straight = np.array([-np.sin(angle), np.cos(angle), 0.0])
        bend_axis = np.cross(straight, normal)
        bend_axis /= np.linalg.norm(bend_axis)
        position = base
        row = 1 + 4 * f
        joints[row] = base
        for s, seg_fraction in enumerate(_SEGMENTS[finger]):
            bend = curl[f] * _CURL_STEP * (s + 1)
            segment_dir = _rotation_about(bend_axis, bend) @ straight
            position = position + seg_fraction * palm_length * segment_dir
            joints[row + 1 + s] = position
    if side is Side.LEFT:
        joints = joints * np.array([-1.0, 1.0, 1.0])  # mirror across x
    return HandFrame(timestamp, side, joints)


@dataclass(frozen=True)
class SignInstance:
    """One recorded repetition of a sign, carrying its own jittered poses."""

    sign_id: str
    index: int
    gesture: SignGesture


def _pose_candidates(cfg: GeneratorConfig):
    """A seeded pool of (params, feature-vector) candidates.

    Curl values are biased towards 0 and 1 (closed or open fingers) because
    the curl extremes spread the feature vectors the furthest.
    """
    rng = _rng(cfg.seed, 100)
    params = []
    feats = []
    for _ in range(cfg.pool_size):
        curls = rng.uniform(0.0, 1.0, 5)
        snap = rng.random(5)
        curls = np.where(snap < 0.45, np.round(curls), curls)
        spreads = rng.uniform(-0.5, 0.5, 5)
        hand = canonical_hand(curls, spreads, cfg.palm_length)
        params.append((curls, spreads))
        feats.append(extract_pose_features(hand).values)
    return params, np.stack(feats)


def _greedy_select(feats: np.ndarray, stages: list[tuple[int, float, str]]
                   ) -> list[list[int]]:
    """Max-min greedy selection over one shared pool, in stages.

    Every selected pose keeps its distance to *all* previously selected
    poses, so later stages are separated from earlier ones too; each stage
    has its own separation floor, checked as its poses are drawn.
    """
    total = sum(count for count, _, _ in stages)
    if total > len(feats):
        raise CollisionUnresolvable(
            f"pool of {len(feats)} cannot yield {total} poses")
    chosen: list[int] = [0]
    min_dist = np.linalg.norm(feats - feats[0], axis=1)
    groups: list[list[int]] = []
    for count, floor, label in stages:
        group: list[int] = []
        if not groups:  # the seed pose opens the first stage
            group.append(chosen[0])
        while len(group) < count:
            candidate = int(np.argmax(min_dist))
            achieved = float(min_dist[candidate])
            if achieved < floor:
                raise CollisionUnresolvable(
                    f"{label}: best remaining candidate is {achieved:.3f} apart; "
                    f"{floor:.3f} required")
            group.append(candidate)
            chosen.append(candidate)
            min_dist = np.minimum(
                min_dist, np.linalg.norm(feats - feats[candidate], axis=1))
        groups.append(group)
    return groups


def _order_poses_for_signs(feats: np.ndarray, indices: list[int], arity: int,
                           linf_floor: float, label: str) -> list[list[int]]:
    """Group selected poses into per-sign sequences whose consecutive poses
    differ strongly on at least one feature, so dwell segmentation always
    sees the transition."""
    remaining = list(indices)
    sequences = []
    while remaining:
        seq = [remaining.pop(0)]
        for _ in range(arity - 1):
            last = feats[seq[-1]]
            gaps = [np.max(np.abs(feats[i] - last)) for i in remaining]
            pick = int(np.argmax(gaps))
            if gaps[pick] < linf_floor:
                raise CollisionUnresolvable(
                    f"{label}: cannot chain poses {linf_floor:.2f} apart per frame step")
            seq.append(remaining.pop(pick))
        sequences.append(seq)
    return sequences


def _alphabet_labels(count: int) -> list[tuple[str, str]]:
    letters = [chr(ord("A") + i) for i in range(26)]
    out = []
    for i in range(count):
        label = letters[i] if i < 26 else f"A{i + 1}"
        out.append((label.lower(), label))
    return out


def generate_corpus(cfg: GeneratorConfig = GeneratorConfig()
                    ) -> tuple[SignDatabase, list[SignInstance]]:
    """Build the canonical template database plus the jittered instance set."""
    lang = cfg.language.lower()
    # one shared pose pool: the alphabet takes the widest-spread poses at the
    # full separation floor, and dynamic signs' keyposes stay separated from
    # everything already placed (their flat vectors gain sqrt(arity) extra
    # margin from differing in every pose, plus the length padding)
    per_category = [
        (Category.ALPHABET, cfg.alphabet_count, cfg.min_feature_separation),
        (Category.WORD, cfg.word_count, cfg.min_feature_separation / np.sqrt(2.0)),
        (Category.SENTENCE, cfg.sentence_count, cfg.min_feature_separation / np.sqrt(3.0)),
    ]
    params, feats = _pose_candidates(cfg)
    groups = _greedy_select(feats, [
        (count * CATEGORY_ARITY[category], floor, category.value)
        for category, count, floor in per_category
    ])

    signs: list[SignGesture] = []
    sign_specs: list[tuple[SignGesture, list[tuple[np.ndarray, np.ndarray]]]] = []
    for cat_index, (category, count, _floor) in enumerate(per_category):
        arity = CATEGORY_ARITY[category]
        picked = groups[cat_index]
        sequences = (_order_poses_for_signs(feats, picked, arity,
                                            cfg.min_consecutive_linf, category.value)
                     if arity > 1 else [[i] for i in picked])

        motion_rng = _rng(cfg.seed, 200, cat_index)
        for s, seq in enumerate(sequences):
            if category is Category.ALPHABET:
                short, label = _alphabet_labels(cfg.alphabet_count)[s]
                sign_id = f"{lang}-alpha-{short}"
            elif category is Category.WORD:
                sign_id, label = f"{lang}-word-{s + 1:02d}", f"W{s + 1:02d}"
            else:
                sign_id, label = f"{lang}-sent-{s + 1:02d}", f"S{s + 1:02d}"

            hands = [canonical_hand(*params[i], cfg.palm_length) for i in seq]
            # recenter every pose on the first pose's centroid, then apply the
            # scripted offsets cumulatively so stored translations equal them
            anchor = hands[0].centroid()
            offset = np.zeros(3)
            poses = []
            for p, hand in enumerate(hands):
                if p > 0:
                    direction = _MOTION_DIRECTIONS[
                        motion_rng.integers(len(_MOTION_DIRECTIONS))]
                    offset = offset + direction * motion_rng.uniform(0.08, 0.12)
                shift = anchor - hand.centroid() + offset
                poses.append(PoseSnapshot(
                    hands=(hand.transformed(translation=shift),),
                    pose_index=p))
            sign = build_sign(sign_id, label, category, poses)
            signs.append(sign)
            sign_specs.append((sign, [params[i] for i in seq]))

    database = SignDatabase(version=1, language=cfg.language, signs=tuple(signs))
    database.validate()

    instances: list[SignInstance] = []
    for sign_index, (sign, _params) in enumerate(sign_specs):
        for i in range(cfg.instances_per_sign):
            instances.append(SignInstance(
                sign_id=sign.id, index=i,
                gesture=jitter_gesture(sign, cfg, sign_index, i)))
    return database, instances


def jitter_gesture(sign: SignGesture, cfg: GeneratorConfig,
                   sign_index: int, instance_index: int) -> SignGesture:
    """A signer-variation copy: one rigid placement for the whole sign plus
    independent per-joint noise on every pose."""
    rng = _rng(cfg.seed, 300, sign_index, instance_index)
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    angle = rng.uniform(0.0, np.deg2rad(cfg.max_rotation_deg))
    rotation = _rotation_about(axis, angle)
    translation = rng.uniform(-0.2, 0.2, 3)
    pivot = sign.poses[0].primary_hand.centroid()

    poses = []
    for pose in sign.poses:
        moved = pose.primary_hand.transformed(rotation, translation, pivot)
        noisy = moved.joints + rng.normal(0.0, cfg.jitter_sigma, (21, 3))
        poses.append(PoseSnapshot(
            hands=(HandFrame(0.0, moved.side, noisy),),
            pose_index=pose.pose_index))
    return build_sign(sign.id, sign.label, sign.category, poses,
                      handedness=sign.handedness)


# ---------------------------------------------------------------------------
# scripted frame streams


def script_stream(sign: SignGesture, timing: StreamTiming = StreamTiming()
                  ) -> tuple[list[HandFrame], list[tuple[float, float]]]:
    """Render a sign as a fixed-rate frame stream.

    Each keypose is held for the plateau duration, with linear joint
    interpolation during transitions.  Returns the frames plus the ground
    truth plateau intervals (first/last frame time of each hold).
    """
    fps = timing.frame_rate
    plateau_frames = int(round(timing.plateau_duration * fps))
    transition_frames = max(int(round(timing.transition_duration * fps)), 1)

    hands = [p.primary_hand for p in sign.poses]
    frames: list[HandFrame] = []
    plateaus: list[tuple[float, float]] = []
    t_index = 0

    def emit(joints: np.ndarray, side: Side):
        nonlocal t_index
        frames.append(HandFrame(t_index / fps, side, joints))
        t_index += 1

    for p, hand in enumerate(hands):
        start_t = t_index / fps
        for _ in range(plateau_frames):
            emit(hand.joints, hand.side)
        plateaus.append((start_t, (t_index - 1) / fps))
        if p + 1 < len(hands):
            nxt = hands[p + 1]
            for step in range(1, transition_frames):
                alpha = step / transition_frames
                emit((1.0 - alpha) * hand.joints + alpha * nxt.joints, hand.side)
    return frames, plateaus


def write_instances_jsonl(instances: Sequence[SignInstance], path) -> None:
    from signum.handmodel import gesture_to_dict
    with open(path, "w") as fh:
        for inst in instances:
            fh.write(json.dumps({
                "sign_id": inst.sign_id,
                "index": inst.index,
                "gesture": gesture_to_dict(inst.gesture),
            }) + "\n")


def read_instances_jsonl(path) -> list[SignInstance]:
    from signum.handmodel import gesture_from_dict
    out = []
    with open(path) as fh:
        for line in fh:
            if line.strip():
                raw = json.loads(line)
                out.append(SignInstance(
                    sign_id=str(raw["sign_id"]),
                    index=int(raw["index"]),
                    gesture=gesture_from_dict(raw["gesture"]),
                ))
    return out


def min_interclass_distance(db: SignDatabase) -> float:
    """Smallest pairwise L2 distance between canonical padded flat vectors."""
    flats = np.stack([
        padded_flat(extract_gesture_features(s).flat, 3) for s in db.signs
    ])
    best = np.inf
    for i in range(len(flats)):
        d = np.linalg.norm(flats[i + 1:] - flats[i], axis=1)
        if d.size:
            best = min(best, float(d.min()))
    return best
