"""Hand-skeleton data model, gesture templates, and JSON persistence.

The skeleton is a uniform 21-joint model: one wrist joint plus five fingers
of four joints each (base, proximal, intermediate, tip).  The thumb's
"intermediate" is its distal joint; keeping all fingers at four joints makes
every downstream index computation uniform.  Positions are metres in a
right-handed, y-up world frame whose origin is arbitrary: all features built
on top are translation/rotation invariant, so the frame choice is
unobservable.

Joint row layout inside ``HandFrame.joints`` (shape ``(21, 3)``):

    row 0            wrist
    rows 1 + 4*f ... base, proximal, intermediate, tip of finger f
                     with f in thumb(0), index(1), middle(2), ring(3), pinky(4)
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from signum.errors import SignumError

SCHEMA_VERSION = 1

N_JOINTS = 21
JOINTS_PER_FINGER = 4
WRIST = 0


class Finger(Enum):
    THUMB = "thumb"
    INDEX = "index"
    MIDDLE = "middle"
    RING = "ring"
    PINKY = "pinky"


FINGER_ORDER: tuple[Finger, ...] = tuple(Finger)


class Side(Enum):
    LEFT = "left"
    RIGHT = "right"


class Category(Enum):
    ALPHABET = "alphabet"
    WORD = "word"
    SENTENCE = "sentence"


class Handedness(Enum):
    LEFT = "left"
    RIGHT = "right"
    BOTH = "both"


#: Number of keyposes a sign of each category carries in this corpus.
CATEGORY_ARITY: dict[Category, int] = {
    Category.ALPHABET: 1,
    Category.WORD: 2,
    Category.SENTENCE: 3,
}

JOINT_NAMES = ("base", "proximal", "intermediate", "tip")


def base_index(finger: Finger) -> int:
    return 1 + 4 * FINGER_ORDER.index(finger)


def proximal_index(finger: Finger) -> int:
    return 2 + 4 * FINGER_ORDER.index(finger)


def intermediate_index(finger: Finger) -> int:
    return 3 + 4 * FINGER_ORDER.index(finger)


def tip_index(finger: Finger) -> int:
    return 4 + 4 * FINGER_ORDER.index(finger)


class StreamTooShort(SignumError):
    """Fewer dwell points in the stream than the sign category requires."""


class InconsistentHandedness(SignumError):
    """The hand set changed in the middle of a capture."""


class SchemaVersionMismatch(SignumError):
    """Persisted file declares a schema version this code does not speak."""


class MalformedRecord(SignumError):
    """Persisted data violates the gesture file schema or an invariant."""


class IoFailure(SignumError):
    """Underlying file read/write failed."""


def _frozen_array(values, shape) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    if arr.shape != shape:
        raise ValueError(f"expected array of shape {shape}, got {arr.shape}")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class HandFrame:
    """One hand at one instant: a timestamp, a side, and 21 joint positions."""

    timestamp: float
    side: Side
    joints: np.ndarray  # (21, 3) float64, row layout per module docstring

    def __post_init__(self):
        object.__setattr__(self, "joints", _frozen_array(self.joints, (N_JOINTS, 3)))

    @property
    def wrist(self) -> np.ndarray:
        return self.joints[WRIST]

    def finger_joints(self, finger: Finger) -> np.ndarray:
        """The (4, 3) block [base, proximal, intermediate, tip] of one finger."""
        start = base_index(finger)
        return self.joints[start : start + 4]

    def centroid(self) -> np.ndarray:
        return self.joints.mean(axis=0)

    def transformed(self, rotation: np.ndarray | None = None,
                    translation: np.ndarray | None = None,
                    pivot: np.ndarray | None = None) -> "HandFrame":
        """Rigidly move the hand: rotate about ``pivot`` then translate."""
        pts = np.asarray(self.joints, dtype=np.float64)
        if rotation is not None:
            c = np.zeros(3) if pivot is None else np.asarray(pivot, dtype=np.float64)
            pts = (pts - c) @ np.asarray(rotation, dtype=np.float64).T + c
        if translation is not None:
            pts = pts + np.asarray(translation, dtype=np.float64)
        return HandFrame(self.timestamp, self.side, pts)

    def validate(self) -> None:
        """Raise MalformedRecord on non-finite joints or degenerate geometry."""
        if not np.all(np.isfinite(self.joints)):
            raise MalformedRecord("hand contains non-finite joint positions")
        palm = float(np.linalg.norm(self.joints[base_index(Finger.MIDDLE)] - self.wrist))
        if palm <= 0.0:
            raise MalformedRecord("palm length (wrist to middle base) must be positive")
        for finger in FINGER_ORDER:
            chain = self.finger_joints(finger)
            seg = np.linalg.norm(np.diff(chain, axis=0), axis=1)
            if np.any(seg <= 0.0):
                raise MalformedRecord(f"{finger.value} finger has a zero-length segment")

    def __eq__(self, other):
        if not isinstance(other, HandFrame):
            return NotImplemented
        return (self.timestamp == other.timestamp and self.side == other.side
                and np.array_equal(self.joints, other.joints))


@dataclass(frozen=True, eq=False)
class PoseSnapshot:
    """One keypose: one or two hands (distinct sides) plus its ordinal in the sign."""

    hands: tuple[HandFrame, ...]
    pose_index: int = 0

    def __post_init__(self):
        hands = tuple(self.hands)
        if not 1 <= len(hands) <= 2:
            raise ValueError("a pose holds one or two hands")
        if len({h.side for h in hands}) != len(hands):
            raise ValueError("at most one hand per side")
        object.__setattr__(self, "hands", hands)

    @property
    def sides(self) -> frozenset[Side]:
        return frozenset(h.side for h in self.hands)

    @property
    def primary_hand(self) -> HandFrame:
        """The right hand when present, otherwise the left."""
        for hand in self.hands:
            if hand.side is Side.RIGHT:
                return hand
        return self.hands[0]

    def hand(self, side: Side) -> HandFrame | None:
        for h in self.hands:
            if h.side is side:
                return h
        return None

    def __eq__(self, other):
        if not isinstance(other, PoseSnapshot):
            return NotImplemented
        return self.pose_index == other.pose_index and self.hands == other.hands


@dataclass(frozen=True, eq=False)
class SignGesture:
    """A labelled sign template: 1-3 keyposes plus inter-pose translations."""

    id: str
    label: str
    category: Category
    handedness: Handedness
    poses: tuple[PoseSnapshot, ...]
    translations: tuple[np.ndarray, ...]  # metres, one 3-vector per pose transition

    def __post_init__(self):
        object.__setattr__(self, "poses", tuple(self.poses))
        object.__setattr__(
            self, "translations",
            tuple(_frozen_array(t, (3,)) for t in self.translations),
        )

    @property
    def arity(self) -> int:
        return len(self.poses)

    def validate(self) -> None:
        if not self.id:
            raise MalformedRecord("sign id must be non-empty")
        if not self.label:
            raise MalformedRecord(f"sign {self.id!r} has an empty label")
        if not 1 <= len(self.poses) <= 3:
            raise MalformedRecord(
                f"sign {self.id!r} has {len(self.poses)} poses; 1-3 allowed")
        if len(self.translations) != len(self.poses) - 1:
            raise MalformedRecord(
                f"sign {self.id!r}: {len(self.translations)} translations for "
                f"{len(self.poses)} poses")
        expected_sides = {
            Handedness.LEFT: frozenset({Side.LEFT}),
            Handedness.RIGHT: frozenset({Side.RIGHT}),
            Handedness.BOTH: frozenset({Side.LEFT, Side.RIGHT}),
        }[self.handedness]
        for i, pose in enumerate(self.poses):
            if pose.pose_index != i:
                raise MalformedRecord(f"sign {self.id!r}: pose_index out of order")
            if pose.sides != expected_sides:
                raise MalformedRecord(
                    f"sign {self.id!r}: pose {i} hand set does not match handedness")
            for hand in pose.hands:
                hand.validate()
        for t in self.translations:
            if not np.all(np.isfinite(t)):
                raise MalformedRecord(f"sign {self.id!r}: non-finite translation")

    def __eq__(self, other):
        if not isinstance(other, SignGesture):
            return NotImplemented
        return (self.id == other.id and self.label == other.label
                and self.category == other.category
                and self.handedness == other.handedness
                and self.poses == other.poses
                and len(self.translations) == len(other.translations)
                and all(np.array_equal(a, b)
                        for a, b in zip(self.translations, other.translations)))


@dataclass(frozen=True, eq=False)
class SignDatabase:
    """An immutable collection of sign templates for one language."""

    version: int
    language: str  # "LSE" or "LIS"
    signs: tuple[SignGesture, ...]

    def __post_init__(self):
        object.__setattr__(self, "signs", tuple(self.signs))

    def validate(self) -> None:
        if self.language not in ("LSE", "LIS"):
            raise MalformedRecord(f"unknown language {self.language!r}")
        ids = [s.id for s in self.signs]
        if len(set(ids)) != len(ids):
            raise MalformedRecord("duplicate sign ids in database")
        for sign in self.signs:
            sign.validate()

    def get(self, sign_id: str) -> SignGesture | None:
        for sign in self.signs:
            if sign.id == sign_id:
                return sign
        return None

    def with_sign(self, sign: SignGesture) -> "SignDatabase":
        """A new database value with one sign appended (this one is unchanged)."""
        return SignDatabase(self.version, self.language, self.signs + (sign,))

    def __eq__(self, other):
        if not isinstance(other, SignDatabase):
            return NotImplemented
        return (self.version == other.version and self.language == other.language
                and self.signs == other.signs)

    def __len__(self) -> int:
        return len(self.signs)


# ---------------------------------------------------------------------------
# operations


def compute_translations(poses: Sequence[PoseSnapshot]) -> list[np.ndarray]:
    """Centroid displacement of the primary hand between consecutive poses.

    The centroid is the mean of all 21 joints; a single-pose sign yields [].
    """
    centroids = [p.primary_hand.centroid() for p in poses]
    return [centroids[i + 1] - centroids[i] for i in range(len(centroids) - 1)]


def capture_sign_pose(frames: Iterable[HandFrame], category: Category,
                      config=None) -> list[PoseSnapshot]:
    """Select the category's required number of keyposes from a frame stream.

    Keyposes are the dwell points found by the feature-space stillness
    detector; the first ``CATEGORY_ARITY[category]`` dwells are kept and
    re-indexed 0..n-1.
    """
    # imported here: the dwell detector lives in the streaming layer, which
    # itself depends on these types
    from signum.stream import DwellConfig, detect_keyposes

    frames = list(frames)
    if not frames:
        raise StreamTooShort("empty frame stream")
    sides = {f.side for f in frames}
    if len(sides) != 1:
        raise InconsistentHandedness("hand side changed during capture")
    required = CATEGORY_ARITY[category]
    snapshots = detect_keyposes(frames, config or DwellConfig())
    if len(snapshots) < required:
        raise StreamTooShort(
            f"{category.value} sign needs {required} keyposes, "
            f"found {len(snapshots)}")
    return [replace(snapshots[i], pose_index=i) for i in range(required)]


def build_sign(sign_id: str, label: str, category: Category,
               poses: Sequence[PoseSnapshot],
               handedness: Handedness | None = None) -> SignGesture:
    """Assemble a validated SignGesture from captured poses.

    Pose timestamps are normalised to zero (templates are static) and the
    inter-pose translations are computed from the poses themselves.
    """
    if handedness is None:
        sides = poses[0].sides
        if sides == {Side.LEFT, Side.RIGHT}:
            handedness = Handedness.BOTH
        elif Side.RIGHT in sides:
            handedness = Handedness.RIGHT
        else:
            handedness = Handedness.LEFT
    translations = compute_translations(poses)
    normalized = tuple(
        PoseSnapshot(
            hands=tuple(replace(h, timestamp=0.0) for h in p.hands),
            pose_index=i,
        )
        for i, p in enumerate(poses)
    )
    sign = SignGesture(sign_id, label, category, handedness, normalized,
                       tuple(translations))
    sign.validate()
    return sign


# ---------------------------------------------------------------------------
# JSON encoding (the gesture file format)


def _vec3(value) -> list[float]:
    return [float(value[0]), float(value[1]), float(value[2])]


def hand_to_dict(hand: HandFrame) -> dict:
    fingers = {}
    for finger in FINGER_ORDER:
        chain = hand.finger_joints(finger)
        fingers[finger.value] = {
            name: _vec3(chain[j]) for j, name in enumerate(JOINT_NAMES)
        }
    return {"side": hand.side.value, "wrist": _vec3(hand.wrist), "fingers": fingers}


def _parse_vec3(raw, context: str) -> np.ndarray:
    if (not isinstance(raw, (list, tuple)) or len(raw) != 3
            or not all(isinstance(v, (int, float)) for v in raw)):
        raise MalformedRecord(f"{context}: expected a 3-number array")
    vec = np.array(raw, dtype=np.float64)
    if not np.all(np.isfinite(vec)):
        raise MalformedRecord(f"{context}: non-finite coordinate")
    return vec


def hand_from_dict(raw: Mapping, context: str = "hand", timestamp: float = 0.0) -> HandFrame:
    try:
        side = Side(raw["side"])
    except (KeyError, ValueError, TypeError):
        raise MalformedRecord(f"{context}: missing or invalid side") from None
    joints = np.zeros((N_JOINTS, 3))
    joints[WRIST] = _parse_vec3(raw.get("wrist"), f"{context}: wrist")
    fingers = raw.get("fingers")
    if not isinstance(fingers, Mapping):
        raise MalformedRecord(f"{context}: missing fingers")
    for finger in FINGER_ORDER:
        chain = fingers.get(finger.value)
        if not isinstance(chain, Mapping):
            raise MalformedRecord(f"{context}: missing {finger.value} finger")
        for j, name in enumerate(JOINT_NAMES):
            if name not in chain:
                raise MalformedRecord(
                    f"{context}: {finger.value} finger missing {name} joint")
            joints[base_index(finger) + j] = _parse_vec3(
                chain[name], f"{context}: {finger.value}.{name}")
    return HandFrame(timestamp, side, joints)


def gesture_to_dict(sign: SignGesture) -> dict:
    return {
        "id": sign.id,
        "label": sign.label,
        "category": sign.category.value,
        "handedness": sign.handedness.value,
        "poses": [
            {"hands": [hand_to_dict(h) for h in pose.hands]} for pose in sign.poses
        ],
        "translations": [_vec3(t) for t in sign.translations],
    }


def gesture_from_dict(raw: Mapping) -> SignGesture:
    context = f"sign {raw.get('id', '?')!r}"
    try:
        category = Category(raw["category"])
        handedness = Handedness(raw["handedness"])
    except (KeyError, ValueError, TypeError):
        raise MalformedRecord(f"{context}: missing or invalid category/handedness") from None
    raw_poses = raw.get("poses")
    if not isinstance(raw_poses, list) or not raw_poses:
        raise MalformedRecord(f"{context}: missing poses")
    poses = []
    for i, raw_pose in enumerate(raw_poses):
        raw_hands = raw_pose.get("hands") if isinstance(raw_pose, Mapping) else None
        if not isinstance(raw_hands, list) or not 1 <= len(raw_hands) <= 2:
            raise MalformedRecord(f"{context}: pose {i} must hold 1-2 hands")
        hands = tuple(hand_from_dict(h, f"{context} pose {i}") for h in raw_hands)
        try:
            poses.append(PoseSnapshot(hands=hands, pose_index=i))
        except ValueError as exc:
            raise MalformedRecord(f"{context}: pose {i}: {exc}") from None
    raw_translations = raw.get("translations", [])
    if not isinstance(raw_translations, list):
        raise MalformedRecord(f"{context}: translations must be an array")
    translations = tuple(
        _parse_vec3(t, f"{context}: translation {i}")
        for i, t in enumerate(raw_translations)
    )
    sign = SignGesture(
        id=str(raw.get("id", "")),
        label=str(raw.get("label", "")),
        category=category,
        handedness=handedness,
        poses=tuple(poses),
        translations=translations,
    )
    sign.validate()
    return sign


def database_to_dict(db: SignDatabase) -> dict:
    return {
        "version": db.version,
        "language": db.language,
        "signs": [gesture_to_dict(s) for s in db.signs],
    }


def database_from_dict(raw: Mapping) -> SignDatabase:
    if not isinstance(raw, Mapping):
        raise MalformedRecord("database file must hold a JSON object")
    version = raw.get("version")
    if version != SCHEMA_VERSION:
        raise SchemaVersionMismatch(
            f"schema version {version!r} not supported (expected {SCHEMA_VERSION})")
    raw_signs = raw.get("signs")
    if not isinstance(raw_signs, list):
        raise MalformedRecord("database is missing its signs array")
    db = SignDatabase(
        version=SCHEMA_VERSION,
        language=str(raw.get("language", "")),
        signs=tuple(gesture_from_dict(s) for s in raw_signs),
    )
    db.validate()
    return db


def save_database(db: SignDatabase, path) -> None:
    """Write the database as JSON; round-trips exactly (floats via repr)."""
    db.validate()
    try:
        Path(path).write_text(json.dumps(database_to_dict(db), indent=2) + "\n")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def load_database(path) -> SignDatabase:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedRecord(f"{path}: not valid JSON: {exc}") from exc
    return database_from_dict(raw)
