"""Real-time recognition over a hand-frame stream.

Keyposes are segmented by dwell detection: a frame counts as "still" when
its 22-feature vector moved at most ``stability_epsilon`` (L-infinity) since
the previous frame, and a maximal still interval at least ``dwell_min``
seconds long yields one keypose at its temporal midpoint.  Working in
feature space rather than raw positions makes the detector invariant to
hand size and to whole-hand translation.

Buffered keyposes are matched against the sign database with three gates:
the predicted sign's arity must equal the buffered arity, the leaf
confidence must reach the acceptance threshold, and each observed inter-pose
translation must point the same way as the template's (cosine similarity).
When the gap since the last keypose exceeds ``sequence_timeout`` the buffer
is resolved greedily, longest arity first, then discarded.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from signum.dtree import DecisionTree
from signum.errors import SignumError
from signum.features import (
    extract_gesture_features,
    extract_pose_features,
    flat_length,
    padded_flat,
)
from signum.handmodel import (
    HandFrame,
    PoseSnapshot,
    SignDatabase,
    hand_from_dict,
    hand_to_dict,
)


class NonMonotonicTimestamps(SignumError):
    """Frame timestamps must strictly increase."""


class UnknownTarget(SignumError):
    """The practice target id is not in the database."""


def frame_to_dict(frame: HandFrame) -> dict:
    """Replay-format record: the database hand schema plus "t" seconds."""
    record = {"t": frame.timestamp}
    record.update(hand_to_dict(frame))
    return record


def frame_from_dict(raw: dict) -> HandFrame:
    return hand_from_dict(raw, context="frame", timestamp=float(raw.get("t", 0.0)))


def write_frames_jsonl(frames: Iterable[HandFrame], path) -> None:
    with open(path, "w") as fh:
        for frame in frames:
            fh.write(json.dumps(frame_to_dict(frame)) + "\n")


def read_frames_jsonl(path) -> list[HandFrame]:
    frames = []
    with open(path) as fh:
        for line in fh:
            if line.strip():
                frames.append(frame_from_dict(json.loads(line)))
    return frames


class PracticeMode(Enum):
    LEARN = "learn"
    TEST = "test"


@dataclass(frozen=True)
class DwellConfig:
    frame_rate: float = 60.0
    stability_epsilon: float = 0.02   # max per-frame feature change (L-inf)
    dwell_min: float = 0.30           # seconds a keypose must be held
    sequence_timeout: float = 2.0     # max gap between consecutive keyposes
    acceptance_threshold: float = 0.6
    translation_cosine_min: float = 0.7

    def __post_init__(self):
        if min(self.frame_rate, self.stability_epsilon, self.dwell_min,
               self.sequence_timeout) <= 0:
            raise ValueError("dwell parameters must be positive")
        if self.dwell_min < 2.0 / self.frame_rate:
            raise ValueError("dwell_min must cover at least two frames")
        if not 0.0 < self.acceptance_threshold <= 1.0:
            raise ValueError("acceptance_threshold must lie in (0, 1]")
        if not -1.0 <= self.translation_cosine_min <= 1.0:
            raise ValueError("translation_cosine_min must lie in [-1, 1]")


@dataclass(frozen=True)
class RecognitionEvent:
    sign_id: str
    confidence: float
    keypose_timestamps: tuple[float, ...]
    translation_match: tuple[float, ...]  # cosine per transition
    features: np.ndarray                  # assembled flat vector (unpadded)

    def to_dict(self) -> dict:
        return {
            "type": "event",
            "sign_id": self.sign_id,
            "confidence": self.confidence,
            "keypose_timestamps": [float(t) for t in self.keypose_timestamps],
            "translation_match": [float(c) for c in self.translation_match],
        }


@dataclass(frozen=True)
class Feedback:
    mode: PracticeMode
    target_id: str
    recognized_id: str
    score: float
    passed: bool | None           # set in test mode only
    deviation: tuple[float, ...]  # current minus target template features

    def to_dict(self) -> dict:
        return {
            "type": "feedback",
            "mode": self.mode.value,
            "target": self.target_id,
            "recognized": self.recognized_id,
            "score": self.score,
            "passed": self.passed,
            "deviation": [float(v) for v in self.deviation],
        }


class _DwellTracker:
    """Incremental still-interval detector shared by offline and live paths."""

    def __init__(self, cfg: DwellConfig):
        self.cfg = cfg
        self._run: list[tuple[HandFrame, np.ndarray]] = []
        self._last_time: float | None = None

    def _close_run(self) -> tuple[HandFrame, np.ndarray] | None:
        run, self._run = self._run, []
        if not run:
            return None
        start, end = run[0][0].timestamp, run[-1][0].timestamp
        if end - start < self.cfg.dwell_min:
            return None
        mid = (start + end) / 2.0
        return min(run, key=lambda item: abs(item[0].timestamp - mid))

    def push(self, frame: HandFrame) -> tuple[HandFrame, np.ndarray] | None:
        """Feed one frame; returns (frame, features) when a keypose completes."""
        if self._last_time is not None and frame.timestamp <= self._last_time:
            raise NonMonotonicTimestamps(
                f"timestamp {frame.timestamp} after {self._last_time}")
        self._last_time = frame.timestamp
        feats = extract_pose_features(frame).values
        completed = None
        if self._run:
            step = float(np.max(np.abs(feats - self._run[-1][1])))
            if step > self.cfg.stability_epsilon:
                completed = self._close_run()
        self._run.append((frame, feats))
        return completed

    def finish(self) -> tuple[HandFrame, np.ndarray] | None:
        """Close the stream, flushing a trailing still interval."""
        return self._close_run()

    @property
    def current_features(self) -> np.ndarray | None:
        return self._run[-1][1] if self._run else None


def detect_keyposes(frames: Iterable[HandFrame],
                    cfg: DwellConfig = DwellConfig()) -> list[PoseSnapshot]:
    """One PoseSnapshot per maximal still interval of length >= dwell_min,
    taken at the interval's temporal midpoint frame."""
    tracker = _DwellTracker(cfg)
    hits: list[HandFrame] = []
    for frame in frames:
        done = tracker.push(frame)
        if done is not None:
            hits.append(done[0])
    done = tracker.finish()
    if done is not None:
        hits.append(done[0])
    return [PoseSnapshot(hands=(frame,), pose_index=i)
            for i, frame in enumerate(hits)]


def _cosine(u: np.ndarray, v: np.ndarray) -> float:
    nu, nv = float(np.linalg.norm(u)), float(np.linalg.norm(v))
    if nu < 1e-12 and nv < 1e-12:
        return 1.0  # no motion expected, none observed
    if nu < 1e-12 or nv < 1e-12:
        return 0.0
    return float(np.dot(u, v) / (nu * nv))


def match_sequence(keyposes: Sequence[PoseSnapshot],
                   translations: Sequence[np.ndarray],
                   db: SignDatabase, tree: DecisionTree,
                   cfg: DwellConfig = DwellConfig()) -> RecognitionEvent | None:
    """Classify buffered keyposes; None unless all three gates pass."""
    arity = len(keyposes)
    if not 1 <= arity <= 3 or len(translations) != arity - 1:
        return None
    gf = extract_gesture_features(list(keyposes), list(translations))
    if len(gf.flat) > tree.n_features:
        return None  # the model was trained on shorter vectors
    vec = gf.flat if len(gf.flat) == tree.n_features else _pad_to(gf.flat, tree)
    prediction = tree.predict(vec)
    sign = db.get(prediction.label)
    if sign is None or sign.arity != arity:
        return None
    if prediction.confidence < cfg.acceptance_threshold:
        return None
    cosines = tuple(
        _cosine(np.asarray(obs), template)
        for obs, template in zip(translations, sign.translations))
    if any(c < cfg.translation_cosine_min for c in cosines):
        return None
    return RecognitionEvent(
        sign_id=sign.id,
        confidence=prediction.confidence,
        keypose_timestamps=tuple(p.primary_hand.timestamp for p in keyposes),
        translation_match=cosines,
        features=gf.flat,
    )


def _pad_to(flat: np.ndarray, tree: DecisionTree) -> np.ndarray:
    for arity in (1, 2, 3):
        if flat_length(arity) == tree.n_features:
            return padded_flat(flat, arity)
    raise SignumError(f"model dimension {tree.n_features} is not a gesture length")


def perform_action(event: RecognitionEvent, mode: PracticeMode,
                   target: str, db: SignDatabase,
                   cfg: DwellConfig = DwellConfig()) -> Feedback:
    """Turn a recognition into practice feedback against the target sign."""
    template = db.get(target)
    if template is None:
        raise UnknownTarget(f"no sign {target!r} in database")
    target_flat = extract_gesture_features(template).flat
    overlap = min(len(event.features), len(target_flat))
    deviation = tuple(float(v) for v in (event.features[:overlap]
                                         - target_flat[:overlap]))
    hit = event.sign_id == target
    score = event.confidence if hit else 0.0
    passed = None
    if mode is PracticeMode.TEST:
        passed = hit and event.confidence >= cfg.acceptance_threshold
    return Feedback(mode=mode, target_id=target, recognized_id=event.sign_id,
                    score=score, passed=passed, deviation=deviation)


class StreamEngine:
    """Stateful per-stream recogniser: dwell detection, keypose buffering,
    timeout-driven sequence resolution, and live per-gesture confidences.

    One engine serves one stream; many engines may share one immutable tree
    and database.  ``feed`` returns the messages produced by that frame, as
    JSON-ready dicts, so an offline replay and a live session emit identical
    payloads for identical frames.
    """

    def __init__(self, tree: DecisionTree, db: SignDatabase,
                 cfg: DwellConfig = DwellConfig(),
                 mode: PracticeMode | None = None, target: str | None = None):
        if mode is not None:
            if target is None or db.get(target) is None:
                raise UnknownTarget(f"practice mode needs a database target, got {target!r}")
        self.tree = tree
        self.db = db
        self.cfg = cfg
        self.mode = mode
        self.target = target
        self._tracker = _DwellTracker(cfg)
        self._buffer: list[PoseSnapshot] = []
        self._buffer_centroids: list[np.ndarray] = []
        self._max_arity = self._model_arity()

    def _model_arity(self) -> int:
        for arity in (3, 2, 1):
            if flat_length(arity) == self.tree.n_features:
                return arity
        raise SignumError(
            f"model dimension {self.tree.n_features} is not a gesture length")

    # -- keypose buffer ------------------------------------------------

    def _observed_translations(self, count: int) -> list[np.ndarray]:
        return [self._buffer_centroids[i + 1] - self._buffer_centroids[i]
                for i in range(count - 1)]

    def _try_match(self, arity: int) -> RecognitionEvent | None:
        keyposes = [replace(p, pose_index=i)
                    for i, p in enumerate(self._buffer[:arity])]
        translations = self._observed_translations(arity)
        return match_sequence(keyposes, translations, self.db, self.tree, self.cfg)

    def _resolve_buffer(self) -> list[dict]:
        """Greedy longest-first interpretation of the buffer, then reset."""
        messages: list[dict] = []
        for arity in range(len(self._buffer), 0, -1):
            event = self._try_match(arity)
            if event is not None:
                messages.extend(self._emit(event))
                break
        self._buffer.clear()
        self._buffer_centroids.clear()
        return messages

    def _emit(self, event: RecognitionEvent) -> list[dict]:
        messages = [event.to_dict()]
        if self.mode is not None:
            feedback = perform_action(event, self.mode, self.target,
                                      self.db, self.cfg)
            messages.append(feedback.to_dict())
        return messages

    def _push_keypose(self, frame: HandFrame) -> list[dict]:
        messages: list[dict] = []
        if self._buffer:
            gap = frame.timestamp - self._buffer[-1].primary_hand.timestamp
            if gap > self.cfg.sequence_timeout:
                messages.extend(self._resolve_buffer())
        if len(self._buffer) >= self._max_arity:
            # full buffer that never matched: give it its lower-arity retries
            messages.extend(self._resolve_buffer())
        snapshot = PoseSnapshot(hands=(frame,), pose_index=len(self._buffer))
        self._buffer.append(snapshot)
        self._buffer_centroids.append(frame.centroid())
        if len(self._buffer) == self._max_arity:
            event = self._try_match(self._max_arity)
            if event is not None:
                messages.extend(self._emit(event))
                self._buffer.clear()
                self._buffer_centroids.clear()
        return messages

    # -- live confidence -----------------------------------------------

    def _live_confidence(self, frame: HandFrame) -> dict:
        """Provisional classification of buffer + current frame."""
        arity = min(len(self._buffer) + 1, self._max_arity)
        poses = list(self._buffer[-(arity - 1):]) if arity > 1 else []
        centroids = [c for c in self._buffer_centroids[-(arity - 1):]] if arity > 1 else []
        poses.append(PoseSnapshot(hands=(frame,), pose_index=0))
        centroids.append(frame.centroid())
        poses = [replace(p, pose_index=i) for i, p in enumerate(poses)]
        translations = [centroids[i + 1] - centroids[i]
                        for i in range(len(centroids) - 1)]
        gf = extract_gesture_features(poses, translations)
        vec = padded_flat(gf.flat, self._max_arity)
        prediction = self.tree.predict(vec)
        return {
            "type": "confidence",
            "t": float(frame.timestamp),
            "label": prediction.label,
            "per_gesture": {k: float(v) for k, v in prediction.per_gesture.items()},
        }

    # -- public API ------------------------------------------------------

    def feed(self, frame: HandFrame) -> list[dict]:
        """Process one frame; returns confidence/event/feedback messages."""
        messages: list[dict] = []
        completed = self._tracker.push(frame)
        if completed is not None:
            messages.extend(self._push_keypose(completed[0]))
        messages.append(self._live_confidence(frame))
        return messages

    def finish(self) -> list[dict]:
        """End of stream: flush the dwell tracker and resolve the buffer."""
        messages: list[dict] = []
        completed = self._tracker.finish()
        if completed is not None:
            messages.extend(self._push_keypose(completed[0]))
        if self._buffer:
            messages.extend(self._resolve_buffer())
        return messages

    @property
    def buffered_keyposes(self) -> int:
        return len(self._buffer)


def replay_stream(frames: Iterable[HandFrame], tree: DecisionTree,
                  db: SignDatabase, cfg: DwellConfig = DwellConfig(),
                  mode: PracticeMode | None = None,
                  target: str | None = None) -> list[dict]:
    """Offline run of the engine over a whole frame sequence."""
    engine = StreamEngine(tree, db, cfg, mode=mode, target=target)
    messages: list[dict] = []
    for frame in frames:
        messages.extend(engine.feed(frame))
    messages.extend(engine.finish())
    return messages
