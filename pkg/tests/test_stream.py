import numpy as np
import pytest

from signum.features import extract_gesture_features
from signum.handmodel import Category, PoseSnapshot
from signum.stream import (
    DwellConfig,
    NonMonotonicTimestamps,
    PracticeMode,
    StreamEngine,
    UnknownTarget,
    detect_keyposes,
    frame_from_dict,
    frame_to_dict,
    match_sequence,
    perform_action,
    read_frames_jsonl,
    replay_stream,
    write_frames_jsonl,
)
from signum.synthdata import GeneratorConfig, canonical_hand, script_stream


def hold(hand, start, count, fps=60.0):
    from signum.handmodel import HandFrame
    return [HandFrame((start + i) / fps, hand.side, hand.joints)
            for i in range(count)]


class TestDwellConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            DwellConfig(dwell_min=0.01, frame_rate=60.0)
        with pytest.raises(ValueError):
            DwellConfig(stability_epsilon=0.0)
        with pytest.raises(ValueError):
            DwellConfig(acceptance_threshold=0.0)


class TestDetectKeyposes:
    def test_constant_stream_single_keypose(self):
        hand = canonical_hand([0.2] * 5, [0.0] * 5)
        frames = hold(hand, 0, 60)
        keyposes = detect_keyposes(frames, DwellConfig())
        assert len(keyposes) == 1
        assert keyposes[0].pose_index == 0

    def test_two_plateaus_at_midpoints(self, default_corpus):
        cfg, db, _ = default_corpus
        sign = next(s for s in db.signs if s.arity == 2)
        frames, plateaus = script_stream(sign, cfg.timing)
        keyposes = detect_keyposes(frames, DwellConfig())
        assert len(keyposes) == 2
        step = 1.0 / cfg.timing.frame_rate
        for kp, (start, end) in zip(keyposes, plateaus):
            assert abs(kp.primary_hand.timestamp - (start + end) / 2.0) <= step + 1e-9

    def test_continuous_motion_no_keypose(self):
        # a full curl sweep in one second: every frame moves well past epsilon
        frames = [canonical_hand([i / 59.0] * 5, [0.0] * 5, timestamp=i / 60.0)
                  for i in range(60)]
        assert detect_keyposes(frames, DwellConfig()) == []

    def test_non_monotonic_timestamps(self):
        hand = canonical_hand([0.2] * 5, [0.0] * 5)
        frames = hold(hand, 0, 5) + hold(hand, 2, 5)
        with pytest.raises(NonMonotonicTimestamps):
            detect_keyposes(frames, DwellConfig())


class TestMatchSequence:
    def test_static_template_full_confidence(self, default_corpus,
                                             overfit_canonical_tree):
        _cfg, db, _ = default_corpus
        sign = next(s for s in db.signs if s.arity == 1)
        event = match_sequence(list(sign.poses), [], db, overfit_canonical_tree)
        assert event is not None
        assert event.sign_id == sign.id
        assert event.confidence == 1.0
        assert event.translation_match == ()

    def test_reversed_translation_rejected(self, default_corpus,
                                           overfit_canonical_tree):
        _cfg, db, _ = default_corpus
        sign = next(s for s in db.signs if s.arity == 2)
        reversed_t = [-sign.translations[0]]
        event = match_sequence(list(sign.poses), reversed_t, db,
                               overfit_canonical_tree)
        # antiparallel motion: cosine -1, below any sane floor
        assert event is None

    def test_word_template_accepts(self, default_corpus, overfit_canonical_tree):
        _cfg, db, _ = default_corpus
        sign = next(s for s in db.signs if s.arity == 2)
        event = match_sequence(list(sign.poses), [sign.translations[0]], db,
                               overfit_canonical_tree)
        assert event is not None and event.sign_id == sign.id
        assert event.translation_match[0] == pytest.approx(1.0, abs=1e-12)

    def test_arity_gate(self, default_corpus, overfit_canonical_tree):
        _cfg, db, _ = default_corpus
        word = next(s for s in db.signs if s.arity == 2)
        # only the first pose: classifier may answer anything, but a word
        # prediction must be rejected because the buffered arity is 1
        event = match_sequence([word.poses[0]], [], db, overfit_canonical_tree)
        assert event is None or db.get(event.sign_id).arity == 1


class TestPerformAction:
    def test_pass_in_test_mode(self, default_corpus, overfit_canonical_tree):
        _cfg, db, _ = default_corpus
        sign = next(s for s in db.signs if s.arity == 1)
        event = match_sequence(list(sign.poses), [], db, overfit_canonical_tree)
        feedback = perform_action(event, PracticeMode.TEST, sign.id, db)
        assert feedback.passed is True
        assert feedback.score == 1.0

    def test_wrong_sign_scores_zero(self, default_corpus, overfit_canonical_tree):
        _cfg, db, _ = default_corpus
        signs = [s for s in db.signs if s.arity == 1]
        event = match_sequence(list(signs[0].poses), [], db,
                               overfit_canonical_tree)
        feedback = perform_action(event, PracticeMode.LEARN, signs[1].id, db)
        assert feedback.score == 0.0
        assert feedback.passed is None
        assert len(feedback.deviation) == 22

    def test_perfect_replay_zero_deviation(self, default_corpus,
                                           overfit_canonical_tree):
        cfg, db, _ = default_corpus
        sign = next(s for s in db.signs if s.arity == 3)
        frames, _ = script_stream(sign, cfg.timing)
        messages = replay_stream(frames, overfit_canonical_tree, db,
                                 mode=PracticeMode.LEARN, target=sign.id)
        feedback = [m for m in messages if m["type"] == "feedback"]
        assert len(feedback) == 1
        assert feedback[0]["score"] == 1.0
        assert np.allclose(feedback[0]["deviation"], 0.0, atol=1e-9)

    def test_unknown_target(self, default_corpus, overfit_canonical_tree):
        _cfg, db, _ = default_corpus
        sign = next(s for s in db.signs if s.arity == 1)
        event = match_sequence(list(sign.poses), [], db, overfit_canonical_tree)
        with pytest.raises(UnknownTarget):
            perform_action(event, PracticeMode.TEST, "ghost", db)


class TestStreamEngine:
    def test_replay_every_template(self, default_corpus, overfit_canonical_tree):
        cfg, db, _ = default_corpus
        for sign in db.signs[::7]:
            frames, _ = script_stream(sign, cfg.timing)
            messages = replay_stream(frames, overfit_canonical_tree, db)
            events = [m for m in messages if m["type"] == "event"]
            assert [e["sign_id"] for e in events] == [sign.id]
            assert events[0]["confidence"] == 1.0

    def test_event_arity_matches_database(self, default_corpus,
                                          overfit_canonical_tree):
        cfg, db, _ = default_corpus
        for sign in db.signs[::11]:
            frames, _ = script_stream(sign, cfg.timing)
            for message in replay_stream(frames, overfit_canonical_tree, db):
                if message["type"] == "event":
                    recognized = db.get(message["sign_id"])
                    assert len(message["keypose_timestamps"]) == recognized.arity

    def test_buffer_never_exceeds_three(self, default_corpus,
                                        overfit_canonical_tree):
        cfg, db, _ = default_corpus
        engine = StreamEngine(overfit_canonical_tree, db)
        # a long parade of distinct holds: the buffer must keep rolling over
        parade = [s for s in db.signs if s.arity == 1][:6]
        t = 0
        for sign in parade:
            hand = sign.poses[0].primary_hand
            for frame in hold(hand, t, 30):
                engine.feed(frame)
                assert engine.buffered_keyposes <= 3
            t += 30
            # brief scramble between holds so stillness breaks
            scramble = canonical_hand([0.5] * 5, [0.3] * 5)
            for frame in hold(scramble, t, 3):
                engine.feed(frame)
                assert engine.buffered_keyposes <= 3
            t += 3
        engine.finish()

    def test_confidence_messages_every_frame(self, default_corpus,
                                             overfit_canonical_tree):
        cfg, db, _ = default_corpus
        sign = db.signs[0]
        frames, _ = script_stream(sign, cfg.timing)
        messages = replay_stream(frames, overfit_canonical_tree, db)
        confidences = [m for m in messages if m["type"] == "confidence"]
        assert len(confidences) == len(frames)
        for message in confidences:
            assert set(message["per_gesture"]) == {s.id for s in db.signs}

    def test_timeout_resets_buffer(self, default_corpus, overfit_canonical_tree):
        cfg, db, _ = default_corpus
        word = next(s for s in db.signs if s.arity == 2)
        engine = StreamEngine(overfit_canonical_tree, db)
        messages = []
        # first keypose, then a gap longer than sequence_timeout, then the
        # full word: the stale keypose must not poison the fresh sequence
        h0 = word.poses[0].primary_hand
        for frame in hold(h0, 0, 30):
            messages += engine.feed(frame)
        scramble = canonical_hand([0.5] * 5, [0.3] * 5)
        for frame in hold(scramble, 30, 4):
            messages += engine.feed(frame)
        gap = 30 + 4 + int(60 * (engine.cfg.sequence_timeout + 1.0))
        frames, _ = script_stream(word, cfg.timing)
        for frame in frames:
            shifted = frame_from_dict({**frame_to_dict(frame),
                                       "t": frame.timestamp + gap / 60.0})
            messages += engine.feed(shifted)
        messages += engine.finish()
        events = [m for m in messages if m["type"] == "event"]
        assert [e["sign_id"] for e in events][-1] == word.id

    def test_requires_known_target(self, default_corpus, overfit_canonical_tree):
        _cfg, db, _ = default_corpus
        with pytest.raises(UnknownTarget):
            StreamEngine(overfit_canonical_tree, db,
                         mode=PracticeMode.TEST, target="ghost")


class TestFrameJsonl:
    def test_round_trip(self, tmp_path, default_corpus):
        cfg, db, _ = default_corpus
        frames, _ = script_stream(db.signs[3], cfg.timing)
        path = tmp_path / "frames.jsonl"
        write_frames_jsonl(frames, path)
        loaded = read_frames_jsonl(path)
        assert loaded == frames

    def test_record_shape(self, default_corpus):
        cfg, db, _ = default_corpus
        frames, _ = script_stream(db.signs[0], cfg.timing)
        record = frame_to_dict(frames[0])
        assert set(record) == {"t", "side", "wrist", "fingers"}
