import json

import pytest
from fastapi.testclient import TestClient

from signum.handmodel import SignDatabase, load_database
from signum.service import create_app
from signum.stream import PracticeMode, frame_to_dict, replay_stream
from signum.synthdata import script_stream


@pytest.fixture()
def client(default_corpus, overfit_canonical_tree, tmp_path):
    _cfg, db, _ = default_corpus
    app = create_app(db, overfit_canonical_tree,
                     user_db_path=tmp_path / "user_signs.json")
    return TestClient(app), db, overfit_canonical_tree, tmp_path


def drain_session(ws, frames, finish=True):
    """Send all frames then finish, returning every server message."""
    messages = []
    for frame in frames:
        ws.send_text(json.dumps({"type": "frame", **frame_to_dict(frame)}))
        messages.append(json.loads(ws.receive_text()))
        while messages[-1]["type"] != "confidence":
            messages.append(json.loads(ws.receive_text()))
    if finish:
        ws.send_text(json.dumps({"type": "finish"}))
    return messages


class TestHttp:
    def test_catalog_sorted_and_complete(self, client):
        http, db, _tree, _tmp = client
        body = http.get("/signs").json()
        assert len(body) == 50
        assert [e["id"] for e in body] == sorted(e["id"] for e in body)
        assert set(body[0]) == {"id", "label", "category", "handedness", "arity"}

    def test_empty_database_catalog(self, overfit_canonical_tree, tmp_path):
        app = create_app(SignDatabase(1, "LSE", ()), overfit_canonical_tree,
                         user_db_path=tmp_path / "u.json")
        assert TestClient(app).get("/signs").json() == []

    def test_template_arity_matches_catalog(self, client):
        http, db, _tree, _tmp = client
        catalog = http.get("/signs").json()
        for entry in catalog[::9]:
            template = http.get(f"/signs/{entry['id']}").json()
            assert len(template["poses"]) == entry["arity"]

    def test_unknown_sign_404(self, client):
        http, _db, _tree, _tmp = client
        response = http.get("/signs/nope")
        assert response.status_code == 404
        assert response.json()["detail"] == "UnknownSign"


class TestWebSocket:
    def test_test_mode_replay_passes(self, client, default_corpus):
        http, db, _tree, _tmp = client
        cfg, _, _ = default_corpus
        sign = next(s for s in db.signs if s.arity == 2)
        frames, _ = script_stream(sign, cfg.timing)
        with http.websocket_connect(
                f"/session?mode=test&target={sign.id}") as ws:
            messages = drain_session(ws, frames)
            # finish flushes the trailing keypose: event + feedback arrive
            tail = [json.loads(ws.receive_text()) for _ in range(2)]
        feedback = [m for m in messages + tail if m["type"] == "feedback"]
        assert feedback and feedback[-1]["passed"] is True
        assert feedback[-1]["recognized"] == sign.id

    def test_learn_mode_zero_deviation(self, client, default_corpus):
        http, db, _tree, _tmp = client
        cfg, _, _ = default_corpus
        sign = next(s for s in db.signs if s.arity == 1)
        frames, _ = script_stream(sign, cfg.timing)
        with http.websocket_connect(
                f"/session?mode=learn&target={sign.id}") as ws:
            drain_session(ws, frames)
            tail = [json.loads(ws.receive_text()) for _ in range(2)]
        feedback = [m for m in tail if m["type"] == "feedback"]
        assert feedback[0]["score"] == 1.0
        assert max(abs(v) for v in feedback[0]["deviation"]) < 1e-9

    def test_malformed_frame_session_survives(self, client, default_corpus):
        http, db, _tree, _tmp = client
        cfg, _, _ = default_corpus
        sign = db.signs[0]
        frames, _ = script_stream(sign, cfg.timing)
        with http.websocket_connect(
                f"/session?mode=learn&target={sign.id}") as ws:
            ws.send_text("this is not json")
            first = json.loads(ws.receive_text())
            assert first["type"] == "error" and first["error"] == "ProtocolError"
            ws.send_text(json.dumps({"type": "frame", "t": 0.0, "side": "right"}))
            second = json.loads(ws.receive_text())
            assert second["type"] == "error"
            # a good frame still works afterwards
            ws.send_text(json.dumps({"type": "frame",
                                     **frame_to_dict(frames[0])}))
            third = json.loads(ws.receive_text())
            assert third["type"] == "confidence"

    def test_unknown_target_closes(self, client):
        http, _db, _tree, _tmp = client
        with http.websocket_connect("/session?mode=test&target=ghost") as ws:
            message = json.loads(ws.receive_text())
            assert message["type"] == "error"
            assert message["error"] == "UnknownTarget"

    def test_record_mode_persists_new_sign(self, client, default_corpus):
        http, db, _tree, tmp = client
        cfg, _, _ = default_corpus
        donor = next(s for s in db.signs if s.arity == 1)
        frames, _ = script_stream(donor, cfg.timing)
        with http.websocket_connect("/session?mode=record") as ws:
            for frame in frames:
                ws.send_text(json.dumps({"type": "frame", **frame_to_dict(frame)}))
            ws.send_text(json.dumps({"type": "finish", "id": "user-wave",
                                     "label": "Wave", "category": "alphabet"}))
            reply = json.loads(ws.receive_text())
        assert reply == {"type": "recorded", "id": "user-wave"}
        stored = load_database(tmp / "user_signs.json")
        assert stored.get("user-wave").label == "Wave"
        assert db.get("user-wave") is None  # shipped corpus untouched

    def test_live_equals_offline_replay(self, client, default_corpus):
        """The service layer adds no recognition logic of its own."""
        http, db, tree, _tmp = client
        cfg, _, _ = default_corpus
        sign = next(s for s in db.signs if s.arity == 3)
        frames, _ = script_stream(sign, cfg.timing)
        offline = replay_stream(frames, tree, db,
                                mode=PracticeMode.TEST, target=sign.id)
        canonical_offline = [json.dumps(m, sort_keys=True) for m in offline]
        live = []
        with http.websocket_connect(f"/session?mode=test&target={sign.id}") as ws:
            for frame in frames:
                ws.send_text(json.dumps({"type": "frame", **frame_to_dict(frame)}))
                live.append(ws.receive_text())
                while json.loads(live[-1])["type"] != "confidence":
                    live.append(ws.receive_text())
            ws.send_text(json.dumps({"type": "finish"}))
            live.append(ws.receive_text())  # event
            live.append(ws.receive_text())  # feedback
        assert live == canonical_offline

    def test_sessions_are_isolated(self, client, default_corpus):
        http, db, _tree, _tmp = client
        cfg, _, _ = default_corpus
        word = next(s for s in db.signs if s.arity == 2)
        alpha = next(s for s in db.signs if s.arity == 1)
        word_frames, _ = script_stream(word, cfg.timing)
        alpha_frames, _ = script_stream(alpha, cfg.timing)
        with http.websocket_connect(f"/session?mode=test&target={word.id}") as a, \
                http.websocket_connect(f"/session?mode=test&target={alpha.id}") as b:
            # interleave the two streams; each session must only see its own
            drain_session(a, word_frames, finish=False)
            drain_session(b, alpha_frames, finish=False)
            a.send_text(json.dumps({"type": "finish"}))
            a_tail = [json.loads(a.receive_text()) for _ in range(2)]
            b.send_text(json.dumps({"type": "finish"}))
            b_tail = [json.loads(b.receive_text()) for _ in range(2)]
        assert a_tail[0]["sign_id"] == word.id
        assert b_tail[0]["sign_id"] == alpha.id
