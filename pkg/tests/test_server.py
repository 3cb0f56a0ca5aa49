from fastapi.testclient import TestClient

from proviz.config import SessionConfig
from proviz.server import create_app
from proviz.session import Session
from tests.paths import FIXTURE_CSV


def make_app(store, model, mode="proactive"):
    cfg = SessionConfig(mode=mode, dataset_path=str(FIXTURE_CSV))
    clock = iter(range(0, 100000, 20))  # 20s apart: no proactive throttling
    session = Session(cfg, store, model, clock=lambda: float(next(clock)))
    session.start()
    return create_app(cfg, session=session), session


def recv_until(ws, kind, limit=50):
    for _ in range(limit):
        message = ws.receive_json()
        if message["type"] == kind:
            return message
    raise AssertionError(f"no {kind} message within {limit}")


def test_utterance_roundtrip_and_chart_stream(store, model):
    app, _session = make_app(store, model)
    client = TestClient(app)
    with client.websocket_connect("/ws") as ws:
        start = ws.receive_json()
        assert start["type"] == "session_start"
        assert start["payload"]["persona_name"] == "Arti"

        ws.send_json({"type": "utterance_text", "payload": {"speaker": "A", "text": "Show rainfall for station 4"}})
        utterance = recv_until(ws, "utterance")
        assert utterance["payload"]["text"] == "Show rainfall for station 4"
        classification = recv_until(ws, "classification")
        assert classification["payload"]["label"] == "ExplicitQuery"
        chart = recv_until(ws, "chart_generated")
        assert chart["payload"]["spec"]["chart_type"] == "line"

        spec_id = chart["payload"]["spec_id"]
        ws.send_json({"type": "select_chart", "payload": {"spec_id": spec_id}})
        selected = recv_until(ws, "chart_selected")
        assert selected["payload"]["spec_id"] == spec_id

        ws.send_json({"type": "move_resize", "payload": {"spec_id": spec_id, "x": 5, "y": 6, "w": 300, "h": 200}})
        moved = recv_until(ws, "move_resize")
        assert moved["payload"]["w"] == 300

        ws.send_json({"type": "delete_chart", "payload": {"spec_id": spec_id}})
        deleted = recv_until(ws, "chart_deleted")
        assert deleted["payload"]["spec_id"] == spec_id


def test_backlog_replayed_to_new_connection(store, model):
    app, session = make_app(store, model)
    client = TestClient(app)
    with client.websocket_connect("/ws") as ws:
        ws.receive_json()
        ws.send_json({"type": "utterance_text", "payload": {"speaker": "A", "text": "Show solar for Oahu"}})
        recv_until(ws, "chart_generated")

    with client.websocket_connect("/ws") as ws:
        kinds = [ws.receive_json()["type"] for _ in range(len(session.events))]
        assert kinds[0] == "session_start"
        assert "chart_generated" in kinds


def test_audio_events_segment_on_gap(store, model):
    app, session = make_app(store, model)
    client = TestClient(app)
    with client.websocket_connect("/ws") as ws:
        ws.receive_json()
        ws.send_json({"type": "audio_event", "payload": {"speaker": "A", "t_start": 0.0, "t_end": 1.0, "text": "Show rainfall"}})
        ws.send_json({"type": "audio_event", "payload": {"speaker": "A", "t_start": 1.2, "t_end": 2.0, "text": "for Maui"}})
        # 1.5s later: previous span closes on arrival
        ws.send_json({"type": "audio_event", "payload": {"speaker": "A", "t_start": 3.5, "t_end": 4.0, "text": "thanks"}})
        utterance = recv_until(ws, "utterance")
        assert utterance["payload"]["text"] == "Show rainfall for Maui"
        ws.send_json({"type": "flush_audio", "payload": {}})
        trailing = recv_until(ws, "utterance")
        assert trailing["payload"]["text"] == "thanks"


def test_unknown_message_type_yields_error_event(store, model):
    app, _ = make_app(store, model)
    client = TestClient(app)
    with client.websocket_connect("/ws") as ws:
        ws.receive_json()
        ws.send_json({"type": "dance", "payload": {}})
        error = recv_until(ws, "error")
        assert "dance" in error["payload"]["message"]
