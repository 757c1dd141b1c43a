"""Protocol machine and web adapter for human-as-blue play."""

from __future__ import annotations

import json

import pytest

from warhex.behaviors import build_policy
from warhex.engine import BLUE, replay_episode, run_episode
from warhex.playserver import PROTOCOL_VERSION, PlaySession, create_app


def act_msg(unit, action_doc):
    return {"type": "act", "unit": unit, "action": action_doc}


def types(msgs):
    return [m["type"] for m in msgs]


def drive_to_gameover(session, respond):
    """Feed prompt responses until gameover; returns all emitted messages."""
    msgs = session.start()
    out = list(msgs)
    guard = 0
    while session.finished_log is None:
        guard += 1
        assert guard < 500, "protocol game did not terminate"
        prompt = next(m for m in reversed(out) if m["type"] == "prompt")
        replies = session.handle(respond(prompt))
        out.extend(replies)
    return out


class TestSession:
    def test_start_emits_hello_state_prompt(self, duel):
        session = PlaySession(duel, build_policy("pass"), seed=0)
        msgs = session.start()
        assert types(msgs) == ["hello", "state", "prompt"]
        hello, state, prompt = msgs
        assert hello["v"] == PROTOCOL_VERSION
        assert hello["scenario"] == duel
        assert state["turn"] == 0 and state["phase"] == "blue" and state["score"] == 0
        assert prompt["unit"] == 1
        assert prompt["legal"][0] == {"kind": "pass"}

    def test_passthrough_game_scores_zero(self, duel):
        session = PlaySession(duel, build_policy("pass"), seed=3)
        out = drive_to_gameover(
            session, lambda prompt: act_msg(prompt["unit"], {"kind": "pass"})
        )
        assert out[-1] == {"type": "gameover", "final_score": 0}
        assert session.finished_log.truncated is False
        # Matches the engine running both sides as pass.
        log = run_episode(duel, build_policy("pass"), build_policy("pass"), seed=3)
        assert session.finished_log.final_score == log.final_score == 0

    def test_scripted_driver_reproduces_an_engine_episode(self, duel):
        """Replaying an engine episode's blue actions through the protocol
        yields the same rewards, score, and a log that replays cleanly."""
        reference = run_episode(
            duel, build_policy("greedy"), build_policy("greedy"), seed=5
        )
        blue_actions = [r.action.to_json() for r in reference.records if r.faction == BLUE]

        session = PlaySession(duel, build_policy("greedy"), seed=5)
        script = iter(blue_actions)
        out = drive_to_gameover(
            session, lambda prompt: act_msg(prompt["unit"], next(script))
        )
        assert next(script, None) is None  # every scripted action consumed
        assert out[-1]["final_score"] == reference.final_score
        rewards = [m["reward"] for m in out if m["type"] == "result"]
        assert rewards == [r.reward for r in reference.records]
        replay_episode(session.finished_log)  # server log is engine-faithful

    def test_not_on_move_error_keeps_state(self, duel):
        session = PlaySession(duel, build_policy("pass"), seed=0)
        before = session.start()[1]
        replies = session.handle(act_msg(2, {"kind": "pass"}))
        assert types(replies) == ["error", "state", "prompt"]
        assert replies[0]["code"] == "not_on_move"
        assert replies[1] == before  # nothing advanced
        assert replies[2]["unit"] == 1

    def test_malformed_messages_reprompt(self, duel):
        session = PlaySession(duel, build_policy("pass"), seed=0)
        session.start()
        for bad in (
            None,
            "act",
            {"type": "chat", "text": "hi"},
            {"type": "act"},
            {"type": "act", "unit": 1, "action": {"kind": "teleport"}},
            {"type": "act", "unit": 1, "action": {"kind": "move", "dir": 9}},
            {"type": "act", "unit": "one", "action": {"kind": "pass"}},
        ):
            replies = session.handle(bad)
            assert types(replies) == ["error", "state", "prompt"]
            assert replies[0]["code"] == "malformed"
            assert replies[1]["turn"] == 0 and replies[1]["score"] == 0

    def test_illegal_action_reprompts(self, duel):
        session = PlaySession(duel, build_policy("pass"), seed=0)
        session.start()
        # Blue sits at (0, 2): moving west leaves the board.
        replies = session.handle(act_msg(1, {"kind": "move", "dir": 3}))
        assert replies[0] == {
            "type": "error",
            "code": "illegal_action",
            "msg": replies[0]["msg"],
        }
        assert "unit 1" in replies[0]["msg"]
        assert types(replies) == ["error", "state", "prompt"]

    def test_acting_after_gameover_is_refused(self, duel):
        session = PlaySession(duel, build_policy("pass"), seed=0)
        drive_to_gameover(
            session, lambda prompt: act_msg(prompt["unit"], {"kind": "pass"})
        )
        replies = session.handle(act_msg(1, {"kind": "pass"}))
        assert types(replies) == ["error"]
        assert replies[0]["code"] == "finished"

    def test_disconnect_truncates_the_log(self, duel):
        session = PlaySession(duel, build_policy("pass"), seed=0)
        session.start()
        session.handle(act_msg(1, {"kind": "pass"}))  # one full turn plays out
        log = session.disconnect()
        assert log.truncated is True
        assert len(log.records) == 2  # blue pass + red pass
        assert session.disconnect() is log  # idempotent

    def test_objectives_and_terrain_travel_in_state(self, duel):
        session = PlaySession(duel, build_policy("pass"), seed=0)
        state = session.start()[1]
        assert state["objectives"] == [{"q": 2, "r": 2, "value": 2}]
        assert isinstance(state["terrain_digest"], str)


class TestWebAdapter:
    @pytest.fixture()
    def client(self, duel, tmp_path):
        from starlette.testclient import TestClient

        app = create_app(
            {"duel": duel},
            red_policy_factory=lambda doc, seed: build_policy("pass"),
            log_dir=str(tmp_path / "logs"),
        )
        with TestClient(app) as client:
            yield client, tmp_path / "logs"

    def test_refuses_an_empty_scenario_set(self):
        with pytest.raises(ValueError):
            create_app({}, red_policy_factory=lambda doc, seed: build_policy("pass"))

    def test_health_reports_protocol_version(self, client):
        client, _ = client
        doc = client.get("/health").json()
        assert doc == {"status": "ok", "protocol": PROTOCOL_VERSION}

    def test_scenarios_lists_dimensions(self, client):
        client, _ = client
        doc = client.get("/scenarios").json()
        assert doc["scenarios"] == [
            {"name": "duel", "width": 5, "height": 5, "max_turns": 15}
        ]

    def test_websocket_round_trip_with_log(self, client):
        client, log_dir = client
        with client.websocket_connect("/play?scenario=duel&seed=3") as ws:
            assert ws.receive_json()["type"] == "hello"
            msg = ws.receive_json()
            last = None
            while True:
                if msg["type"] == "prompt":
                    ws.send_json(act_msg(msg["unit"], {"kind": "pass"}))
                elif msg["type"] == "gameover":
                    last = msg
                    break
                msg = ws.receive_json()
            assert last["final_score"] == 0
        files = sorted(log_dir.iterdir())
        assert [f.name for f in files] == ["duel-seed3-0001.jsonl"]
        header = json.loads(files[0].read_text().splitlines()[0])
        assert header["seed"] == 3

    def test_unknown_scenario_gets_a_typed_error(self, client):
        client, _ = client
        with client.websocket_connect("/play?scenario=nope") as ws:
            msg = ws.receive_json()
        assert msg["type"] == "error" and msg["code"] == "bad_scenario"

    def test_disconnect_persists_a_truncated_log(self, client):
        client, log_dir = client
        with client.websocket_connect("/play?scenario=duel&seed=1") as ws:
            assert ws.receive_json()["type"] == "hello"
        files = list(log_dir.iterdir())
        assert len(files) == 1
        last_line = json.loads(files[0].read_text().splitlines()[-1])
        assert last_line["truncated"] is True

    def test_static_dir_serves_the_ui(self, duel, tmp_path):
        from starlette.testclient import TestClient

        ui = tmp_path / "ui"
        ui.mkdir()
        (ui / "index.html").write_text("<html><body>hexes</body></html>")
        app = create_app(
            {"duel": duel},
            red_policy_factory=lambda doc, seed: build_policy("pass"),
            static_dir=str(ui),
        )
        with TestClient(app) as client:
            page = client.get("/")
            assert page.status_code == 200 and "hexes" in page.text
            assert client.get("/health").json()["status"] == "ok"
