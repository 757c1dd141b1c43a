"""Human-in-the-loop play: the protocol machine and its web adapter.

The human commands blue unit by unit; any policy drives red. PlaySession
is transport-free (feed it parsed messages, collect reply messages), so
the same machine backs the websocket endpoint and in-process tests. The
wire format is JSON, one message per websocket frame.
"""

# No lazy annotations here: fastapi resolves the websocket endpoint's type
# hints at runtime, and WebSocket is only imported inside create_app.

import os

from .engine import (
    BLUE,
    Action,
    EpisodeLog,
    EpisodeRecorder,
    GameState,
    as_policy,
    legal_actions,
    load_scenario,
    snapshot,
    step,
    terrain_digest,
    unit_on_move,
)

PROTOCOL_VERSION = 1


def _error(code: str, msg: str) -> dict:
    return {"type": "error", "code": code, "msg": msg}


class PlaySession:
    """One human-as-blue game, driven by messages.

    start() yields the opening messages; handle() consumes one client
    message and yields the replies. After gameover (or disconnect()) the
    episode log is available on `finished_log`.
    """

    def __init__(self, scenario: dict, red_policy, seed: int = 0):
        self.scenario = scenario
        self.state: GameState = load_scenario(scenario, seed=seed)
        self.red_policy = red_policy
        self.red_act = as_policy(red_policy)
        self.recorder = EpisodeRecorder(scenario, seed)
        self.finished_log: EpisodeLog | None = None
        self.prompt_unit: int | None = None

    def start(self) -> list[dict]:
        hello = {"type": "hello", "v": PROTOCOL_VERSION, "scenario": self.scenario}
        return [hello] + self._advance()

    def _state_msg(self) -> dict:
        snap = snapshot(self.state)
        return {
            "type": "state",
            "turn": snap["turn"],
            "phase": snap["phase"],
            "score": snap["score"],
            "units": snap["units"],
            "objectives": [
                {"q": pos.q, "r": pos.r, "value": value}
                for pos, value in self.state.objectives
            ],
            "terrain_digest": terrain_digest(self.state),
        }

    def _prompt_msgs(self) -> list[dict]:
        legal = [a.to_json() for a in legal_actions(self.state, self.prompt_unit)]
        return [
            self._state_msg(),
            {"type": "prompt", "unit": self.prompt_unit, "legal": legal},
        ]

    def _advance(self) -> list[dict]:
        """Apply red steps until a blue unit needs a prompt or the game ends."""
        out: list[dict] = []
        while True:
            uid = unit_on_move(self.state)
            if uid is None:
                self.prompt_unit = None
                self.finished_log = self.recorder.finish(self.state, truncated=False)
                out.append({"type": "gameover", "final_score": self.state.score})
                return out
            unit = self.state.units[uid]
            if unit.faction == BLUE:
                self.prompt_unit = uid
                out.extend(self._prompt_msgs())
                return out
            before = snapshot(self.state)
            action = self.red_act(self.state, uid)
            self.state, reward, events = step(self.state, uid, action)
            self.recorder.record(
                before, unit, action, reward,
                trace=getattr(self.red_policy, "last_trace", None),
            )
            out.append(
                {"type": "result", "events": events, "reward": reward, "score": self.state.score}
            )

    def handle(self, msg) -> list[dict]:
        if self.finished_log is not None:
            return [_error("finished", "the game is over")]
        if not isinstance(msg, dict) or msg.get("type") != "act":
            return [_error("malformed", "expected an act message")] + self._prompt_msgs()
        try:
            uid = int(msg["unit"])
            action = Action.from_json(msg["action"])
        except (KeyError, TypeError, ValueError) as exc:
            return [_error("malformed", f"bad act message: {exc}")] + self._prompt_msgs()
        if uid != self.prompt_unit:
            return [
                _error("not_on_move", f"unit {uid} is not on move")
            ] + self._prompt_msgs()
        if action not in legal_actions(self.state, uid):
            return [
                _error("illegal_action", f"action {action.to_json()} is illegal for unit {uid}")
            ] + self._prompt_msgs()

        unit = self.state.units[uid]
        before = snapshot(self.state)
        self.state, reward, events = step(self.state, uid, action)
        self.recorder.record(before, unit, action, reward)
        result = {
            "type": "result", "events": events, "reward": reward, "score": self.state.score,
        }
        return [result] + self._advance()

    def disconnect(self) -> EpisodeLog:
        """Close out an unfinished session; the log is marked truncated."""
        if self.finished_log is None:
            self.finished_log = self.recorder.finish(self.state, truncated=True)
        return self.finished_log


def create_app(
    scenarios: dict[str, dict],
    red_policy_factory,
    default_seed: int = 0,
    log_dir: str | None = None,
    static_dir: str | None = None,
):
    """Web adapter: /health, /scenarios, and the /play websocket.

    `scenarios` maps names to scenario documents; `red_policy_factory`
    builds a fresh red policy per session from (scenario_doc, seed).
    """
    from fastapi import FastAPI, WebSocket, WebSocketDisconnect

    if not scenarios:
        raise ValueError("no scenarios to serve")
    for name, doc in scenarios.items():
        load_scenario(doc)  # refuse to start on an invalid scenario

    app = FastAPI()
    app.state.log_count = 0

    @app.get("/health")
    def health():
        return {"status": "ok", "protocol": PROTOCOL_VERSION}

    @app.get("/scenarios")
    def list_scenarios():
        return {
            "scenarios": [
                {
                    "name": name,
                    "width": doc["width"],
                    "height": doc["height"],
                    "max_turns": doc["max_turns"],
                }
                for name, doc in sorted(scenarios.items())
            ]
        }

    def persist(session: PlaySession, name: str, seed: int) -> None:
        if log_dir is None:
            return
        os.makedirs(log_dir, exist_ok=True)
        app.state.log_count += 1
        path = os.path.join(log_dir, f"{name}-seed{seed}-{app.state.log_count:04d}.jsonl")
        session.finished_log.save(path)

    @app.websocket("/play")
    async def play(ws: WebSocket, scenario: str | None = None, seed: int = default_seed):
        await ws.accept()
        name = scenario or sorted(scenarios)[0]
        if name not in scenarios:
            await ws.send_json(_error("bad_scenario", f"unknown scenario {name!r}"))
            await ws.close()
            return
        doc = scenarios[name]
        session = PlaySession(doc, red_policy_factory(doc, seed), seed=seed)
        try:
            for out in session.start():
                await ws.send_json(out)
            while session.finished_log is None:
                try:
                    msg = await ws.receive_json()
                except ValueError:
                    msg = None  # unparsable frame; handled as malformed below
                for out in session.handle(msg):
                    await ws.send_json(out)
            persist(session, name, seed)
            await ws.close()
        except WebSocketDisconnect:
            session.disconnect()
            persist(session, name, seed)

    if static_dir is not None and os.path.isdir(static_dir):
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
