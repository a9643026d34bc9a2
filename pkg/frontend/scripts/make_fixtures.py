#!/usr/bin/env python3
"""Record real server exchanges as fixtures for the IDE tests.

Runs the actual nanoprover session service in-process and captures every
(request, response) pair the IDE controller would produce for the scenarios
the tests replay.  Regenerate with `npm run fixtures` after protocol changes.
"""

import json
import pathlib
import sys

from fastapi.testclient import TestClient

ROOT = pathlib.Path(__file__).resolve().parents[2]
sys.path.insert(0, str(ROOT / "src"))

from nanoprover.server import create_app  # noqa: E402

OUT = pathlib.Path(__file__).resolve().parents[1] / "fixtures"


class Recorder:
    def __init__(self):
        self.client = TestClient(create_app())
        self.exchanges = []

    def request(self, method: str, path: str, body=None):
        if method == "POST":
            res = self.client.post(path, json=body)
        else:
            res = self.client.get(path)
        payload = res.json()
        self.exchanges.append({
            "request": {"method": method, "path": path, "body": body},
            "response": {"status": res.status_code, "body": payload},
        })
        return payload

    def save(self, name: str):
        (OUT / name).write_text(json.dumps({"exchanges": self.exchanges}, indent=1))
        print(f"wrote fixtures/{name} ({len(self.exchanges)} exchanges)")
        self.exchanges = []


def step_body(command, index=None, text=None):
    return {"command": command, "index": index, "text": text}


def main():
    OUT.mkdir(exist_ok=True)
    a6 = (ROOT / "corpus" / "a6_range_sum.npv").read_text()
    peirce = (ROOT / "corpus" / "peirce.npv").read_text()

    # Scenario 1: A.6 in RandomAccess — run to the final Qed (the proof is
    # complete but still open there), back 3, forward 3.
    r = Recorder()
    state = r.request("POST", "/sessions", {
        "script": a6, "navigation": "RandomAccess",
        "calculus_mode": "intuitionistic"})
    sid, n = state["session_id"], state["item_count"]
    r.request("POST", f"/sessions/{sid}/step", step_body("run_to", n - 1))
    for _ in range(3):
        r.request("POST", f"/sessions/{sid}/step", step_body("backward"))
    for _ in range(3):
        r.request("POST", f"/sessions/{sid}/step", step_body("forward"))
    r.save("a6_session.json")

    # Scenario 2: Peirce — intuitionistic failure, rewind, classical success.
    r = Recorder()
    state = r.request("POST", "/sessions", {
        "script": peirce, "navigation": "RandomAccess",
        "calculus_mode": "intuitionistic"})
    sid, n = state["session_id"], state["item_count"]
    r.request("POST", f"/sessions/{sid}/step", step_body("run_to", n))
    r.request("POST", f"/sessions/{sid}/step", step_body("run_to", 0))
    state = r.request("POST", "/sessions", {
        "script": peirce, "navigation": "RandomAccess",
        "calculus_mode": "classical"})
    sid2 = state["session_id"]
    r.request("POST", f"/sessions/{sid2}/step", step_body("run_to", n))
    r.save("peirce_modes.json")

    # Scenario 3: a parse failure creates no session.
    r = Recorder()
    r.request("POST", "/sessions", {
        "script": "Lemma ~~.", "navigation": "Linear",
        "calculus_mode": "intuitionistic"})
    r.save("parse_error.json")

    # Scenario 4: Linear navigation stepping for the edit-refusal test.
    r = Recorder()
    state = r.request("POST", "/sessions", {
        "script": a6, "navigation": "Linear",
        "calculus_mode": "intuitionistic"})
    r.save("a6_linear.json")


if __name__ == "__main__":
    main()
