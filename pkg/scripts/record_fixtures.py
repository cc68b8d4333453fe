#!/usr/bin/env python3
"""Record real wire exchanges for the web UI's replay tests.

Drives the scripted sample session against an in-process service and writes
webui/fixtures/session.json: a list of {method, path, body, status, response}
entries the UI's mock service replays verbatim.

Usage: python3 scripts/record_fixtures.py
"""

import json
from pathlib import Path

from fastapi.testclient import TestClient

from cqf.service import create_app

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "webui" / "fixtures" / "session.json"

# Stable ids so the recording is replayable: the mock matches on
# method+path+body, so tokens baked into paths must not change run to run.
SESSION = "demo-session"
PPQ = "demo-ppq"
SPIDER = "demo-spider"
NAV = "demo-nav"
DRAFT = "demo-draft-1"


def main() -> None:
    app = create_app(ttl_minutes=30, default_batch=5)
    client = TestClient(app)
    recording = []
    aliases: dict[str, str] = {}

    def call(method: str, path: str, body=None, status=200):
        real_path = path
        real_body = json.dumps(body) if body is not None else None
        for alias, real in aliases.items():
            real_path = real_path.replace(alias, real)
            if real_body is not None:
                real_body = real_body.replace(alias, real)
        response = client.request(
            method, real_path,
            json=json.loads(real_body) if real_body is not None else None)
        assert response.status_code == status, (path, response.status_code, response.text)
        payload = response.json()
        recording.append({
            "method": method,
            "path": path,
            "body": body,
            "status": response.status_code,
            "response": _alias_payload(payload),
        })
        return payload

    def _alias_payload(payload):
        text = json.dumps(payload)
        for alias, real in aliases.items():
            text = text.replace(real, alias)
        return json.loads(text)

    schema_text = (ROOT / "fixtures" / "el1.cqs").read_text()

    created = client.post("/sessions", json={"schema_text": schema_text})
    aliases[SESSION] = created.json()["session_id"]
    recording.append({
        "method": "POST", "path": "/sessions",
        "body": {"schema_text": schema_text},
        "status": 201, "response": {"session_id": SESSION},
    })

    call("GET", f"/sessions/{SESSION}/object-types")

    ppq = call("POST", f"/sessions/{SESSION}/ppq",
               {"points": ["President", "Election", "NrOfVotes"]}, status=201)
    aliases[PPQ] = ppq["ppq_id"]
    recording[-1]["response"] = _alias_payload(ppq)

    call("POST", f"/sessions/{SESSION}/ppq/{PPQ}/select",
         {"segment": 0, "choice": 1})
    call("POST", f"/sessions/{SESSION}/ppq/{PPQ}/more", {"segment": 0})

    spider = call("POST", f"/sessions/{SESSION}/spider",
                  {"object_type": "Politician"}, status=201)
    aliases[SPIDER] = spider["spider_id"]
    recording[-1]["response"] = _alias_payload(spider)

    call("POST", f"/sessions/{SESSION}/spider/{SPIDER}/prune",
         {"at": [], "branch": 2})
    pruned = call("POST", f"/sessions/{SESSION}/spider/{SPIDER}/prune",
                  {"at": [], "branch": 1})

    draft = call("POST", f"/sessions/{SESSION}/drafts",
                 {"expr": pruned["paths"][0]["expr_text"]}, status=201)
    aliases[DRAFT] = draft["draft_id"]
    recording[-1]["response"] = _alias_payload(draft)

    nav_doc = call("POST", f"/sessions/{SESSION}/nav",
                   {"draft_path_ids": [DRAFT]}, status=201)
    aliases[NAV] = nav_doc["nav_id"]
    recording[-1]["response"] = _alias_payload(nav_doc)

    refine = next(m for m in nav_doc["moves"] if m["kind"] == "refine")
    call("POST", f"/sessions/{SESSION}/nav/{NAV}/move",
         {"kind": "refine", "fact_type": refine["fact_type"],
          "direction": refine["direction"]})
    call("POST", f"/sessions/{SESSION}/nav/{NAV}/move", {"kind": "generalize"})

    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(recording, indent=2) + "\n")
    print(f"recorded {len(recording)} exchanges -> {OUT}")


if __name__ == "__main__":
    main()
