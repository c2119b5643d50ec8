import json

import pytest
from fastapi.testclient import TestClient

from splashkit.service import ServiceConfig, compute_stats, create_app

from conftest import DATASET_PATH, SCHEMAS_PATH, TEMPLATES_PATH

FIFTEEN_TOKENS = "one two three four five six seven eight nine ten " \
                 "eleven twelve thirteen fourteen fifteen"
SIXTEEN_TOKENS = FIFTEEN_TOKENS + " sixteen"


@pytest.fixture()
def config(tmp_path):
    return ServiceConfig(
        port=0,
        dataset_path=str(DATASET_PATH),
        schemas_path=str(SCHEMAS_PATH),
        templates_path=str(TEMPLATES_PATH),
        store_path=str(tmp_path / "store.jsonl"),
        session_seed=42,
    )


@pytest.fixture()
def client(config):
    with TestClient(create_app(config)) as client:
        yield client


def new_session(client):
    response = client.post("/v1/session", json={})
    assert response.status_code == 200
    return response.json()["session_id"]


def next_task(client, session_id):
    response = client.get(f"/v1/session/{session_id}/next")
    assert response.status_code == 200
    return response.json()


class TestHealthAndExplain:
    def test_health(self, client):
        body = client.get("/v1/health").json()
        assert body["status"] == "ok" and body["tasks"] == 50

    def test_explain_intersect(self, client):
        response = client.post("/v1/explain", json={
            "db_id": "race_db",
            "sql": "SELECT name FROM circuits INTERSECT SELECT name FROM races",
        })
        steps = response.json()["steps"]
        assert "in both the results" in steps[-1]

    def test_explain_syntax_error_has_position(self, client):
        response = client.post("/v1/explain", json={
            "db_id": "race_db", "sql": "SELECT name FROM circuits ODER BY name",
        })
        assert response.status_code == 400
        body = response.json()
        assert body["code"] == "syntax_error" and body["position"] is not None

    def test_explain_non_pkfk_join(self, client):
        response = client.post("/v1/explain", json={
            "db_id": "school_db",
            "sql": "SELECT students.first_name FROM students JOIN teachers "
                   "ON students.id = teachers.id",
        })
        assert response.status_code == 400
        assert response.json()["code"] == "non_explainable"

    def test_explain_unknown_db(self, client):
        response = client.post("/v1/explain", json={"db_id": "nope", "sql": "SELECT 1"})
        assert response.status_code == 404
        assert response.json()["code"] == "unknown_db"


class TestSessionFlow:
    def test_annotation_round_trip(self, client):
        session_id = new_session(client)
        task = next_task(client, session_id)["task"]

        too_long = client.post(f"/v1/session/{session_id}/annotation", json={
            "task_id": task["task_id"], "verdict": "incorrect",
            "feedback": SIXTEEN_TOKENS,
        })
        assert too_long.status_code == 400
        body = too_long.json()
        assert body["code"] == "feedback_too_long" and body["count"] == 16

        accepted = client.post(f"/v1/session/{session_id}/annotation", json={
            "task_id": task["task_id"], "verdict": "incorrect",
            "feedback": FIFTEEN_TOKENS, "elapsed_seconds": 12.5,
        })
        assert accepted.status_code == 200 and accepted.json()["ok"]

        stats = client.get("/v1/stats").json()
        assert stats["completed"] == 1
        assert stats["verdicts"]["incorrect"] == 1
        assert stats["mean_feedback_tokens"] == 15.0
        assert stats["mean_elapsed_seconds"] == 12.5

    def test_duplicate_submission_conflicts(self, client):
        session_id = new_session(client)
        task = next_task(client, session_id)["task"]
        payload = {"task_id": task["task_id"], "verdict": "correct", "feedback": ""}
        assert client.post(f"/v1/session/{session_id}/annotation", json=payload).status_code == 200
        duplicate = client.post(f"/v1/session/{session_id}/annotation", json=payload)
        assert duplicate.status_code == 409
        assert duplicate.json()["code"] == "duplicate_submission"

    def test_submit_advances_to_new_task(self, client):
        session_id = new_session(client)
        first = next_task(client, session_id)["task"]
        client.post(f"/v1/session/{session_id}/annotation", json={
            "task_id": first["task_id"], "verdict": "correct", "feedback": "",
        })
        follow_up = next_task(client, session_id)
        assert not follow_up["done"]
        assert follow_up["task"]["task_id"] != first["task_id"]

    def test_session_exhaustion(self, config):
        with TestClient(create_app(config)) as client:
            session_id = new_session(client)
            for _ in range(50):
                task = next_task(client, session_id)["task"]
                client.post(f"/v1/session/{session_id}/annotation", json={
                    "task_id": task["task_id"], "verdict": "correct", "feedback": "",
                })
            assert next_task(client, session_id) == {"done": True}

    def test_correct_verdict_with_feedback_rejected(self, client):
        session_id = new_session(client)
        task = next_task(client, session_id)["task"]
        response = client.post(f"/v1/session/{session_id}/annotation", json={
            "task_id": task["task_id"], "verdict": "correct", "feedback": "but...",
        })
        assert response.status_code == 400
        assert response.json()["code"] == "feedback_not_allowed"

    def test_incorrect_verdict_requires_feedback(self, client):
        session_id = new_session(client)
        task = next_task(client, session_id)["task"]
        response = client.post(f"/v1/session/{session_id}/annotation", json={
            "task_id": task["task_id"], "verdict": "incorrect", "feedback": " ",
        })
        assert response.status_code == 400
        assert response.json()["code"] == "feedback_required"

    def test_unknown_session_and_task(self, client):
        assert client.get("/v1/session/session-9999/next").status_code == 404
        session_id = new_session(client)
        response = client.post(f"/v1/session/{session_id}/annotation", json={
            "task_id": "task-99999", "verdict": "correct", "feedback": "",
        })
        assert response.status_code == 404

    def test_task_order_is_seed_deterministic(self, config, tmp_path):
        ids = []
        for _ in range(2):
            with TestClient(create_app(config)) as client:
                session_id = new_session(client)
                ids.append(next_task(client, session_id)["task"]["task_id"])
        assert ids[0] == ids[1]


class TestNoSqlLeaks:
    SQL_MARKERS = ("select ", " from ", " where ", " join ")

    def scan(self, payload):
        text = json.dumps(payload).lower()
        for marker in self.SQL_MARKERS:
            assert marker not in text, f"annotator payload leaks SQL: {marker!r}"

    def test_task_payloads_contain_no_sql(self, client):
        session_id = new_session(client)
        for _ in range(50):
            body = next_task(client, session_id)
            self.scan(body)
            client.post(f"/v1/session/{session_id}/annotation", json={
                "task_id": body["task"]["task_id"], "verdict": "correct",
                "feedback": "",
            })


class TestStoreDurability:
    def test_replay_reconstructs_stats(self, config):
        with TestClient(create_app(config)) as client:
            session_id = new_session(client)
            for index in range(5):
                task = next_task(client, session_id)["task"]
                verdict = "correct" if index % 2 == 0 else "incorrect"
                client.post(f"/v1/session/{session_id}/annotation", json={
                    "task_id": task["task_id"], "verdict": verdict,
                    "feedback": "" if verdict == "correct" else "fix the table",
                    "elapsed_seconds": float(index),
                })
            live_stats = client.get("/v1/stats").json()
        with open(config.store_path, encoding="utf-8") as fh:
            records = [json.loads(line) for line in fh if line.strip()]
        assert compute_stats(records) == live_stats
        assert len(records) == 5

    def test_rejected_submissions_never_reach_the_store(self, config):
        with TestClient(create_app(config)) as client:
            session_id = new_session(client)
            task = next_task(client, session_id)["task"]
            client.post(f"/v1/session/{session_id}/annotation", json={
                "task_id": task["task_id"], "verdict": "incorrect",
                "feedback": SIXTEEN_TOKENS,
            })
        import os

        assert not os.path.exists(config.store_path) or not open(config.store_path).read()


class TestParaphraseTasks:
    def test_paraphrase_payload_and_cap(self, tmp_path):
        config = ServiceConfig(
            port=0,
            dataset_path=str(DATASET_PATH),
            schemas_path=str(SCHEMAS_PATH),
            templates_path=str(TEMPLATES_PATH),
            store_path=str(tmp_path / "store.jsonl"),
            session_seed=7,
            include_paraphrase_tasks=True,
        )
        with TestClient(create_app(config)) as client:
            assert client.get("/v1/health").json()["tasks"] == 100
            session_id = new_session(client)
            body = next_task(client, session_id)
            while body["task"]["type"] != "paraphrase":
                client.post(f"/v1/session/{session_id}/annotation", json={
                    "task_id": body["task"]["task_id"], "verdict": "correct",
                    "feedback": "",
                })
                body = next_task(client, session_id)
            task = body["task"]
            assert task["feedback"]  # original feedback is shown
            over_cap = client.post(f"/v1/session/{session_id}/annotation", json={
                "task_id": task["task_id"], "verdict": "incorrect",
                "feedback": SIXTEEN_TOKENS,
            })
            assert over_cap.status_code == 400
            ok = client.post(f"/v1/session/{session_id}/annotation", json={
                "task_id": task["task_id"], "verdict": "incorrect",
                "feedback": "a rephrased version of the original feedback",
            })
            assert ok.status_code == 200


class TestConfigFile:
    def test_from_file(self, tmp_path, config):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({
            "port": 8099,
            "dataset_path": config.dataset_path,
            "schemas_path": config.schemas_path,
            "templates_path": config.templates_path,
            "store_path": config.store_path,
            "session_seed": 3,
        }), encoding="utf-8")
        loaded = ServiceConfig.from_file(str(path))
        assert loaded.port == 8099 and loaded.session_seed == 3
