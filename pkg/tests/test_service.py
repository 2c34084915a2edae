import warnings

import pytest

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    from fastapi.testclient import TestClient

from fmalba.service import app


@pytest.fixture(scope="module")
def client():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        with TestClient(app) as c:
            yield c


def test_health(client):
    resp = client.get("/health")
    assert resp.status_code == 200
    assert resp.json()["status"] == "ok"


class TestParse:
    def test_ok(self, client):
        resp = client.post("/parse", json={"formula": "[]p -> p"})
        assert resp.status_code == 200
        data = resp.json()
        assert data["pretty"] == "[]p -> p"
        assert data["basic"] is True
        assert data["variables"] == ["p"]
        assert data["ast"]["node"] == "implies"

    def test_syntax_error_detail(self, client):
        resp = client.post("/parse", json={"formula": "p -> (q"})
        assert resp.status_code == 400
        detail = resp.json()["detail"]
        assert detail["error"] == "syntax"
        assert detail["offset"] == 7
        assert "')'" in detail["expected"]

    def test_validation_error(self, client):
        resp = client.post("/parse", json={})
        assert resp.status_code == 422


class TestClassify:
    def test_inductive(self, client):
        resp = client.post("/classify", json={"formula": "(p -> q) -> q"})
        data = resp.json()
        assert data["inductive"] is True
        assert data["order"] == [["p", "q"]]

    def test_not_inductive(self, client):
        resp = client.post("/classify", json={"formula": "([]p -> p) -> q"})
        data = resp.json()
        assert data["inductive"] is False
        assert data["order"] is None


class TestAlba:
    def test_success(self, client):
        resp = client.post("/alba", json={"formula": "[]p -> p"})
        data = resp.json()
        assert data["status"] == "success"
        assert data["systems"] == ["∅ => @i0 <= <*>@i0"]
        assert data["trace"] is None

    def test_trace(self, client):
        resp = client.post("/alba", json={"formula": "[]p -> p", "trace": True})
        data = resp.json()
        assert [s["rule"] for s in data["trace"]] == \
            ["first_approx", "residuate_ants", "ackermann"]

    def test_failure(self, client):
        resp = client.post("/alba", json={"formula": "([]p -> p) -> q"})
        assert resp.status_code == 200
        data = resp.json()
        assert data["status"] == "failure"
        assert data["stuck_system"]


class TestTranslate:
    def test_ok(self, client):
        resp = client.post("/translate", json={"formula": "[]p -> p"})
        data = resp.json()
        assert data["sentence"].startswith("forall i0. forall x.")
        assert data["systems"] == ["∅ => @i0 <= <*>@i0"]

    def test_not_eliminable(self, client):
        resp = client.post("/translate", json={"formula": "([]p -> p) -> q"})
        assert resp.status_code == 422


FRAME_REFL = {"worlds": ["a"], "leq1": [], "leq2": [], "R": [["a", "a"]]}
FRAME_BARE = {"worlds": ["a"], "leq1": [], "leq2": [], "R": []}


class TestCheck:
    def test_valid(self, client):
        resp = client.post("/check", json={"item": "[]p -> p", "frame": FRAME_REFL})
        assert resp.json() == {"valid": True, "item_kind": "formula"}

    def test_invalid(self, client):
        resp = client.post("/check", json={"item": "[]p -> p", "frame": FRAME_BARE})
        assert resp.json()["valid"] is False

    def test_inequality_and_quasi(self, client):
        resp = client.post("/check", json={"item": "[]p <= p", "frame": FRAME_REFL})
        assert resp.json() == {"valid": True, "item_kind": "inequality"}
        resp = client.post("/check", json={"item": "∅ => []p <= p", "frame": FRAME_REFL})
        assert resp.json()["item_kind"] == "quasi-inequality"

    def test_bad_frame(self, client):
        bad = {"worlds": ["a", "b"], "leq1": [["a", "b"], ["b", "a"]], "leq2": [], "R": []}
        resp = client.post("/check", json={"item": "top", "frame": bad})
        assert resp.status_code == 400
        assert resp.json()["detail"]["error"] == "frame"

    def test_budget(self, client):
        resp = client.post("/check", json={"item": "p & q & r", "frame": FRAME_REFL,
                                           "budget": 2})
        assert resp.status_code == 400
        assert resp.json()["detail"]["error"] == "budget"


class TestVerify:
    def test_small(self, client):
        resp = client.post("/verify", json={"formula": "[]p -> p", "max_size": 2})
        data = resp.json()
        assert data["ok"] is True
        assert data["frames_checked"] == {"1": 2, "2": 58}
        assert data["mismatches"] == []

    def test_not_eliminable(self, client):
        resp = client.post("/verify", json={"formula": "([]p -> p) -> q", "max_size": 1})
        assert resp.status_code == 422

    def test_size_bounds(self, client):
        resp = client.post("/verify", json={"formula": "p -> p", "max_size": 9})
        assert resp.status_code == 400


class TestFrames:
    def test_count(self, client):
        resp = client.post("/frames", json={"size": 2, "count_only": True})
        assert resp.json() == {"count": 58, "frames": None}

    def test_list_limit(self, client):
        resp = client.post("/frames", json={"size": 2, "limit": 5})
        data = resp.json()
        assert data["count"] == 5
        assert len(data["frames"]) == 5
        assert data["frames"][0]["worlds"] == ["a", "b"]

    def test_frames_load_back(self, client):
        from fmalba.frames import frame_from_dict

        resp = client.post("/frames", json={"size": 2, "limit": 10})
        for fd in resp.json()["frames"]:
            frame_from_dict(fd)


def test_selftest_smallest(client):
    resp = client.post("/selftest", json={"max_size": 1, "min_corpus": 3,
                                          "adequacy_triples": 20, "sample_4": 3})
    data = resp.json()
    assert data["ok"] is True
    report = data["report"]
    assert report["success"]["ok"] and report["algebra"]["ok"]
    assert report["rules"]["ok"] and report["adequacy"]["ok"]
