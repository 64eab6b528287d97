import pytest

pytest.importorskip("fastapi")
pytest.importorskip("httpx")

from fastapi.testclient import TestClient  # noqa: E402

from fsc.service import app  # noqa: E402

client = TestClient(app)


def test_multiply():
    r = client.post("/multiply", json={"f1": "H[s=1,p=2;n=3]", "f2": "H[s=1,p=2;n=3]", "target": "H[s=0,p=2;n=3]"})
    assert r.status_code == 200 and r.json()["verdict"] is True


def test_embed_and_errors():
    r = client.post("/embed", json={"src": "H[s=2,p=2;n=3]", "dst": "H[s=1,p=3;n=3]", "domain": "rn", "closure": False})
    assert r.json()["verdict"] is False
    r = client.post("/embed", json={"src": "H[s=2,p=x;n=3]", "dst": "H[s=1,p=3;n=3]"})
    assert r.status_code == 422 and r.json()["detail"]["code"] == "parse_error"


def test_index_set_and_bootstrap():
    r = client.post("/index-set", json={"op": "L[d=2,d0=0]", "coeff": "H[s=2,p=2;n=3]"})
    assert r.json()["nonempty"]["verdict"] is True and r.json()["polygon"]["shape"] == "polygon"
    r = client.post("/index-set", json={"op": "L[d=2,d0=0]", "coeff": "H[s=2,p=2;n=3]", "contains": "(1,1/2)"})
    assert r.json()["verdict"] is True
    r = client.post("/bootstrap", json={"op": "L[d=2,d0=0]", "coeff": "H[s=2,p=2;n=3]", "target": "(2,1/2)"})
    assert r.json()["valid"] is True and len(r.json()["steps"]) == 3
