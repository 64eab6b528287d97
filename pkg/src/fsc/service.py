"""Optional HTTP front end over the exact engines.

Install with ``pip install artifact[service]`` and run
``uvicorn fsc.service:app``.  Responses carry the same payloads as the CLI.
"""

from __future__ import annotations

from typing import Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .bootstrap import plan_bootstrap, validate_path
from .embedding import embeds
from .errors import FscError
from .multiplication import may_multiply
from .operators import in_index_set, index_set_nonempty, parse_operator, parse_triple, region_polygon
from .spaces import DomainKind, parse_space

app = FastAPI(title="fsc", version="0.1.0")


class EmbedQuery(BaseModel):
    src: str
    dst: str
    domain: str = "bounded"
    closure: bool = True


class MultQuery(BaseModel):
    f1: str
    f2: str
    target: str


class IndexQuery(BaseModel):
    op: str
    coeff: str
    contains: Optional[str] = None


class BootstrapQuery(BaseModel):
    op: str
    coeff: str
    target: str


def _guard(fn):
    try:
        return fn()
    except FscError as exc:
        raise HTTPException(status_code=422, detail={"code": exc.code, "message": str(exc)}) from None


@app.post("/embed")
def embed(q: EmbedQuery) -> dict:
    return _guard(
        lambda: embeds(parse_space(q.src), parse_space(q.dst), DomainKind(q.domain), closure=q.closure).to_dict()
    )


@app.post("/multiply")
def multiply(q: MultQuery) -> dict:
    return _guard(lambda: may_multiply(parse_space(q.f1), parse_space(q.f2), parse_space(q.target)).to_dict())


@app.post("/index-set")
def index_set(q: IndexQuery) -> dict:
    def go():
        op = parse_operator(q.op, parse_space(q.coeff))
        if q.contains:
            return in_index_set(op, parse_triple(q.contains)).to_dict()
        return {"nonempty": index_set_nonempty(op).to_dict(), "polygon": region_polygon(op).to_dict()}

    return _guard(go)


@app.post("/bootstrap")
def bootstrap(q: BootstrapQuery) -> dict:
    def go():
        op = parse_operator(q.op, parse_space(q.coeff))
        path = plan_bootstrap(op, parse_triple(q.target))
        return {**path.to_dict(), "valid": validate_path(op, path).verdict}

    return _guard(go)
