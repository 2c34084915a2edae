"""Request/response models for the HTTP service (and the CLI's JSON output)."""

from __future__ import annotations

from pydantic import BaseModel, Field


class ParseRequest(BaseModel):
    formula: str


class ParseResponse(BaseModel):
    pretty: str
    ast: dict
    basic: bool
    pure: bool
    variables: list[str]
    nominals: list[str]


class ClassifyRequest(BaseModel):
    formula: str


class ClassifyResponse(BaseModel):
    inductive: bool
    order: list[list[str]] | None = None
    order_pretty: str | None = None
    variables: list[str]


class AlbaRequest(BaseModel):
    formula: str
    trace: bool = False


class TraceStepModel(BaseModel):
    rule: str
    params: list[str]
    before: str
    after: str


class AlbaResponse(BaseModel):
    status: str  # "success" | "failure"
    systems: list[str] = Field(default_factory=list)
    trace: list[TraceStepModel] | None = None
    stuck_system: str | None = None
    detail: str | None = None


class TranslateRequest(BaseModel):
    formula: str


class TranslateResponse(BaseModel):
    sentence: str
    systems: list[str]
    order_pretty: str | None = None


class FrameModel(BaseModel):
    worlds: list[str]
    leq1: list[list[str]]
    leq2: list[list[str]]
    R: list[list[str]]


class CheckRequest(BaseModel):
    item: str
    frame: FrameModel
    budget: int | None = 10 ** 6


class CheckResponse(BaseModel):
    valid: bool
    item_kind: str


class VerifyRequest(BaseModel):
    formula: str
    max_size: int = 3
    budget: int | None = 10 ** 6
    dedup: bool = False


class VerifyResponse(BaseModel):
    ok: bool
    formula: str
    order: str
    systems: list[str]
    sentence: str
    frames_checked: dict[str, int]
    mismatches: list[str]
    budget_exhausted: list[str]
    elapsed: float


class FramesRequest(BaseModel):
    size: int
    count_only: bool = False
    dedup: bool = False
    limit: int | None = None


class FramesResponse(BaseModel):
    count: int
    frames: list[FrameModel] | None = None


class SelftestRequest(BaseModel):
    max_size: int = 3
    seed: int = 0
    min_corpus: int = 20
    adequacy_triples: int = 200
    sample_4: int = 100


class SelftestResponse(BaseModel):
    ok: bool
    report: dict


class HealthResponse(BaseModel):
    status: str
    version: str
