"""HTTP service exposing the engine: parse, classify, eliminate, translate,
check on a frame, verify against the brute-force oracle, enumerate frames,
and run the selftest suites.

Domain verdicts (not inductive, stuck elimination, invalid on a frame,
mismatches found) are ordinary 200 responses; malformed input (syntax
errors, bad frames, exceeded budgets) is a 400 with a structured detail.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from . import __version__, fo, schemas
from .alba import AlbaFailure, run_alba
from .formula import (
    ParseError,
    formula_to_dict,
    is_basic,
    is_pure,
    nominal_names,
    parse_formula,
    parse_inequality,
    parse_quasi_inequality,
    print_formula,
    prop_vars,
)
from .frames import BudgetExceeded, FrameError, frame_from_dict, frame_to_dict, valid
from .fo import correspondent, print_fo
from .inductive import TooManyVariables, classify_inductive
from .verify import count_frames, crosscheck, enumerate_frames, selftest

app = FastAPI(
    title="fmalba",
    version=__version__,
    description="Correspondence engine for intuitionistic modal logic over birelational frames",
)


def _parse_or_400(text: str):
    try:
        return parse_formula(text)
    except ParseError as exc:
        raise HTTPException(
            status_code=400,
            detail={"error": "syntax", "message": str(exc), "offset": exc.offset,
                    "expected": sorted(exc.expected)},
        ) from exc


@app.get("/health", response_model=schemas.HealthResponse)
def health() -> schemas.HealthResponse:
    return schemas.HealthResponse(status="ok", version=__version__)


@app.post("/parse", response_model=schemas.ParseResponse)
def parse(req: schemas.ParseRequest) -> schemas.ParseResponse:
    f = _parse_or_400(req.formula)
    return schemas.ParseResponse(
        pretty=print_formula(f),
        ast=formula_to_dict(f),
        basic=is_basic(f),
        pure=is_pure(f),
        variables=sorted(prop_vars(f)),
        nominals=sorted(nominal_names(f)),
    )


@app.post("/classify", response_model=schemas.ClassifyResponse)
def classify(req: schemas.ClassifyRequest) -> schemas.ClassifyResponse:
    f = _parse_or_400(req.formula)
    try:
        omega = classify_inductive(f)
    except TooManyVariables as exc:
        raise HTTPException(status_code=400, detail={"error": "too-many-variables",
                                                     "message": str(exc)}) from exc
    if omega is None:
        return schemas.ClassifyResponse(inductive=False, variables=sorted(prop_vars(f)))
    return schemas.ClassifyResponse(
        inductive=True,
        order=[[a, b] for a, b in sorted(omega.strict_pairs)],
        order_pretty=str(omega),
        variables=sorted(prop_vars(f)),
    )


@app.post("/alba", response_model=schemas.AlbaResponse)
def alba(req: schemas.AlbaRequest) -> schemas.AlbaResponse:
    f = _parse_or_400(req.formula)

    def steps_of(trace):
        return [
            schemas.TraceStepModel(
                rule=s.rule,
                params=[str(p) for p in s.params],
                before=_state_str(s.before),
                after=_state_str(s.after),
            )
            for s in trace.steps
        ]

    try:
        out = run_alba(f)
    except AlbaFailure as exc:
        return schemas.AlbaResponse(
            status="failure",
            stuck_system=str(exc.stuck) if exc.stuck is not None else None,
            detail=str(exc),
            trace=steps_of(exc.trace) if req.trace else None,
        )
    return schemas.AlbaResponse(
        status="success",
        systems=[str(s) for s in out.systems],
        trace=steps_of(out.trace) if req.trace else None,
    )


def _state_str(state) -> str:
    if isinstance(state, tuple):
        return " ;; ".join(str(s) for s in state)
    return str(state)


@app.post("/translate", response_model=schemas.TranslateResponse)
def translate(req: schemas.TranslateRequest) -> schemas.TranslateResponse:
    f = _parse_or_400(req.formula)
    try:
        omega = classify_inductive(f)
        out = run_alba(f)
    except (TooManyVariables, AlbaFailure) as exc:
        raise HTTPException(status_code=422, detail={"error": "not-eliminable",
                                                     "message": str(exc)}) from exc
    sentence = correspondent(out.systems)
    return schemas.TranslateResponse(
        sentence=print_fo(sentence),
        systems=[str(s) for s in out.systems],
        order_pretty=str(omega) if omega is not None else None,
    )


def _parse_item(text: str):
    try:
        if "=>" in text:
            return parse_quasi_inequality(text), "quasi-inequality"
        if "<=" in text:
            return parse_inequality(text), "inequality"
        return parse_formula(text), "formula"
    except ParseError as exc:
        raise HTTPException(
            status_code=400,
            detail={"error": "syntax", "message": str(exc), "offset": exc.offset,
                    "expected": sorted(exc.expected)},
        ) from exc


@app.post("/check", response_model=schemas.CheckResponse)
def check(req: schemas.CheckRequest) -> schemas.CheckResponse:
    item, kind = _parse_item(req.item)
    try:
        frame = frame_from_dict(req.frame.model_dump())
    except FrameError as exc:
        raise HTTPException(status_code=400, detail={"error": "frame", "message": str(exc)}) from exc
    try:
        verdict = valid(frame, item, budget=req.budget)
    except BudgetExceeded as exc:
        raise HTTPException(status_code=400, detail={"error": "budget", "message": str(exc)}) from exc
    return schemas.CheckResponse(valid=verdict, item_kind=kind)


@app.post("/verify", response_model=schemas.VerifyResponse)
def verify(req: schemas.VerifyRequest) -> schemas.VerifyResponse:
    f = _parse_or_400(req.formula)
    if not 1 <= req.max_size <= 5:
        raise HTTPException(status_code=400, detail={"error": "size",
                                                     "message": "max_size must be 1..5"})
    try:
        report = crosscheck(f, max_n=req.max_size, budget=req.budget, dedup=req.dedup)
    except (AlbaFailure, TooManyVariables) as exc:
        raise HTTPException(status_code=422, detail={"error": "not-eliminable",
                                                     "message": str(exc)}) from exc
    d = report.to_dict()
    return schemas.VerifyResponse(
        ok=report.ok,
        formula=d["formula"],
        order=d["order"],
        systems=d["systems"],
        sentence=d["sentence"],
        frames_checked=d["frames_checked"],
        mismatches=d["mismatches"],
        budget_exhausted=d["budget_exhausted"],
        elapsed=d["elapsed"],
    )


@app.post("/frames", response_model=schemas.FramesResponse)
def frames(req: schemas.FramesRequest) -> schemas.FramesResponse:
    if not 1 <= req.size <= 5:
        raise HTTPException(status_code=400, detail={"error": "size",
                                                     "message": "size must be 1..5"})
    if req.count_only:
        return schemas.FramesResponse(count=count_frames(req.size, dedup=req.dedup))
    out = []
    for frame in enumerate_frames(req.size, dedup=req.dedup):
        out.append(schemas.FrameModel(**frame_to_dict(frame)))
        if req.limit is not None and len(out) >= req.limit:
            break
    return schemas.FramesResponse(count=len(out), frames=out)


@app.post("/selftest", response_model=schemas.SelftestResponse)
def run_selftest(req: schemas.SelftestRequest) -> schemas.SelftestResponse:
    if not 1 <= req.max_size <= 5:
        raise HTTPException(status_code=400, detail={"error": "size",
                                                     "message": "max_size must be 1..5"})
    report = selftest(
        max_n=req.max_size,
        seed=req.seed,
        min_corpus=req.min_corpus,
        adequacy_triples=req.adequacy_triples,
        sample_4=req.sample_4,
    )
    return schemas.SelftestResponse(ok=report.ok, report=report.to_dict())
