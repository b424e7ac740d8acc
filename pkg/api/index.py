from fastapi import FastAPI, HTTPException, Header, Depends
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, ConfigDict, Field, ValidationError
from typing import List, Literal, Optional

from tribase_cli import simulate_run
from tribase_config import API_KEY, MAX_RETRIES, RunConfig
from tribase_errors import AmbiguousSupport, RetriesExhausted, TribaseError
from tribase_estimate import estimate_3bb, estimate_5bb_report, report_to_dict
from tribase_measure import CountsFileModel, parse_counts_document

app = FastAPI(title="Tribase API", version="1.0.0")

# CORS middleware
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


# Request models
class SimulateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    state: str = "haar"
    dimension: Optional[int] = None
    shots: int = Field(ge=1)
    seed: int = 0
    method: Literal["3bb", "5bb"] = "3bb"
    a: Optional[float] = None
    b: Optional[float] = None
    phases: Optional[List[float]] = None
    retries: int = Field(default=MAX_RETRIES, ge=0)


# API Key dependency
async def verify_api_key(x_api_key: str = Header(...)):
    if x_api_key != API_KEY:
        raise HTTPException(status_code=401, detail="Invalid API Key")
    return x_api_key


def _http_error(e: TribaseError) -> HTTPException:
    if isinstance(e, AmbiguousSupport):
        return HTTPException(status_code=422, detail={
            "error": "AmbiguousSupport",
            "message": str(e),
            "zero_indices": sorted(e.pattern.zero_indices),
            "arcs": [list(arc) for arc in e.pattern.arcs],
        })
    if isinstance(e, RetriesExhausted):
        return HTTPException(status_code=409, detail={
            "error": "RetriesExhausted",
            "message": str(e),
            "report": report_to_dict(e.report),
        })
    return HTTPException(status_code=422, detail={"error": type(e).__name__, "message": str(e)})


# Health check (no auth required)
@app.get("/")
async def root():
    return {"status": "ok", "service": "Tribase API"}

@app.get("/health")
async def health():
    return {"status": "ok"}


# Reconstruction endpoint (requires API key)
@app.post("/api/reconstruct")
def reconstruct(
    request: CountsFileModel,
    api_key: str = Depends(verify_api_key)
):
    """
    Estimate a pure state from measured counts

    Headers:
        X-API-Key: Your API key

    Body (counts document):
        {
            "dimension": 4,
            "basis_params": {"a": 0.7071067811865476, "b": 0.7071067811865476, "phases": []},
            "records": [
                {"basis": "B0", "counts": [250, 250, 250, 250], "shots": 1000},
                {"basis": "B1p", "counts": [...], "shots": 1000},
                {"basis": "B3p", "counts": [...], "shots": 1000}
            ]
        }
    """
    try:
        doc = parse_counts_document(request.model_dump(exclude_none=True))
        if doc.method == "5bb":
            report = estimate_5bb_report(doc.records, doc.params)
        else:
            report = estimate_3bb(doc.records, doc.three_basis_set())
        return report_to_dict(report)
    except TribaseError as e:
        raise _http_error(e)


# Simulation endpoint (requires API key)
@app.post("/api/simulate")
def simulate(
    request: SimulateRequest,
    api_key: str = Depends(verify_api_key)
):
    """
    Simulate N shots per basis on a state and return the estimation report

    Body:
        {"state": "haar", "dimension": 8, "shots": 10000, "seed": 1, "method": "3bb"}
    """
    try:
        cfg = RunConfig(command="simulate", **request.model_dump())
        return simulate_run(cfg).to_dict()
    except ValidationError as e:
        raise HTTPException(status_code=422, detail={"error": "ValidationError", "message": e.errors()[0]["msg"]})
    except TribaseError as e:
        raise _http_error(e)


if __name__ == "__main__":
    import uvicorn
    uvicorn.run(app, host="0.0.0.0", port=8000)
