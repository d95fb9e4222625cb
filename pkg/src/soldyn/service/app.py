"""FastAPI application wiring the core operations to HTTP endpoints.

Every handler translates JSON payloads to core objects, runs one
operation, and returns the core object's own JSON form.  Domain errors
map to a two-field payload {code, message}: ``invalid_spec`` for
malformed or meaningless requests (HTTP 400) and ``estimator_quality``
for computations that ran but refused to vouch for their result
(HTTP 422).
"""

from __future__ import annotations

import io
import math

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, PlainTextResponse

from .. import __version__
from ..classify import (
    AttractorReport,
    ClassifierConfig,
    EstimatorQualityError,
    InvalidSpecError,
    MapSpec,
    classify,
    generate_orbit,
    report,
    report_many,
)
from ..conjugacy import (
    ConjugacyMap,
    PerturbedToral,
    PicardDivergenceError,
    SmaleSystem,
    default_perturbation,
    verify_conjugacy,
)
from ..cover import verify_cover_identities
from ..linalg import DefectiveMatrixError, IntMatrix, check_hyperbolic, toral_entropy
from ..mme import (
    LinearModelPath,
    TransitionMatrix,
    entropy_sft,
    enumerate_weights,
    expanding_eigenvalue,
    path_unstable_length,
    transition_from_adjacency,
    unstable_length_laws,
)
from ..shadowing import (
    PseudoOrbit,
    doubling_system,
    linear_toral_system,
    sample_pseudo_orbit,
    shadow,
    verify_shadow,
)
from . import schemas


def _transition(model: schemas.TransitionModel) -> TransitionMatrix:
    if model.rows is not None:
        return TransitionMatrix(model.rows)
    return transition_from_adjacency(model.adjacency)


def create_app() -> FastAPI:
    app = FastAPI(title="soldyn", version=__version__)

    @app.exception_handler(RequestValidationError)
    async def _validation(request: Request, exc: RequestValidationError):
        first = exc.errors()[0]
        where = ".".join(str(p) for p in first.get("loc", ()))
        return JSONResponse(
            status_code=400,
            content=schemas.error_json("invalid_spec", f"{where}: {first['msg']}"),
        )

    @app.exception_handler(InvalidSpecError)
    @app.exception_handler(DefectiveMatrixError)
    @app.exception_handler(ValueError)
    async def _invalid(request: Request, exc: Exception):
        return JSONResponse(
            status_code=400, content=schemas.error_json("invalid_spec", str(exc))
        )

    @app.exception_handler(EstimatorQualityError)
    @app.exception_handler(PicardDivergenceError)
    @app.exception_handler(ArithmeticError)
    async def _quality(request: Request, exc: Exception):
        return JSONResponse(
            status_code=422,
            content=schemas.error_json("estimator_quality", str(exc)),
        )

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/identities", response_model=schemas.IdentitiesResponse)
    def identities(req: schemas.IdentitiesRequest):
        matrix = IntMatrix(req.matrix)
        if matrix.det() == 0:
            raise InvalidSpecError(
                "matrix must be invertible over the rationals to define an "
                "inverse limit"
            )
        entries = verify_cover_identities(matrix, samples=req.samples, seed=req.seed)
        return schemas.IdentitiesResponse(
            matrix=req.matrix,
            samples=req.samples,
            identities=entries,
            all_passed=all(e["status"] == "pass" for e in entries),
        )

    @app.post("/shadow", response_model=schemas.ShadowResponse)
    def shadow_endpoint(req: schemas.ShadowRequest):
        if req.matrix is not None:
            system = linear_toral_system(IntMatrix(req.matrix))
        else:
            system = doubling_system()
        if req.orbit is not None:
            orbit = PseudoOrbit.from_json(
                {"points": [p.model_dump() for p in req.orbit]}
            )
        else:
            orbit = sample_pseudo_orbit(
                system, np.random.default_rng(req.seed), req.window, req.noise
            )
        result = shadow(system, orbit, tol=req.tol)
        verified = verify_shadow(system, orbit, result.point)
        bound = result.existence_bound
        as_json = result.to_json()
        return schemas.ShadowResponse(
            system=system.name,
            window=orbit.window,
            gap=result.gap,
            existence_bound=bound,
            verified_sup=verified,
            within_bound=verified <= bound + 1e-12,
            converged=result.converged,
            iterations=result.iterations,
            final_increment=result.final_increment,
            shadow_point={"base": as_json["base"], "fiber": as_json["fiber"]},
        )

    @app.post("/conjugacy", response_model=schemas.ConjugacyResponse)
    def conjugacy(req: schemas.ConjugacyRequest):
        if req.kind == "solid-torus":
            cmap = ConjugacyMap(
                kind="solid-torus",
                depth=req.depth,
                tolerance=req.tolerance,
                smale=SmaleSystem(lam_c=req.lam_c, c_off=req.c_off),
            )
        else:
            matrix = IntMatrix(req.matrix) if req.matrix else IntMatrix([[2, 1], [1, 1]])
            hyp = check_hyperbolic(matrix)
            if not hyp.is_hyperbolic:
                raise InvalidSpecError(
                    "matrix has an eigenvalue of modulus 1 and induces no "
                    "hyperbolic toral map"
                )
            perturbed = PerturbedToral(
                matrix=matrix,
                p=default_perturbation(req.eps),
                p_sup=req.eps / (2.0 * math.pi),
                p_lip=req.eps,
            )
            cmap = ConjugacyMap(
                kind="linear-model",
                depth=req.depth,
                tolerance=req.tolerance,
                perturbed=perturbed,
            )
        rep = verify_conjugacy(cmap, samples=req.samples, seed=req.seed)
        return schemas.ConjugacyResponse(
            kind=req.kind,
            tolerance=req.tolerance,
            within_tolerance=bool(rep["within_tolerance"]),
            report=rep,
        )

    @app.post("/entropy", response_model=schemas.EntropyResponse)
    def entropy(req: schemas.EntropyRequest):
        if req.matrix is not None:
            matrix = IntMatrix(req.matrix)
            hyp = check_hyperbolic(matrix)
            return schemas.EntropyResponse(
                kind="toral", entropy=toral_entropy(matrix), detail=hyp.to_json()
            )
        T = _transition(req.transition)
        data = entropy_sft(T)
        return schemas.EntropyResponse(kind="sft", entropy=data.h, detail=data.to_json())

    @app.post("/weights", response_model=schemas.WeightsResponse)
    def weights(req: schemas.WeightsRequest):
        T = _transition(req.transition)
        data = entropy_sft(T)
        entries = [
            schemas.WeightEntry(word=w, weight=x)
            for w, x in enumerate_weights(T, req.max_len, data)
        ]
        return schemas.WeightsResponse(
            entropy=data.h,
            eigenvalue=data.value,
            count=len(entries),
            weights=entries,
        )

    @app.post("/length", response_model=schemas.LengthResponse)
    def length(req: schemas.LengthRequest):
        matrix = IntMatrix(req.matrix)
        lam = expanding_eigenvalue(matrix)
        if req.vertices is not None:
            path = LinearModelPath(matrix, req.vertices)
            return schemas.LengthResponse(
                eigenvalue=lam,
                length=path_unstable_length(path),
                mapped_length=path_unstable_length(path.mapped()),
            )
        laws = unstable_length_laws(
            matrix, samples=req.samples, seed=req.seed, span=req.span
        )
        return schemas.LengthResponse(eigenvalue=lam, laws=laws)

    @app.post("/classify", response_model=schemas.ClassifyResponse)
    def classify_endpoint(req: schemas.ClassifyRequest):
        label = classify(req.dim_lambda, req.dim_eu)
        return schemas.ClassifyResponse(
            dim_lambda=req.dim_lambda, dim_eu=req.dim_eu, class_label=label
        )

    @app.post("/report")
    def report_endpoint(req: schemas.ReportRequest) -> dict:
        spec = MapSpec.from_json(req.spec)
        config = ClassifierConfig.from_json(req.config) if req.config else None
        rep: AttractorReport = report(
            spec,
            config=config,
            seed=req.seed,
            transient=req.transient,
            count=req.count,
            steps=req.steps,
        )
        return rep.to_json()

    @app.post("/orbit.csv", response_class=PlainTextResponse)
    def orbit_csv(req: schemas.OrbitRequest) -> str:
        spec = MapSpec.from_json(req.spec)
        cloud = generate_orbit(spec, req.transient, req.count, req.seed)
        buf = io.StringIO()
        cloud.to_csv(buf)
        return buf.getvalue()

    @app.post("/report/batch")
    def report_batch(req: schemas.ReportBatchRequest) -> dict:
        specs = [MapSpec.from_json(s) for s in req.specs]
        config = ClassifierConfig.from_json(req.config) if req.config else None
        reps = report_many(
            specs,
            config=config,
            seed=req.seed,
            transient=req.transient,
            count=req.count,
            steps=req.steps,
        )
        return {"reports": [r.to_json() for r in reps]}

    return app
