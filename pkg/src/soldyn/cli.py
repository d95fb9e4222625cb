"""Command line client for the service.

Every subcommand builds one request, sends it to the service, and
renders the JSON answer.  Without ``--server`` the service runs in
process, so the CLI works standalone; with ``--server URL`` the same
requests go over the wire.

Exit codes: 0 on success, 2 when the request describes no valid
computation (code ``invalid_spec``), 3 when a computation ran but its
quality gate failed (code ``estimator_quality``), 1 on transport
errors.
"""

from __future__ import annotations

import json
import sys
import warnings
from pathlib import Path

import click

_EXIT_CODES = {"invalid_spec": 2, "estimator_quality": 3}

_MATRIX_HELP = "row-list JSON like [[2,1],[1,1]], or a path to a JSON file"


def _load_structured(value: str | None):
    """Inline JSON if it looks like JSON, else the content of a file."""
    if value is None:
        return None
    text = value.strip()
    if not text.startswith(("[", "{")):
        path = Path(value)
        if not path.exists():
            raise click.UsageError(f"{value!r} is neither JSON nor an existing file")
        text = path.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise click.UsageError(f"bad JSON in {value!r}: {e}")


def _client(server: str | None):
    if server:
        import httpx

        return httpx.Client(base_url=server, timeout=600.0)
    from .service import create_app

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from starlette.testclient import TestClient

        return TestClient(create_app(), base_url="http://soldyn.internal")


def _call(ctx: click.Context, path: str, payload: dict) -> dict:
    """POST one request, honor --json-out, and map error codes."""
    opts = ctx.obj
    command = ctx.command.name or ""
    payload = {**payload, **opts["config"].get(command, {})}
    try:
        response = opts["client"].post(path, json=payload)
        body = response.json()
    except Exception as e:
        click.echo(f"transport error: {e}", err=True)
        sys.exit(1)
    if opts["json_out"]:
        Path(opts["json_out"]).write_text(
            json.dumps(body, indent=2, sort_keys=True) + "\n"
        )
    if response.status_code != 200:
        code = body.get("code", "internal") if isinstance(body, dict) else "internal"
        message = body.get("message", str(body)) if isinstance(body, dict) else str(body)
        click.echo(f"error ({code}): {message}", err=True)
        sys.exit(_EXIT_CODES.get(code, 1))
    return body


def _finish_quality(passed: bool, message: str) -> None:
    if not passed:
        click.echo(f"error (estimator_quality): {message}", err=True)
        sys.exit(3)


@click.group()
@click.option("--server", default=None, metavar="URL",
              help="send requests to a running service instead of in process")
@click.option("--seed", default=0, type=int, show_default=True,
              help="seed for every randomized computation")
@click.option("--json-out", default=None, metavar="PATH",
              help="also write the raw response JSON to this file")
@click.option("--config", "config_path", default=None, metavar="PATH",
              help="JSON file whose per-command sections override request defaults")
@click.version_option(package_name="soldyn", prog_name="soldyn")
@click.pass_context
def main(ctx, server, seed, json_out, config_path):
    """Exact and verified computation for hyperbolic toral dynamics."""
    config = {}
    if config_path:
        config = json.loads(Path(config_path).read_text())
        if not isinstance(config, dict):
            raise click.UsageError("config file must hold a JSON object")
    ctx.obj = {
        "client": _client(server),
        "seed": seed,
        "json_out": json_out,
        "config": config,
    }


@main.command("verify-identities")
@click.option("--matrix", required=True, help=_MATRIX_HELP)
@click.option("--samples", default=25, show_default=True, type=int)
@click.pass_context
def verify_identities(ctx, matrix, samples):
    """Check the covering-space identities on random exact samples."""
    body = _call(ctx, "/identities", {
        "matrix": _load_structured(matrix),
        "samples": samples,
        "seed": ctx.obj["seed"],
    })
    for entry in body["identities"]:
        click.echo(f"{entry['status']:4s}  {entry['identity']}")
    click.echo(f"{len(body['identities'])} identities on {body['samples']} samples: "
               + ("all passed" if body["all_passed"] else "FAILURES ABOVE"))
    _finish_quality(body["all_passed"], "at least one identity failed")


@main.command()
@click.option("--matrix", default=None,
              help=_MATRIX_HELP + " (omit for the angle-doubling map)")
@click.option("--orbit-file", default=None, metavar="PATH",
              help="pseudo-orbit JSON to shadow instead of sampling one")
@click.option("--window", default=50, show_default=True, type=int,
              help="half-width J of the sampled pseudo-orbit")
@click.option("--noise", default=0.01, show_default=True, type=float)
@click.option("--tol", default=1e-12, show_default=True, type=float)
@click.pass_context
def shadow(ctx, matrix, orbit_file, window, noise, tol):
    """Shadow a pseudo-orbit and verify the a priori bound."""
    payload = {
        "matrix": _load_structured(matrix),
        "window": window,
        "noise": noise,
        "tol": tol,
        "seed": ctx.obj["seed"],
    }
    if orbit_file:
        orbit = _load_structured(orbit_file)
        payload["orbit"] = orbit["points"] if isinstance(orbit, dict) else orbit
    body = _call(ctx, "/shadow", payload)
    click.echo(f"system           {body['system']}")
    click.echo(f"window           {body['window']}")
    click.echo(f"gap              {body['gap']:.6e}")
    click.echo(f"existence bound  {body['existence_bound']:.6e}")
    click.echo(f"verified sup     {body['verified_sup']:.6e}")
    click.echo(f"within bound     {body['within_bound']}")
    _finish_quality(body["within_bound"],
                    "the verified distance exceeds the existence bound")


@main.command()
@click.argument("kind", type=click.Choice(["solid-torus", "linear-model"]))
@click.option("--depth", default=40, show_default=True, type=int,
              help="chart depth (solid-torus) or orbit window (linear-model)")
@click.option("--samples", default=200, show_default=True, type=int)
@click.option("--tolerance", default=1e-6, show_default=True, type=float)
@click.option("--matrix", default=None, help=_MATRIX_HELP + " (linear-model)")
@click.option("--eps", default=0.05, show_default=True, type=float,
              help="perturbation strength (linear-model)")
@click.pass_context
def conjugacy(ctx, kind, depth, samples, tolerance, matrix, eps):
    """Verify one of the built conjugacies on random samples."""
    body = _call(ctx, "/conjugacy", {
        "kind": kind,
        "depth": depth,
        "samples": samples,
        "tolerance": tolerance,
        "matrix": _load_structured(matrix),
        "eps": eps,
        "seed": ctx.obj["seed"],
    })
    rep = body["report"]
    click.echo(f"kind             {body['kind']}")
    click.echo(f"samples          {rep['samples']}")
    click.echo(f"max residual     {rep['max_residual']:.6e}")
    click.echo(f"tolerance        {body['tolerance']:.6e}")
    click.echo(f"within tolerance {body['within_tolerance']}")
    _finish_quality(body["within_tolerance"],
                    "the conjugacy residual exceeds the declared tolerance")


@main.command()
@click.option("--matrix", default=None, help=_MATRIX_HELP)
@click.option("--transition", default=None,
              help="transition JSON: {\"rows\": [[1,1],[1,0]]} or "
                   "{\"adjacency\": [[0,1],[0]]}, or a path")
@click.pass_context
def entropy(ctx, matrix, transition):
    """Topological entropy of a toral automorphism or a shift of finite type."""
    payload = {}
    if matrix is not None:
        payload["matrix"] = _load_structured(matrix)
    if transition is not None:
        payload["transition"] = _load_structured(transition)
    body = _call(ctx, "/entropy", payload)
    click.echo(f"kind     {body['kind']}")
    click.echo(f"entropy  {body['entropy']:.15f}")


@main.command()
@click.option("--transition", required=True,
              help="transition JSON (rows or adjacency), or a path")
@click.option("--max-len", default=8, show_default=True, type=int)
@click.option("--csv-out", default=None, metavar="PATH",
              help="write CSV here instead of stdout")
@click.pass_context
def weights(ctx, transition, max_len, csv_out):
    """Maximal-entropy cylinder weights as CSV (word, weight)."""
    body = _call(ctx, "/weights", {
        "transition": _load_structured(transition),
        "max_len": max_len,
    })
    lines = ["word,weight"]
    lines += [f"{e['word']},{e['weight']!r}" for e in body["weights"]]
    text = "\n".join(lines) + "\n"
    if csv_out:
        Path(csv_out).write_text(text)
        click.echo(f"{body['count']} weights written to {csv_out}")
    else:
        click.echo(text, nl=False)


@main.command()
@click.option("--matrix", required=True, help=_MATRIX_HELP)
@click.option("--vertices", default=None,
              help="piecewise-linear path as JSON [[x1,y1],[x2,y2],...]")
@click.option("--samples", default=500, show_default=True, type=int,
              help="random paths for the law report when no vertices are given")
@click.option("--span", default=1000, show_default=True, type=int)
@click.pass_context
def length(ctx, matrix, vertices, samples, span):
    """Signed unstable length of a path, or its invariance laws."""
    body = _call(ctx, "/length", {
        "matrix": _load_structured(matrix),
        "vertices": _load_structured(vertices),
        "samples": samples,
        "span": span,
        "seed": ctx.obj["seed"],
    })
    click.echo(f"expanding eigenvalue  {body['eigenvalue']:.15f}")
    if body["length"] is not None:
        click.echo(f"length                {body['length']:.15f}")
        click.echo(f"length of image path  {body['mapped_length']:.15f}")
    else:
        laws = body["laws"]
        click.echo(f"samples               {laws['samples']}")
        click.echo(f"max linearity defect  {laws['max_linearity_defect']:.3e}")
        click.echo(f"max sign defect       {laws['max_sign_defect']:.3e}")
        click.echo(f"max scaling defect    {laws['max_scaling_defect']:.3e}")


@main.command()
@click.option("--dim-lambda", required=True, type=int,
              help="attractor dimension, 0..3")
@click.option("--dim-eu", required=True, type=int,
              help="expanding (unstable) dimension, 0..2")
@click.pass_context
def classify(ctx, dim_lambda, dim_eu):
    """Topological class of a hyperbolic attractor from its two dimensions."""
    body = _call(ctx, "/classify", {"dim_lambda": dim_lambda, "dim_eu": dim_eu})
    click.echo(body["class_label"])


_BUILTIN_CHOICES = [
    "smale_solenoid",
    "toral_auto",
    "toral_times_contraction",
    "fixed_point_sink",
    "perturbed_toral",
]


def _echo_report(rep: dict) -> None:
    click.echo(
        f"{rep['spec']['builtin']:26s} box {rep['box_dimension']:7.4f} "
        f"(r2 {rep['box_r2']:.5f})  Eu {rep['dim_eu']}  Lambda {rep['dim_lambda']}"
        f"  ->  {rep['class_label']}"
    )


@main.command()
@click.option("--spec", "spec_arg", default=None,
              help="map spec JSON {\"builtin\": ..., ...}, or a path")
@click.option("--builtin", type=click.Choice(_BUILTIN_CHOICES), default=None,
              help="shortcut: build the spec from flags instead of JSON")
@click.option("--matrix", default=None, help=_MATRIX_HELP)
@click.option("--rate", default=None, type=float)
@click.option("--eps", default=None, type=float)
@click.option("--all", "run_all", is_flag=True,
              help="classify the whole builtin suite")
@click.option("--count", default=100_000, show_default=True, type=int)
@click.option("--steps", default=4000, show_default=True, type=int)
@click.option("--transient", default=100, show_default=True, type=int)
@click.option("--cloud-csv", default=None, metavar="PATH",
              help="also export the sampled orbit cloud as CSV")
@click.pass_context
def report(ctx, spec_arg, builtin, matrix, rate, eps, run_all, count, steps,
           transient, cloud_csv):
    """Full classification report for one map spec or the builtin suite."""
    common = {
        "seed": ctx.obj["seed"],
        "count": count,
        "steps": steps,
        "transient": transient,
    }
    if run_all:
        cat = [[2, 1], [1, 1]]
        plastic = [[0, 1, 0], [0, 0, 1], [1, 1, 0]]
        specs = [
            {"builtin": "smale_solenoid"},
            {"builtin": "toral_auto", "matrix": cat},
            {"builtin": "toral_auto", "matrix": plastic},
            {"builtin": "toral_times_contraction", "matrix": cat, "rate": 0.5},
            {"builtin": "fixed_point_sink", "rate": 0.5},
            {"builtin": "perturbed_toral", "matrix": cat, "eps": 0.05},
        ]
        body = _call(ctx, "/report/batch", {"specs": specs, **common})
        for rep in body["reports"]:
            _echo_report(rep)
        return
    if (spec_arg is None) == (builtin is None):
        raise click.UsageError("give exactly one of --spec or --builtin (or --all)")
    if spec_arg is not None:
        spec = _load_structured(spec_arg)
    else:
        spec = {"builtin": builtin}
        if matrix is not None:
            spec["matrix"] = _load_structured(matrix)
        if rate is not None:
            spec["rate"] = rate
        if eps is not None:
            spec["eps"] = eps
    if cloud_csv:
        opts = ctx.obj
        response = opts["client"].post("/orbit.csv", json={
            "spec": spec,
            "transient": transient,
            "count": min(count, 1_000_000),
            "seed": ctx.obj["seed"],
        })
        if response.status_code != 200:
            body = response.json()
            click.echo(f"error ({body.get('code')}): {body.get('message')}", err=True)
            sys.exit(_EXIT_CODES.get(body.get("code"), 1))
        Path(cloud_csv).write_text(response.text)
        click.echo(f"orbit cloud written to {cloud_csv}")
    body = _call(ctx, "/report", {"spec": spec, **common})
    _echo_report(body)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8741, show_default=True, type=int)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
