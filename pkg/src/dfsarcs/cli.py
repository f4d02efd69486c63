"""Command-line client for the verification service.

Every subcommand marshals its flags into the service's request schema and
posts it to the `/verify`, `/cross-check`, `/distribution`, `/simulate`, or
`/oracle` endpoint.  By default the app is mounted in-process (no daemon
needed); ``--url`` targets a running server instead.  Responses print as
canonical JSON (sorted keys, fixed separators), so identical invocations
produce byte-identical output; per-step progress and timings go to stderr
via logging.  The exit code is 0 exactly when every embedded check passed.
"""

from __future__ import annotations

import json
import logging
import os
import sys

import click
import httpx

_EXIT_FLAGS = {
    "/verify": "all_equal",
    "/cross-check": "all_passed",
    "/distribution": "ok",
    "/simulate": "ok",
    "/oracle": "ok",
}


def _client(url: str | None) -> httpx.Client:
    if url:
        return httpx.Client(base_url=url, timeout=None)
    from .service.app import app  # deferred: fastapi import is not free

    return httpx.Client(transport=httpx.ASGITransport(app=app), base_url="http://dfsarcs.local", timeout=None)


def _call(url: str | None, path: str, payload: dict) -> dict:
    with _client(url) as client:
        response = client.post(path, json=payload)
    if response.status_code != 200:
        click.echo(f"error: {response.status_code} {response.text}", err=True)
        sys.exit(2)
    return response.json()


def _emit_json(data: dict) -> None:
    click.echo(json.dumps(data, sort_keys=True, indent=2, separators=(",", ": ")))


def _finish(data: dict, path: str) -> None:
    passed = bool(data.get(_EXIT_FLAGS[path], False))
    sys.exit(0 if passed else 1)


def _default_workers() -> int:
    try:
        return max(1, int(os.environ.get("DFSARCS_WORKERS", "1")))
    except ValueError:
        return 1


@click.group()
@click.option("--url", default=None, help="Base URL of a running service; default runs in-process.")
@click.option("-v", "--verbose", is_flag=True, help="Log per-step progress to stderr.")
@click.pass_context
def main(ctx: click.Context, url: str | None, verbose: bool) -> None:
    """Exact and statistical checks of DFS arc-class identities."""
    ctx.ensure_object(dict)
    ctx.obj["url"] = url
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(message)s",
    )


@main.command()
@click.option("--n-max", type=int, required=True, help="Verify all sizes up to this n.")
@click.option("--knuth-only", "mode", flag_value="knuth", help="Check the z = w specialization only.")
@click.option("--extended", "mode", flag_value="extended", default=True, help="Check full identity of the merged families.")
@click.option("--workers", type=int, default=_default_workers, help="Parallel workers for the summand expansion.")
@click.option("--reduce", "reduce_", is_flag=True, help="Enable opportunistic denominator cancellation.")
@click.pass_context
def verify(ctx: click.Context, n_max: int, mode: str, workers: int, reduce_: bool) -> None:
    """Run the conjecture sweep; nonzero exit on any inequality."""
    data = _call(ctx.obj["url"], "/verify", {
        "n_max": n_max, "mode": mode, "workers": workers, "reduce": reduce_,
    })
    _emit_json(data)
    _finish(data, "/verify")


@main.command("cross-check")
@click.option("--n-max", type=int, required=True)
@click.option("--full-family-n-max", type=int, default=None, help="Cap for the four-variable specialization checks (default min(n_max, 8)).")
@click.option("--workers", type=int, default=_default_workers)
@click.pass_context
def cross_check(ctx: click.Context, n_max: int, full_family_n_max: int | None, workers: int) -> None:
    """Consistency checks between the independent recursions."""
    payload: dict = {"n_max": n_max, "workers": workers}
    if full_family_n_max is not None:
        payload["full_family_n_max"] = full_family_n_max
    data = _call(ctx.obj["url"], "/cross-check", payload)
    _emit_json(data)
    _finish(data, "/cross-check")


@main.command()
@click.option("--n", type=int, required=True)
@click.option("--p", required=True, help='Rational in (0,1), e.g. "1/2".')
@click.option("--role", type=click.Choice(["L", "F", "B", "C", "T"]), default="F")
@click.option("--kmax", type=int, default=16)
@click.option("--format", "fmt", type=click.Choice(["json", "tsv"]), default="json")
@click.pass_context
def distribution(ctx: click.Context, n: int, p: str, role: str, kmax: int, fmt: str) -> None:
    """Exact distribution table of one arc-class count."""
    data = _call(ctx.obj["url"], "/distribution", {
        "n": n, "p": p, "role": role, "kmax": kmax,
    })
    if fmt == "tsv":
        click.echo("k\tprob")
        for row in data["coeffs"]:
            click.echo(f"{row['k']}\t{row['prob']}")
        click.echo(f"tail\t{data['tail']}")
    else:
        _emit_json(data)
    _finish(data, "/distribution")


@main.command()
@click.option("--n", type=int, required=True)
@click.option("--p", required=True)
@click.option("--trials", type=int, required=True)
@click.option("--seed", type=int, default=0)
@click.option("--projection", default="F", help='Comma-separated arc classes or sums, e.g. "L,F,B+C,T".')
@click.option("--kmax", type=int, default=16)
@click.option("--significance", type=float, default=0.001)
@click.option("--exact-p", default=None, help="Compare against the exact table at this p instead (negative control).")
@click.option("--format", "fmt", type=click.Choice(["json", "tsv"]), default="json")
@click.pass_context
def simulate(ctx: click.Context, n: int, p: str, trials: int, seed: int, projection: str,
             kmax: int, significance: float, exact_p: str | None, fmt: str) -> None:
    """Monte Carlo trials with goodness-of-fit against the exact law."""
    payload = {
        "n": n, "p": p, "trials": trials, "seed": seed,
        "projection": [s.strip() for s in projection.split(",") if s.strip()],
        "kmax": kmax, "significance": significance,
    }
    if exact_p is not None:
        payload["exact_p"] = exact_p
    data = _call(ctx.obj["url"], "/simulate", payload)
    if fmt == "tsv":
        click.echo("key\tcount")
        for row in data["histogram"]:
            click.echo(f"{','.join(str(k) for k in row['key'])}\t{row['count']}")
    else:
        _emit_json(data)
    _finish(data, "/simulate")


@main.command()
@click.option("--n", type=int, required=True)
@click.option("--max-arcs", type=int, required=True)
@click.option("--bound", type=int, default=None, help="Series comparison degree bound (default max arcs).")
@click.option("--skip-forest", is_flag=True, help="Only check the single-tree enumeration.")
@click.pass_context
def oracle(ctx: click.Context, n: int, max_arcs: int, bound: int | None, skip_forest: bool) -> None:
    """Brute-force enumeration against the generating-function series."""
    payload: dict = {"n": n, "max_arcs": max_arcs, "include_forest": not skip_forest}
    if bound is not None:
        payload["bound"] = bound
    data = _call(ctx.obj["url"], "/oracle", payload)
    _emit_json(data)
    _finish(data, "/oracle")


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
def serve(host: str, port: int) -> None:
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run("dfsarcs.service.app:app", host=host, port=port)


if __name__ == "__main__":
    main()
