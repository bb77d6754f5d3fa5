"""Thin-client CLI: builds requests, talks to the service, writes CSVs.

By default the CLI mounts the service in-process (no server needed); pass
``--server URL`` to target a running instance instead. Exit codes: 0 success,
2 configuration error, 3 infeasible scenario, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import asyncio
import csv
import json
import sys
from pathlib import Path

import httpx

from .simulate import (
    GAP_HEADER,
    SAMPLES_HEADER,
    SUMMARY_HEADER,
    _fmt,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_NUMERICAL = 4

_CODE_TO_EXIT = {
    "config-error": EXIT_CONFIG,
    "infeasible-scenario": EXIT_INFEASIBLE,
    "numerical-failure": EXIT_NUMERICAL,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mmwhybrid",
        description="Hybrid-precoding Monte-Carlo simulation client",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario and write CSV results")
    run.add_argument("--preset", help="named scenario preset")
    run.add_argument("--config", help="JSON scenario file (same fields as the API)")
    run.add_argument("--seed", type=int, help="base RNG seed")
    run.add_argument("--realizations", type=int, help="channel realization count")
    run.add_argument("--snr-db", help="comma-separated SNR grid in dB")
    run.add_argument("--algorithms", help="comma-separated algorithm tags")
    run.add_argument("--out", required=True, help="per-sample CSV output path")
    run.add_argument("--threads", type=int, default=1, help="worker threads")
    run.add_argument("--gap-report", help="also write a per-realization gap CSV here")
    run.add_argument("--server", help="service URL (default: in-process)")

    presets = sub.add_parser("presets", help="list scenario presets")
    presets.add_argument("--server", help="service URL (default: in-process)")

    serve = sub.add_parser("serve", help="launch the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def _client(server: str | None) -> httpx.AsyncClient:
    if server:
        return httpx.AsyncClient(base_url=server, timeout=None)
    from .service.app import app

    return httpx.AsyncClient(
        transport=httpx.ASGITransport(app=app),
        base_url="http://mmwhybrid.local",
        timeout=None,
    )


def _request_body(args) -> dict:
    body: dict = {}
    if args.config:
        try:
            body.update(json.loads(Path(args.config).read_text()))
        except OSError as exc:
            raise SystemExit(_fail(f"cannot read config file: {exc}", EXIT_CONFIG))
        except json.JSONDecodeError as exc:
            raise SystemExit(_fail(f"config file is not valid JSON: {exc}", EXIT_CONFIG))
    if args.preset:
        body["preset"] = args.preset
    if args.seed is not None:
        body["seed"] = args.seed
    if args.realizations is not None:
        body["realizations"] = args.realizations
    if args.snr_db:
        try:
            body["snr_db"] = [float(v) for v in args.snr_db.split(",") if v.strip()]
        except ValueError:
            raise SystemExit(_fail(f"bad --snr-db value: {args.snr_db!r}", EXIT_CONFIG))
    if args.algorithms:
        body["algorithms"] = [t.strip() for t in args.algorithms.split(",") if t.strip()]
    body["threads"] = args.threads if hasattr(args, "threads") else 1
    if not body.get("preset") and not body.get("config"):
        raise SystemExit(_fail("need --preset or --config", EXIT_CONFIG))
    return body


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _error_exit(response: httpx.Response) -> int:
    try:
        payload = response.json()
    except ValueError:
        payload = {}
    error = payload.get("error") or {}
    code = error.get("code")
    message = error.get("message") or payload.get("detail") or response.text
    if code in _CODE_TO_EXIT:
        return _fail(message, _CODE_TO_EXIT[code])
    if response.status_code == 422:
        # request did not validate against the API schema
        return _fail(f"invalid request: {message}", EXIT_CONFIG)
    return _fail(f"service error ({response.status_code}): {message}", 1)


def _write_samples(path: str, scenario: str, samples: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SAMPLES_HEADER)
        for s in samples:
            writer.writerow(
                [
                    scenario,
                    s["algorithm"],
                    _fmt(float(s["snr_db"])),
                    s["realization"],
                    _fmt(float(s["sum_rate_bps_hz"])),
                ]
            )


def _write_summary(path: str, rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_HEADER)
        for r in rows:
            writer.writerow(
                [
                    r["scenario"],
                    r["algorithm"],
                    _fmt(float(r["snr_db"])),
                    r["n"],
                    _fmt(float(r["mean_sum_rate_bps_hz"])),
                    _fmt(float(r["ci95_half_width"])),
                    r["mean_rank"],
                    _fmt(r["kmeans_ge_greedy"]),
                    _fmt(r["greedy_ge_fixed"]),
                    _fmt(r["kmeans_ge_fixed"]),
                ]
            )


def _write_gap(path: str, rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(GAP_HEADER)
        for r in rows:
            writer.writerow(
                [
                    r["realization"],
                    _fmt(float(r["f_star_full"])),
                    _fmt(float(r["f_star_partial"])),
                    _fmt(float(r["delta"])),
                    _fmt(float(r["delta_formula"])),
                ]
            )


async def _run(args) -> int:
    body = _request_body(args)
    async with _client(args.server) as client:
        try:
            response = await client.post("/simulate", json=body)
        except httpx.HTTPError as exc:
            return _fail(f"cannot reach service: {exc}", 1)
        if response.status_code != 200:
            return _error_exit(response)
        payload = response.json()
        _write_samples(args.out, payload["scenario"], payload["samples"])
        summary_path = str(Path(args.out).with_suffix(".summary.csv"))
        _write_summary(summary_path, payload["summary"])
        print(f"wrote {args.out} and {summary_path}")

        if args.gap_report:
            response = await client.post("/gap-report", json=body)
            if response.status_code != 200:
                return _error_exit(response)
            _write_gap(args.gap_report, response.json()["rows"])
            print(f"wrote {args.gap_report}")
    return EXIT_OK


async def _presets(args) -> int:
    async with _client(args.server) as client:
        try:
            response = await client.get("/presets")
        except httpx.HTTPError as exc:
            return _fail(f"cannot reach service: {exc}", 1)
        if response.status_code != 200:
            return _error_exit(response)
        for preset in response.json():
            cfg = preset["config"]
            print(
                f"{preset['name']}: n_tx={cfg['n_tx']} n_rx={cfg['n_rx']} "
                f"K={cfg['n_users']} F={cfg['n_subcarriers']} Ns={cfg['n_streams']} "
                f"n_rf_tx={cfg['n_rf_tx']} realizations={preset['realizations']} "
                f"algorithms={','.join(preset['algorithms'])}"
            )
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        import uvicorn

        from .service.app import app

        uvicorn.run(app, host=args.host, port=args.port)
        return EXIT_OK
    try:
        if args.command == "run":
            return asyncio.run(_run(args))
        if args.command == "presets":
            return asyncio.run(_presets(args))
    except SystemExit as exc:  # raised with an exit code by helpers
        return int(exc.code) if exc.code is not None else 1
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
