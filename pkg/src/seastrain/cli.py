"""Command-line client for the seastrain service.

Every command is a thin HTTP client: by default it runs the service
in-process, or targets a running instance via ``--server``. File handling
stays on the client side; record bytes and result documents travel over
the API.

Exit codes: 0 success, 1 estimation failure (the data did not support an
estimate, or a reproduction threshold failed), 2 usage or configuration
error. Diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import httpx

from . import __version__
from .errors import UsageError


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seastrain",
        description="Simulate DAS wave-tank records and estimate sea state from them.",
    )
    parser.add_argument(
        "--server",
        default=None,
        help="base URL of a running seastrain service (default: run in-process)",
    )
    parser.add_argument("--version", action="version", version=f"seastrain {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="synthesize a DAS record from a config")
    p.add_argument("--config", default=None, help="run config JSON (default: shipped defaults)")
    p.add_argument("--out", required=True, help="output record path")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--format", choices=("bin", "csv"), default="bin")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("analyze", help="estimate period or height, or emit a PSD")
    p.add_argument("--in", dest="infile", required=True, help="record path")
    p.add_argument("--channel-x", type=float, default=None, metavar="METRES",
                   help="analyze the channel nearest this position")
    p.add_argument("--range", dest="chan_range", default=None, metavar="A:B",
                   help="analyze channels with positions in [A, B] metres")
    p.add_argument("--mode", choices=("period", "height", "psd"), required=True)
    p.add_argument("--calibration", default=None, help="calibration document (height mode)")
    p.add_argument("--outdir", default=None, help="where to write results (default: beside the input)")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("calibrate", help="fit the RMS-to-height calibration")
    p.add_argument("--in", dest="infiles", action="append", required=True,
                   help="record path (repeat per record)")
    p.add_argument("--height", dest="heights", action="append", type=float, required=True,
                   help="true wave height in metres for the matching --in (repeat)")
    p.add_argument("--out", required=True, help="calibration document path")
    p.set_defaults(func=_cmd_calibrate)

    p = sub.add_parser("doa", help="joint DOA/wavelength from two cable layouts")
    p.add_argument("--in1", required=True, help="record for layout C1")
    p.add_argument("--in2", required=True, help="record for layout C2")
    p.add_argument("--delta-deg", type=float, required=True,
                   help="known DOA difference C2 - C1 in degrees")
    p.add_argument("--f0", type=float, default=None,
                   help="analysis frequency (default: fundamental of record 1)")
    p.add_argument("--outdir", default=None, help="where to write results (default: beside --in1)")
    p.set_defaults(func=_cmd_doa)

    p = sub.add_parser("reproduce", help="run the full condition grid and score it")
    p.add_argument("--outdir", required=True, help="directory for the summary and plot files")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_reproduce)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=None)

    return parser


def _client(server: str | None):
    if server:
        return httpx.Client(base_url=server, timeout=600.0)
    # in-process service; same httpx interface as a remote client
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service import create_app

    return TestClient(create_app(), raise_server_exceptions=False)


def _report_http_error(resp) -> int:
    try:
        body = resp.json()
    except ValueError:
        body = {}
    if isinstance(body, dict) and "error" in body:
        msg = f"{body['error'].get('kind', 'error')}: {body['error'].get('message', '')}"
    elif isinstance(body, dict) and "detail" in body:
        msg = json.dumps(body["detail"])
    else:
        msg = resp.text[:500]
    print(f"seastrain: {msg}", file=sys.stderr)
    return 2 if resp.status_code in (400, 422) else 1


def _read_file(path: str, label: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {label} {path}: {exc}") from exc


def _write_plots(plots: dict[str, str], outdir: Path, prefix: str) -> list[Path]:
    paths = []
    for name, payload in plots.items():
        path = outdir / (f"{prefix}.{name}" if prefix else name)
        path.write_text(payload, encoding="utf-8")
        paths.append(path)
    return paths


def _cmd_simulate(args, client) -> int:
    config_obj: dict = {}
    if args.config is not None:
        text = _read_file(args.config, "config").decode("utf-8")
        try:
            config_obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f"config {args.config} is not valid JSON: {exc}") from exc
    resp = client.post(
        "/simulate",
        json={"config": config_obj, "seed": args.seed, "format": args.format},
    )
    if resp.status_code != 200:
        return _report_http_error(resp)
    out = Path(args.out)
    try:
        out.write_bytes(resp.content)
    except OSError as exc:
        raise UsageError(f"cannot write {out}: {exc}") from exc
    s = json.loads(resp.headers["X-Seastrain-Summary"])
    print(
        f"wrote {out}: {s['n_channels']} channels x {s['n_samples']} samples "
        f"({s['duration_s']:.0f} s @ {s['sample_rate_hz']:.0f} Hz), wave "
        f"H={s['height_m']} m T={s['period_s']} s DOA={s['doa_deg']} deg "
        f"(cable-relative {s['cable_relative_doa_deg']:.1f} deg), "
        f"lambda={s['wavelength_m']:.3f} m, seed={s['seed']} ({s['rng']})"
    )
    return 0


def _parse_range(text: str) -> tuple[float, float]:
    try:
        a, b = text.split(":")
        return float(a), float(b)
    except ValueError as exc:
        raise UsageError(f"--range expects A:B in metres, got {text!r}") from exc


def _cmd_analyze(args, client) -> int:
    if args.channel_x is not None and args.chan_range is not None:
        raise UsageError("--channel-x and --range are mutually exclusive")
    if args.mode == "height" and args.calibration is None:
        raise UsageError("height mode requires --calibration")
    infile = Path(args.infile)
    blob = _read_file(args.infile, "record")
    data: dict = {"mode": args.mode}
    if args.channel_x is not None:
        data["channel_x_m"] = str(args.channel_x)
    if args.chan_range is not None:
        lo, hi = _parse_range(args.chan_range)
        data["range_start_m"] = str(lo)
        data["range_stop_m"] = str(hi)
    files = {"record": (infile.name, blob)}
    if args.calibration is not None:
        files["calibration"] = (
            Path(args.calibration).name,
            _read_file(args.calibration, "calibration"),
        )
    resp = client.post("/analyze", data=data, files=files)
    if resp.status_code != 200:
        return _report_http_error(resp)
    payload = resp.json()
    outdir = Path(args.outdir) if args.outdir else infile.parent
    outdir.mkdir(parents=True, exist_ok=True)
    result_path = outdir / f"{infile.stem}.{args.mode}.result.json"
    result_path.write_text(json.dumps(payload["result"], indent=2) + "\n", encoding="utf-8")
    plot_paths = _write_plots(payload["plots"], outdir, infile.stem)
    result = payload["result"]
    if args.mode == "period":
        p = result["period"]
        where = (
            f"channel at {p['channel_position_m']:.2f} m"
            if p.get("channel_position_m") is not None
            else "channel range"
        )
        print(
            f"period {p['period_s']:.4f} s (peak {p['peak_freq_hz']:.4f} Hz, "
            f"{where}, peak/median {p['peak_to_median_ratio']:.3g})"
        )
    elif args.mode == "height":
        h = result["height"]
        print(
            f"height {h['height_m']:.4f} m (median RMS {h['median_rms']:.6g} over "
            f"{h['n_rms_values']} windows, slope {h['slope_used']:.6g})"
        )
    else:
        print(f"psd written ({result['diagnostics']['psd_resolution_hz']:.6g} Hz resolution)")
    for path in [result_path, *plot_paths]:
        print(f"  -> {path}")
    return 0


def _cmd_calibrate(args, client) -> int:
    if len(args.infiles) != len(args.heights):
        raise UsageError(
            f"{len(args.infiles)} --in files but {len(args.heights)} --height values"
        )
    files = [
        ("records", (Path(p).name, _read_file(p, "record"))) for p in args.infiles
    ]
    data = {"heights_m": [str(h) for h in args.heights]}
    resp = client.post("/calibrate", data=data, files=files)
    if resp.status_code != 200:
        return _report_http_error(resp)
    payload = resp.json()
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(payload["result"], indent=2) + "\n", encoding="utf-8")
    plot_paths = _write_plots(payload["plots"], out.parent, out.stem)
    cal = payload["result"]["calibration"]
    print(
        f"calibration slope {cal['slope']:.6g} strain-RMS per metre, "
        f"RMSPE {cal['rmspe_percent']:.3f}% over {len(cal['fit_points'])} heights"
    )
    for path in [out, *plot_paths]:
        print(f"  -> {path}")
    return 0


def _cmd_doa(args, client) -> int:
    in1, in2 = Path(args.in1), Path(args.in2)
    files = {
        "record_c1": (in1.name, _read_file(args.in1, "record")),
        "record_c2": (in2.name, _read_file(args.in2, "record")),
    }
    data = {"delta_deg": str(args.delta_deg)}
    if args.f0 is not None:
        data["f0_hz"] = str(args.f0)
    resp = client.post("/doa", data=data, files=files)
    if resp.status_code != 200:
        return _report_http_error(resp)
    payload = resp.json()
    outdir = Path(args.outdir) if args.outdir else in1.parent
    outdir.mkdir(parents=True, exist_ok=True)
    prefix = f"{in1.stem}__{in2.stem}"
    result_path = outdir / f"{prefix}.doa.result.json"
    result_path.write_text(json.dumps(payload["result"], indent=2) + "\n", encoding="utf-8")
    plot_paths = _write_plots(payload["plots"], outdir, prefix)
    d = payload["result"]["doa"]
    flag = " (mirror ambiguity unresolved)" if d["ambiguity_flag"] else ""
    print(
        f"DOA C1 {d['doa_c1_deg']:.2f} deg, C2 {d['doa_c2_deg']:.2f} deg, "
        f"wavelength {d['wavelength_m']:.3f} m at f0 {d['f0_hz']:.4f} Hz{flag}"
    )
    for path in [result_path, *plot_paths]:
        print(f"  -> {path}")
    return 0


def _cmd_reproduce(args, client) -> int:
    outdir = Path(args.outdir)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        probe = outdir / ".seastrain-write-probe"
        probe.write_bytes(b"")
        probe.unlink()
    except OSError as exc:
        raise UsageError(f"outdir {outdir} is not writable: {exc}") from exc
    resp = client.post("/reproduce", json={"seed": args.seed})
    if resp.status_code != 200:
        return _report_http_error(resp)
    payload = resp.json()
    summary = payload["summary"]
    for name, content in payload["artifacts"].items():
        (outdir / name).write_text(content, encoding="utf-8")
    (outdir / "summary.json").write_text(
        json.dumps(summary, indent=2) + "\n", encoding="utf-8"
    )
    checks = summary["checks"]
    n_pass = sum(1 for c in checks if c["passed"])
    for c in checks:
        if not c["passed"]:
            print(
                f"FAIL {c['condition']} {c['metric']}: {c['value']:.4g} "
                f"(threshold {c['threshold']:.4g})",
                file=sys.stderr,
            )
    print(
        f"reproduce seed {summary['seed']}: {n_pass}/{len(checks)} checks passed; "
        f"results in {outdir}"
    )
    return 0 if summary["all_pass"] else 1


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "serve":
        import uvicorn

        from .service import create_app

        uvicorn.run(create_app(), host=args.host, port=args.port)
        return 0
    try:
        with _client(args.server) as client:
            return args.func(args, client)
    except UsageError as exc:
        print(f"seastrain: {exc}", file=sys.stderr)
        return 2
    except httpx.HTTPError as exc:
        print(f"seastrain: request failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
