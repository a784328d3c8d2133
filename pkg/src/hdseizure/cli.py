"""Thin command-line client for the detection service.

Every subcommand builds a request, sends it to the FastAPI service and
renders the response.  With --server the request goes over HTTP to a running
instance (`hdsz serve`); without it the app is served in-process, so all
commands work standalone with identical wire behavior.

Pipeline configuration is accepted both as flags (--d, --seed, --lbp-len,
--protocol, --m) and as a JSON config file (--config); flags override the
file.  Exit codes: 0 ok, 1 usage, 2 data error, 3 training failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import httpx

_DEFAULTS = {"d": 10_000, "seed": 1, "lbp_len": 6, "protocol": "kfold", "m": 1}


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; ours is 1
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _client(server: str | None):
    if server:
        return httpx.Client(base_url=server.rstrip("/"), timeout=None)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # the in-process client import warns on some stacks
        from fastapi.testclient import TestClient

    from .service.app import app

    return TestClient(app)


def _call(args, method: str, path: str, payload: dict):
    try:
        with _client(args.server) as client:
            resp = client.request(method, path, json=payload)
    except httpx.HTTPError as e:
        print(f"error: cannot reach service: {e}", file=sys.stderr)
        raise SystemExit(2)
    if resp.status_code >= 400:
        try:
            body = resp.json()
            detail, code = body["detail"], int(body.get("exit_code", 2))
        except Exception:
            detail, code = resp.text, 2
        print(f"error: {detail}", file=sys.stderr)
        raise SystemExit(code)
    return resp.json()


def _load_config_file(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path) as f:
            cfg = json.load(f)
    except FileNotFoundError:
        print(f"error: config file not found: {path}", file=sys.stderr)
        raise SystemExit(1)
    except json.JSONDecodeError as e:
        print(f"error: config file is not valid JSON: {e}", file=sys.stderr)
        raise SystemExit(1)
    unknown = set(cfg) - set(_DEFAULTS)
    if unknown:
        print(f"error: unknown config keys: {sorted(unknown)}", file=sys.stderr)
        raise SystemExit(1)
    return cfg


def _effective(args, key: str):
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    return _load_config_file(args.config).get(key, _DEFAULTS[key])


def _run_config(args) -> dict:
    return {
        "d": _effective(args, "d"),
        "seed": _effective(args, "seed"),
        "lbp_len": _effective(args, "lbp_len"),
    }


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--d", type=int, help="hypervector dimensionality (default 10000)")
    p.add_argument("--seed", type=int, help="reproducibility seed (default 1)")
    p.add_argument("--lbp-len", dest="lbp_len", type=int, help="LBP code length (default 6)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hdsz", description="iEEG seizure detection: LBP + HD computing")
    parser.add_argument("--server", help="service URL; default runs the service in-process")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", parents=[], help="generate synthetic HDSR recordings")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--recordings", type=int, default=5)
    p.add_argument("--electrodes", type=int, default=36)
    p.add_argument("--seizure-len", type=float, default=20.0)
    p.add_argument("--ictal-freq", type=float, default=3.0)
    p.add_argument("--asymmetry", type=float, default=0.85)
    p.add_argument("--noise-amp", type=float, default=1500.0)
    p.add_argument("--interictal-s", type=float, default=180.0)
    p.add_argument("--postictal-s", type=float, default=180.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--patient-id", default="SYN")

    p = sub.add_parser("train", help="train a detection model from recordings")
    _add_common(p)
    p.add_argument("--out", required=True, help="output model file")
    p.add_argument("recordings", nargs="+", help="training HDSR files (chronological)")

    p = sub.add_parser("detect", help="run detection on one recording")
    p.add_argument("--model", required=True)
    p.add_argument("--out", help="decision log file; omitted prints the log")
    p.add_argument("recording")

    p = sub.add_parser("eval", help="run a training protocol and report metrics")
    _add_common(p)
    p.add_argument("--protocol", choices=["kfold", "first-m"])
    p.add_argument("--m", type=int, help="number of trained seizures")
    p.add_argument("--out", help="write the machine-readable JSON report here")
    p.add_argument("recordings", nargs="+", help="patient recordings (chronological)")

    p = sub.add_parser("reconstruct-hist", help="dump per-window code-histogram estimates")
    _add_common(p)
    p.add_argument("--out", help="output file; omitted prints CSV")
    p.add_argument("--max-windows", type=int)
    p.add_argument("recording")

    p = sub.add_parser("bench", help="measure encoding+classification throughput")
    p.add_argument("--d", type=int, nargs="+", default=[10_000, 1_000])
    p.add_argument("--n", type=int, nargs="+", default=[36, 64, 100])
    p.add_argument("--windows", type=int, default=40)
    p.add_argument("--seed", type=int, default=1)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)

    return parser


def _cmd_synth(args) -> int:
    body = {
        "out_dir": args.out_dir,
        "recordings": args.recordings,
        "electrodes": args.electrodes,
        "seizure_len_s": args.seizure_len,
        "ictal_freq_hz": args.ictal_freq,
        "asymmetry": args.asymmetry,
        "noise_amp": args.noise_amp,
        "interictal_s": args.interictal_s,
        "postictal_s": args.postictal_s,
        "seed": args.seed,
        "patient_id": args.patient_id,
    }
    resp = _call(args, "POST", "/synth", body)
    for path in resp["paths"]:
        print(path)
    return 0


def _cmd_train(args) -> int:
    body = {"recordings": args.recordings, "out_model": args.out, "config": _run_config(args)}
    resp = _call(args, "POST", "/train", body)
    print(
        f"model written to {resp['model_path']} "
        f"(t_p={resp['t_p']}, d={resp['d']}, l={resp['lbp_len']}, "
        f"n={resp['n_electrodes']}, trained on {len(resp['trained'])} recording(s))"
    )
    return 0


def _cmd_detect(args) -> int:
    body = {"model": args.model, "recording": args.recording, "out_log": args.out}
    resp = _call(args, "POST", "/detect", body)
    if resp["detected"]:
        print(
            f"{resp['recording_id']}: seizure detected, delay {resp['delay_s']:.1f} s "
            f"(net {resp['delay_net_s']:.1f} s), {resp['false_alarms']} false alarm(s)"
        )
    else:
        print(f"{resp['recording_id']}: no seizure detected, {resp['false_alarms']} false alarm(s)")
    if args.out:
        print(f"decision log written to {resp['log_path']}")
    else:
        sys.stdout.write(resp["decision_log"])
    return 0


def _cmd_eval(args) -> int:
    body = {
        "recordings": args.recordings,
        "protocol": _effective(args, "protocol"),
        "m": _effective(args, "m"),
        "config": _run_config(args),
        "out_report": args.out,
    }
    resp = _call(args, "POST", "/eval", body)
    sys.stdout.write(resp["table"])
    if args.out:
        print(f"report written to {resp['report_path']}")
    return 0


def _cmd_reconstruct(args) -> int:
    body = {
        "recording": args.recording,
        "config": _run_config(args),
        "max_windows": args.max_windows,
        "out": args.out,
    }
    resp = _call(args, "POST", "/reconstruct-hist", body)
    if args.out:
        print(f"{resp['n_windows']} windows written to {resp['out_path']}")
    else:
        sys.stdout.write(resp["csv"])
    return 0


def _cmd_bench(args) -> int:
    body = {"d_values": args.d, "n_values": args.n, "windows": args.windows, "seed": args.seed}
    resp = _call(args, "POST", "/bench", body)
    sys.stdout.write(resp["table"])
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


_COMMANDS = {
    "synth": _cmd_synth,
    "train": _cmd_train,
    "detect": _cmd_detect,
    "eval": _cmd_eval,
    "reconstruct-hist": _cmd_reconstruct,
    "bench": _cmd_bench,
    "serve": _cmd_serve,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return _COMMANDS[args.command](args)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 1


if __name__ == "__main__":
    sys.exit(main())
