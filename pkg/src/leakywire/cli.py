"""Command-line front end: a thin client of the HTTP service.

By default requests are served in-process (the FastAPI app mounted on a
test transport); pass --server to talk to a running instance instead.
Output is CSV (complex values split into _re/_im columns, headers carry
unit annotations) or a JSON document that embeds the resolved request
under "config" so it can be re-ingested with --config.

Exit codes: 0 ok, 2 configuration error, 3 convergence failure,
4 selftest failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any

__all__ = ["main"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONVERGENCE = 3
EXIT_SELFTEST = 4


# ---------- small parsers ----------


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip() != ""]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad float list {text!r}") from exc


def _parse_dot(text: str) -> list[float]:
    vals = _parse_floats(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError(f"a dot needs two coordinates, got {text!r}")
    return vals


def _parse_grid(text: str) -> dict:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"grid must be lo:hi:n, got {text!r}")
    try:
        return {"lo": float(parts[0]), "hi": float(parts[1]), "n": int(parts[2])}
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}") from exc


def _range_values(text: str) -> list[float]:
    g = _parse_grid(text)
    if g["n"] == 1:
        return [g["lo"]]
    step = (g["hi"] - g["lo"]) / (g["n"] - 1)
    return [g["lo"] + i * step for i in range(g["n"])]


# ---------- config assembly ----------


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        _die(f"cannot read config {path}: {exc}", EXIT_CONFIG)
    if isinstance(doc, dict) and "config" in doc and isinstance(doc["config"], dict):
        return doc["config"]
    if not isinstance(doc, dict):
        _die(f"config {path} must hold a JSON object", EXIT_CONFIG)
    return doc


def _merge_model(cfg: dict, args) -> dict:
    model = dict(cfg.get("model") or {})
    if args.alpha is not None:
        model["alpha"] = args.alpha
    if args.dot:
        model["dots"] = [list(d) for d in args.dot]
    if args.beta:
        model["betas"] = list(args.beta)
    if "alpha" not in model:
        _die("model needs --alpha (or a config file with model.alpha)", EXIT_CONFIG)
    model.setdefault("dots", [])
    model.setdefault("betas", [])
    return model


def _merge_quad(cfg: dict, args) -> dict | None:
    quad = dict(cfg.get("quad") or {})
    if getattr(args, "abs_tol", None) is not None:
        quad["abs_tol"] = args.abs_tol
    if getattr(args, "rel_tol", None) is not None:
        quad["rel_tol"] = args.rel_tol
    if getattr(args, "max_subdivisions", None) is not None:
        quad["max_subdivisions"] = args.max_subdivisions
    return quad or None


# ---------- rendering ----------


def _fmt(x: Any) -> str:
    if x is None:
        return "nan"
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _render_csv(columns: list[str], rows: list[list], comments: list[str]) -> str:
    lines = [f"# {c}" for c in comments]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _output(command: str, payload: dict, result: dict, args) -> None:
    if args.format == "json":
        doc = {"command": command, "config": payload, "result": result}
        _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", args.out)
        return
    columns, rows, comments = _tabulate(command, result)
    _emit(_render_csv(columns, rows, comments), args.out)


def _tabulate(command: str, result: dict):
    if command == "spectrum":
        states = result["states"]
        nvec = max((len(s["null_vector"]) for s in states), default=0)
        columns = ["state[1]", "energy[1]", "kappa[1]", "residual[1]"]
        columns += [f"v{i}[1]" for i in range(nvec)]
        rows = []
        for i, s in enumerate(states):
            row = [i, s["energy"], s["kappa"], s["residual"]]
            row += list(s["null_vector"]) + [0.0] * (nvec - len(s["null_vector"]))
            rows.append(row)
        return columns, rows, [f"warning: {w}" for w in result.get("warnings", [])]
    if command == "eigenfunction":
        st = result["state"]
        comments = [f"energy={_fmt(st['energy'])}", f"kappa={_fmt(st['kappa'])}"]
        rows = [[p["x1"], p["x2"], p["psi"]] for p in result["points"]]
        return ["x1[1]", "x2[1]", "psi[1]"], rows, comments
    if command == "resonance":
        comments = [f"eps_beta={_fmt(result['eps_beta'])}", f"beta={_fmt(result['beta'])}"]
        if result.get("fit"):
            comments.append(
                f"fit: nu_loglog_slope={_fmt(result['fit']['nu_slope'])}"
                f" mu_over_b_max={_fmt(result['fit']['mu_over_b_max'])}"
            )
        rows = [
            [p["a"], p["b"], p["mu"], p["nu"], p["residual"], p["iterations"]]
            for p in result["points"]
        ]
        return (
            ["a[1]", "b[1]", "mu[1]", "nu[1]", "residual[1]", "iterations[1]"],
            rows,
            comments,
        )
    if command == "scatter":
        rows = [
            [p["lam"], p["momentum"], p["r_re"], p["r_im"], p["t_re"], p["t_im"],
             p["r_abs2"], p["t_abs2"]]
            for p in result["points"]
        ]
        return (
            ["lambda[1]", "momentum[1]", "R_re[1]", "R_im[1]", "T_re[1]", "T_im[1]",
             "R_abs2[1]", "T_abs2[1]"],
            rows,
            [],
        )
    if command == "twopoint":
        lv = result["levels"]
        comments = [
            f"eps1={_fmt(lv['eps1'])} eps2={_fmt(lv['eps2'])} has_two={lv['has_two']}",
            f"mu2_slope={_fmt(result['mu2_slope'])} nu2_curvature={_fmt(result['nu2_curvature'])}",
        ]
        rows = [
            [p["b"], p["mu"], p["nu"], p["residual"], p["iterations"]]
            for p in result["points"]
        ]
        return (
            ["b[1]", "mu2[1]", "nu2[1]", "residual[1]", "iterations[1]"],
            rows,
            comments,
        )
    if command == "selftest":
        rows = [[c["name"], c["passed"], c["detail"]] for c in result["checks"]]
        return ["check", "passed", "detail"], rows, [f"passed={result['passed']}"]
    raise ValueError(f"no tabulation for {command}")


# ---------- transport ----------


def _post(args, path: str, payload: dict) -> dict:
    if args.server:
        import httpx

        client = httpx.Client(base_url=args.server, timeout=600.0)
        resp = client.post(path, json=payload)
    else:
        from fastapi.testclient import TestClient

        from .service import create_app

        with TestClient(create_app()) as client:
            resp = client.post(path, json=payload)
    if resp.status_code in (400, 422):
        _die(f"invalid request: {resp.text}", EXIT_CONFIG)
    if resp.status_code == 409:
        _die(f"solver did not converge: {resp.text}", EXIT_CONVERGENCE)
    if resp.status_code != 200:
        _die(f"service error {resp.status_code}: {resp.text}", 1)
    return resp.json()


def _die(msg: str, code: int) -> None:
    print(f"leakywire: {msg}", file=sys.stderr)
    raise SystemExit(code)


# ---------- commands ----------


def _cmd_spectrum(args) -> int:
    cfg = _load_config(args.config)
    payload = {
        "model": _merge_model(cfg, args),
        "grid_points": args.grid_points or cfg.get("grid_points", 400),
    }
    quad = _merge_quad(cfg, args)
    if quad:
        payload["quad"] = quad
    result = _post(args, "/spectrum", payload)
    _output("spectrum", payload, result, args)
    return EXIT_OK


def _cmd_eigenfunction(args) -> int:
    cfg = _load_config(args.config)
    payload = {
        "model": _merge_model(cfg, args),
        "x1": _parse_grid(args.x1) if args.x1 else cfg.get("x1"),
        "x2": _parse_grid(args.x2) if args.x2 else cfg.get("x2"),
    }
    if payload["x1"] is None or payload["x2"] is None:
        _die("eigenfunction needs --x1 lo:hi:n and --x2 lo:hi:n", EXIT_CONFIG)
    quad = _merge_quad(cfg, args)
    if quad:
        payload["quad"] = quad
    result = _post(args, "/eigenfunction", payload)
    _output("eigenfunction", payload, result, args)
    return EXIT_OK


def _cmd_resonance(args) -> int:
    cfg = _load_config(args.config)
    payload: dict = {}
    payload["alpha"] = args.alpha if args.alpha is not None else cfg.get("alpha")
    if payload["alpha"] is None:
        _die("resonance needs --alpha", EXIT_CONFIG)
    if args.eps_beta is not None:
        payload["eps_beta"] = args.eps_beta
    elif args.beta_single is not None:
        payload["beta"] = args.beta_single
    elif "eps_beta" in cfg:
        payload["eps_beta"] = cfg["eps_beta"]
    elif "beta" in cfg:
        payload["beta"] = cfg["beta"]
    else:
        _die("resonance needs --beta or --eps-beta", EXIT_CONFIG)
    if args.a:
        payload["a_values"] = _parse_floats(args.a)
    elif args.a_range:
        payload["a_values"] = _range_values(args.a_range)
    elif "a_values" in cfg:
        payload["a_values"] = cfg["a_values"]
    else:
        _die("resonance needs --a or --a-range", EXIT_CONFIG)
    quad = _merge_quad(cfg, args)
    if quad:
        payload["quad"] = quad
    result = _post(args, "/resonance", payload)
    _output("resonance", payload, result, args)
    return EXIT_OK


def _cmd_scatter(args) -> int:
    cfg = _load_config(args.config)
    payload = {"model": _merge_model(cfg, args)}
    if args.lambdas:
        payload["lambdas"] = _parse_floats(args.lambdas)
    elif "lambdas" in cfg:
        payload["lambdas"] = cfg["lambdas"]
    payload["grid_n"] = args.grid_n or cfg.get("grid_n", 200)
    quad = _merge_quad(cfg, args)
    if quad:
        payload["quad"] = quad
    result = _post(args, "/scatter", payload)
    _output("scatter", payload, result, args)
    return EXIT_OK


def _cmd_twopoint(args) -> int:
    cfg = _load_config(args.config)
    payload = {
        "alpha": args.alpha if args.alpha is not None else cfg.get("alpha"),
        "a": args.a if args.a is not None else cfg.get("a"),
        "beta": args.beta_single if args.beta_single is not None else cfg.get("beta"),
        "mode": args.mode or cfg.get("mode", "consistent"),
    }
    for key in ("alpha", "a", "beta"):
        if payload[key] is None:
            _die(f"twopoint needs --{key}", EXIT_CONFIG)
    if args.b is not None:
        payload["b_values"] = _parse_floats(args.b)
    elif args.b_range:
        payload["b_values"] = _range_values(args.b_range)
    elif "b_values" in cfg:
        payload["b_values"] = cfg["b_values"]
    else:
        _die("twopoint needs --b or --b-range", EXIT_CONFIG)
    quad = _merge_quad(cfg, args)
    if quad:
        payload["quad"] = quad
    result = _post(args, "/twopoint", payload)
    _output("twopoint", payload, result, args)
    return EXIT_OK


def _cmd_selftest(args) -> int:
    result = _post(args, "/selftest", {})
    _output("selftest", {}, result, args)
    return EXIT_OK if result["passed"] else EXIT_SELFTEST


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return EXIT_OK


# ---------- parser ----------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file (flags override its values)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--server", help="base URL of a running service (default: in-process)")
    p.add_argument("--abs-tol", type=float, default=None)
    p.add_argument("--rel-tol", type=float, default=None)
    p.add_argument("--max-subdivisions", type=int, default=None)


def _add_model(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, default=None, help="line strength (> 0)")
    p.add_argument("--dot", type=_parse_dot, action="append", default=None,
                   metavar="X,Y", help="dot position; repeatable")
    p.add_argument("--beta", type=float, action="append", default=None,
                   help="dot parameter; repeatable, one per dot")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="leakywire", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="bound states below the threshold")
    _add_common(p)
    _add_model(p)
    p.add_argument("--grid-points", type=int, default=None)
    p.set_defaults(fn=_cmd_spectrum)

    p = sub.add_parser("eigenfunction", help="single-dot eigenfunction on a grid")
    _add_common(p)
    _add_model(p)
    p.add_argument("--x1", help="grid lo:hi:n")
    p.add_argument("--x2", help="grid lo:hi:n")
    p.set_defaults(fn=_cmd_eigenfunction)

    p = sub.add_parser("resonance", help="second-sheet pole trajectory over dot heights")
    _add_common(p)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", dest="beta_single", type=float, default=None)
    p.add_argument("--eps-beta", type=float, default=None, help="dot level (negative)")
    p.add_argument("--a", help="comma list of dot heights")
    p.add_argument("--a-range", help="lo:hi:n")
    p.set_defaults(fn=_cmd_resonance)

    p = sub.add_parser("scatter", help="reflection/transmission on the guided channel")
    _add_common(p)
    _add_model(p)
    p.add_argument("--lambdas", help="comma list of energies")
    p.add_argument("--grid-n", type=int, default=None)
    p.set_defaults(fn=_cmd_scatter)

    p = sub.add_parser("twopoint", help="two-dot broken-symmetry resonance")
    _add_common(p)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--a", type=float, default=None, help="half-spacing of the mirror dots")
    p.add_argument("--beta", dest="beta_single", type=float, default=None)
    p.add_argument("--b", help="comma list of coupling offsets")
    p.add_argument("--b-range", help="lo:hi:n")
    p.add_argument("--mode", choices=("consistent", "paper-literal"), default=None)
    p.set_defaults(fn=_cmd_twopoint)

    p = sub.add_parser("selftest", help="run the oracle cross-check suite")
    _add_common(p)
    p.set_defaults(fn=_cmd_selftest)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(fn=_cmd_serve)

    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except SystemExit:
        raise
    except BrokenPipeError:
        return EXIT_OK
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
