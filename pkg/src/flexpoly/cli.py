"""Command-line front end: build fixtures, angle curves, the acceptance run, bulk export.

Exit codes: 0 success, 2 validation error, 3 certificate failure, 4 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import io as _io
import sys
from pathlib import Path

from .assembly import AssemblyError, construct, gamma_of, pn_height
from .bricard import BricardError, alpha_of, beta_of, build_bricard, flex_interval
from .config import ConfigError, RunConfig, load_config
from .geometry import GeometryError
from .io import MeshIOError, metadata, write_json, write_obj
from .verify import report_json, run_verification

EXIT_OK, EXIT_INVALID, EXIT_CERTIFICATE, EXIT_IO = 0, 2, 3, 4
VALIDATION_ERRORS = (ConfigError, BricardError, AssemblyError, GeometryError)


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise MeshIOError(f"cannot create {out}: {exc}") from exc
    return out


def _fixture(con, target: str, r: float | None, n: int | None):
    cfg = con.cfg
    if target == "B":
        r = cfg.s if r is None else r
        return "B", con.B(r), {"r": r}
    if target == "C":
        r = cfg.s if r is None else r
        return "C", con.C(r), {"r": r}
    if target == "P":
        return "P", con.P, {"r": cfg.s, "k": con.k}
    n = 1 if n is None else n
    if n < 1:
        raise ConfigError("n must be a positive integer")
    return f"P_{n}", con.Pn(n), {"n": n, "k": con.k, "apex_height": pn_height(cfg.s, n)}


def cmd_build(cfg: RunConfig, target: str, r: float | None = None, n: int | None = None) -> list[Path]:
    con = construct(cfg.bricard, cfg.aux)
    name, Q, extra = _fixture(con, target, r, n)
    out = _out_dir(cfg)
    params = {"config": cfg.as_dict(), "target": target, **extra}
    return [write_obj(Q, out / f"{name}.obj"), write_json(metadata(Q, params), out / f"{name}.json")]


def angle_table(cfg: RunConfig) -> tuple[list[str], list[list[float]]]:
    """Rows (r, alpha, beta[, gamma]) over the flex interval, r increasing to s."""
    bcfg = cfg.bricard
    try:
        con = construct(bcfg, cfg.aux)
        interval = con.interval
    except AssemblyError:
        con, interval = None, flex_interval(bcfg)
    header = ["r", "alpha", "beta"] + (["gamma"] if con is not None else [])
    rows = []
    for r in interval.samples(cfg.grid):
        B = build_bricard(bcfg, r)
        row = [float(r), alpha_of(B), beta_of(B)]
        if con is not None:
            row.append(gamma_of(con.C(r)))
        rows.append(row)
    return header, rows


def cmd_angles(cfg: RunConfig) -> str:
    header, rows = angle_table(cfg)
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows([[repr(x) for x in row] for row in rows])
    return buf.getvalue()


def cmd_verify(cfg: RunConfig) -> tuple[int, dict]:
    report = run_verification(cfg)
    return (EXIT_OK if report["passed"] else EXIT_CERTIFICATE), report


def cmd_export(cfg: RunConfig) -> list[Path]:
    """Every fixture at r = s, P_n for the configured n, and the angle curve."""
    written = []
    for target in ("B", "C", "P"):
        written += cmd_build(cfg, target)
    for n in cfg.n_list:
        written += cmd_build(cfg, "Pn", n=n)
    path = _out_dir(cfg) / "angles.csv"
    try:
        path.write_text(cmd_angles(cfg))
    except OSError as exc:
        raise MeshIOError(f"cannot write {path}: {exc}") from exc
    return written + [path]


# ----------------------------------------------------------------- parsing

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="flat key = value file")
    common.add_argument("--out", metavar="DIR", help="output directory (overrides out_dir)")
    common.add_argument("--grid", type=int, metavar="N", help="samples over the flex interval")
    common.add_argument("--tol", type=float, metavar="VAL", help="angle and sector tolerance (tol_angle)")

    ap = argparse.ArgumentParser(prog="flexpoly", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    b = sub.add_parser("build", parents=[common], help="write OBJ and JSON for one fixture")
    b.add_argument("target", choices=["B", "C", "P", "Pn"])
    b.add_argument("--r", type=float, metavar="VAL", help="circumradius for B and C (default s)")
    b.add_argument("--n", type=int, metavar="VAL", help="index for Pn (default 1)")
    sub.add_parser("angles", parents=[common], help="CSV of r, alpha, beta, gamma")
    sub.add_parser("verify", parents=[common], help="run the acceptance pipeline")
    sub.add_parser("export", parents=[common], help="write every fixture and the angle curve")
    return ap


def _config(args) -> RunConfig:
    cfg = load_config(args.config)
    return cfg.with_overrides(out_dir=args.out, grid=args.grid, tol_angle=args.tol)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
        if args.command == "build":
            for p in cmd_build(cfg, args.target, r=args.r, n=args.n):
                print(p)
        elif args.command == "angles":
            text = cmd_angles(cfg)
            if args.out:
                path = _out_dir(cfg) / "angles.csv"
                path.write_text(text)
                print(path)
            else:
                sys.stdout.write(text)
        elif args.command == "verify":
            code, report = cmd_verify(cfg)
            text = report_json(report)
            path = _out_dir(cfg) / "verify.json"
            path.write_text(text)
            for line in report["lines"]:
                print(line)
            print(path)
            if code != EXIT_OK:
                print(f"certificate failure: criterion {report['first_failure']}", file=sys.stderr)
            return code
        elif args.command == "export":
            for p in cmd_export(cfg):
                print(p)
    except VALIDATION_ERRORS as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
