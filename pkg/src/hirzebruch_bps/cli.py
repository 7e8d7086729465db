"""Command-line front end.

    hbps betti --ell 1 --rank 3 --c1 -1,0 --c2-min 2 --c2-max 5 --J 1,0,plus
    hbps tables --format md
    hbps check blowup --ell 2

``--c1 b,a`` stands for ``c1 = b C - a f``.  Results of the exact verbs are
cached under ``--cache-dir`` (or ``$HBPS_CACHE_DIR``) keyed by a hash of the
package version and the job.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from importlib import resources

from . import __version__
from .lattice import (
    ChernVector,
    DivisorClass,
    LatticeError,
    Polarization,
    Side,
    Surface,
    as_polarization,
    discriminant,
    walls,
)

CACHE_ENV = "HBPS_CACHE_DIR"


class CLIError(Exception):
    pass


@dataclass(frozen=True)
class JobConfig:
    verb: str
    ell: int = 1
    r: int = 2
    c1: tuple[int, int] = (1, 0)
    c2_min: int | None = None
    c2_max: int | None = None
    J: str = "1,1,plus"
    qmax: str | None = None
    fmt: str = "json"
    extra: tuple = ()

    @property
    def divisor(self) -> DivisorClass:
        b, a = self.c1
        return DivisorClass(b, -a)

    @property
    def polarization(self) -> Polarization:
        return as_polarization(self.J)

    def c2_values(self) -> list[int]:
        if self.c2_min is None:
            raise CLIError("--c2-min is required")
        hi = self.c2_min if self.c2_max is None else self.c2_max
        if hi < self.c2_min:
            raise CLIError("--c2-max below --c2-min")
        return list(range(self.c2_min, hi + 1))

    def key(self) -> str:
        blob = json.dumps({"version": __version__, **asdict(self)}, sort_keys=True, default=str)
        return hashlib.sha256(blob.encode()).hexdigest()


def auto_qmax(r: int, c1: DivisorClass, c2_max: int, ell: int) -> Fraction:
    """``r Delta_max - r/6 + 1``: one unit past the largest needed exponent."""
    delta = discriminant(ChernVector(r, c1, c2_max), Surface(ell))
    return r * delta - Fraction(r, 6) + 1


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------


def _pair(text: str) -> tuple[int, int]:
    try:
        b, a = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected two integers b,a, got {text!r}") from None
    return b, a


def _J(text: str) -> str:
    try:
        as_polarization(text)
    except (ValueError, LatticeError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return text


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ell", type=int, default=1)
    common.add_argument("--rank", type=int, default=2, dest="r")
    common.add_argument("--c1", type=_pair, default=(1, 0), help="b,a for c1 = bC - af")
    common.add_argument("--c2-min", type=int)
    common.add_argument("--c2-max", type=int)
    common.add_argument("--J", type=_J, default="1,1,plus", help="m,n[,side] with side in minus|exact|plus")
    common.add_argument("--qmax", type=str)
    common.add_argument("--format", choices=("json", "csv", "md"), default="json", dest="fmt")
    common.add_argument("--cache-dir")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--seed", type=int, default=0)

    p = argparse.ArgumentParser(prog="hbps", description="BPS invariants on Hirzebruch surfaces")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="verb", required=True)
    sub.add_parser("betti", parents=[common], help="Betti numbers per c2")
    sub.add_parser("euler", parents=[common], help="Euler numbers per c2")
    s = sub.add_parser("series", parents=[common], help="generating function as canonical JSON")
    s.add_argument("--kind", choices=("f", "h"), default="h")
    sub.add_parser("walls", parents=[common], help="walls of one charge")
    w = sub.add_parser("wallcross", parents=[common], help="transport invariants between two J")
    w.add_argument("--J-to", type=_J, required=True)
    w.add_argument("--via", type=_J, action="append", default=[], help="intermediate J (repeatable)")
    c = sub.add_parser("check", parents=[common], help="verification suites")
    c.add_argument("suite", choices=("blowup", "modularity", "anomaly", "oracles"))
    sub.add_parser("tables", parents=[common], help="rebuild the three rank-3 tables and diff against goldens")
    return p


# ---------------------------------------------------------------------------
# exact verbs
# ---------------------------------------------------------------------------


def _records_chunk(args):
    from .invariants.extraction import invariant_records

    ell, r, c1, c2s, J = args
    return [rec.to_json() for rec in invariant_records(ell, r, c1, c2s, J)]


def records(cfg: JobConfig, jobs: int = 1) -> list[dict]:
    c2s = cfg.c2_values()
    if cfg.qmax is not None:
        need = auto_qmax(cfg.r, cfg.divisor, max(c2s), cfg.ell) - 1
        if Fraction(cfg.qmax) < need:
            raise CLIError(f"--qmax {cfg.qmax} is below {need}, needed for c2 <= {max(c2s)}")
    J = cfg.polarization
    if jobs <= 1 or len(c2s) == 1:
        return _records_chunk((cfg.ell, cfg.r, cfg.divisor, c2s, J))
    chunks = [c2s[i::jobs] for i in range(min(jobs, len(c2s)))]
    with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
        parts = list(pool.map(_records_chunk, [(cfg.ell, cfg.r, cfg.divisor, ch, J) for ch in chunks]))
    rows = [row for part in parts for row in part]
    return sorted(rows, key=lambda d: Fraction(d["c2"]))


def betti_columns(rows: list[dict]) -> int:
    """Number of ``b_{2k}`` columns for ``2k <= dim``, as in the printed tables."""
    return max((row["dim"] // 2 + 1 for row in rows), default=1)


def betti_row(row: dict, ncol: int) -> list:
    even = row["betti"][: row["dim"] + 1 : 2]
    return [row["c2"]] + even + [""] * (ncol - len(even)) + [row["euler"]]


def emit_betti(rows: list[dict], fmt: str, title: str = "") -> str:
    if fmt == "json":
        return json.dumps(rows, indent=1, sort_keys=True) + "\n"
    ncol = betti_columns(rows)
    head = ["c2"] + [f"b_{2 * k}" for k in range(ncol)] + ["chi"]
    body = [betti_row(row, ncol) for row in rows]
    if fmt == "csv":
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(head)
        wr.writerows(body)
        return buf.getvalue()
    lines = [f"**{title}**", ""] if title else []
    lines.append("| " + " | ".join(head) + " |")
    lines.append("|" + "|".join("---:" for _ in head) + "|")
    lines += ["| " + " | ".join(str(x) for x in row) + " |" for row in body]
    return "\n".join(lines) + "\n"


def emit_euler(rows: list[dict], fmt: str) -> str:
    slim = [{"c2": r["c2"], "dim": r["dim"], "euler": r["euler"]} for r in rows]
    if fmt == "json":
        return json.dumps(slim, indent=1) + "\n"
    if fmt == "csv":
        return "c2,dim,chi\n" + "".join(f"{r['c2']},{r['dim']},{r['euler']}\n" for r in slim)
    out = ["| c2 | dim | chi |", "|---:|---:|---:|"]
    out += [f"| {r['c2']} | {r['dim']} | {r['euler']} |" for r in slim]
    return "\n".join(out) + "\n"


def cmd_series(cfg: JobConfig) -> str:
    from .invariants.genfun import f_series, h_series
    from .qseries import dumps

    kind = dict(cfg.extra).get("kind", "h")
    if cfg.qmax is not None:
        qmax = Fraction(cfg.qmax)
    elif cfg.c2_min is not None:
        qmax = auto_qmax(cfg.r, cfg.divisor, max(cfg.c2_values()), cfg.ell)
    else:
        qmax = Fraction(4)
    J = cfg.polarization
    if kind == "f":
        s = f_series(cfg.ell, cfg.r, cfg.divisor, J, qmax)
    else:
        s = h_series(cfg.ell, cfg.r, cfg.divisor, J, qmax)
    return dumps(s) + "\n"


def _charge_json(g: ChernVector) -> dict:
    c2 = Fraction(g.c2)
    return {"r": g.r, "c1": [g.c1.cC, -g.c1.cF], "c2": c2.numerator if c2.denominator == 1 else str(c2)}


def cmd_walls(cfg: JobConfig) -> str:
    S = Surface(cfg.ell)
    out = []
    for c2 in cfg.c2_values():
        g = ChernVector(cfg.r, cfg.divisor, c2)
        ws = walls(g, S)
        out.append(
            {
                "charge": _charge_json(g),
                "walls": [
                    {"m": w.m, "n": w.n, "kind": w.kind, "constituents": [_charge_json(x) for x in w.constituents()]}
                    for w in ws
                ],
            }
        )
    if cfg.fmt == "json":
        return json.dumps(out, indent=1) + "\n"
    lines = ["c2,m,n,kind"] if cfg.fmt == "csv" else ["| c2 | m | n | kind |", "|---:|---:|---:|:---|"]
    for entry in out:
        for w in entry["walls"]:
            vals = [entry["charge"]["c2"], w["m"], w["n"], w["kind"]]
            lines.append(",".join(map(str, vals)) if cfg.fmt == "csv" else "| " + " | ".join(map(str, vals)) + " |")
    return "\n".join(lines) + "\n"


def cmd_wallcross(cfg: JobConfig) -> tuple[str, bool]:
    """Per c2: invariants at both ends, the wall-by-wall transport and
    (with ``--via``) the transport along the detour."""
    from .invariants.extraction import extract_refined, h_exponent
    from .invariants.genfun import h_series
    from .invariants.wallcross import path_transport

    extra = dict(cfg.extra)
    S = Surface(cfg.ell)
    J0, J1 = cfg.polarization, as_polarization(extra["J_to"])
    via = [as_polarization(v) for v in extra.get("via", ())]
    rows, ok = [], True
    for c2 in cfg.c2_values():
        g = ChernVector(cfg.r, cfg.divisor, c2)
        if discriminant(g, S) < 0:
            continue
        q = h_exponent(g, S)
        a = extract_refined(h_series(cfg.ell, cfg.r, cfg.divisor, J0, q), g, S)
        b = extract_refined(h_series(cfg.ell, cfg.r, cfg.divisor, J1, q), g, S)
        direct = path_transport(g, [J0, J1], S)
        row = {
            "c2": c2,
            "from": str(a.reduce()),
            "to": str(b.reduce()),
            "transport": str(direct.reduce()),
            "consistent": (a + direct).reduce() == b.reduce(),
        }
        if via:
            detour = path_transport(g, [J0, *via, J1], S)
            row["path_independent"] = detour.reduce() == direct.reduce()
            ok &= row["path_independent"]
        ok &= row["consistent"]
        rows.append(row)
    return json.dumps(rows, indent=1) + "\n", ok


# ---------------------------------------------------------------------------
# tables
# ---------------------------------------------------------------------------

TABLES = {
    "table1": {"ell": 1, "r": 3, "c1": (-1, 0), "c2": (2, 5), "J": "1,0,plus"},
    "table2": {"ell": 1, "r": 3, "c1": (-1, 1), "c2": (2, 6), "J": "1,0,plus"},
    "table3": {"ell": 1, "r": 3, "c1": (-1, 2), "c2": (3, 6), "J": "1,0,plus"},
}


def table_config(name: str, fmt: str = "json") -> JobConfig:
    t = TABLES[name]
    return JobConfig("betti", t["ell"], t["r"], t["c1"], t["c2"][0], t["c2"][1], t["J"], None, fmt)


def golden(name: str) -> list[dict]:
    text = resources.files("hirzebruch_bps").joinpath("goldens", f"{name}.json").read_text()
    return json.loads(text)


def _table_rows(name: str) -> list[dict]:
    return records(table_config(name))


def cmd_tables(fmt: str, jobs: int) -> tuple[str, bool]:
    names = list(TABLES)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(names))) as pool:
            all_rows = list(pool.map(_table_rows, names))
    else:
        all_rows = [_table_rows(n) for n in names]
    ok = True
    chunks, summary = [], []
    for name, rows in zip(names, all_rows):
        match = rows == golden(name)
        ok &= match
        summary.append({"table": name, "rows": rows, "matches_golden": match})
        t = TABLES[name]
        b, a = t["c1"]
        title = f"{name}: ell={t['ell']}, r={t['r']}, c1={b}C-{a}f, J={t['J']}"
        chunks.append(emit_betti(rows, fmt if fmt != "json" else "md", title) + f"golden: {'match' if match else 'MISMATCH'}\n")
    if fmt == "json":
        return json.dumps(summary, indent=1) + "\n", ok
    return "\n".join(chunks), ok


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------


def _oracle_reports(qmax: int = 4, box: int = 60) -> list[dict]:
    from .invariants.appell import appell_oracle_agrees
    from .invariants.indefinite import indef_theta, indef_theta_box
    from .lattice import walls_bruteforce

    out = []
    for ell in (1, 2, 3):
        for alpha in (0, 1):
            for beta in (0, 1):
                for J in ((1, 1, "plus"), (2, 1, "minus"), (1, 3, "plus"), (1, 0, "plus")):
                    P = Polarization(*J)
                    ok = indef_theta(ell, alpha, beta, P, qmax).same_terms(
                        indef_theta_box(ell, alpha, beta, P, qmax, box), qmax
                    )
                    out.append({"check": "indefinite-theta", "point": {"ell": ell, "alpha": alpha, "beta": beta, "J": list(J)}, "pass": ok})
                ok = appell_oracle_agrees(ell, alpha, beta, qmax, box)
                out.append({"check": "appell", "point": {"ell": ell, "alpha": alpha, "beta": beta}, "pass": ok})
    S = Surface(1)
    for r, c1, c2 in ((2, (1, 1), 3), (3, (-1, 0), 4), (3, (-1, 1), 4)):
        g = ChernVector(r, DivisorClass(c1[0], -c1[1]), c2)
        key = lambda ws: sorted((w.m, w.n, w.kind) for w in ws)
        out.append({"check": "walls", "point": _charge_json(g), "pass": key(walls(g, S)) == key(walls_bruteforce(g, S, 30))})
    return out


def cmd_check(suite: str, cfg: JobConfig, seed: int) -> tuple[str, bool]:
    """Reports as JSON lines; the flag is true when every outcome is as expected.

    The blow-up identities are expected to fail for ``ell > 1``.
    """
    if suite == "blowup":
        from .invariants.blowup import blowup_check

        qmax = Fraction(cfg.qmax) if cfg.qmax else Fraction(6)
        rep = blowup_check(cfg.ell, qmax).to_json()
        rep["expected"] = cfg.ell == 1
        reps = [rep]
        ok = rep["pass"] == rep["expected"]
    elif suite == "modularity":
        from .completions.checks import modularity_reports, quasi_periodicity_reports

        reps = [r.to_json() for r in modularity_reports(seed) + quasi_periodicity_reports(seed)]
        ok = all(r["pass"] for r in reps)
    elif suite == "anomaly":
        from .completions.checks import anomaly_reports

        reps = [r.to_json() for r in anomaly_reports(seed if seed else None)]
        ok = all(r["pass"] for r in reps)
    else:
        reps = _oracle_reports()
        ok = all(r["pass"] for r in reps)
    return "".join(json.dumps(r, sort_keys=True) + "\n" for r in reps), ok


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------


def _cache_dir(args) -> str | None:
    return args.cache_dir or os.environ.get(CACHE_ENV) or None


def _cached(cfg: JobConfig, cache: str | None, compute):
    if not cache:
        return compute()
    path = os.path.join(cache, cfg.key() + ".out")
    if os.path.exists(path):
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    text = compute()
    os.makedirs(cache, exist_ok=True)
    tmp = path + f".{os.getpid()}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)
    return text


_VALUE_FLAGS = ("--c1", "--J", "--J-to", "--via", "--qmax")


def _glue(argv: list[str]) -> list[str]:
    """Attach values such as ``-1,0`` to their flag so argparse does not read them as options."""
    out, i = [], 0
    while i < len(argv):
        if argv[i] in _VALUE_FLAGS and i + 1 < len(argv):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    argv = _glue(list(sys.argv[1:] if argv is None else argv))
    args = build_parser().parse_args(argv)
    extra = []
    if args.verb == "series":
        extra.append(("kind", args.kind))
    if args.verb == "wallcross":
        extra += [("J_to", args.J_to), ("via", tuple(args.via))]
    cfg = JobConfig(
        args.verb, args.ell, args.r, tuple(args.c1), args.c2_min, args.c2_max, args.J, args.qmax, args.fmt, tuple(extra)
    )
    cache = _cache_dir(args)
    ok = True
    try:
        if args.verb in ("betti", "euler"):
            emit = emit_betti if args.verb == "betti" else emit_euler
            text = _cached(cfg, cache, lambda: emit(records(cfg, args.jobs), cfg.fmt))
        elif args.verb == "series":
            text = _cached(cfg, cache, lambda: cmd_series(cfg))
        elif args.verb == "walls":
            text = _cached(cfg, cache, lambda: cmd_walls(cfg))
        elif args.verb == "wallcross":
            text, ok = cmd_wallcross(cfg)
        elif args.verb == "tables":
            text, ok = cmd_tables(cfg.fmt, args.jobs)
        else:
            text, ok = cmd_check(args.suite, cfg, args.seed)
    except (CLIError, LatticeError, ArithmeticError, ValueError, KeyError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(err), file=sys.stderr)
        return 2
    out.write(text)
    return 0 if ok else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
