"""Command-line front end: ``taulift {models|compute|verify|export}``.

Exit codes: 0 success, 1 verification mismatch, 2 configuration error,
3 solver error.  On failure stderr names the violated invariant.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from . import solver
from .errors import BadParams, InconsistentData, NotAvailable, TauliftError, UnknownModel
from .models import DEFAULT_PARAMS, REGISTRY, ModelSpec, model_instantiate
from .scalar import HScalar, ZERO
from .series import BiSeries, ZSeries, kernel_expand

EXIT_OK, EXIT_MISMATCH, EXIT_CONFIG, EXIT_SOLVER = 0, 1, 2, 3


class ConfigError(Exception):
    invariant = "RunConfig"


@dataclass
class RunConfig:
    command: str
    model: str | None = None
    params: dict = field(default_factory=dict)
    window: int = 6
    h_trunc: int = 12
    method: str = "recursion"
    what: str = "both"
    output: str | None = None
    format: str = "json"
    candidate: str | None = None
    all: bool = False

    def validate(self):
        if self.window < 1:
            raise ConfigError("--order must be >= 1")
        if self.h_trunc < 1:
            raise ConfigError("--h-trunc must be >= 1")
        if self.method not in ("recursion", "closed", "both"):
            raise ConfigError(f"unknown method {self.method!r}")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"unknown format {self.format!r}")
        if self.command != "models" and not self.all and not self.model:
            raise ConfigError("--model is required")


# ---------------------------------------------------------------------------
# helpers

def parse_param(text: str):
    if "=" not in text:
        raise ConfigError(f"parameter {text!r} must look like key=value")
    k, v = text.split("=", 1)
    k, v = k.strip(), v.strip()
    if "," in v:
        try:
            return k, [Fraction(x) for x in v.split(",")]
        except ValueError as exc:
            raise ConfigError(f"bad list value for {k}: {v!r}") from exc
    try:
        q = Fraction(v)
    except ValueError as exc:
        raise ConfigError(f"bad value for {k}: {v!r}") from exc
    return k, int(q) if q.denominator == 1 else q


def _param_text(v) -> str:
    if isinstance(v, (list, tuple)):
        return ",".join(str(Fraction(x)) for x in v)
    return str(v)


def _instantiate(cfg: RunConfig) -> ModelSpec:
    m = model_instantiate(cfg.model, cfg.params, cfg.h_trunc)
    if cfg.method in ("closed", "both") and m.closed_two_point is None:
        raise ConfigError(f"model {m.name} has no closed two-point formula")
    return m


def _index(m: ModelSpec, key):
    a, b = key
    return (-a - 1, -b - 1) if m.hierarchy == "KP" else (-a, -b)


def _coords_table(m: ModelSpec, psi_uv: BiSeries, order: int) -> dict:
    """Affine coordinates (i, j) -> HScalar read off a two-point series, for i + j <= order."""
    kern = kernel_expand(m.hierarchy, -order - 2)
    rest = psi_uv - kern
    out = {}
    for key, c in rest.items():
        i, j = _index(m, key)
        if i < 0 or j < 0 or i + j > order or c.is_zero():
            continue
        if m.hierarchy == "BKP":
            sign = (-1) ** ((i + j) % 2)
            c = c.scale(sign) if i == 0 or j == 0 else c.scale(Fraction(sign, 2))
        out[(i, j)] = c
    return out


def _first_diff(x: dict, y: dict):
    for k in sorted(set(x) | set(y)):
        a, b = x.get(k, ZERO), y.get(k, ZERO)
        e = a.first_difference(b)
        if e is not None:
            return k[0], k[1], e
    return None


def _rows(table: dict):
    rows = []
    for (i, j), c in table.items():
        for h, q in c.items():
            rows.append((i, j, h, q.numerator, q.denominator))
    rows.sort()
    return rows


def _write(cfg: RunConfig, text: str):
    if not cfg.output or cfg.output == "-":
        sys.stdout.write(text)
        return
    d = os.path.dirname(os.path.abspath(cfg.output))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".taulift-")
    with os.fdopen(fd, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, cfg.output)


def _cut(x, H: int):
    return x.map_coeffs(lambda c: c.truncate(H))


def _sorted_json(d: dict) -> dict:
    d = dict(d)
    d["terms"] = sorted(d["terms"], key=lambda t: (
        tuple(-x for x in t["exps"]) if "exps" in t else (-t["exp"],), t["h_exp"]))
    return d


def _header(m: ModelSpec, cfg: RunConfig) -> dict:
    return {"model": m.name, "hierarchy": m.hierarchy,
            "params": {k: _param_text(v) for k, v in sorted(m.params.items())},
            "order": cfg.window, "h_trunc": cfg.h_trunc}


# ---------------------------------------------------------------------------
# commands

def cmd_models(cfg: RunConfig) -> int:
    lines = []
    for name in REGISTRY:
        m = model_instantiate(name, None, 4)
        defaults = ", ".join(f"{k}={_param_text(v)}" for k, v in DEFAULT_PARAMS.get(name, {}).items())
        closed = "closed" if m.closed_two_point else "-"
        lines.append(f"{name:18s} {m.hierarchy:4s} {closed:7s} {defaults:18s} {m.description}")
    lines.append(f"{'gw_Pr':18s} -    -       {'':18s} out of scope")
    _write(cfg, "\n".join(lines) + "\n")
    return EXIT_OK


def _two_point(m: ModelSpec, cfg: RunConfig) -> BiSeries:
    N = cfg.window
    if cfg.method == "closed":
        return m.closed_two_point(N)
    rec = m.solve(N).result
    if cfg.method == "both":
        cl = m.closed_two_point(N)
        d = _first_diff(_coords_table(m, rec, N), _coords_table(m, cl, N))
        if d is not None:
            raise InconsistentData(f"closed formula and recursion differ at (i, j, h_exp) = {d}")
    return rec


def cmd_compute(cfg: RunConfig) -> int:
    m = _instantiate(cfg)
    N = cfg.window
    doc = _header(m, cfg)
    doc["method"] = cfg.method
    if cfg.what in ("one-point", "both"):
        first, second = m.one_point(N)
        H = cfg.h_trunc
        doc["one_point"] = {"first": _sorted_json(_cut(first, H).to_json()),
                            "second": _sorted_json(_cut(second, H).to_json())}
    if cfg.what in ("two-point", "both"):
        doc["two_point"] = _sorted_json(_cut(_two_point(m, cfg), cfg.h_trunc).to_json())
    if cfg.format == "json":
        _write(cfg, json.dumps(doc, indent=2, sort_keys=True) + "\n")
        return EXIT_OK
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["series", "u_exp", "v_exp", "h_exp", "num", "den"])
    for name in ("first", "second"):
        if "one_point" in doc:
            for t in doc["one_point"][name]["terms"]:
                w.writerow([name, t["exp"], "", t["h_exp"], t["num"], t["den"]])
    if "two_point" in doc:
        for t in doc["two_point"]["terms"]:
            w.writerow(["two_point", t["exps"][0], t["exps"][1], t["h_exp"], t["num"], t["den"]])
    _write(cfg, buf.getvalue())
    return EXIT_OK


def cmd_export(cfg: RunConfig) -> int:
    """Square ``order x order`` table of affine coordinates."""
    m = _instantiate(cfg)
    N = cfg.window
    tri = max(2 * N - 2, 1)
    psi_uv = _two_point(m, RunConfig("export", cfg.model, cfg.params, tri, cfg.h_trunc, cfg.method))
    table = {k: c.truncate(cfg.h_trunc) for k, c in _coords_table(m, psi_uv, tri).items()
             if k[0] < N and k[1] < N}
    if m.hierarchy == "BKP":
        for (i, j), c in list(table.items()):
            table.setdefault((j, i), -c)
    rows = _rows(table)
    if cfg.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["i", "j", "h_exp", "num", "den"])
        w.writerows(rows)
        _write(cfg, buf.getvalue())
        return EXIT_OK
    doc = _header(m, cfg)
    doc.update({"var": "b" if m.hierarchy == "KP" else "a", "parity": "integer",
                "window": [0, N - 1], "terms": [
                    {"exps": [i, j], "h_exp": h, "num": str(p), "den": str(q)} for i, j, h, p, q in rows]})
    _write(cfg, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def _load_candidate(m: ModelSpec, path: str, order: int) -> tuple[dict, int]:
    """Candidate coordinates and the triangle order on which they can be checked."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read candidate {path}: {exc}") from exc
    if "two_point" in data:
        data = data["two_point"]
    if data.get("var") in ("a", "b"):
        # an export table is square, so only the triangle inside it is checked
        order = min(order, int(data.get("window", [0, order])[1]))
        H = int(data.get("h_trunc", m.h_trunc))
        out = {}
        for t in data["terms"]:
            k = (int(t["exps"][0]), int(t["exps"][1]))
            if k[0] + k[1] > order:
                continue
            term = HScalar({int(t["h_exp"]): Fraction(int(t["num"]), int(t["den"]))}, H)
            out[k] = out[k] + term if k in out else term
        return out, order
    try:
        return _coords_table(m, BiSeries.from_json(data), order), order
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"candidate {path} is not a two-point series: {exc}") from exc


def _candidate_series(m: ModelSpec, table: dict, order: int) -> BiSeries:
    """Two-point series of a coordinate table; no symmetry is imposed on BKP entries."""
    N = order
    if m.hierarchy == "KP":
        terms = {(-i - 1, -j - 1): c for (i, j), c in table.items() if i + j <= N}
        return BiSeries(terms, -N - 1, -N - 2, -1, -2) + kernel_expand("KP", -N - 1)
    terms = {}
    for (n, k), c in table.items():
        if n + k > N:
            continue
        sign = (-1) ** ((n + k) % 2)
        terms[(-n, -k)] = c.scale(sign if n == 0 or k == 0 else 2 * sign)
    return BiSeries(terms, -N, -N, 0, 0) + kernel_expand("BKP", -N)


def _candidate_residual(m: ModelSpec, table: dict, order: int):
    """First nonzero residual coefficient of the candidate, on the certified window."""
    N = order
    series = _candidate_series(m, table, N)
    if m.hierarchy == "KP":
        Psi, Psi_star = m.one_point(N + 1)
        res = solver.residual_kp(m.lifting, Psi, Psi_star, series)
        return solver.first_nonzero(res, -N, -N - 1)
    first, second = m.one_point(N)
    res = solver.residual_bkp(m.equation_operator, first, second, series)
    return solver.first_nonzero(res, -N + 1, -N + 1)


def verify_model(cfg: RunConfig) -> tuple[int, list[str], list[str]]:
    """Run every check for one model; returns (exit code, report lines, failure lines)."""
    m = _instantiate(cfg)
    N = cfg.window
    out, fails = [f"model {m.name} ({m.hierarchy}) order {N} h_trunc {cfg.h_trunc}"], []
    rep = m.solve(N)
    w = rep.residual_max_window
    out.append(f"  residual zero on a >= {w['a_min']}, a+b >= {w['d_min']}")
    out.append(f"  consistency equations checked: {rep.consistency_rows_checked}")
    solved = _coords_table(m, rep.result, N)

    if m.name in ("r_spin", "gkm"):
        x = m.extra["x"]
        first, second = m.one_point(N)
        for dual, s in ((False, first), (True, second)):
            bad = solver.first_nonzero(solver.one_point_residual(m.lifting, x, s, dual))
            tag = "dual curve" if dual else "curve"
            if bad is None:
                out.append(f"  quantum {tag} residual: zero")
            else:
                fails.append(f"quantum {tag} residual nonzero at (z^{bad[0]}, h_exp {bad[1]}): "
                             f"invariant QuantumCurve")
    if m.name == "bgw":
        first, second = m.one_point(N)
        d = first_diff_series(solver.bgw_tilde_from_psi(first, cfg.h_trunc), second)
        if d is None:
            out.append("  second one-point identity: holds")
        else:
            fails.append(f"second one-point identity fails at (z^{d[0]}, h_exp {d[1]}): invariant BGWIdentity")

    if m.closed_two_point is not None and cfg.method in ("closed", "both", "recursion"):
        closed = _coords_table(m, m.closed_two_point(N), N)
        d = _first_diff(solved, closed)
        if d is None:
            out.append("  closed-vs-recursion differences: 0")
        else:
            fails.append(f"closed-vs-recursion mismatch at (i, j, h_exp) = {d}: invariant Uniqueness")
    if m.known_affine is not None:
        known = {}
        for i in range(N + 1):
            for j in range(N + 1 - i):
                if m.hierarchy == "BKP" and i == j:
                    continue
                c = m.known_affine(i, j)
                if not c.is_zero():
                    known[(i, j)] = c
        d = _first_diff(solved, known)
        if d is None:
            out.append(f"  known affine coordinates matched: {len(known)}")
        else:
            fails.append(f"known affine mismatch at (i, j, h_exp) = {d}: invariant KnownAffine")
    if cfg.candidate:
        cand, n_c = _load_candidate(m, cfg.candidate, N)
        d = _first_diff(cand, {k: c for k, c in solved.items() if k[0] + k[1] <= n_c})
        inv = "KPEquation" if m.hierarchy == "KP" else "BKPEquation"
        if d is None:
            out.append("  candidate agrees with the recursion")
        else:
            fails.append(f"candidate mismatch at (i, j, h_exp) = {d}: invariant {inv}")
        bad = _candidate_residual(m, cand, n_c)
        if bad is not None:
            (ka, kb), e = bad
            fails.append(f"candidate residual nonzero at u^{ka} v^{kb}, h_exp {e}: invariant {inv}")
    out.append("  PASS" if not fails else "  FAIL")
    return (EXIT_OK if not fails else EXIT_MISMATCH), out, fails


def first_diff_series(x: ZSeries, y: ZSeries):
    for e in sorted(set(x.keys()) | set(y.keys()), reverse=True):
        if e < max(x.lo, y.lo):
            continue
        d = x.coeff(e).first_difference(y.coeff(e))
        if d is not None:
            return e, d
    return None


def _verify_worker(args):
    name, window, h_trunc, method = args
    cfg = RunConfig("verify", name, {}, window, h_trunc, method)
    try:
        return verify_model(cfg)
    except TauliftError as exc:
        return EXIT_SOLVER, [f"model {name}"], [f"{exc}: invariant {exc.invariant}"]


def cmd_verify(cfg: RunConfig) -> int:
    if cfg.all:
        names = list(REGISTRY)
        jobs = [(n, cfg.window, cfg.h_trunc, "recursion") for n in names]
        threads = max(1, int(os.environ.get("TAULIFT_THREADS", "1") or 1))
        if threads > 1:
            with ProcessPoolExecutor(max_workers=threads) as ex:
                results = list(ex.map(_verify_worker, jobs))
        else:
            results = [_verify_worker(j) for j in jobs]
    else:
        results = [verify_model(cfg)]
    lines = []
    for rc, out, fails in results:
        lines.extend(out)
        for f in fails:
            print(f, file=sys.stderr)
    codes = {rc for rc, _, _ in results}
    code = EXIT_SOLVER if EXIT_SOLVER in codes else EXIT_MISMATCH if EXIT_MISMATCH in codes else EXIT_OK
    _write(cfg, "\n".join(lines) + "\n")
    return code


COMMANDS = {"models": cmd_models, "compute": cmd_compute, "verify": cmd_verify, "export": cmd_export}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="taulift", description="Fermionic two-point functions from lifting operators.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        if name == "models":
            s.add_argument("--out", default=None)
            continue
        s.add_argument("--model")
        s.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
        s.add_argument("--order", type=int, default=6)
        s.add_argument("--h-trunc", type=int, default=12)
        s.add_argument("--method", default="recursion", choices=["recursion", "closed", "both"])
        s.add_argument("--format", default="json", choices=["json", "csv"])
        s.add_argument("--out", default=None)
        if name == "compute":
            s.add_argument("--what", default="both", choices=["one-point", "two-point", "both"])
        if name == "verify":
            s.add_argument("--candidate", default=None)
            s.add_argument("--all", action="store_true")
    return p


def config_from_args(ns) -> RunConfig:
    if ns.command == "models":
        return RunConfig("models", output=ns.out)
    params = dict(parse_param(t) for t in ns.param)
    return RunConfig(ns.command, ns.model, params, ns.order, ns.h_trunc, ns.method,
                     getattr(ns, "what", "both"), ns.out, ns.format,
                     getattr(ns, "candidate", None), getattr(ns, "all", False))


def run(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
        cfg.validate()
        return COMMANDS[cfg.command](cfg)
    except (ConfigError, UnknownModel, BadParams, NotAvailable) as exc:
        print(f"error: {exc} [invariant: {getattr(exc, 'invariant', 'RunConfig')}]", file=sys.stderr)
        return EXIT_CONFIG
    except TauliftError as exc:
        print(f"solver error: {exc} [invariant: {exc.invariant}]", file=sys.stderr)
        return EXIT_SOLVER


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
