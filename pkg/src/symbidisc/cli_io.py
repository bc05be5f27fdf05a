"""JSON/CSV codecs, the worked-example registry and the ``symbidisc`` command."""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from . import bipoly, dilation, numlin, pairs, spectra_sets
from . import decomp as decomp_mod
from .bipoly import BiPoly
from .dilation import BlockBandOperator
from .errors import ParseError, SymbidiscError, UsageError
from .gamma_geom import GammaPoint, Region, classify_point
from .pairs import OperatorPair

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


# codecs
def _load(src, what: str):
    if isinstance(src, (dict, list)):
        return src
    text = str(src)
    if not text.lstrip().startswith(("{", "[")) and os.path.exists(text):
        with open(text, encoding="utf-8") as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed {what} JSON: {exc.msg}",
                         f"line {exc.lineno} col {exc.colno}") from None


def _number(x, loc: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ParseError(f"expected a number, got {x!r}", loc)
    if not math.isfinite(x):
        raise ParseError("non-finite number", loc)
    return float(x)


def _complex(x, loc: str) -> complex:
    if isinstance(x, (list, tuple)) and len(x) == 2:
        return complex(_number(x[0], f"{loc}[0]"), _number(x[1], f"{loc}[1]"))
    raise ParseError(f"expected [re, im], got {x!r}", loc)


def matrix_to_json(M) -> dict:
    A = np.asarray(M, complex)
    if A.ndim != 2:
        A = A.reshape(1, -1) if A.ndim < 2 else A
    return {"rows": int(A.shape[0]), "cols": int(A.shape[1]),
            "data": [[float(z.real), float(z.imag)] for z in A.ravel()]}


def matrix_from_json(obj, loc: str = "matrix") -> np.ndarray:
    if not isinstance(obj, dict):
        raise ParseError("expected an object with rows, cols, data", loc)
    for key in ("rows", "cols", "data"):
        if key not in obj:
            raise ParseError(f"missing key {key!r}", loc)
    rows, cols, data = obj["rows"], obj["cols"], obj["data"]
    if not (isinstance(rows, int) and isinstance(cols, int)) or rows < 0 or cols < 0:
        raise ParseError("rows and cols must be non-negative integers", loc)
    if not isinstance(data, list) or len(data) != rows * cols:
        n = len(data) if isinstance(data, list) else "non-list"
        raise ParseError(f"data length {n} != rows*cols = {rows * cols}", f"{loc}.data")
    vals = [_complex(x, f"{loc}.data[{k}]") for k, x in enumerate(data)]
    return np.array(vals, complex).reshape(rows, cols)


def parse_matrix(src) -> np.ndarray:
    return matrix_from_json(_load(src, "matrix"))


def poly_to_json(p: BiPoly) -> dict:
    return {"terms": [{"i": i, "j": j, "re": float(c.real), "im": float(c.imag)}
                      for i, j, c in p.terms]}


def poly_from_json(obj, loc: str = "poly") -> BiPoly:
    if not isinstance(obj, dict) or not isinstance(obj.get("terms"), list):
        raise ParseError("expected an object with a terms list", loc)
    acc: dict[tuple[int, int], complex] = {}
    for k, t in enumerate(obj["terms"]):
        tl = f"{loc}.terms[{k}]"
        if not isinstance(t, dict):
            raise ParseError("term must be an object", tl)
        i, j = t.get("i"), t.get("j")
        if not (isinstance(i, int) and isinstance(j, int)) or isinstance(i, bool):
            raise ParseError("exponents must be integers", tl)
        if i < 0 or j < 0:
            raise ParseError(f"negative exponent ({i}, {j})", tl)
        c = complex(_number(t.get("re", 0.0), f"{tl}.re"), _number(t.get("im", 0.0), f"{tl}.im"))
        acc[(i, j)] = acc.get((i, j), 0) + c
    return BiPoly(acc)


def parse_poly(src) -> BiPoly:
    return poly_from_json(_load(src, "polynomial"))


def pair_to_json(pair: OperatorPair) -> dict:
    return {"S": matrix_to_json(pair.S), "P": matrix_to_json(pair.P)}


def pair_from_json(obj, loc: str = "pair") -> OperatorPair:
    if not isinstance(obj, dict) or "S" not in obj or "P" not in obj:
        raise ParseError("expected an object with S and P", loc)
    S = matrix_from_json(obj["S"], f"{loc}.S")
    P = matrix_from_json(obj["P"], f"{loc}.P")
    try:
        return OperatorPair(S, P)
    except SymbidiscError as exc:
        raise ParseError(str(exc), loc) from None


def parse_pair(src) -> OperatorPair:
    return pair_from_json(_load(src, "pair"))


def point_to_json(pt: GammaPoint) -> dict:
    return {"s": [pt.s.real, pt.s.imag], "p": [pt.p.real, pt.p.imag]}


def point_from_json(obj, loc: str = "point") -> GammaPoint:
    if not isinstance(obj, dict) or "s" not in obj or "p" not in obj:
        raise ParseError("expected an object with s and p", loc)
    return GammaPoint(_complex(obj["s"], f"{loc}.s"), _complex(obj["p"], f"{loc}.p"))


def band_to_json(op: BlockBandOperator) -> dict:
    return {"head_dim": op.head_dim, "block_dim": op.block_dim,
            "corner_blocks": op.corner_blocks, "corner": matrix_to_json(op.corner),
            "diagonals": [{"offset": k, "block": matrix_to_json(B)}
                          for k, B in op.diagonals.items()]}


def band_from_json(obj, loc: str = "band") -> BlockBandOperator:
    if not isinstance(obj, dict):
        raise ParseError("expected a band operator object", loc)
    try:
        diags = {int(d["offset"]): matrix_from_json(d["block"], f"{loc}.diagonals[{k}].block")
                 for k, d in enumerate(obj.get("diagonals", []))}
        return BlockBandOperator(obj["head_dim"], obj["block_dim"],
                                 matrix_from_json(obj["corner"], f"{loc}.corner"),
                                 diags, obj["corner_blocks"])
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad band operator: {exc}", loc) from None
    except SymbidiscError as exc:
        raise ParseError(str(exc), loc) from None


def to_jsonable(x):
    """Recursive conversion into plain JSON values with a fixed layout."""
    if isinstance(x, BiPoly):
        return poly_to_json(x)
    if isinstance(x, BlockBandOperator):
        return band_to_json(x)
    if isinstance(x, OperatorPair):
        return pair_to_json(x)
    if isinstance(x, GammaPoint):
        return point_to_json(x)
    if isinstance(x, numlin.SubspaceBasis):
        return matrix_to_json(x.columns)
    if isinstance(x, Enum):
        return x.value
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, (complex, np.complexfloating)):
        return [to_jsonable(x.real), to_jsonable(x.imag)]
    if isinstance(x, np.ndarray):
        if x.ndim == 2:
            return matrix_to_json(x)
        return [to_jsonable(v) for v in x.tolist()]
    if dataclasses.is_dataclass(x) and not isinstance(x, type):
        return {f.name: to_jsonable(getattr(x, f.name)) for f in dataclasses.fields(x)}
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if x is None or isinstance(x, str):
        return x
    return repr(x)


def samples_to_csv(points, region: str) -> str:
    header = (["re_s", "im_s", "re_p", "im_p"] if str(region).upper() == "GAMMA"
              else ["re_z1", "im_z1", "re_z2", "im_z2"])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for a, b in np.asarray(points, complex).reshape(-1, 2):
        w.writerow([repr(float(a.real)), repr(float(a.imag)), repr(float(b.real)), repr(float(b.imag))])
    return buf.getvalue()


# reports
@dataclass
class Check:
    name: str
    passed: bool
    value: object = None
    expected: str = ""


@dataclass
class Report:
    command: str
    config: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)

    def check(self, name: str, passed: bool, value=None, expected: str = "") -> bool:
        self.checks.append(Check(name, bool(passed), value, expected))
        return bool(passed)

    @property
    def passed(self) -> int:
        return sum(c.passed for c in self.checks)

    @property
    def failed(self) -> int:
        return sum(not c.passed for c in self.checks)

    @property
    def ok(self) -> bool:
        return self.failed == 0


def _report_dict(r: Report) -> dict:
    return {"command": r.command, "config": to_jsonable(r.config),
            "results": to_jsonable(r.results),
            "checks": [to_jsonable(c) for c in r.checks],
            "summary": {"passed": r.passed, "failed": r.failed}}


def _fmt_value(v) -> str:
    if isinstance(v, float):
        return f"{v:.3e}"
    return str(v)


def emit_report(report: Report, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(_report_dict(report), indent=2, allow_nan=False) + "\n"
    if fmt == "csv":
        samples = report.results.get("samples")
        if samples is None:
            raise UsageError("csv output is only available for sample grids")
        return samples_to_csv(samples, report.results.get("region", "BIDISC"))
    if fmt == "text":
        lines = [f"command: {report.command}"]
        for k, v in report.config.items():
            lines.append(f"  {k} = {v}")
        for c in report.checks:
            tag = "PASS" if c.passed else "FAIL"
            lines.append(f"[{tag}] {c.name}: {_fmt_value(c.value)} {c.expected}".rstrip())
        lines.append(f"passed {report.passed}, failed {report.failed}")
        return "\n".join(lines) + "\n"
    raise UsageError(f"unsupported format {fmt!r}")


# worked examples
@dataclass
class ExampleCase:
    id: str
    builder: Callable[[dict], Report]
    provenance: str


A_PENCIL = np.array([[0, 2, 0], [0, 0, 0], [0, 0, 1]], complex)
E_PENCIL = np.diag([0, 0, 1]).astype(complex)
COUNTER_T1 = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0]], complex)
COUNTER_T2 = np.array([[0, 0, 0], [0, 0, 0], [-1, 0, 0]], complex)
COUNTER_A1 = np.array([[0, 0, 0, 0], [1, 0, 0, 0], [0, 1, 0, 0], [1, 0, 1, 0]], complex)
COUNTER_A2 = np.array([[0, 0, 0, 0], [0, 0, 0, 0], [-1, 0, 0, 0], [0, -1, 0, 0]], complex)

Z1, Z2 = BiPoly.z1(), BiPoly.z2()


def _cfg(cfg: dict, key: str, default):
    v = cfg.get(key)
    return default if v is None else v


def _ex_pencil(cfg) -> Report:
    rep = Report("paper-examples ex-3.14", {"grid": _cfg(cfg, "grid", 256)})
    A = A_PENCIL
    w = numlin.numerical_radius(A)
    rep.check("numerical radius is 1", abs(w - 1) <= 1e-6, w, "|w-1| <= 1e-6")
    eig = np.sort_complex(np.linalg.eigvals(A))
    dist = max(min(abs(e - t) for t in (0, 1)) for e in eig)
    both = all(min(abs(e - t) for e in eig) <= 1e-8 for t in (0, 1))
    rep.check("spectrum is {0, 1}", dist <= 1e-8 and both, dist, "<= 1e-8")
    reg = classify_point((1, 0)).region
    rep.check("(1,0) is in the boundary but not in bGamma",
              reg is Region.BOUNDARY_NOT_BGAMMA, reg.value)
    model = dilation.build_toeplitz_model(A.conj().T)
    p = bipoly.det_pencil(A, "matrix_first")
    res = dilation.apply_bipoly_band(p, model.Tphi, model.Tz).norm_bound()
    rep.check("det pencil annihilates the band model", res <= 1e-12, res, "<= 1e-12")
    cert = pairs.gamma_distinguished_certificate(OperatorPair(A, np.zeros((3, 3))),
                                                 grid=rep.config["grid"])
    rep.check("no Gamma-distinguished certificate for (A, 0)", not cert.certified, cert.route)
    rep.check("obstruction recorded", "(1,0) ∉ bΓ" in cert.route, cert.route)
    rep.results = {"pencil": p, "numerical_radius": w, "certificate_route": cert.route}
    return rep


def _ex_toral(cfg) -> Report:
    grid = _cfg(cfg, "grid", 512)
    tol = _cfg(cfg, "tol", 1e-6)
    rep = Report("paper-examples ex-3.2-toral", {"grid": grid, "tol": tol})
    out = {}
    for name, p, want in [
        ("z1 - z2", Z1 - Z2, (True, None)),
        ("1 - z1 z2", 1 - Z1 * Z2, (False, None)),
        ("(z1 + z2)(z1 z2 - 1)", (Z1 + Z2) * (Z1 * Z2 - 1), (True, False)),
        ("z2", Z2, (False, None)),
    ]:
        v = bipoly.classify_bidisc(p, grid, tol)
        ok = v.toral == want[0] and (want[1] is None or v.inner_toral == want[1])
        rep.check(f"{name}: toral={want[0]}" + ("" if want[1] is None else f", inner={want[1]}"),
                  ok, {"toral": v.toral, "inner_toral": v.inner_toral})
        out[name] = v.flags
    a = 0.3
    for name, p, want in [
        ("z2", Z2, False),
        ("4 z2 - z1^2", 4 * Z2 - Z1 ** 2, True),
        ("z1 - conj(a) z2 - a", Z1 - np.conj(a) * Z2 - a, True),
    ]:
        g = bipoly.classify_gamma(p, grid, tol).gamma_distinguished
        rep.check(f"{name}: Gamma-distinguished={want}", g == want, g)
        out[f"gamma: {name}"] = g
    rep.results = out
    return rep


def _ex_scalar_pair(cfg) -> Report:
    r = 0.5
    grid = _cfg(cfg, "grid", 512)
    rep = Report("paper-examples ex-7.4", {"r": r, "grid": grid})
    pair = OperatorPair(2 * r * np.eye(2), r * r * np.eye(2))
    fr = pairs.fundamental_operator(pair)
    a = 2 * r / (1 + r * r)
    err = numlin.operator_norm(fr.full() - a * np.eye(2))
    rep.check("fundamental operator is 0.8 I", err <= 1e-10, err, "<= 1e-10")
    model = dilation.build_toeplitz_model(a * np.eye(2))
    f = Z1 - a * Z2 - a
    res = dilation.apply_bipoly_band(f, model.Tphi, model.Tz).norm_bound()
    rep.check("z1 - 0.8 z2 - 0.8 annihilates (D, E)", res <= 1e-12, res, "<= 1e-12")
    g = bipoly.classify_gamma(f, grid).gamma_distinguished
    rep.check("z1 - 0.8 z2 - 0.8 is Gamma-distinguished", g, g)
    rep.results = {"fundamental": fr.full(), "annihilating": f}
    return rep


def _ex_delta(cfg) -> Report:
    rep = Report("paper-examples ex-delta", {})
    res = dilation.appendix_identities(A_PENCIL, E_PENCIL)
    for k, v in res.items():
        rep.check(k, v <= 1e-12, v, "<= 1e-12")
    rep.results = res
    return rep


def _ex_counter_toral(cfg) -> Report:
    grid = _cfg(cfg, "grid", 512)
    rep = Report("paper-examples ex-counter-toral", {"grid": grid})
    pair = OperatorPair(COUNTER_T1, COUNTER_T2)
    g = Z1 - Z2
    ann = numlin.operator_norm(numlin.apply_bipoly(g ** 3, pair.S, pair.P))
    rep.check("(z1 - z2)^3 annihilates the pair", ann <= 1e-12, ann)
    rep.check("z1 - z2 is toral", bipoly.classify_bidisc(g, grid).toral, True)
    vr = spectra_sets.vn_check(pair, g, g ** 3, "BIDISC", grid)
    rep.check("verdict violated", vr.verdict == "violated", vr.verdict)
    rep.check("lhs >= 0.1", vr.lhs >= 0.1, vr.lhs)
    rep.check("sup estimate <= 1e-10", vr.sup_estimate is not None and vr.sup_estimate <= 1e-10,
              vr.sup_estimate)
    rep.results = {"vn": vr}
    return rep


def counter_gamma_pair() -> tuple[OperatorPair, float]:
    r = 1.0 / max(numlin.operator_norm(COUNTER_A1), numlin.operator_norm(COUNTER_A2))
    T1, T2 = r * COUNTER_A1, r * COUNTER_A2
    return OperatorPair(T1 + T2, T1 @ T2), r


def _ex_counter_gamma(cfg) -> Report:
    grid = _cfg(cfg, "grid", 512)
    pair, r = counter_gamma_pair()
    rep = Report("paper-examples ex-counter-gamma", {"grid": grid, "r": r})
    f = 4 * Z2 - Z1 ** 2
    ann = numlin.operator_norm(numlin.apply_bipoly(f ** 2, pair.S, pair.P))
    rep.check("(4 z2 - z1^2)^2 annihilates the pair", ann <= 1e-12, ann)
    vr = spectra_sets.vn_check(pair, f, f ** 2, "GAMMA", grid)
    rep.check("verdict violated", vr.verdict == "violated", vr.verdict)
    rep.check("lhs >= 0.1 r^2", vr.lhs >= 0.1 * r * r, vr.lhs)
    rep.check("sup estimate <= 1e-10", vr.sup_estimate is not None and vr.sup_estimate <= 1e-10,
              vr.sup_estimate)
    rep.results = {"vn": vr}
    return rep


def _ex_shift(cfg) -> Report:
    rep = Report("paper-examples ex-shift", {"r": 0.5})
    res = dilation.shift_example(0.5)
    for k, v in res.items():
        rep.check(k, v <= 1e-12, v, "<= 1e-12")
    rep.results = res
    return rep


def royal_pair(seed: int = 0, dim: int = 3, norm: float = 1.8) -> OperatorPair:
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    S = M * (norm / numlin.operator_norm(M))
    return OperatorPair(S, S @ S / 4)


def _ex_royal(cfg) -> Report:
    seed = _cfg(cfg, "seed", 0)
    rep = Report("paper-examples ex-royal", {"seed": seed, "grid": 128, "trials": 60})
    pair = royal_pair(seed)
    q = Z1 ** 2 - 4 * Z2
    rep.check("z1^2 - 4 z2 annihilates the pair",
              numlin.operator_norm(numlin.apply_bipoly(q, pair.S, pair.P)) <= 1e-12)
    cv = spectra_sets.complete_vn_check(pair, q, "GAMMA", 128, 2, 60, seed)
    rep.check("no matricial violation", cv.verdict == "consistent", cv.verdict)
    bundle = dilation.build_TA_V0(pair)
    worst = max(bundle.residuals.values())
    rep.check("dilation identities", worst <= 1e-10, worst, "<= 1e-10")
    comp = dilation.verify_compression(bundle, 4)
    rep.check("dilation compresses to the pair", comp <= 1e-9, comp, "<= 1e-9")
    rep.results = {"complete_vn": cv, "dilation": bundle.residuals}
    return rep


REGISTRY: dict[str, ExampleCase] = {c.id: c for c in [
    ExampleCase("ex-3.14", _ex_pencil, "3x3 pencil example with numerical radius one"),
    ExampleCase("ex-3.2-toral", _ex_toral, "toral, inner toral and Gamma-distinguished verdicts"),
    ExampleCase("ex-7.4", _ex_scalar_pair, "scalar pair (2r, r^2) with r = 0.5"),
    ExampleCase("ex-delta", _ex_delta, "square root Delta of S^2 - 4P for a Toeplitz model"),
    ExampleCase("ex-counter-toral", _ex_counter_toral, "3x3 pair annihilated by (z1 - z2)^3"),
    ExampleCase("ex-counter-gamma", _ex_counter_gamma, "4x4 pair annihilated by (4z2 - z1^2)^2"),
    ExampleCase("ex-shift", _ex_shift, "(2rW, r^2 W^2) with W the unilateral shift"),
    ExampleCase("ex-royal", _ex_royal, "pairs with P = S^2/4"),
]}


def run_example(case_id: str, config: dict | None = None) -> Report:
    if case_id not in REGISTRY:
        raise UsageError(f"unknown example {case_id!r}; known: {', '.join(REGISTRY)}")
    return REGISTRY[case_id].builder(dict(config or {}))


def run_examples(ids, config: dict | None = None, parallel: bool = False) -> list[Report]:
    ids = list(REGISTRY) if list(ids) in ([], ["all"]) else list(ids)
    for i in ids:
        if i not in REGISTRY:
            raise UsageError(f"unknown example {i!r}; known: {', '.join(REGISTRY)}")
    if parallel:
        with ThreadPoolExecutor() as ex:
            return list(ex.map(lambda i: run_example(i, config), ids))
    return [run_example(i, config) for i in ids]


# command line
def _default_seed() -> int:
    env = os.environ.get("SYMBIDISC_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"SYMBIDISC_SEED must be an integer, got {env!r}") from None


def _global_flags(p: argparse.ArgumentParser, defaults: bool):
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    p.add_argument("--tol", type=float, default=d(None), help="classification tolerance")
    p.add_argument("--grid", type=int, default=d(None), help="sampling grid size")
    p.add_argument("--seed", type=int, default=d(None), help="random seed")
    p.add_argument("--level", type=int, default=d(None), help="truncation level / degree")
    p.add_argument("--json", action="store_true", default=d(False), help="JSON output")
    p.add_argument("--format", choices=["json", "csv", "text"], default=d(None))
    p.add_argument("--out", default=d(None), help="write output to this file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="symbidisc", description=__doc__)
    _global_flags(parser, True)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify-pair", parents=[common], help="classify a commuting pair")
    p.add_argument("--pair", required=True)

    p = sub.add_parser("classify-poly", parents=[common], help="toral / Gamma verdicts")
    p.add_argument("--poly", required=True)
    p.add_argument("--region", choices=["bidisc", "gamma"], default="bidisc")
    p.add_argument("--samples", action="store_true", help="include sampled zero-set points")

    p = sub.add_parser("fundamental", parents=[common], help="fundamental operator")
    p.add_argument("--pair", required=True)

    p = sub.add_parser("dilate", parents=[common], help="build (T_A, V_0) and check it")
    p.add_argument("--pair", required=True)

    p = sub.add_parser("vn-check", parents=[common], help="sampled von Neumann inequality")
    p.add_argument("--pair", required=True)
    p.add_argument("--f", required=True)
    p.add_argument("--variety", required=True)
    p.add_argument("--region", choices=["bidisc", "gamma"], default="gamma")

    p = sub.add_parser("complete-vn-check", parents=[common], help="matricial version")
    p.add_argument("--pair", required=True)
    p.add_argument("--variety", required=True)
    p.add_argument("--region", choices=["bidisc", "gamma"], default="gamma")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--matrix-degree", type=int, default=2)
    p.add_argument("--seeded", nargs="*", default=[], help="polynomials tried first")

    p = sub.add_parser("decompose", parents=[common], help="factor decomposition")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--pair")
    src.add_argument("--model", help="matrix F of a pure Toeplitz model")
    p.add_argument("--factors", nargs="+", required=True)

    p = sub.add_parser("paper-examples", parents=[common], help="run worked examples")
    p.add_argument("ids", nargs="*", default=["all"])
    p.add_argument("--parallel", action="store_true")
    return parser


def _cmd_classify_pair(a, cfg) -> Report:
    pair = parse_pair(a.pair)
    rep = Report("classify-pair", cfg)
    pc = pairs.classify_pair(pair, tol=cfg["tol"] or 1e-8, seed=cfg["seed"])
    rep.results = {"flags": pc.flags, "residuals": pc.residuals,
                   "joint_spectrum": pc.joint_spectrum, "warnings": pc.warnings}
    return rep


def _cmd_classify_poly(a, cfg) -> Report:
    p = parse_poly(a.poly)
    grid, tol = cfg["grid"] or 512, cfg["tol"] or 1e-6
    rep = Report("classify-poly", cfg)
    if a.region == "gamma":
        g = bipoly.classify_gamma(p, grid, tol)
        rep.results = {"gamma_distinguished": g.gamma_distinguished,
                       "distinguished": g.distinguished, "pullback": g.verdict.flags}
    else:
        rep.results = {"flags": bipoly.classify_bidisc(p, grid, tol).flags}
    if a.samples or a.format == "csv":
        rep.results["region"] = a.region.upper()
        rep.results["samples"] = bipoly.sample_variety(p, a.region.upper(), grid)
    return rep


def _cmd_fundamental(a, cfg) -> Report:
    pair = parse_pair(a.pair)
    rep = Report("fundamental", cfg)
    fr = pairs.fundamental_operator(pair)
    ls = pairs.fundamental_operator_lstsq(pair)
    agree = numlin.operator_norm(fr.A - ls) if fr.A.size else 0.0
    rep.results = {"A": fr.full(), "A_defect_basis": fr.A, "residual": fr.residual,
                   "defect_dim": fr.defect_basis.dim, "lstsq_difference": agree,
                   "numerical_radius": numlin.numerical_radius(fr.A) if fr.A.size else 0.0}
    rep.check("independent solve agrees", agree <= 1e-8, agree, "<= 1e-8")
    return rep


def _cmd_dilate(a, cfg) -> Report:
    pair = parse_pair(a.pair)
    rep = Report("dilate", cfg)
    b = dilation.build_TA_V0(pair)
    deg = cfg["level"] or 4
    comp = dilation.verify_compression(b, deg)
    for k, v in b.residuals.items():
        rep.check(k, v <= 1e-10, v, "<= 1e-10")
    rep.check(f"compression up to degree {deg}", comp <= 1e-9, comp, "<= 1e-9")
    rep.results = {"fundamental": b.fundamental, "TA": b.TA, "V0": b.V0,
                   "residuals": b.residuals, "compression": comp,
                   "norm_certificate": dilation.norm_certificate(b.TA)}
    return rep


def _cmd_vn_check(a, cfg) -> Report:
    pair = parse_pair(a.pair)
    f, q = parse_poly(a.f), parse_poly(a.variety)
    grid = cfg["grid"] or 512
    rep = Report("vn-check", cfg)
    vr = spectra_sets.vn_check(pair, f, q, a.region.upper(), grid)
    rep.results = {"report": vr}
    rep.check("von Neumann inequality on samples", vr.verdict != "violated", vr.verdict)
    return rep


def _cmd_complete_vn_check(a, cfg) -> Report:
    pair = parse_pair(a.pair)
    q = parse_poly(a.variety)
    seeded = [parse_poly(s) for s in a.seeded]
    grid = cfg["grid"] or 256
    rep = Report("complete-vn-check", cfg)
    vr = spectra_sets.complete_vn_check(pair, q, a.region.upper(), grid, a.matrix_degree,
                                        a.trials, cfg["seed"], seeded)
    rep.results = {"report": vr}
    rep.check("matricial inequality on samples", vr.verdict != "violated", vr.verdict)
    return rep


def _cmd_decompose(a, cfg) -> Report:
    factors = [parse_poly(f) for f in a.factors]
    rep = Report("decompose", cfg)
    if a.pair:
        d = decomp_mod.factor_decompose_unitary(parse_pair(a.pair), factors)
        rep.check("orthogonal", d.residuals["orthogonality"] <= 1e-8, d.residuals["orthogonality"])
        rep.check("dimensions add up", d.residuals["dimension_sum"] == sum(d.dims),
                  d.residuals["dimension_sum"])
        worst = max(d.residuals["annihilation"])
        rep.check("factors annihilate their pieces", worst <= 1e-7, worst, "<= 1e-7")
    else:
        F = parse_matrix(a.model)
        total = sum(f.degree for f in factors)
        level = cfg["level"] or max(2 * total, 2)
        d = decomp_mod.factor_decompose_pure_truncated(F, factors, level)
        worst = max(d.residuals["annihilation"])
        rep.check("factors annihilate their pieces", worst <= 1e-6, worst, "<= 1e-6")
    rep.results = {"dims": d.dims, "subspaces": d.subspaces, "residuals": d.residuals,
                   "warnings": d.warnings}
    return rep


def _cmd_paper_examples(a, cfg) -> list[Report]:
    return run_examples(a.ids, cfg, a.parallel)


COMMANDS = {
    "classify-pair": _cmd_classify_pair,
    "classify-poly": _cmd_classify_poly,
    "fundamental": _cmd_fundamental,
    "dilate": _cmd_dilate,
    "vn-check": _cmd_vn_check,
    "complete-vn-check": _cmd_complete_vn_check,
    "decompose": _cmd_decompose,
    "paper-examples": _cmd_paper_examples,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        seed = args.seed if args.seed is not None else _default_seed()
        cfg = {"tol": args.tol, "grid": args.grid, "seed": seed, "level": args.level}
        fmt = args.format or ("json" if args.json else "text")
        out = COMMANDS[args.command](args, cfg)
        reports = out if isinstance(out, list) else [out]
        if fmt == "json" and len(reports) > 1:
            text = json.dumps([_report_dict(r) for r in reports], indent=2, allow_nan=False) + "\n"
        else:
            text = "".join(emit_report(r, fmt) for r in reports)
    except (ParseError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SymbidiscError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if all(r.ok for r in reports) else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
