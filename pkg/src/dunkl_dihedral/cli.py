"""Command-line front end: batch component tables, kernel values,
cross-method validation, growth-bound checks and generating-function
coefficients, in CSV or JSON.

Exit codes: 0 success, 1 check failure, 2 domain error, 3 convergence error.
Data goes to stdout, diagnostics to stderr.  Output is deterministic for a
fixed argument list (including --seed).  The optional DUNKL_THREADS
environment variable caps worker threads for the sample sweeps.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dihedral import is_sigma_invariant, make_group, orbit_pairings
from .errors import ConsistencyError, ConvergenceError, DomainError
from .kernel import check_ek_bound, check_em_bound, ek_series, ek_integral
from .polyalg import ParameterK, oracle_em
from .recurrence import em_sequence
from .sampling import Instance, draw_instance
from .series import a_coeffs, default_order, em_closed_sigma, em_genseries
from . import __version__

EXIT_OK = 0
EXIT_CHECK_FAILURE = 1
EXIT_DOMAIN_ERROR = 2
EXIT_CONVERGENCE_ERROR = 3


@dataclass
class JobSpec:
    n: int
    k: complex
    x: np.ndarray | None
    y: np.ndarray | None
    m_max: int
    tol: float
    method: str
    seed: int
    samples: int
    fmt: str
    nu: int


def _parse_complex(text: str) -> complex:
    parts = text.split(",")
    if len(parts) == 1:
        return complex(float(parts[0]), 0.0)
    if len(parts) == 2:
        return complex(float(parts[0]), float(parts[1]))
    raise DomainError(f"cannot parse complex number from {text!r} (use 're' or 're,im')")


def _parse_point(text: str, *, allow_complex: bool) -> np.ndarray:
    parts = [float(p) for p in text.split(",")]
    if len(parts) == 2:
        return np.array(parts)
    if len(parts) == 4:
        pt = np.array([complex(parts[0], parts[2]), complex(parts[1], parts[3])])
        if not allow_complex and np.max(np.abs(pt.imag)) > 0:
            raise DomainError("the x argument must be a real plane point")
        return pt.real if not allow_complex else pt
    raise DomainError(f"cannot parse plane point from {text!r} (use 'a,b' or 'a,b,c,d')")


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def _threads() -> int:
    raw = os.environ.get("DUNKL_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _map_ordered(fn, items):
    workers = _threads()
    if workers == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))


def _meta(spec: JobSpec) -> dict:
    def point_fields(p):
        if p is None:
            return None
        arr = np.asarray(p, dtype=complex)
        return {"re": [arr[0].real, arr[1].real], "im": [arr[0].imag, arr[1].imag]}

    return {
        "n": spec.n,
        "k_re": spec.k.real,
        "k_im": spec.k.imag,
        "x": point_fields(spec.x),
        "y": point_fields(spec.y),
        "method": spec.method,
        "tol": spec.tol,
        "seed": spec.seed,
    }


def _emit(spec: JobSpec, header: list[str], rows: list[list], out) -> None:
    if spec.fmt == "json":
        payload = {
            "meta": _meta(spec),
            "rows": [dict(zip(header, row)) for row in rows],
        }
        out.write(json.dumps(payload) + "\n")
    else:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) if isinstance(v, float) else v for v in row])


# ---------------------------------------------------------------------------
# subcommands


def _em_values(spec: JobSpec, method: str) -> np.ndarray:
    G = make_group(spec.n)
    P = ParameterK(spec.k, spec.n)
    if method == "recurrence":
        return em_sequence(G, P, spec.x, spec.y, spec.m_max)
    if method == "genseries":
        orbit = orbit_pairings(G, spec.x, spec.y)
        S = a_coeffs(P, orbit, default_order(spec.m_max))
        return np.array(
            [em_genseries(P, orbit, orbit.xy, S, m) for m in range(spec.m_max + 1)]
        )
    if method == "oracle":
        return np.array(
            [oracle_em(G, P, spec.x, spec.y, m) for m in range(spec.m_max + 1)]
        )
    if method == "sigma":
        return np.array(
            [em_closed_sigma(G, P, spec.x, spec.y, m) for m in range(spec.m_max + 1)]
        )
    raise DomainError(f"unknown component method {method!r}")


def cmd_em(spec: JobSpec, out) -> int:
    values = _em_values(spec, spec.method)
    rows = [[m, float(values[m].real), float(values[m].imag)] for m in range(len(values))]
    _emit(spec, ["m", "re", "im"], rows, out)
    return EXIT_OK


def cmd_kernel(spec: JobSpec, out) -> int:
    G = make_group(spec.n)
    P = ParameterK(spec.k, spec.n)
    if spec.method == "integral":
        res = ek_integral(G, P, spec.x, spec.y, spec.tol)
    else:
        res = ek_series(G, P, spec.x, spec.y, spec.tol)
    rows = [
        [
            float(res.value.real),
            float(res.value.imag),
            res.method,
            res.terms_used if res.terms_used is not None else "",
            res.nodes_used if res.nodes_used is not None else "",
            float(res.tail_estimate),
        ]
    ]
    _emit(
        spec,
        ["value_re", "value_im", "method", "terms_used", "nodes_used", "tail_estimate"],
        rows,
        out,
    )
    return EXIT_OK


def _rel_disc(a: complex, b: complex) -> float:
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale > 0 else 0.0


def _crosscheck_one(args) -> tuple[int, Instance, float, bool]:
    idx, inst, m_max = args
    G, P = inst.group(), inst.parameter()
    orbit = orbit_pairings(G, inst.x, inst.y)
    S = a_coeffs(P, orbit, default_order(m_max))
    table = {
        "recurrence": em_sequence(G, P, inst.x, inst.y, m_max),
        "genseries": np.array(
            [em_genseries(P, orbit, orbit.xy, S, m) for m in range(m_max + 1)]
        ),
        "oracle": np.array(
            [oracle_em(G, P, inst.x, inst.y, m) for m in range(m_max + 1)]
        ),
    }
    sigma = is_sigma_invariant(orbit)
    if sigma:
        table["sigma"] = np.array(
            [em_closed_sigma(G, P, inst.x, inst.y, m) for m in range(m_max + 1)]
        )
    names = sorted(table)
    worst = 0.0
    for i, u in enumerate(names):
        for v in names[i + 1 :]:
            for m in range(m_max + 1):
                worst = max(worst, _rel_disc(table[u][m], table[v][m]))
    return idx, inst, worst, sigma


def cmd_crosscheck(spec: JobSpec, out) -> int:
    if spec.x is not None and spec.y is not None:
        # Single explicit instance: echo the per-method values.
        rows = []
        methods = ["recurrence", "genseries", "oracle"]
        orbit = orbit_pairings(make_group(spec.n), spec.x, spec.y)
        if is_sigma_invariant(orbit):
            methods.append("sigma")
        for method in methods:
            values = _em_values(spec, method)
            for m in range(spec.m_max + 1):
                rows.append([method, m, float(values[m].real), float(values[m].imag)])
        _emit(spec, ["method", "m", "re", "im"], rows, out)
        return EXIT_OK

    rng = np.random.default_rng(spec.seed)
    insts = []
    for i in range(spec.samples):
        insts.append(
            (i, draw_instance(rng, sigma_invariant=(i % 5 == 4), min_xy=1e-3), spec.m_max)
        )
    results = _map_ordered(_crosscheck_one, insts)
    rows = []
    worst_overall = 0.0
    for idx, inst, worst, sigma in results:
        worst_overall = max(worst_overall, worst)
        rows.append(
            [
                idx,
                inst.n,
                float(inst.k.real),
                float(inst.k.imag),
                float(worst),
                int(sigma),
            ]
        )
    rows.append(["overall", "", "", "", float(worst_overall), ""])
    _emit(spec, ["sample", "n", "k_re", "k_im", "max_rel_disc", "sigma_checked"], rows, out)
    if worst_overall > spec.tol:
        print(
            f"check-failure: max cross-method discrepancy {worst_overall:.3e} "
            f"exceeds tolerance {spec.tol:.3e}",
            file=sys.stderr,
        )
        return EXIT_CHECK_FAILURE
    return EXIT_OK


def cmd_bounds(spec: JobSpec, out) -> int:
    G = make_group(spec.n)
    P = ParameterK(spec.k, spec.n)
    em_rep = check_em_bound(G, P, spec.x, spec.y, spec.m_max, spec.nu)
    ek_rep = check_ek_bound(G, P, spec.x, spec.y, max(1, spec.nu))
    rows = [
        ["component_bound_max_ratio", float(em_rep.max_ratio), 1.0 + 1e-9, int(em_rep.passed)],
        ["kernel_bound_ratio", float(ek_rep.ratio), float(ek_rep.constant), int(ek_rep.passed)],
    ]
    _emit(spec, ["check", "value", "limit", "passed"], rows, out)
    if not (em_rep.passed and ek_rep.passed):
        print("check-failure: a growth bound was violated", file=sys.stderr)
        return EXIT_CHECK_FAILURE
    return EXIT_OK


def cmd_phi(spec: JobSpec, out) -> int:
    G = make_group(spec.n)
    P = ParameterK(spec.k, spec.n)
    orbit = orbit_pairings(G, spec.x, spec.y)
    S = a_coeffs(P, orbit, spec.m_max)
    rows = [
        [p, float(S.phi[p].real), float(S.phi[p].imag)] for p in range(S.order + 1)
    ]
    _emit(spec, ["p", "re", "im"], rows, out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument plumbing


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dunkl",
        description="Dunkl kernel and component evaluation for dihedral groups",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, need_xy: bool):
        p.add_argument("--n", type=int, required=True, help="dihedral order parameter")
        p.add_argument("--k", type=str, required=True, help="parameter k: 're' or 're,im'")
        p.add_argument("--x", type=str, required=need_xy, default=None)
        p.add_argument("--y", type=str, required=need_xy, default=None)
        p.add_argument("--tol", type=float, default=1e-10)
        p.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")

    p_em = sub.add_parser("em", help="table of components E_0..E_m")
    common(p_em, need_xy=True)
    p_em.add_argument("--m-max", type=int, default=10)
    p_em.add_argument(
        "--method",
        choices=("recurrence", "genseries", "oracle", "sigma"),
        default="recurrence",
    )

    p_k = sub.add_parser("kernel", help="full kernel value")
    common(p_k, need_xy=True)
    p_k.add_argument("--method", choices=("series", "integral"), default="series")

    p_cc = sub.add_parser("crosscheck", help="cross-method agreement sweep")
    p_cc.add_argument("--n", type=int, default=0)
    p_cc.add_argument("--k", type=str, default="0")
    p_cc.add_argument("--x", type=str, default=None)
    p_cc.add_argument("--y", type=str, default=None)
    p_cc.add_argument("--seed", type=int, required=True)
    p_cc.add_argument("--samples", type=int, default=50)
    p_cc.add_argument("--m-max", type=int, default=12)
    p_cc.add_argument("--tol", type=float, default=1e-8)
    p_cc.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")

    p_b = sub.add_parser("bounds", help="component/kernel growth-bound checks")
    common(p_b, need_xy=True)
    p_b.add_argument("--m-max", type=int, default=60)
    p_b.add_argument("--nu", type=int, default=1)

    p_phi = sub.add_parser("phi", help="generating-function coefficients")
    common(p_phi, need_xy=True)
    p_phi.add_argument("--pmax", type=int, default=40)

    return parser


def _job_from_args(args: argparse.Namespace) -> JobSpec:
    x = _parse_point(args.x, allow_complex=False) if args.x else None
    y = _parse_point(args.y, allow_complex=True) if args.y else None
    m_max = getattr(args, "m_max", getattr(args, "pmax", 10))
    return JobSpec(
        n=args.n,
        k=_parse_complex(args.k),
        x=x,
        y=y,
        m_max=m_max,
        tol=getattr(args, "tol", 1e-10),
        method=getattr(args, "method", "auto"),
        seed=getattr(args, "seed", 0),
        samples=getattr(args, "samples", 0),
        fmt=args.fmt,
        nu=getattr(args, "nu", 1),
    )


_COMMANDS = {
    "em": cmd_em,
    "kernel": cmd_kernel,
    "crosscheck": cmd_crosscheck,
    "bounds": cmd_bounds,
    "phi": cmd_phi,
}


def main(argv: list[str] | None = None, out=None) -> int:
    out = out if out is not None else sys.stdout
    args = _build_parser().parse_args(argv)
    try:
        spec = _job_from_args(args)
        return _COMMANDS[args.command](spec, out)
    except DomainError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_DOMAIN_ERROR
    except ConvergenceError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE_ERROR
    except ConsistencyError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILURE


def entrypoint() -> None:
    sys.exit(main())
