"""Command-line interface.

Reports are one ``KEY=value`` per line. Exit codes: 0 success, 1 check
failure (including "not equivalent"), 2 usage error.

State specs: ``vacuum``, ``coherent:x,p``, ``fock:n``,
``squeezed:theta,phi,lambda[,x,p]`` or a JSON file / inline JSON holding a
GaussianState (``mean``, ``cov``) or FockDensity (``matrix``).

Measurement specs: ``identity``, ``params:theta,phi,lambda``,
``rotation:psi``, ``metric:a,b,c`` or a JSON file / inline JSON holding an
Sl2Matrix (``m``), CanonicalParams (``theta``, ``phi``, ``lambda``) or
MetricTensor (``a``, ``b``, ``c``). Angles follow ``--degrees``.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import checks
from .husimi import husimi_closed_grid, husimi_convolution, husimi_overlap_grid
from .sampler import sample_fock, sample_gaussian
from .sl2r import (
    CanonicalParams,
    MetricTensor,
    Sl2Matrix,
    accuracies,
    are_equivalent,
    matrix_from_params,
    metric_of,
    rotation,
)
from .states import (
    FockDensity,
    GaussianState,
    PhaseSpaceGrid,
    coherent,
    gaussian_to_fock,
    squeezed_gaussian,
    vacuum,
    wigner_fock,
    wigner_gaussian,
)


class UsageError(Exception):
    pass


def _angle(v: float, degrees: bool) -> float:
    return math.radians(v) if degrees else v


def _load_json(spec: str):
    path = Path(spec)
    if path.is_file():
        return json.loads(path.read_text())
    try:
        return json.loads(spec)
    except json.JSONDecodeError as exc:
        raise UsageError(f"cannot read {spec!r} as a file, shorthand or JSON") from exc


def _floats(body: str, n: tuple[int, ...]) -> list[float]:
    try:
        vals = [float(v) for v in body.split(",")]
    except ValueError as exc:
        raise UsageError(f"bad numeric list {body!r}") from exc
    if len(vals) not in n:
        raise UsageError(f"expected {' or '.join(map(str, n))} values, got {body!r}")
    return vals


def parse_measure(spec: str, degrees: bool = False) -> Sl2Matrix | MetricTensor:
    kind, _, body = spec.partition(":")
    try:
        if spec == "identity":
            return Sl2Matrix.identity()
        if kind == "params":
            t, ph, lam = _floats(body, (3,))
            return matrix_from_params(CanonicalParams(_angle(t, degrees), _angle(ph, degrees), lam))
        if kind == "rotation":
            (psi,) = _floats(body, (1,))
            return rotation(_angle(psi, degrees))
        if kind == "metric":
            a, b, c = _floats(body, (3,))
            return MetricTensor(a, b, c)
        d = _load_json(spec)
        if "m" in d:
            return Sl2Matrix.from_dict(d)
        if "theta" in d:
            p = CanonicalParams(_angle(float(d["theta"]), degrees), _angle(float(d["phi"]), degrees), float(d["lambda"]))
            return matrix_from_params(p)
        if {"a", "b", "c"} <= d.keys():
            return MetricTensor.from_dict(d)
    except (ValueError, KeyError, TypeError, AttributeError) as exc:
        raise UsageError(f"invalid measurement spec {spec!r}: {exc}") from exc
    raise UsageError(f"unrecognized measurement spec {spec!r}")


def parse_state(spec: str, degrees: bool = False, dim: int = 64) -> GaussianState | FockDensity:
    kind, _, body = spec.partition(":")
    try:
        if spec == "vacuum":
            return vacuum()
        if kind == "coherent":
            x, p = _floats(body, (2,))
            return coherent(x, p)
        if kind == "fock":
            n = int(body)
            return FockDensity.number(n, max(n + 1, 2))
        if kind == "squeezed":
            vals = _floats(body, (3, 5))
            t, ph, lam = vals[:3]
            x, p = vals[3:] if len(vals) == 5 else (0.0, 0.0)
            m = matrix_from_params(CanonicalParams(_angle(t, degrees), _angle(ph, degrees), lam))
            return squeezed_gaussian(m, x, p)
        d = _load_json(spec)
        if "cov" in d:
            return GaussianState.from_dict(d)
        if "matrix" in d:
            return FockDensity.from_dict(d)
    except (ValueError, KeyError, TypeError, AttributeError) as exc:
        raise UsageError(f"invalid state spec {spec!r}: {exc}") from exc
    raise UsageError(f"unrecognized state spec {spec!r}")


def _metric(m) -> MetricTensor:
    return m if isinstance(m, MetricTensor) else metric_of(m)


def _report(out, pairs: dict) -> None:
    for k, v in pairs.items():
        out.write(f"{k}={v!r}\n" if isinstance(v, float) else f"{k}={v}\n")


def _check_writable(path: str | None) -> None:
    if path is None:
        return
    parent = Path(path).resolve().parent
    if not parent.is_dir() or not os.access(parent, os.W_OK):
        raise UsageError(f"output directory {parent} is not writable")


# ---------------------------------------------------------------------------


def cmd_canonicalize(args, out) -> int:
    p = CanonicalParams(_angle(args.theta, args.degrees), _angle(args.phi, args.degrees), args.lam)
    acc = accuracies(p)
    theta0 = math.degrees(acc["theta0"]) if args.degrees else acc["theta0"]
    _report(out, {
        "theta0": theta0,
        "lambda0": acc["lambda0"],
        "accuracy_oblique_x": acc["oblique_x"],
        "accuracy_oblique_p": acc["oblique_p"],
        "accuracy_orthogonal_x": acc["orthogonal_x"],
        "accuracy_orthogonal_p": acc["orthogonal_p"],
    })
    unit = "deg" if args.degrees else "rad"
    out.write(
        f"# oblique pair to +-{acc['oblique_x']:.2f}, +-{acc['oblique_p']:.2f} is equivalent to the "
        f"orthogonal pair at theta0={theta0:.4g} {unit} to +-{acc['orthogonal_x']:.2f}, +-{acc['orthogonal_p']:.2f}\n"
    )
    return 0


def cmd_metric(args, out) -> int:
    g = _metric(parse_measure(args.measure, args.degrees))
    _report(out, g.to_dict())
    if args.out:
        Path(args.out).write_text(json.dumps(g.to_dict()) + "\n")
    return 0


def cmd_equiv(args, out) -> int:
    m1 = parse_measure(args.first, args.degrees)
    m2 = parse_measure(args.second, args.degrees)
    if isinstance(m1, Sl2Matrix) and isinstance(m2, Sl2Matrix):
        eq = are_equivalent(m1, m2, args.tol)
    else:
        eq = _metric(m1).max_abs_diff(_metric(m2)) <= args.tol
    diff = _metric(m1).max_abs_diff(_metric(m2))
    _report(out, {"equivalent": str(eq).lower(), "metric_max_diff": diff})
    return 0 if eq else 1


def cmd_husimi(args, out) -> int:
    _check_writable(args.out)
    state = parse_state(args.state, args.degrees)
    g = _metric(parse_measure(args.measure, args.degrees))
    grid = PhaseSpaceGrid.parse(args.grid)
    if args.method == "closed":
        if not isinstance(state, GaussianState):
            raise UsageError("closed form requires a Gaussian state")
        res = husimi_closed_grid(state, g, grid)
    elif args.method == "convolution":
        w = wigner_gaussian(state, grid) if isinstance(state, GaussianState) else wigner_fock(state, grid)
        res = husimi_convolution(w, g)
    else:
        rho = gaussian_to_fock(state, args.dim) if isinstance(state, GaussianState) else state
        res = husimi_overlap_grid(rho, g, grid, dim=max(args.dim, rho.dim))
    side = res.sidecar()
    if args.out:
        Path(args.out).write_text(res.grid.to_csv())
        Path(args.out + ".json").write_text(json.dumps(side, indent=2) + "\n")
    _report(out, {
        "method": side["method"],
        "integral": side["integral"],
        "min_value": side["min_value"],
        "max_value": float(res.values.max()),
    })
    if args.compare:
        if not isinstance(state, GaussianState):
            raise UsageError("--compare requires a Gaussian state")
        ref = husimi_closed_grid(state, g, grid)
        _report(out, {"sup_diff_vs_closed": float(np.abs(res.values - ref.values).max())})
    return 0


def cmd_sample(args, out) -> int:
    _check_writable(args.out)
    state = parse_state(args.state, args.degrees)
    m = parse_measure(args.measure, args.degrees)
    if isinstance(state, GaussianState):
        batch = sample_gaussian(state, _metric(m), args.n, args.seed)
    else:
        batch = sample_fock(state, m, args.n, args.seed, dim=args.dim)
    text = batch.to_csv()
    if args.out:
        Path(args.out).write_text(text)
        mean = batch.samples.mean(axis=0)
        _report(out, {"count": batch.count, "mean_x": float(mean[0]), "mean_p": float(mean[1])})
    else:
        out.write(text)
    return 0


def cmd_verify(args, out) -> int:
    ok = True
    for name, passed, detail in checks.run_all(quick=not args.full):
        ok &= passed
        out.write(f"{name}={'PASS' if passed else 'FAIL'} {detail}\n")
    out.write(f"verify={'PASS' if ok else 'FAIL'}\n")
    return 0 if ok else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--degrees", action="store_true", help="angles are in degrees")

    parser = argparse.ArgumentParser(prog="retrohusimi", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("canonicalize", parents=[common], help="zero-obliquity representative and accuracies")
    p.add_argument("theta", type=float)
    p.add_argument("phi", type=float)
    p.add_argument("lam", type=float, metavar="lambda")
    p.set_defaults(func=cmd_canonicalize)

    p = sub.add_parser("metric", parents=[common], help="metric tensor of a measurement")
    p.add_argument("measure")
    p.add_argument("--out")
    p.set_defaults(func=cmd_metric)

    p = sub.add_parser("equiv", parents=[common], help="test informational equivalence")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("husimi", parents=[common], help="outcome distribution on a grid")
    p.add_argument("--state", default="vacuum")
    p.add_argument("--measure", default="identity")
    p.add_argument(
        "--grid", default="-8:8:161,-8:8:161", help="xmin:xmax:nx,pmin:pmax:np; write --grid=... for negative bounds"
    )
    p.add_argument("--method", choices=["convolution", "overlap", "closed"], default="convolution")
    p.add_argument("--dim", type=int, default=64)
    p.add_argument("--compare", action="store_true", help="also report sup difference to the closed form")
    p.add_argument("--out")
    p.set_defaults(func=cmd_husimi)

    p = sub.add_parser("sample", parents=[common], help="draw synthetic outcomes")
    p.add_argument("--state", default="vacuum")
    p.add_argument("--measure", default="identity")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("verify", help="run the cross-oracle checks")
    p.add_argument("--full", action="store_true", help="run the full-size checks")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
