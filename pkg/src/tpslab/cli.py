"""Command-line interface: schmidt | qcf | demo | refactor | chsh.

Reports are deterministic: identical invocations (same seed, same inputs)
produce byte-identical output.  Exit codes: 0 ok, 2 unparseable input file,
3 dimension mismatch, 4 unknown observable, 5 grid constraint violated,
6 bad bijection, 1 any other toolkit error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .bell import chsh_max, chsh_max_closed_form
from .errors import (
    BijectionError,
    GridSpecError,
    ShapeError,
    SizeLimitError,
    StateFileError,
    ToolkitError,
    UnknownObservableError,
)
from .grid import Grid, demo_sum_diff, double_gaussian_profile, gaussian_profile
from .qcf import default_witness_threshold, qcf, qcf_local
from .sampling import haar_state, random_entangled_state
from .schmidt import schmidt
from .spins import (
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    demo_spins,
    spin_qcf_closed_form,
    total_spin_squares,
)
from .statefile import (
    StateFile,
    dump_json,
    load_state_file,
    render_csv,
    save_state_file,
    tps_from_dict,
    write_csv,
)
from .tps import (
    IndexBijection,
    TensorProductStructure,
    identity_bijection,
    relabel_tps,
    sum_diff_bijection,
    swap_bijection,
    trivial_tps,
)

OBSERVABLE_NAMES = ("pauli-x", "pauli-y", "pauli-z", "position")
_PAULI_BY_NAME = {"pauli-x": PAULI_X, "pauli-y": PAULI_Y, "pauli-z": PAULI_Z}

# dense TPS blocks beyond this size are refused rather than written
MAX_SERIALIZED_DIM = 4096

EXIT_CODES = (
    (StateFileError, 2),
    (ShapeError, 3),
    (SizeLimitError, 3),
    (UnknownObservableError, 4),
    (GridSpecError, 5),
    (BijectionError, 6),
)


def _manifest(args: argparse.Namespace, parameters: dict) -> dict:
    return {
        "subcommand": args.command,
        "parameters": parameters,
        "seed": getattr(args, "seed", None),
        "tolerances": {"tol": getattr(args, "tol", None)},
        "timestamp": args.timestamp,
        "version": __version__,
    }


def _emit(args: argparse.Namespace, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _position_observable(dim: int) -> np.ndarray:
    return np.diag(np.arange(dim) - (dim - 1) / 2.0).astype(complex)


def resolve_observable(spec: str, dim: int) -> np.ndarray:
    """An observable by name (pauli-x|y|z, position) or a JSON matrix file path."""
    if spec in _PAULI_BY_NAME:
        if dim != 2:
            raise ShapeError(f"observable {spec} is 2-dimensional, needed dim {dim}")
        return _PAULI_BY_NAME[spec]
    if spec == "position":
        return _position_observable(dim)
    try:
        with open(spec, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError:
        raise UnknownObservableError(
            f"unknown observable {spec!r}: expected one of {', '.join(OBSERVABLE_NAMES)} "
            "or a readable JSON matrix file"
        ) from None
    except json.JSONDecodeError as exc:
        raise StateFileError(f"{spec}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    try:
        n = int(data["dim"])
        entries = data["entries"]
    except (KeyError, TypeError) as exc:
        raise StateFileError(f"{spec}: matrix file needs 'dim' and 'entries'") from exc
    flat = np.array([complex(re, im) for re, im in entries], dtype=complex)
    if flat.size != n * n:
        raise ShapeError(f"{spec}: {flat.size} entries for a {n}x{n} matrix")
    if n != dim:
        raise ShapeError(f"{spec}: matrix dim {n} vs required dim {dim}")
    return flat.reshape(n, n)


def _resolve_tps(sf: StateFile, tps_path: str | None) -> TensorProductStructure:
    if tps_path:
        try:
            with open(tps_path, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise StateFileError(f"cannot read {tps_path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise StateFileError(
                f"{tps_path}: invalid JSON at line {exc.lineno}: {exc.msg}"
            ) from exc
        tps = tps_from_dict(data)
        if (tps.d1, tps.d2) != (sf.d1, sf.d2):
            raise ShapeError(
                f"{tps_path}: tps dims ({tps.d1}, {tps.d2}) vs state dims ({sf.d1}, {sf.d2})"
            )
        return tps
    if sf.tps is not None:
        return sf.tps
    return trivial_tps(sf.d1, sf.d2)


def cmd_schmidt(args: argparse.Namespace) -> int:
    sf = load_state_file(args.state)
    tps = _resolve_tps(sf, args.tps)
    tol = args.tol if args.tol is not None else 1e-10
    sd = schmidt(sf.amplitudes, tps, truncation_tol=tol)
    report = {
        "manifest": _manifest(args, {"state": args.state, "tps": args.tps, "tol": tol}),
        "rank": sd.rank,
        "coefficients": [float(c) for c in sd.coefficients],
        "factorizable": sd.rank == 1,
    }
    _emit(args, dump_json(report))
    return 0


def cmd_qcf(args: argparse.Namespace) -> int:
    sf = load_state_file(args.state)
    tps = _resolve_tps(sf, args.tps)
    if args.local:
        obs_a = resolve_observable(args.obs_a, tps.d1)
        obs_b = resolve_observable(args.obs_b, tps.d2)
        rep = qcf_local(obs_a, obs_b, sf.amplitudes, tps, witness_threshold=args.tol)
        value, threshold, verdict = rep.value, rep.witness_threshold, rep.verdict
    else:
        dim = sf.d1 * sf.d2
        obs_a = resolve_observable(args.obs_a, dim)
        obs_b = resolve_observable(args.obs_b, dim)
        value = qcf(obs_a, obs_b, sf.amplitudes)
        threshold = default_witness_threshold(dim)
        verdict = "not-applicable"
    report = {
        "manifest": _manifest(
            args,
            {
                "state": args.state,
                "obs_a": args.obs_a,
                "obs_b": args.obs_b,
                "local": args.local,
                "tps": args.tps,
            },
        ),
        "value": [value.real, value.imag],
        "abs": abs(value),
        "witness_threshold": threshold,
        "verdict": verdict,
    }
    _emit(args, dump_json(report))
    return 0


def _coords_section(f, g) -> dict:
    report = demo_sum_diff(f, g)
    return {
        "rank_xy": report.rank_xy,
        "rank_ab": report.rank_ab,
        "qcf_ab": report.qcf_ab,
        "variance_diff": report.variance_diff,
        "alpha_ratio_ab": report.alpha_ratio_ab,
        "warnings": list(report.warnings),
    }


def _demo_coords(args: argparse.Namespace, want_rows: bool) -> tuple[dict, list[list]]:
    if args.d % 2 == 0:
        raise GridSpecError(
            f"--d must be odd for the coordinate demo (got {args.d}): the "
            "sum/difference relabeling needs 2 invertible mod d"
        )
    smax = max(args.sigma1, args.sigma2)
    grid = Grid.spanning(args.d, 8.0 * smax)
    if want_rows:
        rows = []
        for s2 in np.linspace(args.sigma1, args.sigma2, 11):
            rep = demo_sum_diff(
                gaussian_profile(grid, 0.0, args.sigma1), gaussian_profile(grid, 0.0, float(s2))
            )
            rows.append([float(s2), rep.rank_ab, rep.qcf_ab, rep.variance_diff])
        return {}, rows
    pair = _coords_section(
        gaussian_profile(grid, 0.0, args.sigma1), gaussian_profile(grid, 0.0, args.sigma2)
    )
    grid_eq = Grid.spanning(args.d, 8.0 * args.sigma1)
    equal = _coords_section(
        gaussian_profile(grid_eq, 0.0, args.sigma1), gaussian_profile(grid_eq, 0.0, args.sigma1)
    )
    grid_dg = Grid.spanning(args.d, args.sep + 8.0 * args.sigma1)
    double = _coords_section(
        double_gaussian_profile(grid_dg, args.sep, args.sigma1),
        gaussian_profile(grid_dg, 0.0, args.sigma1),
    )
    body = {
        "grid": {"d": args.d, "halfwidth": 8.0 * smax},
        "gaussian_pair": pair,
        "equal_sigma": equal,
        "double_gaussian": double,
    }
    return body, []


def _demo_spins(args: argparse.Namespace, want_rows: bool) -> tuple[dict, list[list]]:
    if want_rows:
        # per-sample rows regenerate the same stream demo_spins consumes
        squares = total_spin_squares()
        rng = np.random.default_rng(args.seed)
        rows = []
        for k in range(args.samples):
            psi1 = haar_state(2, rng)
            psi2 = haar_state(2, rng)
            direct = qcf(squares.z2, squares.x2, np.kron(psi1, psi2))
            closed = spin_qcf_closed_form(psi1, psi2)
            rows.append([k, abs(direct - closed), direct.real])
        return {}, rows
    report = demo_spins(samples=args.samples, seed=args.seed)
    body = {
        "samples": report.samples,
        "closed_form_residual_max": report.closed_form_residual_max,
        "fraction_nonzero": report.fraction_nonzero,
        "nonzero_threshold": report.nonzero_threshold,
        "chi_tps_rank_examples": list(report.chi_tps_rank_examples),
        "sampled_rank2_fraction": report.sampled_rank2_fraction,
    }
    return body, []


def _demo_bell(args: argparse.Namespace) -> tuple[dict, list[list]]:
    rng = np.random.default_rng(args.seed)
    rows = []
    max_residual = 0.0
    min_value = float("inf")
    violations = 0
    for k in range(args.samples):
        psi = random_entangled_state(2, 2, rng, min_alpha_ratio=0.05)
        result = chsh_max(psi)
        oracle = chsh_max_closed_form(psi)
        max_residual = max(max_residual, abs(result.value - oracle))
        min_value = min(min_value, result.value)
        violations += result.value > 2.0 + 1e-3
        rows.append([k, result.value, oracle])
    bell_state = np.zeros(4, dtype=complex)
    bell_state[0] = bell_state[3] = 1.0 / np.sqrt(2.0)
    body = {
        "samples": args.samples,
        "bell_state_value": chsh_max(bell_state).value,
        "max_oracle_residual": max_residual,
        "min_value": min_value,
        "fraction_violating": violations / args.samples,
        "violation_margin": 1e-3,
    }
    return body, rows


def cmd_demo(args: argparse.Namespace) -> int:
    want_rows = args.format == "csv"
    if args.which == "coords":
        body, rows = _demo_coords(args, want_rows)
        header = ["param", "rank_ab", "qcf_ab", "variance_diff"]
        params = {
            "d": args.d,
            "sigma1": args.sigma1,
            "sigma2": args.sigma2,
            "sep": args.sep,
        }
    elif args.which == "spins":
        body, rows = _demo_spins(args, want_rows)
        header = ["sample", "residual", "qcf_value"]
        params = {"samples": args.samples}
    else:
        body, rows = _demo_bell(args)
        header = ["sample", "chsh_value", "oracle_value"]
        params = {"samples": args.samples}
    if args.format == "csv":
        if args.out:
            write_csv(args.out, header, rows)
        else:
            sys.stdout.write(render_csv(header, rows))
        return 0
    report = {"manifest": _manifest(args, {"which": args.which, **params}), **body}
    _emit(args, dump_json(report))
    return 0


def _load_bijection_file(path: str, d1: int, d2: int) -> IndexBijection:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise StateFileError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise StateFileError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    try:
        entries = data["map"]
    except (KeyError, TypeError) as exc:
        raise StateFileError(f"{path}: bijection file needs a 'map' list") from exc
    fa = -np.ones((d1, d2), dtype=int)
    fb = -np.ones((d1, d2), dtype=int)
    for entry in entries:
        try:
            i, j, a, b = (int(x) for x in entry)
        except (TypeError, ValueError) as exc:
            raise StateFileError(f"{path}: map entries must be [i, j, a, b]") from exc
        if not (0 <= i < d1 and 0 <= j < d2):
            raise BijectionError(f"{path}: source ({i}, {j}) outside the {d1}x{d2} grid")
        if fa[i, j] != -1:
            raise BijectionError(f"{path}: source ({i}, {j}) mapped twice")
        fa[i, j], fb[i, j] = a, b
    if np.any(fa < 0):
        missing = np.argwhere(fa < 0)[0]
        raise BijectionError(
            f"{path}: source ({missing[0]}, {missing[1]}) has no image; the map "
            "must cover the full grid"
        )
    return IndexBijection(d1, d2, fa, fb)


def cmd_refactor(args: argparse.Namespace) -> int:
    sf = load_state_file(args.state)
    d1, d2 = sf.d1, sf.d2
    if d1 * d2 > MAX_SERIALIZED_DIM:
        raise SizeLimitError(
            f"refusing to serialize a dense {d1 * d2}-dimensional TPS "
            f"(limit {MAX_SERIALIZED_DIM})"
        )
    if args.bijection == "sumdiff":
        if d1 != d2:
            raise BijectionError(f"sumdiff needs a square grid, got {d1}x{d2}")
        bij = sum_diff_bijection(d1)
    elif args.bijection == "swap":
        if d1 != d2:
            raise BijectionError(f"swap needs a square grid, got {d1}x{d2}")
        bij = swap_bijection(d1)
    elif args.bijection == "identity":
        bij = identity_bijection(d1, d2)
    else:
        bij = _load_bijection_file(args.bijection, d1, d2)
    base = sf.tps if sf.tps is not None else trivial_tps(d1, d2)
    relabeled = relabel_tps(bij)
    new_tps = TensorProductStructure(d1, d2, base.unitary @ relabeled.unitary)
    out = StateFile(d1=d1, d2=d2, amplitudes=sf.amplitudes, tps=new_tps, metadata=sf.metadata)
    save_state_file(args.out, out)
    return 0


def cmd_chsh(args: argparse.Namespace) -> int:
    sf = load_state_file(args.state)
    if (sf.d1, sf.d2) != (2, 2):
        raise ShapeError(f"chsh needs a two-qubit state, got dims ({sf.d1}, {sf.d2})")
    result = chsh_max(sf.amplitudes)
    report = {
        "manifest": _manifest(args, {"state": args.state}),
        "value": result.value,
        "grid_value": result.grid_value,
        "closed_form": chsh_max_closed_form(sf.amplitudes),
        "settings": {
            "a": [float(x) for x in result.settings.a],
            "a_prime": [float(x) for x in result.settings.a_prime],
            "b": [float(x) for x in result.settings.b],
            "b_prime": [float(x) for x in result.settings.b_prime],
        },
    }
    _emit(args, dump_json(report))
    return 0


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tpslab",
        description="Tensor-product-structure toolkit: Schmidt decompositions, "
        "quantum covariance, relabelings, and CHSH checks.",
    )
    parser.add_argument("--version", action="version", version=f"tpslab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, seed_default=None):
        p.add_argument("--out", help="write the report to this path instead of stdout")
        p.add_argument("--format", choices=("json", "csv"), default="json",
                       help="csv emits per-point sweep rows (demo only)")
        p.add_argument("--tol", type=float, default=None, help="tolerance override")
        p.add_argument("--seed", type=int, default=seed_default, help="random seed")
        p.add_argument("--timestamp", default=None,
                       help="optional manifest timestamp (omitted by default so reports are reproducible)")

    p = sub.add_parser("schmidt", help="Schmidt decomposition of a state file")
    p.add_argument("state")
    p.add_argument("--tps", help="JSON file overriding the state's TPS block")
    common(p)
    p.set_defaults(func=cmd_schmidt)

    p = sub.add_parser("qcf", help="quantum covariance of two observables")
    p.add_argument("state")
    p.add_argument("--obs-a", required=True,
                   help=f"{'|'.join(OBSERVABLE_NAMES)} or a JSON matrix file")
    p.add_argument("--obs-b", required=True)
    p.add_argument("--local", action="store_true",
                   help="treat observables as acting on the two TPS factors")
    p.add_argument("--tps", help="JSON file overriding the state's TPS block")
    common(p)
    p.set_defaults(func=cmd_qcf)

    p = sub.add_parser("demo", help="run a built-in demonstration")
    p.add_argument("which", choices=("coords", "spins", "bell"))
    p.add_argument("--d", type=int, default=129, help="grid points per coordinate")
    p.add_argument("--sigma1", type=float, default=1.0)
    p.add_argument("--sigma2", type=float, default=2.0)
    p.add_argument("--sep", type=float, default=4.0, help="double-gaussian lobe separation")
    p.add_argument("--samples", type=_positive_int, default=1000)
    common(p, seed_default=42)
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("refactor", help="rewrite a state file with a relabeled TPS")
    p.add_argument("state")
    p.add_argument("--bijection", required=True,
                   help="sumdiff | swap | identity | path to a JSON bijection file")
    common(p)
    p.set_defaults(func=cmd_refactor)

    p = sub.add_parser("chsh", help="maximal CHSH value of a two-qubit state file")
    p.add_argument("state")
    common(p)
    p.set_defaults(func=cmd_chsh)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "refactor" and not args.out:
        parser.error("refactor requires --out")
    try:
        return args.func(args)
    except ToolkitError as exc:
        for klass, code in EXIT_CODES:
            if isinstance(exc, klass):
                print(f"error: {exc}", file=sys.stderr)
                return code
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
