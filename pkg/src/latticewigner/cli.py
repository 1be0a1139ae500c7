"""Command-line interface.

Exit codes: 0 success, 1 a ``check`` failed, 2 invalid spec, 3 ``--nk`` below
the Nyquist bound, 4 I/O failure.
"""
from __future__ import annotations

import argparse
import itertools
import json
import sys

import numpy as np

from . import core, negativity
from .errors import NyquistError, StateError
from .io import (RunConfig, SpecError, build_state, grid_to_csv, grid_to_json,
                 load_spec, parse_axis, parse_spec, read_grid, records_to_csv,
                 resolve_template, write_atomic)
from .states import DensityOperator, as_density, momentum_density

EXIT_CHECK = 1
EXIT_SPEC = 2
EXIT_NYQUIST = 3
EXIT_IO = 4


def _config(args) -> RunConfig:
    return RunConfig(n_k=args.nk, tail_eps=args.tail_eps, tol=args.tol,
                     output_format=args.format)


def _emit(text: str, out: str | None) -> None:
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def _state_meta(state, config: RunConfig) -> dict:
    rho = as_density(state)
    meta = {"n_min": rho.n_min, "n_max": rho.n_max, "spacing": rho.spacing}
    eps = getattr(state, "truncation_eps", None)
    meta["truncated"] = eps is not None
    meta["tail_eps"] = eps if eps is not None else None
    return meta


def _load_state(args, config):
    return build_state(load_spec(args.spec), config.tail_eps)


def cmd_wigner(args) -> int:
    config = _config(args)
    state = _load_state(args, config)
    grid = core.wigner_grid(state, config.n_k)
    if config.output_format == "json":
        text = grid_to_json(grid, {"config": config.as_dict(), **_state_meta(state, config)})
    else:
        text = grid_to_csv(grid)
    _emit(text, args.out)
    return 0


def cmd_eta(args) -> int:
    config = _config(args)
    state = _load_state(args, config)
    report = negativity.eta(core.wigner_grid(state, config.n_k))
    payload = {**report.as_dict(), "config": config.as_dict()}
    _emit(json.dumps(payload) + "\n", args.out)
    return 0


def cmd_marginals(args) -> int:
    config = _config(args)
    state = _load_state(args, config)
    grid = core.wigner_grid(state, config.n_k)
    position = [core.position_marginal(grid, m) for m in grid.m_values]
    momentum = [core.momentum_marginal(grid, j) for j in range(grid.n_k)]
    if config.output_format == "json":
        payload = {
            "meta": {"config": config.as_dict(), **_state_meta(state, config)},
            "position": {"m_values": [int(m) for m in grid.m_values], "values": position},
            "momentum": {"k_values": [float(k) for k in grid.k_values], "values": momentum},
        }
        text = json.dumps(payload) + "\n"
    else:
        records = [{"axis": "m", "coordinate": int(m), "value": v}
                   for m, v in zip(grid.m_values, position)]
        records += [{"axis": "k", "coordinate": float(k), "value": v}
                    for k, v in zip(grid.k_values, momentum)]
        text = records_to_csv(records, ["axis", "coordinate", "value"])
    _emit(text, args.out)
    return 0


def cmd_reconstruct(args) -> int:
    config = _config(args)
    state = _load_state(args, config)
    rho = as_density(state)
    grid = core.wigner_grid(rho, config.n_k)
    rebuilt = core.reconstruct_density(grid)
    error = float(np.max(np.abs(rebuilt.matrix - rho.matrix)))
    if config.output_format == "json":
        payload = {
            "meta": {"config": config.as_dict(), **_state_meta(state, config)},
            "n_min": rebuilt.n_min,
            "real": rebuilt.matrix.real.tolist(),
            "imag": rebuilt.matrix.imag.tolist(),
            "max_abs_error": error,
        }
        text = json.dumps(payload) + "\n"
    else:
        records = []
        for i, j in itertools.product(range(rebuilt.size), repeat=2):
            val = rebuilt.matrix[i, j]
            records.append({"n1": rebuilt.n_min + i, "n2": rebuilt.n_min + j,
                            "re": float(val.real), "im": float(val.imag)})
        text = records_to_csv(records, ["n1", "n2", "re", "im"])
    _emit(text, args.out)
    return 0 if error <= config.tol else EXIT_CHECK


def sweep_records(template, axes, config: RunConfig) -> list[dict]:
    """One record per point of the Cartesian product of the sweep axes."""
    names = [name for name, _ in axes]
    records = []
    for combo in itertools.product(*(vals for _, vals in axes)):
        bindings = dict(zip(names, combo))
        spec = parse_spec(resolve_template(template, bindings))
        state = build_state(spec, config.tail_eps)
        report = negativity.eta(core.wigner_grid(state, config.n_k))
        records.append({**bindings, "eta": report.eta,
                        "raw_negativity": report.raw_negativity,
                        "quad_error": report.quad_error_estimate})
    return records


def cmd_sweep(args) -> int:
    config = _config(args)
    with open(args.spec, encoding="utf-8") as fh:
        try:
            template = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SpecError(f"{args.spec}: invalid JSON ({exc})") from exc
    axes = [parse_axis(text) for text in args.axis]
    if not axes:
        raise SpecError("sweep needs at least one --axis")
    records = sweep_records(template, axes, config)
    columns = [name for name, _ in axes] + ["eta", "raw_negativity", "quad_error"]
    if config.output_format == "json":
        text = json.dumps({"config": config.as_dict(), "columns": columns,
                           "rows": records}) + "\n"
    else:
        text = records_to_csv(records, columns)
    _emit(text, args.out)
    return 0


def _check(name, value, tol):
    return {"name": name, "value": float(value), "tol": float(tol),
            "passed": bool(value <= tol)}


def phase_relation_error(grid: core.WignerGrid) -> float:
    half = grid.n_k // 2
    signs = np.where(grid.m_values % 2, -1.0, 1.0)[:, None]
    shifted = np.roll(grid.values, -half, axis=1)
    return float(np.max(np.abs(shifted - signs * grid.values)))


def state_checks(rho: DensityOperator, grid: core.WignerGrid, tol: float) -> list[dict]:
    """Identity suite for a grid built from a known density operator."""
    results = [
        _check("hermiticity", np.max(np.abs(rho.matrix - rho.matrix.conj().T)), tol),
        _check("trace", abs(np.trace(rho.matrix) - 1.0), tol),
        _check("reality", grid.max_imag_residue, tol),
        _check("normalization", abs(core.total_integral(grid) - 1.0), tol),
        _check("phase_relation", phase_relation_error(grid), tol),
    ]
    diag = np.real(np.diag(rho.matrix))
    pos_err = 0.0
    for m in grid.m_values:
        expected = diag[m // 2 - rho.n_min] if m % 2 == 0 else 0.0
        pos_err = max(pos_err, abs(core.position_marginal(grid, m) - expected))
    results.append(_check("position_marginal", pos_err, tol))
    dens = momentum_density(rho, grid.k_values)
    mom = np.array([core.momentum_marginal(grid, j) for j in range(grid.n_k)])
    results.append(_check("momentum_marginal", np.max(np.abs(mom - dens)), tol))
    purity = float(np.real(np.trace(rho.matrix @ rho.matrix)))
    results.append(_check("overlap_purity", abs(core.overlap(grid, grid) - purity), tol))
    mat, _ = core.reconstruct_matrix(grid)
    results.append(_check("reconstruction", np.max(np.abs(mat - rho.matrix)), tol))
    return results


def grid_checks(grid: core.WignerGrid, tol: float) -> list[dict]:
    """Checks that need only the grid itself."""
    results = [
        _check("normalization", abs(core.total_integral(grid) - 1.0), tol),
        _check("phase_relation", phase_relation_error(grid), tol),
    ]
    odd = [abs(core.position_marginal(grid, m)) for m in grid.m_values if m % 2]
    results.append(_check("odd_position_marginal", max(odd, default=0.0), tol))
    mat, n_min = core.reconstruct_matrix(grid)
    results.append(_check("hermiticity", np.max(np.abs(mat - mat.conj().T)), tol))
    results.append(_check("trace", abs(np.trace(mat) - 1.0), tol))
    rebuilt = core.wigner_grid_complex(mat, grid.n_k, n_min)
    results.append(_check("reconstruction", np.max(np.abs(rebuilt.values - grid.values)), tol))
    return results


def fuzz_grid(grid: core.WignerGrid, seed: int) -> core.WignerGrid:
    """Perturb one sample; a negative control for the identity checks."""
    rng = np.random.default_rng(seed)
    vals = grid.values.copy()
    r = int(rng.integers(vals.shape[0]))
    j = int(rng.integers(vals.shape[1]))
    vals[r, j] += (1e-3 + rng.random()) * max(float(np.max(np.abs(vals))), 1e-3)
    return core.WignerGrid(grid.m_start, vals, grid.spacing, grid.max_imag_residue)


def cmd_check(args) -> int:
    config = _config(args)
    if args.grid:
        grid = read_grid(args.grid, args.spacing)
        if args.fuzz is not None:
            grid = fuzz_grid(grid, args.fuzz)
        results = grid_checks(grid, config.tol)
    else:
        if not args.spec:
            raise SpecError("check needs --spec or --grid")
        state = _load_state(args, config)
        rho = as_density(state)
        grid = core.wigner_grid(rho, config.n_k)
        if args.fuzz is not None:
            grid = fuzz_grid(grid, args.fuzz)
        results = state_checks(rho, grid, config.tol)
    passed = all(r["passed"] for r in results)
    payload = {"passed": passed, "checks": results, "config": config.as_dict()}
    _emit(json.dumps(payload) + "\n", args.out)
    for r in results:
        if not r["passed"]:
            print(f"check failed: {r['name']} ({r['value']:.3e} > {r['tol']:.1e})",
                  file=sys.stderr)
    return 0 if passed else EXIT_CHECK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="latticewigner",
        description="Wigner functions and non-classicality for a particle on a 1-D lattice.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", help="state spec (JSON)")
    common.add_argument("--nk", type=int, default=RunConfig.n_k, help="k samples (even)")
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--tol", type=float, default=RunConfig.tol)
    common.add_argument("--tail-eps", type=float, default=RunConfig.tail_eps,
                        help="Gaussian truncation threshold")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("wigner", parents=[common], help="emit the Wigner grid").set_defaults(
        func=cmd_wigner)
    sub.add_parser("eta", parents=[common], help="non-classicality report (JSON)").set_defaults(
        func=cmd_eta)
    sub.add_parser("marginals", parents=[common], help="position and momentum marginals"
                   ).set_defaults(func=cmd_marginals)
    sub.add_parser("reconstruct", parents=[common], help="density matrix from the grid"
                   ).set_defaults(func=cmd_reconstruct)
    sweep = sub.add_parser("sweep", parents=[common], help="eta over parameter axes")
    sweep.add_argument("--axis", action="append", default=[],
                       help="NAME=START:STOP:COUNT, bound to $NAME in the template")
    sweep.set_defaults(func=cmd_sweep)
    check = sub.add_parser("check", parents=[common], help="run the identity suite")
    check.add_argument("--grid", help="check a grid file instead of a spec")
    check.add_argument("--spacing", type=float, default=1.0, help="spacing for CSV grids")
    check.add_argument("--fuzz", type=int, default=None, metavar="SEED",
                       help="corrupt one grid sample before checking")
    check.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command != "check" and not args.spec:
        print("error: --spec is required", file=sys.stderr)
        return EXIT_SPEC
    try:
        return args.func(args)
    except NyquistError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NYQUIST
    except (SpecError, StateError) as exc:
        print(f"error: invalid spec: {exc}", file=sys.stderr)
        return EXIT_SPEC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        # malformed grid files and sweep values
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC


if __name__ == "__main__":
    sys.exit(main())
