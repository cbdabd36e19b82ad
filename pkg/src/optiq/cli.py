"""Command-line surface.

Subcommands:
    approximate   multi-start search for the closest reachable evolution
    lift          evolution matrix of a scattering-matrix file
    sample        Haar-random scattering matrix
    decompose     beam-splitter mesh of a scattering-matrix file
    replay        re-execute a report's configuration and verify distances
    spacing-test  chi-square check of two-mode Haar eigenphase spacings

Exit codes: 0 success, 2 shape error, 3 unitarity error, 4 numerical
instability, 1 anything else. Every command is deterministic given its
flags; reports embed the full configuration so they can be replayed. The
environment variable OPTIQ_BASIS_CACHE, when set, points at a directory
used to cache orthonormalized image bases between runs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import serialize
from .approx import (DEFAULT_CLUSTER_TOL, DEFAULT_MAX_ITER, DEFAULT_TOL,
                     fidelity_bound, haar_random, haar_spacing_test, multi_start)
from .circuit import decompose
from .errors import (NumericalInstabilityError, OptiqError, ShapeError,
                     UnitarityError)
from .fock import FockBasis, dimension, enumerate_basis
from .lie import build_image_basis, distance
from .validate import require_unitary

REPORT_VERSION = 1


@dataclass
class RunConfig:
    """Everything a multi-start run needs; embedded in reports for replay."""

    m: int
    n: int
    ordering: object  # tag string or explicit state list
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    starts: int = 1
    rng_seed: int = 0
    cluster_tol: float = DEFAULT_CLUSTER_TOL

    def validate(self) -> None:
        if not self.tol > 0 or not self.cluster_tol > 0:
            raise ValueError("tolerances must be positive")
        if self.starts < 1:
            raise ValueError("start count must be >= 1")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")

    def basis(self) -> FockBasis:
        return enumerate_basis(self.m, self.n, self.ordering)

    def to_obj(self) -> dict:
        return {"m": self.m, "n": self.n, "ordering": self.ordering,
                "tol": self.tol, "max_iter": self.max_iter,
                "starts": self.starts, "rng_seed": self.rng_seed,
                "cluster_tol": self.cluster_tol}

    @classmethod
    def from_obj(cls, obj: dict) -> "RunConfig":
        return cls(m=int(obj["m"]), n=int(obj["n"]), ordering=obj["ordering"],
                   tol=float(obj["tol"]), max_iter=int(obj["max_iter"]),
                   starts=int(obj["starts"]), rng_seed=int(obj["rng_seed"]),
                   cluster_tol=float(obj["cluster_tol"]))


def _parse_ordering(value: str):
    if value.startswith("@"):
        loaded = serialize.load_json(value[1:])
        return [tuple(int(x) for x in state) for state in loaded]
    return value


def _image_basis_for(basis: FockBasis):
    cache_dir = os.environ.get("OPTIQ_BASIS_CACHE")
    if cache_dir:
        return serialize.cached_image_basis(basis, cache_dir)
    return build_image_basis(basis)


def _write_output(path: str, obj) -> None:
    text = serialize.dumps_canonical(obj)
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _log(message: str) -> None:
    print(message, file=sys.stderr)


def _run_multi_start(config: RunConfig, target: np.ndarray, include_trace: bool) -> dict:
    basis = config.basis()
    if target.shape[0] != len(basis):
        raise ShapeError(
            f"target dimension {target.shape[0]} does not match "
            f"dimension(m={config.m}, n={config.n}) = {len(basis)}")
    require_unitary(target, "target")
    image_basis = _image_basis_for(basis)
    clusters = multi_start(target, image_basis, config.starts,
                           tol=config.tol, max_iter=config.max_iter,
                           rng_seed=config.rng_seed, cluster_tol=config.cluster_tol)
    cluster_objs = []
    for result, hits in clusters:
        entry = {
            "final_distance": result.final_distance,
            "fidelity_bound": fidelity_bound(result.trace[-1].normal_norm),
            "hit_count": hits,
            "converged": result.converged,
            "iterations": result.iterations,
            "scattering_matrix": serialize.matrix_to_obj(result.scattering),
            "evolution_matrix": serialize.matrix_to_obj(result.evolution),
            "circuit": serialize.plan_to_obj(decompose(result.scattering)),
        }
        if include_trace:
            entry["trace"] = [
                {"step": r.step, "distance": r.distance,
                 "tangent_norm": r.tangent_norm, "normal_norm": r.normal_norm}
                for r in result.trace]
        cluster_objs.append(entry)
    return {
        "format_version": REPORT_VERSION,
        "config": config.to_obj(),
        "target": serialize.matrix_to_obj(target),
        "clusters": cluster_objs,
    }


def cmd_approximate(args) -> int:
    config = RunConfig(m=args.modes, n=args.photons,
                       ordering=_parse_ordering(args.ordering),
                       tol=args.tol, max_iter=args.max_iter, starts=args.starts,
                       rng_seed=args.seed, cluster_tol=args.cluster_tol)
    config.validate()
    target = serialize.load_matrix(args.target)
    report = _run_multi_start(config, target, args.trace)
    _write_output(args.output, report)
    best = report["clusters"][0]
    _log(f"{len(report['clusters'])} cluster(s); best distance "
         f"{best['final_distance']:.9f} (fidelity bound {best['fidelity_bound']:.6f})")
    return 0


def cmd_replay(args) -> int:
    report = serialize.load_json(args.report)
    config = RunConfig.from_obj(report["config"])
    config.validate()
    target = serialize.matrix_from_obj(report["target"])
    fresh = _run_multi_start(config, target, include_trace=False)
    old = [c["final_distance"] for c in report["clusters"]]
    new = [c["final_distance"] for c in fresh["clusters"]]
    if len(old) != len(new):
        _log(f"replay mismatch: {len(old)} recorded clusters vs {len(new)} recomputed")
        return 1
    worst = max((abs(a - b) for a, b in zip(old, new)), default=0.0)
    if worst > 1e-9:
        _log(f"replay mismatch: distances differ by {worst:.3e}")
        return 1
    _log(f"replay verified: {len(new)} cluster distance(s) match within 1e-9")
    return 0


def cmd_lift(args) -> int:
    basis = enumerate_basis(args.modes, args.photons, _parse_ordering(args.ordering))
    S = serialize.load_matrix(args.scattering)
    from .homomorphism import evolution_matrix

    _write_output(args.output, serialize.matrix_to_obj(evolution_matrix(S, basis)))
    return 0


def cmd_sample(args) -> int:
    _write_output(args.output, serialize.matrix_to_obj(haar_random(args.modes, args.seed)))
    return 0


def cmd_decompose(args) -> int:
    from .circuit import reconstruct
    from .validate import unitarity_residual

    S = serialize.load_matrix(args.scattering)
    plan = decompose(S)
    residual = distance(reconstruct(plan), S)
    # print-precision inputs can only be reconstructed up to their own defect
    bound = max(1e-9 * plan.m, 10.0 * unitarity_residual(np.asarray(S, dtype=complex)))
    if residual > bound:
        raise NumericalInstabilityError(
            f"plan reconstruction differs from input by {residual:.3e}")
    _write_output(args.output, serialize.plan_to_obj(plan))
    _log(f"{'idx':>3}  {'kind':<13} {'modes':<8} {'theta':>12} {'phi':>12}")
    for idx, el in enumerate(plan.elements):
        _log(f"{idx:>3}  {el.kind:<13} {str(list(el.modes)):<8} "
             f"{el.theta:>12.6f} {el.phi:>12.6f}")
    phases = ", ".join(f"{p:.6f}" for p in plan.residual_phases)
    _log(f"residual phases: [{phases}]  (reconstruction residual {residual:.2e})")
    return 0


def cmd_spacing_test(args) -> int:
    statistic, threshold, passed = haar_spacing_test(args.samples, args.seed, args.bins)
    print(f"chi-square statistic {statistic:.3f} vs 1% critical value "
          f"{threshold:.3f} ({args.samples} samples, {args.bins} bins): "
          f"{'pass' if passed else 'FAIL'}")
    return 0 if passed else 1


def _add_basis_options(parser) -> None:
    parser.add_argument("--modes", "-m", type=int, required=True,
                        help="number of optical modes m")
    parser.add_argument("--photons", "-n", type=int, required=True,
                        help="number of photons n")
    parser.add_argument("--ordering", default="lex_desc",
                        help="basis ordering: 'lex_desc' or @file with a JSON state list")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="optiq",
        description="Locally optimal linear-optics approximations to "
                    "multiphoton unitaries.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("approximate",
                       help="multi-start search for the closest reachable evolution")
    p.add_argument("target", help="target evolution-matrix file (JSON or text)")
    _add_basis_options(p)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL,
                   help="stop when the tangent norm falls below this")
    p.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER)
    p.add_argument("--starts", "-k", type=int, default=1,
                   help="number of starts: the identity plus k-1 Haar draws")
    p.add_argument("--seed", type=int, default=0, help="base RNG seed")
    p.add_argument("--cluster-tol", type=float, default=DEFAULT_CLUSTER_TOL)
    p.add_argument("--trace", action="store_true",
                   help="include per-step traces in the report")
    p.add_argument("--output", "-o", default="report.json")
    p.set_defaults(func=cmd_approximate)

    p = sub.add_parser("replay", help="re-run a report's config and verify distances")
    p.add_argument("report")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("lift", help="evolution matrix of a scattering matrix")
    p.add_argument("scattering", help="scattering-matrix file (JSON or text)")
    _add_basis_options(p)
    p.add_argument("--output", "-o", default="-")
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("sample", help="Haar-random scattering matrix")
    p.add_argument("--modes", "-m", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o", default="-")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("decompose", help="beam-splitter mesh of a scattering matrix")
    p.add_argument("scattering", help="scattering-matrix file (JSON or text)")
    p.add_argument("--output", "-o", default="-")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("spacing-test",
                       help="chi-square test of two-mode Haar eigenphase spacings")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bins", type=int, default=20)
    p.set_defaults(func=cmd_spacing_test)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ShapeError as exc:
        _log(f"error: {exc}")
        return 2
    except UnitarityError as exc:
        _log(f"error: {exc}")
        return 3
    except NumericalInstabilityError as exc:
        _log(f"error: {exc}")
        return 4
    except (OptiqError, ValueError, OSError, json.JSONDecodeError) as exc:
        _log(f"error: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
