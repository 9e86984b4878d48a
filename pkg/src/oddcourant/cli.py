"""Command-line entry point: ``oddcourant <command> [options]``.

Exit codes: 0 pass, 1 verified failure (the report carries a witness),
2 usage or parse error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from .adapted import (
    adapted_space,
    build_adapted,
    build_bn_kahler_connection,
    gamma_crosscheck,
    integrability_obstruction,
    make_u0_parallel,
    nfl_identity_check,
    nijenhuis_identity_check,
    torsion_free_connection,
)
from .courant import check_courant_axioms
from .instances import Instance, InstanceError, load_instance
from .poly import PolynomialSyntaxError
from .quadratic import QuadraticSpace, check_exact_sequence, kahler_prolongation, unitary_prolongation
from .report import Report, Stage
from .structures import eigen_decompose, is_integrable, validate_bn_gacs, validate_pseudo_hermitian

COMMANDS = ("axioms", "structure", "integrable", "adapt", "kahler", "prolong")


class UsageError(Exception):
    pass


def _need_structure(inst: Instance, metric: bool = False):
    if not inst.has_structure:
        raise UsageError(f"instance {inst.name!r} has no structure block (F, u0)")
    if metric and inst.Gend is None:
        raise UsageError(f"instance {inst.name!r} has no Gend block")


def cmd_axioms(inst: Instance, seed: int, degree: int) -> List[Stage]:
    alg = inst.algebroid
    return [alg.twist_conditions(), check_courant_axioms(alg, seed=seed, degree=degree)]


def cmd_structure(inst: Instance, seed: int, degree: int) -> List[Stage]:
    _need_structure(inst)
    alg = inst.algebroid
    stages = [validate_bn_gacs(alg, inst.F, inst.u0)]
    if not stages[0].passed:
        return stages
    if inst.Gend is not None:
        ph = validate_pseudo_hermitian(alg, inst.Gend, inst.F, inst.u0)
        stages.append(ph)
        if ph.passed:
            stages.append(eigen_decompose(alg, inst.pseudo_hermitian()).stage)
    else:
        stages.append(eigen_decompose(alg, inst.complex_structure()).stage)
    return stages


def cmd_integrable(inst: Instance, seed: int, degree: int) -> List[Stage]:
    _need_structure(inst)
    alg = inst.algebroid
    v = validate_bn_gacs(alg, inst.F, inst.u0)
    if not v.passed:
        return [v]
    return [v, is_integrable(alg, inst.F, inst.u0), nfl_identity_check(alg, inst.F, inst.u0)]


def _adapted_pipeline(inst: Instance):
    alg = inst.algebroid
    tf = torsion_free_connection(alg)
    up = make_u0_parallel(tf.connection, inst.u0)
    ad = build_adapted(up.connection, inst.F, inst.u0)
    return tf, up, ad


def cmd_adapt(inst: Instance, seed: int, degree: int) -> List[Stage]:
    _need_structure(inst)
    alg = inst.algebroid
    v = validate_bn_gacs(alg, inst.F, inst.u0)
    if not v.passed:
        return [v]
    tf, up, ad = _adapted_pipeline(inst)
    D1 = up.connection
    stages = [
        v,
        tf.stage,
        up.stage,
        ad.stage,
        nijenhuis_identity_check(D1, inst.F, inst.u0),
        gamma_crosscheck(D1, inst.F, inst.u0),
        nfl_identity_check(alg, inst.F, inst.u0),
        integrability_obstruction(ad.connection, inst.F, inst.u0),
    ]
    if ad.stage.data.get("torsion_zero"):
        stages.append(adapted_space(ad.connection, inst.F, inst.u0, seed=seed).stage)
    return stages


def cmd_kahler(inst: Instance, seed: int, degree: int) -> List[Stage]:
    _need_structure(inst, metric=True)
    alg = inst.algebroid
    ph = validate_pseudo_hermitian(alg, inst.Gend, inst.F, inst.u0)
    if not all(c.passed for c in ph.postconditions if c.claimed):
        return [ph]
    k = build_bn_kahler_connection(alg, inst.Gend, inst.F, inst.u0)
    stages = [ph, k.stage]
    if k.stage.passed:
        stages.append(adapted_space(k.connection, inst.F, inst.u0, inst.Gend, seed=seed).stage)
    return stages


def _parse_split(text: str):
    try:
        parts = [tuple(int(x) for x in p.split(",")) for p in text.split(":")]
    except ValueError:
        raise UsageError(f"--split: expected 'k1,l1:k2,l2', got {text!r}")
    if len(parts) != 2 or any(len(p) != 2 or min(p) < 0 for p in parts):
        raise UsageError(f"--split: expected 'k1,l1:k2,l2' with non-negative entries, got {text!r}")
    return parts


def cmd_prolong(n: Optional[int], split: Optional[str]) -> List[Stage]:
    if (n is None) == (split is None):
        raise UsageError("prolong needs exactly one of --n or --split")
    if split is not None:
        (k1, l1), (k2, l2) = _parse_split(split)
        n_tot = k1 + l1 + k2 + l2
        if n_tot < 1:
            raise UsageError("--split: the total rank must be positive")
        try:
            _, st = kahler_prolongation(((k1, l1), (k2, l2)))
        except ValueError as exc:
            raise UsageError(f"--split: {exc}")
        return [st]
    if n < 1:
        raise UsageError("--n must be at least 1")
    stages = [unitary_prolongation(m1, n - m1)[1] for m1 in range(n, -1, -1)]
    V = QuadraticSpace.diagonal([1] * (n + 1) + [-1] * n)
    stages.append(check_exact_sequence(V))
    return stages


HANDLERS = {
    "axioms": cmd_axioms,
    "structure": cmd_structure,
    "integrable": cmd_integrable,
    "adapt": cmd_adapt,
    "kahler": cmd_kahler,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="oddcourant", description="Exact verification for odd exact Courant algebroids.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--instance", type=Path, help="instance JSON file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--degree", type=int, default=2, help="max degree of random sections")
    p.add_argument("--out", type=Path, help="write the report here instead of stdout")
    p.add_argument("--n", type=int, help="prolong: rank n of u(m1, m2), all splits")
    p.add_argument("--split", help="prolong: Kaehler split 'k1,l1:k2,l2'")
    return p


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        if args.seed < 0 or args.degree < 0:
            raise UsageError("--seed and --degree must be non-negative")
        if args.command == "prolong":
            stages = cmd_prolong(args.n, args.split)
            meta = {"n": args.n, "split": args.split}
        else:
            if args.instance is None:
                raise UsageError(f"{args.command} needs --instance")
            inst = load_instance(args.instance)
            stages = HANDLERS[args.command](inst, args.seed, args.degree)
            meta = {"instance": inst.name, "seed": args.seed, "degree": args.degree}
    except UsageError as exc:
        print(f"oddcourant: {exc}", file=sys.stderr)
        return 2
    except PolynomialSyntaxError as exc:
        print(f"oddcourant: parse error: {exc}", file=sys.stderr)
        return 2
    except (InstanceError, OSError) as exc:
        print(f"oddcourant: {exc}", file=sys.stderr)
        return 2
    report = Report(args.command, stages, meta)
    text = report.render()
    if args.out:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if report.passed else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
