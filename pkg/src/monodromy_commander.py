#!/usr/bin/env python3
"""
Monodromy Commander - Clifford Torus Monodromy Lab
==================================================

Command line surface for the monodromy toolkit: group membership and
decompositions, Maslov and linking invariants, simulated isotopies and the
verify-all reproduction batch. Every command prints one JSON report.

Usage:
    python monodromy_commander.py group classify --matrix 0,1,1,0
    python monodromy_commander.py maslov class --a 1 --b 1 --n1 1 --n2 0
    python monodromy_commander.py simulate case2 --b 1 --eps 0.05 --ns 1024 --nt 256
    python monodromy_commander.py verify-all --seed 0

Exit codes: 0 success, 1 failed check or numerical error, 2 usage or input error.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from curve_io import InputFormatError, dump_json, load_curve, load_surface_grid, load_torus_map, write_rows
from geometry import CliffordTorus, homology_class_on_torus
from gl2z import MaslovCovector, NotUnimodularError, parse_matrix
from isotopy_lab import induced_h1_map, simulate_case1, simulate_case2, simulate_case2_variant
from linking import (
    TorusSurface, gauss_linking, integrand_trace, linking_class_eval, torus_push_off,
)
from maslov import framing_index, make_m_framing, maslov_class_eval, phase_trace, torus_tangent_planes
from monodromy_groups import (
    MaslovMatchError, NotAMemberError, decompose, maslov_defect, match_maslov, membership,
)
from progress_tracker import ProgressTracker
from settings import ConfigError, RunConfig, load_config
from verification_engine import verify_all

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

USAGE_ERRORS = (InputFormatError, ConfigError, NotAMemberError, MaslovMatchError, NotUnimodularError)

# options whose comma-separated values may start with a minus sign
SIGNED_LIST_OPTIONS = ("--matrix", "--nu")


class UsageError(ValueError):
    """Unknown flag, missing argument or malformed option value"""


class CommanderArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that raises UsageError instead of exiting"""

    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def join_signed_values(argv: List[str]) -> List[str]:
    """Rewrite `--matrix -1,0,0,-1` as `--matrix=-1,0,0,-1` so argparse does not read a flag"""
    joined = []
    i = 0
    while i < len(argv):
        token = argv[i]
        if token in SIGNED_LIST_OPTIONS and i + 1 < len(argv) and argv[i + 1].startswith("-") \
                and not argv[i + 1].startswith("--"):
            joined.append(f"{token}={argv[i + 1]}")
            i += 2
            continue
        joined.append(token)
        i += 1
    return joined


def matrix_arg(text: str):
    try:
        return parse_matrix(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def covector_arg(text: str) -> MaslovCovector:
    parts = text.split(",")
    try:
        m1, m2 = (int(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected two comma-separated integers, got {text!r}") from None
    return MaslovCovector(m1, m2)


def build_parser() -> argparse.ArgumentParser:
    parser = CommanderArgumentParser(prog="monodromy_commander",
                                     description="Monodromy groups of Lagrangian tori in R^4")
    parser.add_argument("--out", type=Path, help="write the JSON report here instead of stdout")
    parser.add_argument("--quiet", action="store_true", help="only warnings on stderr")
    commands = parser.add_subparsers(dest="command", required=True)

    # group
    group = commands.add_parser("group", help="GL(2,Z) membership and decompositions")
    group_cmds = group.add_subparsers(dest="action", required=True)
    p = group_cmds.add_parser("classify")
    p.add_argument("--matrix", type=matrix_arg, required=True, help="a11,a12,a21,a22")
    p = group_cmds.add_parser("decompose")
    p.add_argument("--matrix", type=matrix_arg, required=True)
    p.add_argument("--target", choices=["gmu", "e", "x"], required=True)
    p = group_cmds.add_parser("defect")
    p.add_argument("--matrix", type=matrix_arg, required=True)
    p = group_cmds.add_parser("match-maslov")
    p.add_argument("--nu", type=covector_arg, required=True, help="m1,m2")

    # maslov
    maslov = commands.add_parser("maslov", help="Maslov indices")
    maslov_cmds = maslov.add_subparsers(dest="action", required=True)
    p = maslov_cmds.add_parser("class")
    _torus_args(p)
    p.add_argument("--n1", type=int, required=True)
    p.add_argument("--n2", type=int, required=True)
    p.add_argument("--samples", type=int)
    p.add_argument("--trace", type=Path, help="CSV of the unwrapped det^2 phase")
    p = maslov_cmds.add_parser("framing")
    p.add_argument("--curve", type=Path, required=True)
    p.add_argument("--m", type=int, required=True)

    # linking
    linking = commands.add_parser("linking", help="linking numbers with a torus")
    linking_cmds = linking.add_subparsers(dest="action", required=True)
    p = linking_cmds.add_parser("eval")
    _torus_args(p)
    p.add_argument("--n1", type=int, required=True)
    p.add_argument("--n2", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--grid", type=int)
    p.add_argument("--trace", type=Path, help="CSV of the degree density per s")
    p = linking_cmds.add_parser("raw")
    p.add_argument("--curve", type=Path, required=True)
    p.add_argument("--surface", type=Path, required=True)
    p.add_argument("--grid", type=int)

    # geom
    geom = commands.add_parser("geom", help="homology readout on Clifford tori")
    geom_cmds = geom.add_subparsers(dest="action", required=True)
    p = geom_cmds.add_parser("class")
    p.add_argument("--curve", type=Path, required=True)
    _torus_args(p)

    # simulate
    simulate = commands.add_parser("simulate", help="explicit isotopies and their monodromy")
    sim_cmds = simulate.add_subparsers(dest="action", required=True)
    p = sim_cmds.add_parser("case1")
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--samples", type=int)
    p = sim_cmds.add_parser("case2")
    p.add_argument("--variant", action="store_true", help="core circle in the z1-plane")
    p.add_argument("--b", type=float, default=1.0, help="core circle radius")
    p.add_argument("--eps", type=float)
    p.add_argument("--ns", type=int)
    p.add_argument("--nt", type=int)
    p = sim_cmds.add_parser("h1map")
    p.add_argument("--map", type=Path, required=True, help="CSV with columns theta,t,f,g")

    # verify-all
    p = commands.add_parser("verify-all", help="run the full reproduction suite")
    p.add_argument("--seed", type=int)
    p.add_argument("--ns", type=int)
    p.add_argument("--nt", type=int)
    p.add_argument("--grid", type=int, help="linking quadrature grid")
    p.add_argument("--workers", type=int, default=4)
    p.add_argument("--inject-fault", action="store_true",
                   help="expect the identity from the rotation check (harness self-test)")
    return parser


def _torus_args(p: argparse.ArgumentParser):
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)


# ---------------------------------------------------------------------------
# Command handlers; each returns (payload, exit code)
# ---------------------------------------------------------------------------

def cmd_group(args, config: RunConfig):
    if args.action == "classify":
        info = membership(args.matrix)
        return {"matrix": args.matrix.to_rows(), "tag": info.tags[0].value,
                "tags": [t.value for t in info.tags]}, 0
    if args.action == "decompose":
        result = decompose(args.matrix, args.target)
        return {"matrix": args.matrix.to_rows(), "target": result.target,
                "word": result.word.names(), "verified": result.verified}, 0
    if args.action == "defect":
        result = maslov_defect(args.matrix)
        return {"matrix": args.matrix.to_rows(), "defect": list(result.defect.as_tuple()),
                "divisible_by_4": result.divisible_by_4}, 0
    g = match_maslov(args.nu)
    return {"nu": list(args.nu.as_tuple()), "matrix": g.to_rows()}, 0


def cmd_maslov(args, config: RunConfig):
    if args.action == "class":
        torus = CliffordTorus(args.a, args.b)
        samples = args.samples or config.samples
        index = maslov_class_eval(torus, args.n1, args.n2, samples)
        if args.trace:
            write_rows(args.trace, ["t", "phase"], phase_trace(torus_tangent_planes(torus, args.n1, args.n2, samples)))
        return index.to_dict(), 0
    curve = load_curve(args.curve)
    framing = make_m_framing(curve, args.m)
    index = framing_index(curve, framing)
    return {"m": args.m, **index.to_dict()}, 0


def cmd_linking(args, config: RunConfig):
    if args.action == "eval":
        torus = CliffordTorus(args.a, args.b)
        grid = args.grid or config.linking_grid
        result = linking_class_eval(torus, args.n1, args.n2, args.eps, grid)
        if args.trace:
            rows = integrand_trace(torus_push_off(torus, args.n1, args.n2, args.eps),
                                   TorusSurface.clifford(torus), grid)
            write_rows(args.trace, ["s", "density"], rows)
        return result.to_dict(), 0
    curve = load_curve(args.curve)
    surface = TorusSurface.from_grid(load_surface_grid(args.surface), name=args.surface.stem)
    return gauss_linking(curve, surface, args.grid or config.linking_grid).to_dict(), 0


def cmd_geom(args, config: RunConfig):
    curve = load_curve(args.curve)
    gamma = homology_class_on_torus(curve, CliffordTorus(args.a, args.b))
    return {"class": list(gamma.as_tuple())}, 0


def cmd_simulate(args, config: RunConfig):
    if args.action == "case1":
        report = simulate_case1(args.b, args.samples or config.samples, config.flow_step)
    elif args.action == "case2":
        run = simulate_case2_variant if args.variant else simulate_case2
        report = run(args.b, args.eps or config.eps, args.ns or config.ns, args.nt or config.nt)
    else:
        theta_image, t_image = load_torus_map(args.map)
        return {"monodromy": induced_h1_map(theta_image, t_image).to_rows()}, 0
    return report.to_dict(), 0


def cmd_verify_all(args, config: RunConfig):
    tracker = ProgressTracker(quiet=args.quiet)
    summary = verify_all(config, inject_fault=args.inject_fault, workers=args.workers, tracker=tracker)
    return summary.to_dict(), 0 if summary.passed else 1


HANDLERS = {
    "group": cmd_group,
    "maslov": cmd_maslov,
    "linking": cmd_linking,
    "geom": cmd_geom,
    "simulate": cmd_simulate,
    "verify-all": cmd_verify_all,
}


def run(argv: Optional[List[str]] = None) -> int:
    """Parse argv, run one command, write its JSON; returns the exit code"""
    parser = build_parser()
    argv = join_signed_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        logger.error(f"{type(e).__name__}: {e}")
        dump_json({"error": str(e), "type": type(e).__name__}, None)
        return 2
    except SystemExit as e:
        # --help
        return int(e.code or 0)

    if args.quiet:
        logging.getLogger().setLevel(logging.WARNING)

    try:
        if args.command == "verify-all":
            config = load_config(seed=args.seed, ns=args.ns, nt=args.nt, linking_grid=args.grid)
        else:
            config = load_config()
        payload, code = HANDLERS[args.command](args, config)
    except USAGE_ERRORS as e:
        logger.error(f"{type(e).__name__}: {e}")
        payload, code = {"error": str(e), "type": type(e).__name__}, 2
    except Exception as e:
        logger.error(f"{type(e).__name__}: {e}")
        payload, code = {"error": str(e), "type": type(e).__name__}, 1

    dump_json(payload, args.out)
    return code


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
