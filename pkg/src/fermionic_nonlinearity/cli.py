"""Command-line front end: ``fermi-nl <command> ...``.

Commands: ``nonlinearity`` (CSV sweep), ``decompose``, ``basis``, ``simulate``,
``uccsd-cost`` and ``validate`` (JSON).  Exit codes are 0 on success, 2 for an
infeasible decomposition, 3 when validation fails and 4 for bad input.
Errors are reported on stderr as a single JSON object.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .channels import BasisChannelSet, ChannelPTM, build_basis, ptm_noisy_rot
from .circuit import CircuitError, load_circuit
from .nonlinearity import InfeasibleDecomposition, NonlinearityCache, Tolerances, nonlinearity, solve_l1
from .sampler import run as run_sampler
from .uccsd import BUDGET_W, DOUBLE_SIGNS, N4_RULES, AmplitudeError, build_circuit, cost_report, extrapolate, load_amplitudes
from .validation import run_all

EXIT_OK, EXIT_INFEASIBLE, EXIT_VALIDATION, EXIT_BAD_INPUT = 0, 2, 3, 4
EXTENDED_ANGLES = (math.pi / 4, math.pi / 8, math.pi / 16)
FLOAT_FMT = "%.17g"


class BadInput(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    """Usage errors are bad input (exit 4), not argparse's default 2."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        sys.stderr.write(json.dumps({"version": __version__, "error": "UsageError", "message": message,
                                     "exit_code": EXIT_BAD_INPUT}) + "\n")
        raise SystemExit(EXIT_BAD_INPUT)


@dataclass
class RunConfig:
    """Everything a command needs; the seed defaults to 0 so runs are reproducible."""

    command: str
    inputs: dict[str, Path] = field(default_factory=dict)
    out: Path | None = None
    seed: int = 0
    workers: int = 1
    tolerances: Tolerances = field(default_factory=Tolerances)
    extended_basis: bool = False

    def validate_paths(self) -> None:
        for name, path in self.inputs.items():
            if not path.is_file():
                raise BadInput(f"--{name}: no such file {path}")
        if self.out is not None and not self.out.parent.exists():
            raise BadInput(f"--out: directory {self.out.parent} does not exist")
        if self.workers < 1:
            raise BadInput("--workers must be at least 1")

    def basis(self) -> BasisChannelSet:
        return build_basis(EXTENDED_ANGLES if self.extended_basis else (math.pi / 4,))


def parse_grid(text: str) -> np.ndarray:
    """``a:b:n`` -> n evenly spaced points from a to b inclusive; a bare number is one point."""
    try:
        parts = text.split(":")
        if len(parts) == 1:
            return np.array([float(parts[0])])
        if len(parts) != 3:
            raise ValueError
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise BadInput(f"bad grid {text!r}; expected a:b:n") from None
    if n < 1 or not (math.isfinite(a) and math.isfinite(b)):
        raise BadInput(f"bad grid {text!r}")
    return np.linspace(a, b, n)


def parse_list(text: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise BadInput(f"bad number list {text!r}") from None
    if not vals:
        raise BadInput("empty number list")
    return vals


def _probability(p: float, flag: str) -> float:
    if not 0.0 <= p <= 1.0:
        raise BadInput(f"{flag}: {p} is not a probability")
    return p


def _fmt(x: float) -> str:
    return FLOAT_FMT % x


def _emit(text: str, cfg: RunConfig) -> None:
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        cfg.out.write_text(text)


def _json(payload: dict) -> str:
    return json.dumps({"version": __version__, **payload}, indent=2, ensure_ascii=False) + "\n"


def _csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    buf.write(f"# fermionic_nonlinearity {__version__}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def cmd_nonlinearity(args: argparse.Namespace, cfg: RunConfig) -> int:
    thetas = parse_grid(args.theta_grid)
    ps = [_probability(p, "--p") for p in parse_list(args.p)]
    basis = cfg.basis()
    rows = []
    for theta in thetas:
        for p in ps:
            w, _ = nonlinearity(float(theta), p, basis, cfg.tolerances)
            rows.append((float(theta), float(p), float(w)))
    _emit(_csv(("theta", "p", "W"), rows), cfg)
    return EXIT_OK


def _load_ptm(path: Path) -> ChannelPTM:
    try:
        data = json.loads(path.read_text())
        ptm = data["ptm"] if isinstance(data, dict) else data
        return ChannelPTM(np.array(ptm, dtype=float), path.stem)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise BadInput(f"{path}: not a 16x16 PTM ({exc})") from exc


def cmd_decompose(args: argparse.Namespace, cfg: RunConfig) -> int:
    basis = cfg.basis()
    if args.ptm is not None:
        target = _load_ptm(Path(args.ptm))
        if not target.is_trace_preserving:
            raise BadInput("target PTM is not trace preserving")
        meta = {"ptm_file": str(args.ptm)}
    else:
        p = _probability(args.p, "--p")
        target = ptm_noisy_rot(args.theta, p)
        meta = {"theta": args.theta, "p": p}
    dec = solve_l1(target, basis, cfg.tolerances)
    out = dec.to_dict({**meta, "ptm": target.ptm.tolist()})
    out["basis"] = basis.manifest
    _emit(_json(out), cfg)
    return EXIT_OK


def cmd_basis(args: argparse.Namespace, cfg: RunConfig) -> int:
    _emit(_json(cfg.basis().to_dict()), cfg)
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace, cfg: RunConfig) -> int:
    if args.samples is None and (args.epsilon is None or args.delta is None):
        raise BadInput("give --samples N or both --epsilon and --delta")
    if (args.epsilon is None) != (args.delta is None):
        raise BadInput("--epsilon and --delta go together")
    circuit = load_circuit(cfg.inputs["circuit"])
    if circuit.observable is None:
        raise BadInput("circuit file has no observable")
    cache = NonlinearityCache(cfg.basis(), cfg.tolerances)
    res = run_sampler(circuit, n_samples=args.samples, epsilon=args.epsilon, delta=args.delta,
                      seed=cfg.seed, workers=cfg.workers, cache=cache)
    _emit(_json({"circuit": str(cfg.inputs["circuit"]), **res.to_dict()}), cfg)
    return EXIT_OK


def cmd_uccsd_cost(args: argparse.Namespace, cfg: RunConfig) -> int:
    amps = load_amplitudes(cfg.inputs["amps"])
    p = _probability(args.noise_p, "--noise-p")
    if args.trotter < 1:
        raise BadInput("--trotter must be at least 1")
    circuit = build_circuit(amps, args.trotter, p, args.signs)
    cost = cost_report(circuit, cache=NonlinearityCache(cfg.basis(), cfg.tolerances), budget=args.budget)
    out = {"amps": str(cfg.inputs["amps"]), "noise_p": p, "trotter_n": args.trotter,
           "n_four_body": len(circuit.four_body_gates), **cost.to_dict()}
    if args.extrapolate is not None:
        if args.extrapolate < 2:
            raise BadInput("--extrapolate needs M >= 2")
        ws = [g.w for g in cost.report.per_gate] or [1.0]
        out["extrapolation"] = extrapolate(ws, args.n4_rule).to_dict(range(2, args.extrapolate + 1))
    _emit(_json(out), cfg)
    if args.csv is not None:
        Path(args.csv).write_text(_csv(("gate", "angle", "p", "W"), cost.csv_rows()))
    return EXIT_OK


def cmd_validate(args: argparse.Namespace, cfg: RunConfig) -> int:
    results = run_all(seed=cfg.seed, n_circuits=args.circuits, basis=cfg.basis())
    ok = all(r.passed for r in results)
    _emit(_json({"passed": ok, "checks": [r.to_dict() for r in results]}), cfg)
    return EXIT_OK if ok else EXIT_VALIDATION


COMMANDS = {
    "nonlinearity": cmd_nonlinearity,
    "decompose": cmd_decompose,
    "basis": cmd_basis,
    "simulate": cmd_simulate,
    "uccsd-cost": cmd_uccsd_cost,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--extended-basis", action="store_true",
                        help="add pi/8 and pi/16 rotations to the channel basis")
    common.add_argument("--rank-tol", type=float, help="overrides FNL_RANK_TOL")
    common.add_argument("--infeasible-tol", type=float, help="overrides FNL_INFEASIBLE_TOL")

    ap = _Parser(prog="fermi-nl", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("nonlinearity", parents=[common], help="W(theta, p) sweep as CSV")
    s.add_argument("--theta-grid", required=True, help="a:b:n")
    s.add_argument("--p", default="0", help="comma-separated noise probabilities")

    s = sub.add_parser("decompose", parents=[common], help="optimal decomposition as JSON")
    s.add_argument("--theta", type=float, default=math.pi / 4)
    s.add_argument("--p", type=float, default=0.0)
    s.add_argument("--ptm", help="decompose a 16x16 PTM read from JSON instead")

    sub.add_parser("basis", parents=[common], help="basis manifest and PTMs as JSON")

    s = sub.add_parser("simulate", parents=[common], help="Monte-Carlo estimate for a circuit file")
    s.add_argument("--circuit", required=True)
    s.add_argument("--samples", type=int)
    s.add_argument("--epsilon", type=float)
    s.add_argument("--delta", type=float)

    s = sub.add_parser("uccsd-cost", parents=[common], help="cost report for UCCSD amplitudes")
    s.add_argument("--amps", required=True)
    s.add_argument("--noise-p", type=float, default=0.0)
    s.add_argument("--trotter", type=int, default=1)
    s.add_argument("--extrapolate", type=int, metavar="M", help="predict W for chains of 2..M atoms")
    s.add_argument("--n4-rule", choices=sorted(N4_RULES), default="all")
    s.add_argument("--signs", choices=sorted(DOUBLE_SIGNS), default="printed")
    s.add_argument("--budget", type=float, default=BUDGET_W)
    s.add_argument("--csv", help="also write the per-gate table here")

    s = sub.add_parser("validate", parents=[common], help="oracle-equivalence suite")
    s.add_argument("--circuits", type=int, default=200)
    return ap


def make_config(args: argparse.Namespace) -> RunConfig:
    tol = Tolerances.from_env()
    if args.rank_tol is not None:
        tol = replace(tol, rank=args.rank_tol)
    if args.infeasible_tol is not None:
        tol = replace(tol, infeasible=args.infeasible_tol)
    inputs = {k: Path(getattr(args, k)) for k in ("circuit", "amps", "ptm") if getattr(args, k, None)}
    return RunConfig(
        command=args.command,
        inputs=inputs,
        out=Path(args.out) if args.out else None,
        seed=args.seed,
        workers=args.workers,
        tolerances=tol,
        extended_basis=args.extended_basis,
    )


def _fail(code: int, exc: BaseException) -> int:
    err = {"version": __version__, "error": type(exc).__name__, "message": str(exc), "exit_code": code}
    if isinstance(exc, InfeasibleDecomposition):
        err["residual"] = exc.residual
    sys.stderr.write(json.dumps(err) + "\n")
    return code


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = make_config(args)
        cfg.validate_paths()
        return COMMANDS[args.command](args, cfg)
    except InfeasibleDecomposition as exc:
        return _fail(EXIT_INFEASIBLE, exc)
    except (BadInput, CircuitError, AmplitudeError, json.JSONDecodeError, ValueError, OSError) as exc:
        return _fail(EXIT_BAD_INPUT, exc)


if __name__ == "__main__":
    sys.exit(main())
