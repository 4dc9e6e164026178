"""Command-line front end.

Exit codes: 0 success, 1 a verification check failed, 2 usage or
configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import interferometers, photon_stats, postprocess, swap_circuit
from .estimators import resolve_group
from .interferometers import GroupSpec, is_power_of_two
from .validation import DimensionError, ValidationError, check_overlap

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

DEFAULT_TOLERANCES = {
    "structural": 1e-12,
    "probability": 1e-9,
    "bound": 1e-10,
    "circuit": 1e-10,
}

CSV_COLUMNS = ("pattern", "prob_i", "prob_d", "prob_mixed", "pi", "accept")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    group: GroupSpec | None = None
    overlap: float | None = None
    phi: np.ndarray | None = None
    psi: np.ndarray | None = None
    shots: int = 0
    seed: int | None = None
    fmt: str = "json"
    tol: float | None = None
    dim: int = 2
    perturb: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return self.group.order

    def tolerance(self, kind: str) -> float:
        return self.tol if self.tol is not None else DEFAULT_TOLERANCES[kind]

    def overlap_value(self) -> float:
        if self.overlap is not None:
            return self.overlap
        return photon_stats.OverlapSpec.from_states(self.phi, self.psi).c


def read_state(path: str | Path) -> np.ndarray:
    """One amplitude per line as ``re im``; blank lines and ``#`` comments ignored."""
    amps = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (1, 2):
            raise UsageError(f"{path}:{lineno}: expected 're im', got {line!r}")
        try:
            re_, im = float(parts[0]), float(parts[1]) if len(parts) == 2 else 0.0
        except ValueError as exc:
            raise UsageError(f"{path}:{lineno}: {exc}") from exc
        amps.append(complex(re_, im))
    vec = np.array(amps, dtype=np.complex128)
    if vec.size == 0:
        raise UsageError(f"{path}: no amplitudes")
    norm = float(np.vdot(vec, vec).real)
    if abs(norm - 1.0) > 1e-9:
        raise UsageError(f"{path}: state is not normalised (squared norm {norm!r})")
    return vec


def write_state(path: str | Path, vec) -> None:
    lines = [f"{float(z.real)!r} {float(z.imag)!r}" for z in np.asarray(vec, dtype=np.complex128)]
    Path(path).write_text("\n".join(lines) + "\n")


def random_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False)


def _pattern_str(d) -> str:
    return " ".join(str(int(x)) for x in d)


def _csv(rows, footer: dict | None = None, columns=CSV_COLUMNS) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([row[c] if c != "pattern" else _pattern_str(row[c]) for c in columns])
    for key, value in (footer or {}).items():
        buf.write(f"# {key}={json.dumps(value)}\n")
    return buf.getvalue()


def _build(cfg: RunConfig, max_modes: int = 10):
    if cfg.size > max_modes:
        raise UsageError(f"exact statistics are limited to M <= {max_modes}, got {cfg.size}")
    rule = postprocess.DecisionRule.from_group(cfg.group)
    u = rule.unitary()
    return rule, u, photon_stats.distribution(u)


def cmd_stats(cfg: RunConfig) -> tuple[int, str]:
    rule, u, dist = _build(cfg)
    c = cfg.overlap_value()
    mixed = dist.mixed(c)
    rows = []
    accepted = 0.0
    for d, pi_i, pi_d, pm in zip(dist.patterns, dist.prob_i, dist.prob_d, mixed):
        bit = postprocess.accept(rule, d)
        if bit == 0:
            accepted += pm
        rows.append(
            {
                "pattern": list(d),
                "prob_i": max(float(pi_i), 0.0),
                "prob_d": max(float(pi_d), 0.0),
                "prob_mixed": max(float(pm), 0.0),
                "pi": postprocess.pi_value(rule, d),
                "accept": bit,
            }
        )
    footer = {
        "acceptance_probability": float(accepted),
        "analytic_acceptance": postprocess.analytic_acceptance(cfg.size, c),
    }
    if cfg.fmt == "csv":
        return EXIT_OK, _csv(rows, footer)
    report = {
        "command": "stats",
        "group": list(cfg.group.invariant_factors),
        "size": cfg.size,
        "overlap": c,
        "patterns": rows,
        **footer,
    }
    return EXIT_OK, dumps(report)


class _Checks:
    def __init__(self):
        self.items = []

    def add(self, name: str, measured: float, tol: float, passed: bool | None = None, detail=None):
        if passed is None:
            passed = bool(measured <= tol)
        entry = {"name": name, "measured": float(measured), "tolerance": float(tol), "passed": bool(passed)}
        if detail is not None:
            entry["detail"] = detail
        self.items.append(entry)
        logger.debug("check %s: measured=%g tol=%g passed=%s", name, measured, tol, passed)
        return passed

    def skip(self, name: str, reason: str):
        self.items.append({"name": name, "passed": False, "skipped": reason})

    @property
    def ok(self) -> bool:
        return all(item["passed"] for item in self.items)


def run_checks(cfg: RunConfig) -> _Checks:
    g = cfg.group
    m = g.order
    if m > 10:
        raise UsageError(f"verify is limited to M <= 10, got {m}")
    checks = _Checks()
    rule = postprocess.DecisionRule.from_group(g)
    u = rule.unitary()
    if cfg.perturb:
        u = u.copy()
        u[0, 0] += cfg.perturb

    tol_struct = cfg.tolerance("structural")
    tol_prob = cfg.tolerance("probability")
    tol_bound = cfg.tolerance("bound")
    tol_circ = cfg.tolerance("circuit")

    residual = float(np.max(np.abs(u @ u.conj().T - np.eye(m))))
    unitary_ok = checks.add("unitarity", residual, tol_struct)
    checks.add("generator_closure", 0.0, 0.0, passed=True, detail={"generators": list(rule.generators)})

    if not unitary_ok:
        for name in ("normalization", "cauchy_schwarz_bound", "mixture_bound", "dichotomy",
                     "generator_test", "saturation", "equivalence_chain", "acceptance_law"):
            checks.skip(name, "interferometer is not unitary")
        return checks

    dist = photon_stats.distribution(u)
    overlaps = (0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0)
    norm_err = max(abs(float(np.sum(dist.prob_i)) - 1), abs(float(np.sum(dist.prob_d)) - 1))
    for c in overlaps:
        norm_err = max(norm_err, abs(float(np.sum(dist.mixed(c))) - 1))
    checks.add("normalization", norm_err, tol_prob)

    bound = photon_stats.verify_bound(u, tol=tol_bound, overlaps=overlaps, dist=dist)
    checks.add("cauchy_schwarz_bound", max(0.0, -bound.min_slack), tol_bound,
               passed=not bound.violations)
    checks.add("mixture_bound", max(0.0, -bound.mixture_min_slack), tol_bound,
               passed=not bound.mixture_violations)

    pis = [postprocess.pi_value(rule, d) for d in dist.patterns]
    bits = [postprocess.accept(rule, d) for d in dist.patterns]
    off = sum(1 for p in pis if p not in (0, m))
    checks.add("dichotomy", off, 0, passed=off == 0)
    mismatch = sum(1 for p, b in zip(pis, bits) if (b == 0) != (p == m))
    checks.add("generator_test", mismatch, 0, passed=mismatch == 0)
    if g.is_hadamard:
        parity = sum(1 for d, b in zip(dist.patterns, bits) if postprocess.hadamard_parity_test(d) != b)
        checks.add("parity_test", parity, 0, passed=parity == 0)

    accepted = np.array([b == 0 for b in bits])
    sat = float(np.max(np.abs(dist.prob_d - dist.prob_i / m)[accepted]))
    checks.add("saturation", sat, tol_bound)
    eq = postprocess.equivalence_report(rule, u, tol=tol_bound, dist=dist)
    checks.add("equivalence_chain", len(eq.counterexamples), 0, passed=eq.ok,
               detail={"counterexamples": eq.counterexamples[:5]} if eq.counterexamples else None)

    law = max(
        abs(float(np.sum(dist.mixed(c)[accepted])) - postprocess.analytic_acceptance(m, c)) for c in overlaps
    )
    checks.add("acceptance_law", law, tol_prob)

    if g.is_hadamard and m >= 2:
        n = m.bit_length() - 1
        dec = interferometers.decompose_hadamard(n)
        res = float(np.max(np.abs(interferometers.reconstruct(dec) - interferometers.hadamard_walsh(n))))
        checks.add("decomposition", res, tol_struct,
                   passed=res <= tol_struct and dec.beam_splitter_count == m * n // 2,
                   detail={"beam_splitters": dec.beam_splitter_count})
        rng = np.random.default_rng(cfg.seed if cfg.seed is not None else 0)
        full = swap_circuit.build_layout(m, "full")
        simple = swap_circuit.build_layout(m, "simplified")
        worst = worst_cross = 0.0
        for _ in range(5):
            phi, psi = random_state(cfg.dim, rng), random_state(cfg.dim, rng)
            c = float(abs(np.vdot(phi, psi)) ** 2)
            expected = postprocess.analytic_acceptance(m, c)
            pf = swap_circuit.accept_probability(full, phi, psi)
            ps = swap_circuit.accept_probability(simple, phi, psi)
            worst = max(worst, abs(pf - expected), abs(ps - expected))
            worst_cross = max(worst_cross, abs(pf - float(np.sum(dist.mixed(c)[accepted]))))
        checks.add("swap_circuit_law", worst, tol_circ)
        checks.add("circuit_vs_interferometer", worst_cross, tol_prob)

    if m <= 6:
        rng = np.random.default_rng(cfg.seed if cfg.seed is not None else 1)
        phi, psi = random_state(cfg.dim, rng), random_state(cfg.dim, rng)
        c = float(abs(np.vdot(phi, psi)) ** 2)
        sb = swap_circuit.symmetric_bound([phi] + [psi] * (m - 1))
        checks.add("symmetric_bound", abs(sb - postprocess.analytic_acceptance(m, c)), tol_circ)
    copies = swap_circuit.copies_lower_bound(1 / m) if m > 1 else 0
    checks.add("copies_lower_bound", abs(copies - (m - 1)), 0, passed=copies == m - 1)
    return checks


def cmd_verify(cfg: RunConfig) -> tuple[int, str]:
    checks = run_checks(cfg)
    report = {
        "command": "verify",
        "group": list(cfg.group.invariant_factors),
        "size": cfg.size,
        "passed": checks.ok,
        "checks": checks.items,
        "failed": [c["name"] for c in checks.items if not c["passed"]],
    }
    if cfg.fmt == "csv":
        rows = [
            {"name": c["name"], "measured": c.get("measured", ""), "tolerance": c.get("tolerance", ""),
             "passed": int(c["passed"])}
            for c in checks.items
        ]
        text = _csv(rows, columns=("name", "measured", "tolerance", "passed"))
    else:
        text = dumps(report)
    return (EXIT_OK if checks.ok else EXIT_FAILED), text


def cmd_decompose(cfg: RunConfig) -> tuple[int, str]:
    m = cfg.size
    if m < 2 or not is_power_of_two(m):
        raise UsageError(f"decompose needs a power-of-two size >= 2, got {m}")
    n = m.bit_length() - 1
    if n > 8:
        raise UsageError(f"decompose supports M <= 256, got {m}")
    dec = interferometers.decompose_hadamard(n)
    residual = float(np.max(np.abs(interferometers.reconstruct(dec) - interferometers.hadamard_walsh(n))))
    tol = cfg.tolerance("structural")
    report = {
        "command": "decompose",
        "size": m,
        "layers": [
            {"permutation": list(layer.permutation), "pairs": [list(p) for p in layer.pairs]}
            for layer in dec.layers
        ],
        "beam_splitter_count": dec.beam_splitter_count,
        "expected_count": m * n // 2,
        "phase_shifters": 0,
        "reconstruction_residual": residual,
        "tolerance": tol,
    }
    ok = residual <= tol and dec.beam_splitter_count == m * n // 2
    if cfg.fmt == "csv":
        rows = [
            {"layer": k, "permutation": _pattern_str(layer.permutation),
             "pairs": " ".join(f"{a}-{b}" for a, b in layer.pairs)}
            for k, layer in enumerate(dec.layers)
        ]
        footer = {key: report[key] for key in ("beam_splitter_count", "expected_count", "reconstruction_residual")}
        text = _csv(rows, footer, columns=("layer", "permutation", "pairs"))
    else:
        text = dumps(report)
    return (EXIT_OK if ok else EXIT_FAILED), text


def cmd_sample(cfg: RunConfig) -> tuple[int, str]:
    if cfg.shots < 1:
        raise UsageError("sample needs --shots >= 1")
    if cfg.seed is None:
        raise UsageError("sample needs --seed")
    rule, u, dist = _build(cfg)
    c = cfg.overlap_value()
    draws = photon_stats.sample(u, c, cfg.shots, seed=cfg.seed, dist=dist)
    bits = [postprocess.accept(rule, d) for d in draws]
    n_acc = bits.count(0)
    freq = n_acc / cfg.shots
    expected = postprocess.analytic_acceptance(cfg.size, c)
    sigma = math.sqrt(expected * (1 - expected) / cfg.shots)
    summary = {
        "shots": cfg.shots,
        "seed": cfg.seed,
        "overlap": c,
        "accepted": n_acc,
        "frequency": freq,
        "expected": expected,
        "sigma": sigma,
        "interval": [expected - 3 * sigma, expected + 3 * sigma],
        "within_3sigma": bool(abs(freq - expected) <= 3 * sigma),
    }
    records = [{"pattern": list(d), "accept": b} for d, b in zip(draws, bits)]
    if cfg.fmt == "csv":
        text = _csv(records, summary, columns=("pattern", "accept"))
    else:
        text = dumps({"command": "sample", "group": list(cfg.group.invariant_factors), "size": cfg.size,
                      "records": records, "summary": summary})
    return EXIT_OK, text


def cmd_swapsim(cfg: RunConfig) -> tuple[int, str]:
    m = cfg.size
    if m < 2 or not is_power_of_two(m):
        raise UsageError(f"swapsim needs a power-of-two size >= 2, got {m}")
    if cfg.phi is not None:
        phi, psi = cfg.phi, cfg.psi
        if phi.size != psi.size:
            raise UsageError(f"phi and psi have different dimensions: {phi.size} vs {psi.size}")
    else:
        if cfg.seed is None:
            raise UsageError("swapsim needs --phi/--psi or --seed")
        rng = np.random.default_rng(cfg.seed)
        phi, psi = random_state(cfg.dim, rng), random_state(cfg.dim, rng)
    c = min(1.0, float(abs(np.vdot(phi, psi)) ** 2))
    values = {
        "circuit_full": swap_circuit.accept_probability(swap_circuit.build_layout(m, "full"), phi, psi),
        "circuit_simplified": swap_circuit.accept_probability(swap_circuit.build_layout(m, "simplified"), phi, psi),
        "analytic": postprocess.analytic_acceptance(m, c),
    }
    if m <= 8:
        rule = postprocess.DecisionRule.from_group(GroupSpec.hadamard(m.bit_length() - 1))
        values["interferometer"] = postprocess.acceptance_probability(rule, rule.unitary(), c)
    else:
        values["interferometer"] = None
    names = [k for k in ("circuit_full", "circuit_simplified", "interferometer", "analytic") if values[k] is not None]
    deltas = {f"{a}-{b}": abs(values[a] - values[b]) for i, a in enumerate(names) for b in names[i + 1:]}
    tol = cfg.tolerance("probability")
    ok = all(v <= tol for v in deltas.values())
    report = {"command": "swapsim", "size": m, "overlap": c, "dimension": int(phi.size),
              "values": values, "deltas": deltas, "tolerance": tol, "agree": ok}
    if cfg.fmt == "csv":
        rows = [{"quantity": k, "value": "" if v is None else v} for k, v in {**values, **deltas}.items()]
        text = _csv(rows, columns=("quantity", "value"))
    else:
        text = dumps(report)
    return (EXIT_OK if ok else EXIT_FAILED), text


COMMANDS = {
    "stats": cmd_stats,
    "verify": cmd_verify,
    "decompose": cmd_decompose,
    "sample": cmd_sample,
    "swapsim": cmd_swapsim,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hadamard-swap",
        description="Swap tests of order M with linear-optical interferometers and controlled-swap circuits.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, overlap=False, shots=False):
        size = p.add_mutually_exclusive_group(required=True)
        size.add_argument("--size", type=int, help="number of modes M")
        size.add_argument("--group", help="invariant factors, e.g. 2,4")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--tol", type=float, help="override every numeric tolerance")
        p.add_argument("--seed", type=int)
        if overlap:
            p.add_argument("--overlap", type=float, help="squared overlap c = |<phi|psi>|^2")
            p.add_argument("--phi", help="state file for phi ('re im' per line)")
            p.add_argument("--psi", help="state file for psi ('re im' per line)")
        if shots:
            p.add_argument("--shots", type=int, default=0)
        return p

    common(sub.add_parser("stats", help="per-pattern probabilities and decisions"), overlap=True)
    v = common(sub.add_parser("verify", help="run every consistency check"))
    v.add_argument("--dim", type=int, default=2, help="qudit dimension for circuit checks")
    v.add_argument("--perturb", type=float, default=0.0, help="add this to U[0,0] (negative control)")
    common(sub.add_parser("decompose", help="beam-splitter layers of the Hadamard interferometer"))
    common(sub.add_parser("sample", help="seeded Monte-Carlo detection records"), overlap=True, shots=True)
    s = common(sub.add_parser("swapsim", help="compare circuit, interferometer and analytic values"), overlap=False)
    s.add_argument("--phi")
    s.add_argument("--psi")
    s.add_argument("--dim", type=int, default=2, help="dimension of random states")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    try:
        group = resolve_group(args.group, args.size)
    except ValidationError as exc:
        raise UsageError(str(exc)) from exc
    cfg = RunConfig(command=args.command, group=group, fmt=args.format, tol=args.tol, seed=args.seed)
    cfg.dim = getattr(args, "dim", 2)
    cfg.perturb = getattr(args, "perturb", 0.0)
    cfg.shots = getattr(args, "shots", 0) or 0
    phi_path, psi_path = getattr(args, "phi", None), getattr(args, "psi", None)
    if (phi_path is None) != (psi_path is None):
        raise UsageError("--phi and --psi must be given together")
    if phi_path is not None:
        cfg.phi, cfg.psi = read_state(phi_path), read_state(psi_path)
        if cfg.phi.size != cfg.psi.size:
            raise UsageError(f"phi and psi have different dimensions: {cfg.phi.size} vs {cfg.psi.size}")
    overlap = getattr(args, "overlap", None)
    if args.command in ("stats", "sample"):
        if (overlap is None) == (phi_path is None):
            raise UsageError("give exactly one of --overlap or --phi/--psi")
    if overlap is not None:
        try:
            cfg.overlap = check_overlap(overlap)
        except ValidationError as exc:
            raise UsageError(str(exc)) from exc
    if cfg.shots > 0 and cfg.seed is None:
        raise UsageError("--seed is required when --shots > 0")
    if cfg.tol is not None and not cfg.tol > 0:
        raise UsageError("--tol must be positive")
    return cfg


def run(argv=None) -> tuple[int, str]:
    """Parse ``argv`` and execute; returns ``(exit code, output text)``."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    cfg = config_from_args(args)
    return COMMANDS[cfg.command](cfg)


def main(argv=None) -> int:
    try:
        code, text = run(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValidationError, DimensionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(text if text.endswith("\n") else text + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
