"""Command-line front end: scenario-driven sweeps, CDF tables, validation.

Commands write CSV (with ``#`` metadata comment lines) to --out or stdout.
Outputs are deterministic for a fixed scenario, tolerance and seed; the
--threads flag only changes how Monte-Carlo work is scheduled, never the
bytes produced.

Exit codes: 0 success; 1 a validate check failed; 2 scenario or flag
validation error; 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .diversity import CombiningScheme, HopConfig, effective_distribution
from .montecarlo import (McRun, empirical_cdf, mc_ser, simulate_end_to_end,
                         simulate_hop, sweep_eq_samples)
from .numerics import DEFAULT_CDF_TOL, DEFAULT_SER_TOL
from .relay import (Combiner, ConvergenceError, LinkScenario, end_to_end_cdf,
                    end_to_end_cdf_grid)
from .scenario import Scenario, ScenarioError, SweepSpec, load_scenario
from .ser import PskModulation, ser_from_cdf, ser_sweep

DEFAULT_SEED = 1729
DEFAULT_SWEEP_MC_SAMPLES = 100_000
DEFAULT_CDF_MC_SAMPLES = 200_000
VALIDATE_KS_SAMPLES = 100_000
VALIDATE_CDF_SAMPLES = 1_000_000
KS_THRESHOLD = 0.01
CDF_DEV_THRESHOLD = 0.005
SER_REL_THRESHOLD = 0.02
SER_CHECK_FLOOR = 1e-4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twohop",
        description="SNR distribution and symbol error rate of a two-hop "
                    "amplified relay link with antenna diversity.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", metavar="PATH",
                        help="write output here instead of stdout")
    common.add_argument("--tol", type=float, metavar="REL",
                        help="relative tolerance of the outer quadrature")
    common.add_argument("--seed", type=int, metavar="U64",
                        help="Monte-Carlo master seed (overrides the scenario)")
    common.add_argument("--samples", type=int, metavar="N",
                        help="Monte-Carlo sample count (overrides the scenario)")
    common.add_argument("--threads", type=int, default=1, metavar="N",
                        help="Monte-Carlo worker threads (never changes results)")
    common.add_argument("--combiner", choices=[c.value for c in Combiner],
                        help="combiner override")
    common.add_argument("--full-precision", action="store_true",
                        help="print probabilities at full float precision")

    scen = argparse.ArgumentParser(add_help=False)
    scen.add_argument("--scenario", required=True, metavar="PATH",
                      help="scenario file (see the package README for the format)")

    p = sub.add_parser("ser-sweep", parents=[scen, common],
                       help="SER vs hop-2 mean SNR as CSV")
    p.set_defaults(func=cmd_ser_sweep)

    p = sub.add_parser("cdf", parents=[scen, common],
                       help="analytical vs Monte-Carlo end-to-end CDF as CSV")
    p.add_argument("--grid", metavar="SPEC",
                   help="linear-SNR grid, 'lo:hi:count' or comma list "
                        "(default: 50 points up to the empirical 99.9%% quantile)")
    p.set_defaults(func=cmd_cdf)

    p = sub.add_parser("validate", parents=[scen, common],
                       help="run the oracle-equivalence checks for a scenario")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("compare-cases", parents=[common],
                       help="SER of the three antenna placements side by side")
    p.add_argument("--n", type=int, required=True, metavar="N",
                   help="antenna count of each populated node")
    p.add_argument("--m", type=float, default=1.0, help="fading figure (default 1)")
    p.add_argument("--hop1-snr-db", type=float, default=3.0, metavar="DB")
    p.add_argument("--sweep", default="0:20:1", metavar="START:STOP:STEP")
    p.add_argument("--modulations", default="BPSK", metavar="LIST",
                   help="comma list from BPSK, PSK8, PSK16 (default BPSK)")
    p.set_defaults(func=cmd_compare_cases)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        field = f" (field: {exc.field})" if exc.field else ""
        print(f"twohop: invalid configuration: {exc}{field}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"twohop: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"twohop: numerical non-convergence: {exc}", file=sys.stderr)
        return 3


# ---------------------------------------------------------------------------
# shared plumbing

def _load(args) -> Scenario:
    scenario = load_scenario(args.scenario)
    if args.combiner:
        scenario = replace(scenario, combiner=Combiner(args.combiner))
    return scenario


def _outer_tol(args, default: float, cap: float | None = None) -> float:
    tol = args.tol if args.tol is not None else default
    if not tol > 0:
        raise ScenarioError(f"--tol must be positive, got {tol}", field="tol")
    if cap is not None and tol > cap:
        raise ScenarioError(f"--tol must be <= {cap:g} for this command, got {tol}",
                            field="tol")
    return tol


def _mc_settings(args, scenario: Scenario, default_samples: int):
    enabled = any(v is not None for v in
                  (args.seed, args.samples, scenario.mc_seed, scenario.mc_samples))
    seed = next(v for v in (args.seed, scenario.mc_seed, DEFAULT_SEED)
                if v is not None)
    samples = next(v for v in (args.samples, scenario.mc_samples, default_samples)
                   if v is not None)
    if seed < 0:
        raise ScenarioError(f"--seed must be nonnegative, got {seed}", field="seed")
    if samples < 1:
        raise ScenarioError(f"--samples must be >= 1, got {samples}", field="samples")
    if args.threads < 1:
        raise ScenarioError(f"--threads must be >= 1, got {args.threads}",
                            field="threads")
    return enabled, seed, samples


def _fmt_prob(x: float, full: bool = False) -> str:
    """Fixed decimal notation with 6 significant digits (deterministic)."""
    if full:
        return repr(float(x))
    if not math.isfinite(x):
        return "nan"
    if x == 0:
        return "0.000000"
    exponent = math.floor(math.log10(abs(x)))
    return f"{x:.{max(0, 5 - exponent)}f}"


def _fmt_num(x: float) -> str:
    return f"{x:g}"


def _fmt_m(scenario: Scenario) -> str:
    m1, m2 = scenario.hop1_template.m, scenario.hop2_template.m
    return f"{m1:g}" if m1 == m2 else f"{m1:g}/{m2:g}"


def _meta(command: str, scenario: Scenario | None, tol: float,
          seed: int | None, samples: int | None) -> list[str]:
    lines = [f"# twohop {__version__} {command}"]
    if scenario is not None:
        lines.append(f"# scenario: {scenario.name}  case: {scenario.case}  "
                     f"combiner: {scenario.combiner.value}")
    lines.append(f"# tol: {tol:g}")
    if seed is not None:
        lines.append(f"# mc_seed: {seed}  mc_samples: {samples}")
    return lines


def _write(lines: list[str], out: str | None) -> None:
    text = "\n".join(lines) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# ser-sweep

def cmd_ser_sweep(args) -> int:
    scenario = _load(args)
    tol = _outer_tol(args, DEFAULT_SER_TOL)
    use_mc, seed, samples = _mc_settings(args, scenario, DEFAULT_SWEEP_MC_SAMPLES)
    grid = scenario.sweep.values()
    link = scenario.link()

    mc_table: dict[tuple[str, float, float], tuple[float, float]] = {}
    if use_mc:
        run = McRun(seed, samples, args.threads)
        for hop1_db in scenario.hop1_snr_db:
            for db, eq in sweep_eq_samples(link, grid, hop1_db, run):
                for mod in scenario.modulations:
                    mc_table[(mod.label, hop1_db, db)] = mc_ser(mod, eq)

    lines = _meta("ser-sweep", scenario, tol,
                  seed if use_mc else None, samples if use_mc else None)
    header = "case,modulation,n_s,n_r,n_d,m,hop1_snr_db,hop2_snr_db,ser_analytical"
    if use_mc:
        header += ",ser_mc,mc_halfwidth"
    lines.append(header)

    failed = []
    for mod in scenario.modulations:
        for hop1_db in scenario.hop1_snr_db:
            curve = ser_sweep(link, mod, grid, hop1_db, tol)
            for point in curve.points:
                row = [scenario.case, mod.label, str(scenario.n_s),
                       str(scenario.n_r), str(scenario.n_d), _fmt_m(scenario),
                       _fmt_num(hop1_db), _fmt_num(point.hop2_snr_db),
                       _fmt_prob(point.ser_analytical, args.full_precision)]
                if use_mc:
                    est, hw = mc_table[(mod.label, hop1_db, point.hop2_snr_db)]
                    row.append(_fmt_prob(est, args.full_precision))
                    row.append(_fmt_prob(hw, args.full_precision))
                lines.append(",".join(row))
                if not point.converged:
                    failed.append((mod.label, hop1_db, point.hop2_snr_db))

    _write(lines, args.out)
    if failed:
        detail = "; ".join(f"{label} hop1={h1:g} dB hop2={h2:g} dB"
                           for label, h1, h2 in failed)
        print(f"twohop: quadrature did not converge at: {detail}", file=sys.stderr)
        return 3
    return 0


# ---------------------------------------------------------------------------
# cdf

def _parse_grid(spec: str | None, eq_samples: np.ndarray) -> np.ndarray:
    if spec is None:
        hi = float(np.quantile(eq_samples, 0.999))
        return np.linspace(0.0, hi, 50)
    raw = spec.strip()
    if ":" in raw:
        parts = raw.split(":")
        if len(parts) != 3:
            raise ScenarioError(f"--grid must be lo:hi:count, got {spec!r}",
                                field="grid")
        try:
            lo, hi = float(parts[0]), float(parts[1])
            count = int(parts[2])
        except ValueError:
            raise ScenarioError(f"--grid must contain numbers, got {spec!r}",
                                field="grid") from None
        if count < 1 or hi < lo or lo < 0:
            raise ScenarioError(f"--grid needs 0 <= lo <= hi and count >= 1, "
                                f"got {spec!r}", field="grid")
        return np.linspace(lo, hi, count) if count > 1 else np.array([lo])
    try:
        points = np.array([float(t) for t in raw.split(",") if t.strip()])
    except ValueError:
        raise ScenarioError(f"--grid must be lo:hi:count or a comma list, "
                            f"got {spec!r}", field="grid") from None
    if points.size == 0:
        raise ScenarioError("--grid is empty", field="grid")
    if np.any(points < 0) or (points.size > 1 and not np.all(np.diff(points) > 0)):
        raise ScenarioError("--grid must be nonnegative and strictly increasing",
                            field="grid")
    return points


def cmd_cdf(args) -> int:
    scenario = _load(args)
    tol = _outer_tol(args, DEFAULT_CDF_TOL, cap=1e-2)
    _, seed, samples = _mc_settings(args, scenario, DEFAULT_CDF_MC_SAMPLES)
    hop1_db = scenario.hop1_snr_db[0]
    link = scenario.link_at(hop1_db, scenario.hop2_snr_db)
    d1 = effective_distribution(link.hop1)
    d2 = effective_distribution(link.hop2)

    eq = simulate_end_to_end(link, McRun(seed, samples, args.threads))
    grid = _parse_grid(args.grid, eq)
    analytical = end_to_end_cdf_grid(d1, d2, grid, link.combiner, tol)
    empirical = empirical_cdf(eq, grid)

    lines = _meta("cdf", scenario, tol, seed, samples)
    lines.append(f"# hop1_snr_db: {hop1_db:g}  hop2_snr_db: {scenario.hop2_snr_db:g}")
    lines.append("gamma,cdf_analytical,cdf_mc")
    for g, a, e in zip(grid, analytical, empirical):
        lines.append(f"{g:.8g},{_fmt_prob(a, args.full_precision)},"
                     f"{_fmt_prob(e, args.full_precision)}")
    deviation = float(np.max(np.abs(analytical - empirical)))
    lines.append(f"# max_abs_deviation: {deviation:.6g}")
    _write(lines, args.out)
    return 0


# ---------------------------------------------------------------------------
# validate

def _ks_distance(samples: np.ndarray, cdf) -> float:
    ordered = np.sort(samples)
    values = np.asarray(cdf(ordered))
    n = ordered.size
    steps = np.arange(1, n + 1) / n
    return float(max(np.max(steps - values), np.max(values - steps + 1.0 / n)))


def _scaled(base: float, n: int, reference: int) -> float:
    """Loosen a threshold when fewer samples than the reference are used."""
    return base * max(1.0, math.sqrt(reference / n))


def cmd_validate(args) -> int:
    scenario = _load(args)
    tol = _outer_tol(args, DEFAULT_CDF_TOL, cap=1e-2)
    seed = args.seed if args.seed is not None else (
        scenario.mc_seed if scenario.mc_seed is not None else DEFAULT_SEED)
    n_ks = args.samples if args.samples is not None else VALIDATE_KS_SAMPLES
    n_big = args.samples if args.samples is not None else VALIDATE_CDF_SAMPLES
    if seed < 0:
        raise ScenarioError(f"--seed must be nonnegative, got {seed}", field="seed")
    if n_ks < 1:
        raise ScenarioError(f"--samples must be >= 1, got {n_ks}", field="samples")
    if args.threads < 1:
        raise ScenarioError(f"--threads must be >= 1, got {args.threads}",
                            field="threads")

    hop1_db = scenario.hop1_snr_db[0]
    hop2_db = scenario.hop2_snr_db
    link = scenario.link_at(hop1_db, hop2_db)
    d1 = effective_distribution(link.hop1)
    d2 = effective_distribution(link.hop2)

    rows: list[tuple[str, str, str, bool]] = []

    ks1 = _ks_distance(simulate_hop(link.hop1, McRun(seed, n_ks, args.threads),
                                    stream=1), d1.cdf)
    limit = _scaled(KS_THRESHOLD, n_ks, VALIDATE_KS_SAMPLES)
    rows.append((f"hop1 law KS distance (n={n_ks})",
                 f"{ks1:.6f}", f"{limit:.6f}", ks1 <= limit))

    ks2 = _ks_distance(simulate_hop(link.hop2, McRun(seed, n_ks, args.threads),
                                    stream=2), d2.cdf)
    rows.append((f"hop2 law KS distance (n={n_ks})",
                 f"{ks2:.6f}", f"{limit:.6f}", ks2 <= limit))

    eq = simulate_end_to_end(link, McRun(seed, n_big, args.threads))
    grid = np.linspace(0.0, float(np.quantile(eq, 0.999)), 50)
    analytical = end_to_end_cdf_grid(d1, d2, grid, link.combiner, tol)
    deviation = float(np.max(np.abs(analytical - empirical_cdf(eq, grid))))
    limit = _scaled(CDF_DEV_THRESHOLD, n_big, VALIDATE_CDF_SAMPLES)
    rows.append((f"end-to-end CDF max deviation (n={n_big})",
                 f"{deviation:.6f}", f"{limit:.6f}", deviation <= limit))

    ser_tol = DEFAULT_SER_TOL if args.tol is None else args.tol
    cdf_tol = min(ser_tol / 100.0, 1e-2)
    for mod in scenario.modulations:
        analytical_ser = ser_from_cdf(
            mod, lambda g: end_to_end_cdf(d1, d2, g, link.combiner, cdf_tol), ser_tol)
        estimate, _ = mc_ser(mod, eq)
        label = (f"SER rel. err. {mod.label} @ hop1 {hop1_db:g} dB, "
                 f"hop2 {hop2_db:g} dB")
        if analytical_ser < SER_CHECK_FLOOR:
            rows.append((label, f"(SER {analytical_ser:.3g} < {SER_CHECK_FLOOR:g})",
                         "skipped", True))
            continue
        rel = abs(analytical_ser - estimate) / analytical_ser
        limit = _scaled(SER_REL_THRESHOLD, n_big, VALIDATE_CDF_SAMPLES)
        rows.append((label, f"{rel:.6f}", f"{limit:.6f}", rel <= limit))

    lines = [f"twohop validate: scenario {scenario.name} "
             f"(case {scenario.case}, combiner {scenario.combiner.value}, seed {seed})"]
    width = max(len(r[0]) for r in rows)
    for label, observed, threshold, ok in rows:
        lines.append(f"{label:<{width}}  observed {observed:>14}  "
                     f"threshold {threshold:>10}  {'pass' if ok else 'FAIL'}")
    n_failed = sum(1 for r in rows if not r[3])
    lines.append(f"{len(rows) - n_failed} of {len(rows)} checks passed"
                 if n_failed else f"all {len(rows)} checks passed")
    _write(lines, args.out)
    return 1 if n_failed else 0


# ---------------------------------------------------------------------------
# compare-cases

def _case_links(n: int, m: float, combiner: Combiner) -> list[tuple[str, LinkScenario]]:
    mimo = LinkScenario(
        HopConfig(n, n, m, 1.0, CombiningScheme.STBC_MRC),
        HopConfig(n, n, m, 1.0, CombiningScheme.STBC_MRC), combiner)
    miso_simo = LinkScenario(
        HopConfig(n, 1, m, 1.0, CombiningScheme.STBC),
        HopConfig(1, n, m, 1.0, CombiningScheme.MRC), combiner)
    simo_miso = LinkScenario(
        HopConfig(1, n, m, 1.0, CombiningScheme.MRC),
        HopConfig(n, 1, m, 1.0, CombiningScheme.STBC), combiner)
    return [("MIMO_MIMO", mimo), ("MISO_SIMO", miso_simo), ("SIMO_MISO", simo_miso)]


def _parse_sweep_arg(raw: str) -> SweepSpec:
    parts = raw.split(":")
    if len(parts) != 3:
        raise ScenarioError(f"--sweep must be start:stop:step, got {raw!r}",
                            field="sweep")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise ScenarioError(f"--sweep must contain numbers, got {raw!r}",
                            field="sweep") from None
    if step <= 0 or stop < start:
        raise ScenarioError(f"--sweep needs stop >= start and step > 0, got {raw!r}",
                            field="sweep")
    return SweepSpec(start, stop, step)


def cmd_compare_cases(args) -> int:
    if args.n < 1:
        raise ScenarioError(f"--n must be >= 1, got {args.n}", field="n")
    if not args.m >= 0.5:
        raise ScenarioError(f"--m must be >= 0.5, got {args.m}", field="m")
    tol = _outer_tol(args, DEFAULT_SER_TOL)
    combiner = Combiner(args.combiner) if args.combiner else Combiner.EXACT
    sweep = _parse_sweep_arg(args.sweep)
    grid = sweep.values()
    try:
        mods = tuple(PskModulation.from_label(t)
                     for t in args.modulations.split(",") if t.strip())
    except ValueError as exc:
        raise ScenarioError(str(exc), field="modulations") from exc
    if not mods:
        raise ScenarioError("--modulations must list at least one modulation",
                            field="modulations")

    links = _case_links(args.n, args.m, combiner)
    curves = {label: {mod.label: ser_sweep(link, mod, grid, args.hop1_snr_db, tol)
                      for mod in mods}
              for label, link in links}

    lines = [f"# twohop {__version__} compare-cases",
             f"# n: {args.n}  m: {args.m:g}  hop1_snr_db: {args.hop1_snr_db:g}  "
             f"combiner: {combiner.value}",
             f"# tol: {tol:g}",
             "modulation,hop1_snr_db,hop2_snr_db,"
             "ser_mimo_mimo,ser_miso_simo,ser_simo_miso"]

    failed = []
    orderings = []
    for mod in mods:
        per_case = [curves[label][mod.label] for label, _ in links]
        for i, db in enumerate(grid):
            values = [c.points[i].ser_analytical for c in per_case]
            lines.append(",".join(
                [mod.label, _fmt_num(args.hop1_snr_db), _fmt_num(float(db))]
                + [_fmt_prob(v, args.full_precision) for v in values]))
            for (label, _), curve in zip(links, per_case):
                if not curve.points[i].converged:
                    failed.append((mod.label, label, float(db)))
            if any(not math.isfinite(v) for v in values):
                orderings.append(f"# ordering {mod.label} @ {db:g} dB: not converged")
                continue
            order = sorted(zip(values, (label for label, _ in links)))
            parts = [order[0][1]]
            for (prev, _), (value, label) in zip(order, order[1:]):
                close = abs(value - prev) <= 1e-12 * max(abs(value), abs(prev), 1e-300)
                parts.append(("= " if close else "< ") + label)
            orderings.append(f"# ordering {mod.label} @ {db:g} dB: "
                             + " ".join(parts))
    lines.extend(orderings)

    _write(lines, args.out)
    if failed:
        detail = "; ".join(f"{m} {c} hop2={db:g} dB" for m, c, db in failed)
        print(f"twohop: quadrature did not converge at: {detail}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
