"""Command line entry point: ``run``, ``verify`` and ``sweep``."""

from __future__ import annotations

import argparse
import itertools
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

from .integrators import INTEGRATORS
from .lie import resolve_group
from .outputs import emit_outputs
from .sim import ScenarioConfig, run_scenario
from .verify import verify_suite

log = logging.getLogger("equivobs")


def _run_one(cfg: ScenarioConfig, out: Path, plots: bool = True) -> dict:
    records = run_scenario(cfg)
    summary = emit_outputs(records, out, resolve_group(cfg.group), plots=plots,
                           extra_summary={"config": cfg.to_dict(), "config_digest": cfg.digest()})
    return summary


def cmd_run(args: argparse.Namespace) -> int:
    cfg = ScenarioConfig.load(args.config)
    if args.integrator:
        cfg = replace(cfg, integrator=args.integrator)
    summary = _run_one(cfg, Path(args.out), plots=not args.no_plots)
    print(json.dumps({k: v for k, v in summary.items() if k != "config"}, indent=2, sort_keys=True))
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    report = verify_suite(args.group, seed=args.seed, cases=args.cases,
                          mutate_input_action=args.mutate_input_action)
    print("\n".join(report.lines()))
    return 0 if report.passed else 1


def _sweep_job(job: tuple[dict, str, bool]) -> tuple[str, dict]:
    cfg_dict, out, plots = job
    cfg = ScenarioConfig.from_dict(cfg_dict)
    summary = _run_one(cfg, Path(out), plots=plots)
    return cfg.digest(), summary


def cmd_sweep(args: argparse.Namespace) -> int:
    base = ScenarioConfig.load(args.config)
    if args.integrator:
        base = replace(base, integrator=args.integrator)
    out = Path(args.out)
    jobs = []
    for k1, k2 in itertools.product(args.k1, args.k2):
        cfg = replace(base, k1=k1, k2=k2)
        jobs.append((cfg.to_dict(), str(out / cfg.digest()), not args.no_plots))
    with ProcessPoolExecutor(max_workers=args.jobs) as pool:
        results = list(pool.map(_sweep_job, jobs))
    rows = []
    for digest, s in results:
        rows.append({"digest": digest, "k1": s["config"]["k1"], "k2": s["config"]["k2"],
                     "lyapunov_final": s["lyapunov_final"], "err_A_norm_final": s["err_A_norm_final"],
                     "err_a_norm_final": s["err_a_norm_final"],
                     "log10_lyapunov_slope": s["log10_lyapunov_slope"]})
    out.mkdir(parents=True, exist_ok=True)
    (out / "sweep.json").write_text(json.dumps(rows, indent=2) + "\n")
    for r in rows:
        slope = r["log10_lyapunov_slope"]
        print(f"{r['digest']}  k1={r['k1']:<6g} k2={r['k2']:<6g} L_final={r['lyapunov_final']:.3e} "
              f"slope={'n/a' if slope is None else format(slope, '.3f')}")
    return 0


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="equivobs", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="simulate one scenario and write csv/svg/summary")
    r.add_argument("--config", required=True)
    r.add_argument("--out", required=True)
    r.add_argument("--integrator", choices=INTEGRATORS)
    r.add_argument("--no-plots", action="store_true")
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("verify", help="randomized checks of the algebraic identities")
    v.add_argument("--group", default="se2", help="se2, so3, se3 or a JSON descriptor path")
    v.add_argument("--cases", type=int, default=1000)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--mutate-input-action", action="store_true", help=argparse.SUPPRESS)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sweep", help="run a gain grid, one output directory per config")
    s.add_argument("--config", required=True)
    s.add_argument("--k1", type=_floats, required=True, help="comma separated")
    s.add_argument("--k2", type=_floats, required=True, help="comma separated")
    s.add_argument("--out", required=True)
    s.add_argument("--integrator", choices=INTEGRATORS)
    s.add_argument("--jobs", type=int, default=None)
    s.add_argument("--no-plots", action="store_true")
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
