"""Command-line entry point.

Subcommands: run (experiment protocol), interactions (variable-interaction
matrix), plot (figures from a results tree), validate (config diagnostics),
sections (catalog summary).  Exit codes: 0 success, 1 configuration error,
2 runtime failure.  The default output root is $FRAMEFX_OUT or ./results.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .config import BUNDLED_CONFIGS, ConfigError, load_frame_config
from .fea import StructuralInstabilityError, analyze
from .fx import reduced_dimension
from .grouping import interaction_matrix, render_matrix
from .harness import ExperimentPlan, PlanMismatchError, build_problem, cell_name, \
    default_cell_settings, load_records, mean_history, practicality_report, run_plan
from .sections import load_bundled_pool, load_section_table, BUNDLED_POOLS
from .svgplot import line_chart

PROBLEM_CHOICES = ("stepped-column", "sphere")


def _add_problem_args(p, with_seed=True):
    p.add_argument("--problem", choices=PROBLEM_CHOICES,
                   help="built-in problem (use --config for frames)")
    p.add_argument("--config", help="frame config path or bundled name: "
                   + ", ".join(sorted(BUNDLED_CONFIGS)))
    p.add_argument("--segments", type=int, default=50,
                   help="stepped column: number of segments")
    p.add_argument("--segment-length", type=float, default=10.0,
                   help="stepped column: segment length, cm")
    p.add_argument("--tip-load", type=float, default=10.0,
                   help="stepped column: lateral tip load, kN")
    p.add_argument("--allowable-stress", type=float, default=16.0,
                   help="stepped column: allowable bending stress, kN/cm^2")
    p.add_argument("--density", type=float, default=0.00785,
                   help="stepped column: material density, kg/cm^3")
    p.add_argument("--dimension", type=int, default=5, help="sphere: dimension")
    if with_seed:
        p.add_argument("--seed", type=int, default=0, help="base RNG seed")


def _problem_spec(args) -> dict:
    if args.config:
        return {"kind": "frame", "config": args.config}
    if args.problem == "sphere":
        return {"kind": "sphere", "dimension": args.dimension}
    if args.problem == "stepped-column" or args.problem is None:
        return {
            "kind": "stepped-column",
            "segment_count": args.segments,
            "segment_length": args.segment_length,
            "tip_load": args.tip_load,
            "allowable_stress": args.allowable_stress,
            "density": args.density,
        }
    raise ConfigError([f"unknown problem {args.problem!r}"])


def _out_root(args) -> Path:
    return Path(args.out or os.environ.get("FRAMEFX_OUT") or "results")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="framefx",
        description="Steel frame design optimization with variable functioning.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run the experiment protocol")
    _add_problem_args(run_p)
    run_p.add_argument("--algo", default="all", help="pso, de, or all")
    run_p.add_argument("--strategy", default="all",
                       help="comma list of none,ifx,fx, or all")
    run_p.add_argument("--trials", type=int, default=51, help="trials per cell")
    run_p.add_argument("--pop", type=int, help="population size for every cell")
    run_p.add_argument("--max-fe", type=int, help="FE budget for every cell")
    run_p.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                       help="parallel trial workers")
    run_p.add_argument("--out", help="output root (default $FRAMEFX_OUT or ./results)")
    run_p.add_argument("--plan-name", help="results subdirectory (default: problem name)")

    int_p = sub.add_parser("interactions", help="build the variable-interaction matrix")
    _add_problem_args(int_p, with_seed=False)
    int_p.add_argument("--eta", type=float, default=1e-10,
                       help="relative adjacency threshold")
    int_p.add_argument("--jobs", type=int, default=1,
                       help="parallel evaluation workers")
    int_p.add_argument("--out", help="output root (default $FRAMEFX_OUT or ./results)")

    plot_p = sub.add_parser("plot", help="emit figures for finished plans")
    plot_p.add_argument("results", help="a plan directory or a results root")

    val_p = sub.add_parser("validate", help="check a config and report its design space")
    _add_problem_args(val_p, with_seed=False)

    sec_p = sub.add_parser("sections", help="summarize a section catalog")
    sec_p.add_argument("--pool", default="w-all",
                       help="bundled pool name or a CSV path")
    return parser


def cmd_run(args) -> int:
    spec = _problem_spec(args)
    problem = build_problem(spec)  # validates config before touching the output tree

    algorithms = ("pso", "de") if args.algo == "all" else tuple(args.algo.split(","))
    strategies = ("none", "ifx", "fx") if args.strategy == "all" \
        else tuple(args.strategy.split(","))
    population, max_fe = default_cell_settings(problem)
    if args.pop:
        population = {s: args.pop for s in population}
    if args.max_fe:
        max_fe = {s: args.max_fe for s in max_fe}

    plan = ExperimentPlan(
        name=args.plan_name or problem.name,
        problem_spec=spec,
        strategies=strategies,
        algorithms=algorithms,
        trials=args.trials,
        seed_base=args.seed,
        population=population,
        max_fe=max_fe,
    )
    out_root = _out_root(args)
    records, summaries, n_new = run_plan(plan, out_root, jobs=args.jobs,
                                         echo=lambda msg: print(msg))
    print(f"resumed: {n_new} new trials" if n_new == 0
          else f"completed {n_new} new trials")
    print(f"results: {out_root / plan.name}")
    print()
    header = f"{'cell':<12}{'median':>14}{'mean':>14}{'best':>14}{'vs none %':>12}"
    print(header)
    print("-" * len(header))
    for s in summaries:
        imp = "" if s.improvement_vs_none_pct is None \
            else f"{s.improvement_vs_none_pct:.2f}"
        print(f"{cell_name(s.algorithm, s.strategy):<12}{s.median:>14.4f}"
              f"{s.mean:>14.4f}{s.best:>14.4f}{imp:>12}")
    return 0


def cmd_interactions(args) -> int:
    spec = _problem_spec(args)
    problem = build_problem(spec)
    probe = problem.probe
    if probe is None:
        raise ConfigError([f"problem {problem.name} has no continuous relaxation "
                           f"for interaction analysis"])
    matrix = interaction_matrix(probe.f, probe.lower, probe.upper, eta=args.eta,
                                workers=args.jobs)
    out_dir = _out_root(args) / f"{problem.name}-interactions"
    paths = render_matrix(matrix, out_dir)
    n_edges = int(matrix.adjacency.sum() - matrix.n)  # off-diagonal, both directions
    print(f"interaction matrix: n={matrix.n}, fe_cost={matrix.fe_cost}, "
          f"interacting pairs={n_edges // 2}")
    print(f"wrote {paths['csv']}")
    print(f"wrote {paths['svg']}")
    return 0


def _plan_dirs(root: Path):
    if (root / "plan.json").exists():
        return [root]
    return sorted(p.parent for p in root.glob("*/plan.json"))


def cmd_plot(args) -> int:
    root = Path(args.results)
    plans = _plan_dirs(root) if root.exists() else []
    if not plans:
        raise ConfigError([f"no finished plans under {root}"])
    for plan_dir in plans:
        plan = ExperimentPlan.from_manifest(
            json.loads((plan_dir / "plan.json").read_text(encoding="utf-8")))
        records = load_records(plan_dir, plan)
        fig_dir = plan_dir / "figures"
        fig_dir.mkdir(exist_ok=True)

        conv, infea = [], []
        for algorithm, strategy in plan.cells():
            cell = cell_name(algorithm, strategy)
            fe, best, frac = mean_history(records[cell])
            conv.append((cell, fe.tolist(), best.tolist()))
            infea.append((cell, fe.tolist(), frac.tolist()))
        line_chart(fig_dir / "convergence.svg", conv,
                   title=f"{plan.name}: mean best feasible objective",
                   xlabel="function evaluations", ylabel="objective")
        line_chart(fig_dir / "infeasible.svg", infea,
                   title=f"{plan.name}: mean infeasible fraction",
                   xlabel="function evaluations", ylabel="infeasible fraction")
        written = ["figures/convergence.svg", "figures/infeasible.svg"]

        problem = build_problem(plan.problem_spec)
        if problem.frame is not None and problem.rules:
            profiles = []
            csv_lines = ["cell,stack,group_id,height_cm,area_cm2,normalized"]
            for algorithm, strategy in plan.cells():
                cell = cell_name(algorithm, strategy)
                done = [r for r in records[cell]
                        if not r.failed and r.final_feasible]
                if not done:
                    continue
                best = min(done, key=lambda r: r.final_objective)
                for k, rep in enumerate(practicality_report(best, problem)):
                    profiles.append((f"{cell}/stack{k}", rep["heights_cm"],
                                     rep["normalized"]))
                    for g, h, a, nrm in zip(rep["group_ids"], rep["heights_cm"],
                                            rep["areas_cm2"], rep["normalized"]):
                        csv_lines.append(f"{cell},{k},{g},{h!r},{a!r},{nrm!r}")
            if profiles:
                line_chart(fig_dir / "column_profiles.svg", profiles,
                           title=f"{plan.name}: column area profiles (base = 1)",
                           xlabel="height above base, cm", ylabel="area / base area")
                (fig_dir / "profiles.csv").write_text(
                    "\n".join(csv_lines) + "\n", encoding="utf-8")
                written += ["figures/column_profiles.svg", "figures/profiles.csv"]
        for w in written:
            print(f"wrote {plan_dir / w}")
    return 0


def cmd_validate(args) -> int:
    spec = _problem_spec(args)
    if spec["kind"] == "frame":
        doc = load_frame_config(spec["config"])  # raises ConfigError with fields
        print(f"config ok: {doc['name']}")
    problem = build_problem(spec)
    n = problem.dimension
    if problem.rules:
        reduced = reduced_dimension(problem.rules, n)
        print(f"{n} variables, {reduced} under functioning")
    else:
        print(f"{n} variables, no functioning rules declared")
    if problem.frame is not None:
        ctx = problem.frame
        fams = ", ".join(sorted(ctx.constraint_set.families))
        print(f"constraint families: {fams}")
        largest = tuple(pool[len(pool) - 1] for pool in ctx.pools)
        result = analyze(ctx.model, largest)  # probe at the stiffest sections
        ev = problem.evaluate(np.array([len(p) - 1 for p in ctx.pools], dtype=float))
        print(f"probe at largest sections: max lateral displacement "
              f"{result.max_lateral_displacement:.4f} cm, "
              f"{'feasible' if ev.feasible else 'infeasible'}, "
              f"weight {ev.objective:.1f} kg")
    return 0


def cmd_sections(args) -> int:
    if args.pool in BUNDLED_POOLS:
        pool = load_bundled_pool(args.pool)
    else:
        pool = load_section_table(args.pool, label=args.pool)
    print(f"pool {pool.label or args.pool}: {len(pool)} shapes")
    print(f"area range: {pool.min_area:.2f} .. {pool.max_area:.2f} cm^2")
    print(f"lightest: {pool[0].name}  heaviest: {pool[len(pool) - 1].name}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "run": cmd_run,
        "interactions": cmd_interactions,
        "plot": cmd_plot,
        "validate": cmd_validate,
        "sections": cmd_sections,
    }
    try:
        return handlers[args.command](args)
    except (ConfigError, PlanMismatchError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except StructuralInstabilityError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
