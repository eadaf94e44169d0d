"""Command-line entry point.

Exit codes: 0 success, 2 input error, 3 infeasible instance, 4 capacity.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys

from .constraints import CardinalityConstraint, Strategy
from .exact_cover import (brute_force, constraints_of, describe_selection, load_instance, make_strategy,
                          run_experiment, write_results_csv)
from .exceptions import CagroverError, CapacityError, InfeasibleError
from .grover import Mode, run
from .noise import FULL_PLAN, NoiseModel, ShotPlan, count_rows, write_counts_csv
from .resources import (METRICS, ResourceTally, diffusion_core_circuit, efficiency_bound, proposition_check,
                        prop1_simplified, prop2_simplified, prop3_simplified, tally, total_cost)
from .stateprep import PreparedStateKind, build_initializer

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_CAPACITY = 0, 2, 3, 4


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _default_spec(constraints) -> str:
    card = [isinstance(c, CardinalityConstraint) for c in constraints]
    if all(card):
        return "cardinality"
    return "parity" if not any(card) else "mixed"


def _specs(args, constraints) -> list[str]:
    return args.strategy or [_default_spec(constraints)]


def _parse_kappas(text: str, strategy: Strategy, sweep: bool):
    text = (text or "auto").strip().lower()
    if text == "auto":
        k = strategy.kappa_opt
        return list(range(0, 2 * k + 1)) if sweep else [k]
    if ":" in text:
        lo, hi = (int(v) for v in text.split(":", 1))
        if lo < 0 or hi < lo:
            raise ValueError(f"bad query range {text!r}")
        return list(range(lo, hi + 1))
    k = int(text)
    if k < 0:
        raise ValueError("kappa must be >= 0")
    return list(range(0, k + 1)) if sweep else [k]


def _plan(args) -> ShotPlan:
    if args.full_plan:
        return ShotPlan(FULL_PLAN.runs, FULL_PLAN.shots_per_run, args.seed)
    return ShotPlan(args.runs, args.shots, args.seed)


def _noise(args) -> NoiseModel | None:
    if not (args.noise or args.p1 is not None or args.p2 is not None):
        return None
    return NoiseModel(1e-5 if args.p1 is None else args.p1, 1e-4 if args.p2 is None else args.p2)


# Commands -------------------------------------------------------------------

def cmd_preprocess(args) -> int:
    inst = load_instance(args.instance)
    constraints = constraints_of(inst)
    sols = brute_force(inst)
    if not sols.bitstrings:
        raise InfeasibleError("instance has no solution")
    rows = []
    for spec in _specs(args, constraints):
        s = make_strategy(inst, spec, args.eta, sols)
        print(f"strategy {s.name}")
        for line in describe_selection(s.selection):
            print("  " + line)
        print(f"  |F| = {s.search_space}  reduction = {s.reduction_factor}  |S| = {s.solutions}  "
              f"kappa_opt = {s.kappa_opt}")
        for b in s.selection.blocks:
            kind = "reduced" if not hasattr(b, "kind") else b.kind
            rows.append((s.name, kind, " ".join(map(str, b.members)), b.target,
                         "" if b.source is None else b.source + 1, s.search_space, s.kappa_opt))
        if not s.selection.blocks:
            rows.append((s.name, "none", "", "", "", s.search_space, s.kappa_opt))
    if args.out:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("strategy", "block", "members", "target", "constraint", "F", "kappa"))
        w.writerows(rows)
        _emit(buf.getvalue(), args.out)
    return EXIT_OK


def _experiment(args, sweep: bool) -> int:
    inst = load_instance(args.instance)
    constraints = constraints_of(inst)
    noise = _noise(args)
    mode = Mode.CIRCUIT_NOISY if noise else Mode.IDEAL
    rows = []
    for spec in _specs(args, constraints):
        s = make_strategy(inst, spec, args.eta)
        if s.solutions is None:
            raise InfeasibleError("instance has no solution")
        ks = _parse_kappas(args.kappa, s, sweep)
        rows += run_experiment(inst, spec, ks, args.eta, mode, _plan(args), noise)
    _emit(write_results_csv(rows), args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    return _experiment(args, sweep=False)


def cmd_sweep(args) -> int:
    return _experiment(args, sweep=True)


def cmd_noise(args) -> int:
    inst = load_instance(args.instance)
    constraints = constraints_of(inst)
    noise = _noise(args) or NoiseModel(1e-5, 1e-4)
    plan = _plan(args)
    rows = []
    for spec in _specs(args, constraints):
        s = make_strategy(inst, spec, args.eta)
        if s.solutions is None:
            raise InfeasibleError("instance has no solution")
        ks = _parse_kappas(args.kappa, s, sweep=False)
        f = brute_force(inst).predicate()
        result = run(s, f, max(ks), Mode.CIRCUIT_NOISY, plan, noise).final
        rows += count_rows(s.name, result, ks)
    _emit(write_counts_csv(rows), args.out)
    return EXIT_OK


def _block_rows(args) -> list[tuple]:
    kind = PreparedStateKind(args.block, args.mu, args.parity if args.block == "ghz_x" else 1,
                             0 if args.block == "dicke11" else 1, 1)
    t = tally(kind.circuit())
    return [(args.block, args.mu, args.parity, *t.as_tuple())]


def cmd_resources(args) -> int:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if args.block:
        if args.mu is None:
            raise ValueError("--block needs --mu")
        w.writerow(("block", "mu", "parity", "total_gates", "two_qubit_gates", "depth"))
        w.writerows(_block_rows(args))
    elif args.prop:
        if args.mu is None or args.od is None:
            raise ValueError("--prop needs --mu and --od")
        prop = args.prop.upper()
        if args.s_next is None:
            rhs = {"P1": prop1_simplified, "P2": prop2_simplified, "P3": prop3_simplified}[prop](args.mu)
            s_next, s_prev = "", ""
            sufficient = args.od > rhs
        else:
            s_next, s_prev = args.s_next, args.s_prev
            res = proposition_check(prop, args.mu, s_next, s_prev, args.od)
            rhs, sufficient = res.rhs, res.sufficient
        w.writerow(("proposition", "mu", "s_next", "s_prev", "od", "rhs", "sufficient"))
        w.writerow((prop, args.mu, s_next, s_prev, repr(float(args.od)), repr(float(rhs)),
                    str(sufficient).lower()))
    else:
        if not args.instance:
            raise ValueError("resources needs --instance, --block or --prop")
        inst = load_instance(args.instance)
        constraints = constraints_of(inst)
        core = tally(diffusion_core_circuit(inst.n), decompose=args.mcx_model == "vchain")
        base = make_strategy(inst, "uniform")
        base_prep = tally(build_initializer(base)[0])
        w.writerow(("strategy", "metric", "S", "O", "D", "kappa", "R", "efficiency_bound", "beats_uniform"))
        for spec in _specs(args, constraints):
            s = make_strategy(inst, spec, args.eta)
            prep = tally(build_initializer(s)[0])
            for m in METRICS:
                r = total_cost(prep[m], args.oracle_cost, core[m], s.kappa_opt)
                r0 = total_cost(base_prep[m], args.oracle_cost, core[m], base.kappa_opt)
                bound = ""
                if s.kappa_opt < base.kappa_opt:
                    bound = repr(float(efficiency_bound(prep[m], base_prep[m], s.kappa_opt, base.kappa_opt)))
                w.writerow((s.name, m, prep[m], repr(float(args.oracle_cost)), core[m], s.kappa_opt,
                            repr(float(r)), bound, str(r < r0).lower()))
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


# Parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cagrover", description="Constraint-aware Grover search experiments.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, instance_required=True):
        sp.add_argument("--instance", required=instance_required, help="instance text file")
        sp.add_argument("--strategy", action="append",
                        help="uniform | cardinality | parity | mixed | sets:<list> (repeatable)")
        sp.add_argument("--eta", type=int, default=0, help="overlap threshold for reduced sets")
        sp.add_argument("--out", help="write CSV here instead of stdout")

    def shots(sp):
        sp.add_argument("--kappa", default="auto", help="auto, an integer, or an inclusive range a:b")
        sp.add_argument("--runs", type=int, default=20)
        sp.add_argument("--shots", type=int, default=250)
        sp.add_argument("--full-plan", action="store_true", help="20 runs of 1000 shots")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--noise", action="store_true", help="enable depolarizing noise (default rates)")
        sp.add_argument("--p1", type=float, help="one-qubit error rate (enables noise)")
        sp.add_argument("--p2", type=float, help="two-qubit error rate (enables noise)")

    sp = sub.add_parser("preprocess", help="select constraint blocks and report |F| and kappa")
    common(sp)
    sp.set_defaults(func=cmd_preprocess)

    for name, func, text in (("simulate", cmd_simulate, "one query count per strategy"),
                             ("sweep", cmd_sweep, "success versus query count"),
                             ("noise", cmd_noise, "per-run noisy solution counts")):
        sp = sub.add_parser(name, help=text)
        common(sp)
        shots(sp)
        sp.set_defaults(func=func)

    sp = sub.add_parser("resources", help="gate tallies, total cost and sufficient conditions")
    common(sp, instance_required=False)
    sp.add_argument("--oracle-cost", type=float, default=0.0, help="oracle cost O in every metric")
    sp.add_argument("--mcx-model", choices=("native", "vchain"), default="vchain",
                    help="count the multi-controlled X as one gate or as its V-chain")
    sp.add_argument("--block", choices=("dicke1", "dicke11", "ghz_x"), help="tally a single block circuit")
    sp.add_argument("--mu", type=int, help="block size")
    sp.add_argument("--parity", type=int, choices=(0, 1), default=0)
    sp.add_argument("--prop", choices=("P1", "P2", "P3", "p1", "p2", "p3"), help="sufficient-condition check")
    sp.add_argument("--od", type=float, help="oracle plus diffusion cost O+D")
    sp.add_argument("--s-next", type=float, help="preparation cost with the extra block")
    sp.add_argument("--s-prev", type=float, default=0.0, help="preparation cost without it")
    sp.set_defaults(func=cmd_resources)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        for rate in (getattr(args, "p1", None), getattr(args, "p2", None)):
            if rate is not None and not 0 <= rate <= 1:
                raise ValueError(f"error rate {rate} outside [0, 1]")
        return args.func(args)
    except InfeasibleError as e:
        print(f"infeasible: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except CapacityError as e:
        print(f"capacity: {e}", file=sys.stderr)
        return EXIT_CAPACITY
    except (CagroverError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
