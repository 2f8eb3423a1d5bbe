"""Command-line front end: ``gen``, ``run``, ``audit`` and ``repro``.

Exit codes: 0 when every check passes, 1 when an audited property is violated
(the witness is reported), 2 for usage or parse errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from decimal import Decimal, localcontext
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import io
from .audit import (
    M3_STATED,
    AuditError,
    Bound,
    audit_group_strategyproof,
    audit_ratio,
    audit_strategyproof,
    default_objective,
    counterexample_fixtures,
    proven_bound,
)
from .generate import GeneratorConfig, generate_corpus
from .mechanisms import Mechanism, run
from .model import Instance, Objective, agent_costs, format_rational, max_cost, sum_cost, to_rational

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2

RATIO_COLUMNS = ("mechanism", "objective", "bound", "instances", "max_ratio", "violations", "verdict", "seed")
DEVIATION_COLUMNS = ("mechanism", "mode", "instances", "deviations_checked", "violations", "verdict", "seed")


class UsageError(Exception):
    pass


def human(q: Fraction) -> str:
    """Decimal rendering, with the exact fraction attached when the decimal is rounded."""
    if q.denominator == 1:
        return str(q.numerator)
    with localcontext() as ctx:
        ctx.prec = 12
        d = Decimal(q.numerator) / Decimal(q.denominator)
    exact = Fraction(d) == q
    return f"{d.normalize()}" if exact else f"{d.normalize()} (={q})"


def _setting_for(mech: Mechanism) -> str:
    if mech.name in ("m1", "m2", "orderstat"):
        return "compulsory"
    if mech.name in ("sc", "mc"):
        return "single"
    return "optional"


def _config(args, mech: Optional[Mechanism] = None) -> GeneratorConfig:
    setting = args.setting or (_setting_for(mech) if mech else "compulsory")
    n_min = args.nmin
    if mech is not None and mech.name == "orderstat":
        n_min = max(n_min, mech.index)
    n_max = args.nmax if args.nmax is not None else (3 if getattr(args, "gsp", False) else 6)
    return GeneratorConfig(
        setting=setting, n_min=n_min, n_max=max(n_max, n_min), m_min=args.mmin, m_max=args.mmax
    )


def _add_corpus_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--size", type=int, default=200, help="number of generated instances")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--setting", choices=("compulsory", "optional", "single"))
    p.add_argument("--nmin", type=int, default=1)
    p.add_argument("--nmax", type=int, default=None)
    p.add_argument("--mmin", type=int, default=2)
    p.add_argument("--mmax", type=int, default=6)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hetfac", description="Two-facility location mechanisms with exact audits."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="write a seeded corpus of instances")
    _add_corpus_flags(gen)
    gen.add_argument("--out", required=True, help="directory, or a .jsonl file")

    runp = sub.add_parser("run", help="run a mechanism on one instance file")
    runp.add_argument("--mech", required=True)
    runp.add_argument("instance", help="instance JSON file")
    runp.add_argument("--human", action="store_true", help="decimal output instead of JSON")

    aud = sub.add_parser("audit", help="ratio, SP or group-SP audit over a corpus")
    aud.add_argument("--mech", required=True)
    aud.add_argument("--objective", choices=("sum", "max"))
    aud.add_argument("--bound", help="ratio bound (defaults to the proven one)")
    mode = aud.add_mutually_exclusive_group()
    mode.add_argument("--sp", action="store_true", help="unilateral deviation search")
    mode.add_argument("--gsp", action="store_true", help="coalitional deviation search")
    aud.add_argument("--coalition", type=int, default=None, help="max coalition size for --gsp")
    src = aud.add_mutually_exclusive_group()
    src.add_argument("--fixtures", action="store_true", help="audit the built-in counterexample instances")
    src.add_argument("--corpus", help="instance file, .jsonl file or directory")
    _add_corpus_flags(aud)
    aud.add_argument("--out", help="directory for report.json and summary.csv")

    sub.add_parser("repro", help="recompute every built-in counterexample")
    return parser


def cmd_gen(args) -> int:
    cfg = _config(args)
    corpus = generate_corpus(cfg, args.size, args.seed)
    paths = io.write_corpus(corpus, args.out)
    print(f"wrote {len(corpus)} instances to {args.out} ({len(paths)} file(s))")
    return EXIT_OK


def run_summary(mech: Mechanism, inst: Instance) -> dict:
    p = run(mech, inst)
    y1, y2 = p.coords(inst)
    return {
        "mechanism": str(mech),
        "slots": [p.slot1, p.slot2],
        "placement": [format_rational(y1), format_rational(y2)],
        "agent_costs": [format_rational(c) for c in agent_costs(p, inst)],
        "sum_cost": format_rational(sum_cost(p, inst)),
        "max_cost": format_rational(max_cost(p, inst)),
    }


def cmd_run(args) -> int:
    mech = Mechanism.parse(args.mech)
    inst = io.loads_instance(Path(args.instance).read_text())
    out = run_summary(mech, inst)
    if not args.human:
        print(json.dumps(out, sort_keys=True))
        return EXIT_OK
    as_q = lambda s: human(Fraction(s))  # noqa: E731
    print(f"mechanism  {out['mechanism']}")
    print(f"F1 at {as_q(out['placement'][0])} (slot {out['slots'][0]}), "
          f"F2 at {as_q(out['placement'][1])} (slot {out['slots'][1]})")
    for i, c in enumerate(out["agent_costs"]):
        print(f"agent {i}  cost {as_q(c)}")
    print(f"sum cost   {as_q(out['sum_cost'])}")
    print(f"max cost   {as_q(out['max_cost'])}")
    return EXIT_OK


def _corpus(args, mech: Mechanism) -> tuple[list[Instance], dict[int, list], Optional[int]]:
    """Instances, per-instance extra misreports, and the seed (None if not generated)."""
    if args.fixtures:
        fx = counterexample_fixtures()
        return [f.instance for f in fx], {k: list(f.deviations) for k, f in enumerate(fx)}, None
    if args.corpus:
        return io.read_corpus(args.corpus), {}, None
    return generate_corpus(_config(args, mech), args.size, args.seed), {}, args.seed


def _write_outputs(out_dir: Optional[str], report: dict, columns, row: dict) -> None:
    text = io.dumps_report(report)
    if out_dir is None:
        sys.stdout.write(text)
        return
    io.write_atomic(Path(out_dir) / "report.json", text)
    io.write_atomic(Path(out_dir) / "summary.csv", io.csv_text([row], columns))


def cmd_audit(args) -> int:
    mech = Mechanism.parse(args.mech)
    corpus, extras, seed = _corpus(args, mech)
    if args.sp or args.gsp:
        mode = "gsp" if args.gsp else "sp"
        checked = violations = 0
        first = None
        for k, inst in enumerate(corpus):
            try:
                if args.gsp:
                    v = audit_group_strategyproof(mech, inst, args.coalition)
                else:
                    v = audit_strategyproof(mech, inst, extras.get(k, ()))
            except AuditError as exc:
                raise UsageError(str(exc)) from None
            checked += v.checked
            if not v.ok:
                violations += 1
                if first is None:
                    first = {"instance_index": k, **v.witness.to_dict()}
        verdict = "pass" if not violations else "fail"
        report = {
            "mechanism": str(mech),
            "mode": mode,
            "instances": len(corpus),
            "deviations_checked": checked,
            "violations": violations,
            "verdict": verdict,
            "witness": first,
            "seed": seed,
        }
        row = {k: report[k] for k in DEVIATION_COLUMNS}
        row["seed"] = "" if seed is None else seed
        _write_outputs(args.out, report, DEVIATION_COLUMNS, row)
        print(f"{mech} {mode}: {verdict} ({violations}/{len(corpus)} instances with a profitable deviation)",
              file=sys.stderr)
        return EXIT_OK if not violations else EXIT_VIOLATION

    objective = Objective.parse(args.objective) if args.objective else default_objective(mech)
    if args.bound is not None:
        bound = Bound.constant(to_rational(args.bound))
    else:
        bound = proven_bound(mech, objective)
        if bound is None:
            raise UsageError(f"no proven bound for {mech} under {objective.value}; pass --bound")
    watch = {"2n+1": M3_STATED} if (mech.name, objective) == ("m3", Objective.SUM) else None
    rep = audit_ratio(mech, objective, corpus, bound, watch=watch, seed=seed)
    _write_outputs(args.out, rep.to_dict(), RATIO_COLUMNS, rep.csv_row())
    print(f"{mech} {objective.value}: max ratio {human(rep.max_ratio)} vs bound {rep.bound} -> {rep.verdict}",
          file=sys.stderr)
    return EXIT_OK if rep.passed else EXIT_VIOLATION


def _show(v) -> str:
    if isinstance(v, tuple):
        return "(" + ", ".join(_show(x) for x in v) + ")"
    if isinstance(v, Fraction):
        return format_rational(v)
    return str(v)


def cmd_repro(args) -> int:
    ok = True
    for fx in counterexample_fixtures():
        print(f"== {fx.name}")
        for r in fx.check():
            ok &= r.ok
            status = "ok" if r.ok else "MISMATCH"
            print(f"  {r.label:<36} claimed {_show(r.expected):<18} computed {_show(r.computed):<18} {status}")
        if fx.mechanism is None:
            continue
        v = audit_strategyproof(fx.mechanism, fx.instance, fx.deviations)
        for agent, x in fx.deviations:
            hit = [w for w in v.witnesses if w.misreports == ((agent, x),)]
            if not hit:
                ok = False
                print(f"  deviation agent {agent + 1} -> {x}: NOT profitable  MISMATCH")
                continue
            before, after = hit[0].costs[0]
            print(f"  deviation agent {agent + 1} reports {format_rational(x)}: "
                  f"cost {format_rational(before)} -> {format_rational(after)}  ok")
        print(f"  {fx.mechanism} SP audit: {len(v.witnesses)} profitable misreports on the grid")
    print("all claims reproduced" if ok else "some claims did not reproduce")
    return EXIT_OK if ok else EXIT_VIOLATION


COMMANDS = {"gen": cmd_gen, "run": cmd_run, "audit": cmd_audit, "repro": cmd_repro}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ValueError, OSError) as exc:
        # io.InstanceFormatError and mechanism setting errors are ValueErrors
        print(f"hetfac {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
