"""Empirical checks of truthfulness and approximation claims.

Deviation searches run over a finite grid of misreports that hits every cell
of the arrangement formed by the zone borders and the single-facility
midpoints; all mechanisms here are constant on those cells, so the grid sees
every output an agent (or coalition) can force.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence, Union

from .generate import GeneratorConfig, random_instance
from .mechanisms import OPT_MC, OPT_SC, Mechanism, M1, M2, run
from .model import (
    Agent,
    Instance,
    Objective,
    Placement,
    agent_cost,
    format_rational,
)
from .oracle import brute_force_opt
from . import io as _io


class AuditError(ValueError):
    pass


# ---------------------------------------------------------------------------
# misreport grids


def breakpoints(alternatives: Sequence[Fraction]) -> list[Fraction]:
    """Zone borders plus midpoints of consecutive alternatives, sorted, distinct."""
    a = sorted(alternatives)
    pts = {(a[k] + a[k + 2]) / 2 for k in range(len(a) - 2)}
    pts.update((a[k] + a[k + 1]) / 2 for k in range(len(a) - 1))
    return sorted(pts)


def _delta(bps: Sequence[Fraction]) -> Fraction:
    gaps = [hi - lo for lo, hi in zip(bps, bps[1:]) if hi > lo]
    return min(gaps) / 4 if gaps else Fraction(1)


def candidate_misreports(inst: Instance, agent: int) -> list[Fraction]:
    if not 0 <= agent < inst.n:
        raise IndexError(f"agent {agent} out of range")
    alts = inst.alternatives
    bps = breakpoints(alts)
    d = _delta(bps)
    span = alts[-1] - alts[0]
    pts = set(alts)
    for b in bps:
        pts.update((b - d, b, b + d))
    pts.update(x for i, x in enumerate(inst.locations) if i != agent)
    pts.update((alts[0] - span - 1, alts[-1] + span + 1))
    return sorted(pts)


def cell_representatives(alternatives: Sequence[Fraction]) -> list[Fraction]:
    """One point per cell of the breakpoint arrangement.

    Cells are the breakpoints themselves, the open gaps between them and the
    two unbounded rays.
    """
    bps = breakpoints(alternatives)
    reps = [bps[0] - 1]
    for lo, hi in zip(bps, bps[1:]):
        reps += [lo, (lo + hi) / 2]
    reps += [bps[-1], bps[-1] + 1]
    return reps


def dense_grid(inst: Instance, agent: int, factor: int = 10) -> list[Fraction]:
    """Uniform grid ``factor`` times denser than the candidate grid."""
    alts = inst.alternatives
    span = alts[-1] - alts[0]
    lo, hi = alts[0] - span - 1, alts[-1] + span + 1
    k = factor * len(candidate_misreports(inst, agent))
    return [lo + (hi - lo) * j / k for j in range(k + 1)]


# ---------------------------------------------------------------------------
# deviations


@dataclass(frozen=True)
class DeviationWitness:
    """A (coalitional) misreport after which every deviator is strictly better off."""

    agents: tuple[int, ...]
    instance: Instance
    misreports: tuple[tuple[int, Fraction], ...]
    costs: tuple[tuple[Fraction, Fraction], ...]
    truthful: Placement
    reported: Placement

    @property
    def gain(self) -> Fraction:
        return min(before - after for before, after in self.costs)

    def to_dict(self) -> dict:
        return {
            "agents": list(self.agents),
            "instance": _io.instance_to_dict(self.instance),
            "misreports": [{"agent": i, "x": format_rational(x)} for i, x in self.misreports],
            "costs": [
                {"agent": i, "before": format_rational(b), "after": format_rational(a)}
                for i, (b, a) in zip(self.agents, self.costs)
            ],
            "truthful_placement": list(self.truthful),
            "reported_placement": list(self.reported),
        }


def evaluate_deviation(
    mech: Mechanism, inst: Instance, misreports: dict[int, Fraction]
) -> tuple[Placement, Placement, dict[int, tuple[Fraction, Fraction]]]:
    """Truthful and reported outcomes plus each deviator's true cost before/after."""
    truthful = run(mech, inst)
    xs = list(inst.locations)
    for i, x in misreports.items():
        xs[i] = x
    reported = run(mech, inst.with_locations(xs))
    costs = {}
    for i in misreports:
        a = inst.agents[i]
        costs[i] = (agent_cost(truthful, a.x, a.pref, inst), agent_cost(reported, a.x, a.pref, inst))
    return truthful, reported, costs


@dataclass
class AuditVerdict:
    mechanism: Mechanism
    ok: bool
    checked: int
    witness: Optional[DeviationWitness] = None
    witnesses: list[DeviationWitness] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "mechanism": str(self.mechanism),
            "verdict": "pass" if self.ok else "fail",
            "deviations_checked": self.checked,
            "witness": self.witness.to_dict() if self.witness else None,
        }


def _witness_key(w: DeviationWitness):
    (i, x), = w.misreports
    return (-w.gain, i, abs(x - w.instance.agents[i].x), x)


def audit_strategyproof(
    mech: Mechanism,
    inst: Instance,
    extra_candidates: Iterable[tuple[int, Fraction]] = (),
) -> AuditVerdict:
    """Unilateral deviation search over the candidate grid of every agent.

    ``extra_candidates`` adds specific (agent, report) pairs. When profitable
    deviations exist, ``witness`` is the largest gain (then lowest agent,
    then smallest lie) and ``witnesses`` holds all of them.
    """
    truthful = run(mech, inst)
    extras: dict[int, set[Fraction]] = {}
    for i, x in extra_candidates:
        extras.setdefault(i, set()).add(x)
    xs = list(inst.locations)
    found: list[DeviationWitness] = []
    checked = 0
    for i, agent in enumerate(inst.agents):
        before = agent_cost(truthful, agent.x, agent.pref, inst)
        if before == 0:
            checked += 1
            continue
        cands = set(candidate_misreports(inst, i)) | extras.get(i, set())
        for x in sorted(cands):
            if x == agent.x:
                continue
            checked += 1
            xs[i] = x
            reported = run(mech, inst.with_locations(xs))
            after = agent_cost(reported, agent.x, agent.pref, inst)
            if after < before:
                found.append(
                    DeviationWitness((i,), inst, ((i, x),), ((before, after),), truthful, reported)
                )
        xs[i] = agent.x
    found.sort(key=_witness_key)
    return AuditVerdict(mech, not found, checked, found[0] if found else None, found)


def audit_group_strategyproof(
    mech: Mechanism,
    inst: Instance,
    max_coalition: Optional[int] = None,
    cap: int = 4,
) -> AuditVerdict:
    """Exhaustive joint-misreport search over all coalitions up to ``max_coalition``.

    For cell-measurable mechanisms the grid is collapsed to one point per
    cell, which leaves the set of reachable outputs unchanged. A coalition is
    only searched if some placement would leave all its members strictly
    better off.
    """
    if inst.n > cap:
        raise AuditError("instance too large for exhaustive group audit")
    k_max = inst.n if max_coalition is None else min(max_coalition, inst.n)
    truthful = run(mech, inst)
    before = [agent_cost(truthful, a.x, a.pref, inst) for a in inst.agents]

    placements = [Placement(s1, s2) for s1 in range(inst.m) for s2 in range(inst.m) if s1 != s2]
    improving = [
        {p for p in placements if agent_cost(p, a.x, a.pref, inst) < before[i]}
        for i, a in enumerate(inst.agents)
    ]
    if mech.cell_measurable:
        shared = cell_representatives(inst.alternatives)
        grids = [shared] * inst.n
    else:
        grids = [candidate_misreports(inst, i) for i in range(inst.n)]

    checked = 0
    xs = list(inst.locations)
    for size in range(1, k_max + 1):
        for coalition in itertools.combinations(range(inst.n), size):
            targets = set.intersection(*(improving[i] for i in coalition))
            if not targets:
                continue
            for reports in itertools.product(*(grids[i] for i in coalition)):
                checked += 1
                for i, x in zip(coalition, reports):
                    xs[i] = x
                reported = run(mech, inst.with_locations(xs))
                if reported in targets:
                    agents = [inst.agents[i] for i in coalition]
                    costs = tuple(
                        (before[i], agent_cost(reported, a.x, a.pref, inst))
                        for i, a in zip(coalition, agents)
                    )
                    w = DeviationWitness(
                        coalition, inst, tuple(zip(coalition, reports)), costs, truthful, reported
                    )
                    return AuditVerdict(mech, False, checked, w, [w])
            for i in coalition:
                xs[i] = inst.agents[i].x
    return AuditVerdict(mech, True, checked)


# ---------------------------------------------------------------------------
# approximation ratios


@dataclass(frozen=True)
class Bound:
    """``max(per_agent * n + const, floor)``; a plain constant when per_agent is 0."""

    const: Fraction = Fraction(0)
    per_agent: Fraction = Fraction(0)
    floor: Optional[Fraction] = None

    def __call__(self, inst: Instance) -> Fraction:
        v = self.per_agent * inst.n + self.const
        return v if self.floor is None else max(v, self.floor)

    def __str__(self) -> str:
        if not self.per_agent:
            base = format_rational(self.const)
        else:
            base = f"{format_rational(self.per_agent)}n"
            if self.const:
                base += f"{'+' if self.const > 0 else '-'}{format_rational(abs(self.const))}"
        return base if self.floor is None else f"max({base}, {format_rational(self.floor)})"

    @classmethod
    def constant(cls, value) -> "Bound":
        return cls(const=Fraction(value))


PROVEN_BOUNDS: dict[tuple[str, Objective], Bound] = {
    ("m1", Objective.SUM): Bound.constant(3),
    ("m2", Objective.MAX): Bound.constant(3),
    ("m3", Objective.SUM): Bound(const=Fraction(1), per_agent=Fraction(2), floor=Fraction(15)),
    ("m4", Objective.MAX): Bound.constant(9),
    ("sc", Objective.SUM): Bound.constant(3),
    ("mc", Objective.MAX): Bound.constant(3),
    ("opt-sc", Objective.SUM): Bound.constant(1),
    ("opt-mc", Objective.MAX): Bound.constant(1),
}

# the bound as stated for the optional sum-cost mechanism, tracked but not enforced
M3_STATED = Bound(const=Fraction(1), per_agent=Fraction(2))


def proven_bound(mech: Mechanism, objective: Objective) -> Optional[Bound]:
    return PROVEN_BOUNDS.get((mech.name, objective))


def default_objective(mech: Mechanism) -> Objective:
    return Objective.SUM if mech.name in ("m1", "m3", "sc", "opt-sc") else Objective.MAX


@dataclass
class RatioReport:
    mechanism: Mechanism
    objective: Objective
    bound: Bound
    instances: int
    max_ratio: Fraction
    argmax_instance: Optional[Instance]
    argmax_index: int
    verdict: str
    violations: int = 0
    unbounded: int = 0
    watch_counts: dict[str, int] = field(default_factory=dict)
    seed: Optional[int] = None

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        return {
            "mechanism": str(self.mechanism),
            "objective": self.objective.value,
            "bound": str(self.bound),
            "instances": self.instances,
            "max_ratio": format_rational(self.max_ratio),
            "argmax_index": self.argmax_index,
            "argmax_instance": (
                _io.instance_to_dict(self.argmax_instance) if self.argmax_instance else None
            ),
            "verdict": self.verdict,
            "violations": self.violations,
            "unbounded": self.unbounded,
            "watch_counts": dict(sorted(self.watch_counts.items())),
            "seed": self.seed,
        }

    def csv_row(self) -> dict:
        return {
            "mechanism": str(self.mechanism),
            "objective": self.objective.value,
            "bound": str(self.bound),
            "instances": self.instances,
            "max_ratio": format_rational(self.max_ratio),
            "violations": self.violations,
            "verdict": self.verdict,
            "seed": "" if self.seed is None else self.seed,
        }


def instance_ratio(mech: Mechanism, objective: Objective, inst: Instance) -> Optional[Fraction]:
    """Exact cost(mechanism) / cost(optimum); None when the optimum is 0 but the mechanism is not."""
    cost = objective(run(mech, inst), inst)
    opt = brute_force_opt(inst, objective).value
    if opt == 0:
        return Fraction(1) if cost == 0 else None
    return cost / opt


def audit_ratio(
    mech: Mechanism,
    objective: Objective,
    corpus: Sequence[Instance],
    bound: Union[Bound, Fraction, int],
    watch: Optional[dict[str, Bound]] = None,
    seed: Optional[int] = None,
) -> RatioReport:
    """Exact ratio on every instance; ``watch`` bounds are counted, never enforced."""
    if not isinstance(bound, Bound):
        bound = Bound.constant(bound)
    watch = watch or {}
    counts = {label: 0 for label in watch}
    best, best_idx = Fraction(0), -1
    violations = unbounded = 0
    for idx, inst in enumerate(corpus):
        r = instance_ratio(mech, objective, inst)
        if r is None:
            unbounded += 1
            continue
        if r > bound(inst):
            violations += 1
        for label, b in watch.items():
            if r > b(inst):
                counts[label] += 1
        if r > best:
            best, best_idx = r, idx
    verdict = "unbounded" if unbounded else ("fail" if violations else "pass")
    return RatioReport(
        mech,
        objective,
        bound,
        len(corpus),
        best,
        corpus[best_idx] if best_idx >= 0 else None,
        best_idx,
        verdict,
        violations,
        unbounded,
        counts,
        seed,
    )


# ---------------------------------------------------------------------------
# worst-case search


def _snap(q: Fraction, max_den: int) -> Fraction:
    return q.limit_denominator(max_den)


def _mutate(rng: random.Random, inst: Instance, cfg: GeneratorConfig) -> Instance:
    xs = list(inst.locations)
    prefs = list(inst.prefs)
    alts = list(inst.alternatives)
    lo, hi = Fraction(cfg.low), Fraction(cfg.high)
    den = 4 * cfg.max_denominator
    move = rng.randrange(7)
    if move == 0:
        # jitter an agent
        i = rng.randrange(len(xs))
        xs[i] = _snap(xs[i] + Fraction(rng.randint(-50, 50), cfg.max_denominator), den)
    elif move == 1:
        # jitter an alternative
        k = rng.randrange(len(alts))
        alts[k] = _snap(alts[k] + Fraction(rng.randint(-50, 50), cfg.max_denominator), den)
    elif move == 2:
        # pull an alternative halfway toward a neighbour, tightening a pair
        k = rng.randrange(len(alts))
        j = k + rng.choice((-1, 1))
        if 0 <= j < len(alts):
            alts[k] = _snap((alts[k] + alts[j]) / 2, den)
    elif move == 3:
        # put an agent exactly on a zone border or an alternative
        i = rng.randrange(len(xs))
        targets = breakpoints(alts) + alts
        xs[i] = rng.choice(targets)
    elif move == 4 and len(xs) < cfg.n_max:
        i = rng.randrange(len(xs))
        xs.append(xs[i])
        prefs.append(prefs[i])
    elif move == 4 and len(xs) > cfg.n_min:
        i = rng.randrange(len(xs))
        del xs[i], prefs[i]
    elif move == 5 and len(alts) < cfg.m_max:
        alts.append(rng.choice(alts))
    elif move == 5 and len(alts) > cfg.m_min:
        del alts[rng.randrange(len(alts))]
    else:
        # pull an agent halfway toward an alternative
        i = rng.randrange(len(xs))
        xs[i] = _snap((xs[i] + rng.choice(alts)) / 2, den)
    xs = [min(max(x, lo), hi) for x in xs]
    alts = [min(max(a, lo), hi) for a in alts]
    return Instance(tuple(Agent(x, p) for x, p in zip(xs, prefs)), tuple(alts))


def worst_case_search(
    mech: Mechanism,
    objective: Objective,
    config: GeneratorConfig,
    effort: int,
    seed: int = 0,
    seeds: Sequence[Instance] = (),
    restarts: int = 20,
) -> RatioReport:
    """Random restarts plus hill climbing on the exact ratio.

    ``effort`` is the total number of instances evaluated. Each restart starts
    from a seed instance (if any are left) or a random one and accepts
    mutations that do not lower the ratio.
    """
    rng = random.Random(seed)
    per_restart = max(1, effort // restarts)
    pending = list(seeds)
    best_r, best_inst = Fraction(0), None
    evaluated = 0

    def score(inst: Instance) -> Fraction:
        r = instance_ratio(mech, objective, inst)
        # a zero optimum with a positive mechanism cost is the worst case there is
        return Fraction(10**9) if r is None else r

    while evaluated < effort:
        cur = pending.pop(0) if pending else random_instance(rng, config)
        cur_r = score(cur)
        evaluated += 1
        steps = 0
        while steps < per_restart and evaluated < effort:
            try:
                cand = _mutate(rng, cur, config)
                r = score(cand)
            except ValueError:
                continue
            finally:
                steps += 1
            evaluated += 1
            if r >= cur_r:
                cur, cur_r = cand, r
        if best_inst is None or cur_r > best_r:
            best_r, best_inst = cur_r, cur
    bound = proven_bound(mech, objective) or Bound.constant(best_r)
    ok = best_inst is not None and best_r <= bound(best_inst)
    return RatioReport(
        mech, objective, bound, evaluated, best_r, best_inst, 0, "pass" if ok else "fail", seed=seed
    )


# ---------------------------------------------------------------------------
# counterexample instances

EPS = Fraction(1, 100)


@dataclass(frozen=True)
class Claim:
    label: str
    expected: object
    compute: Callable[[], object]


@dataclass(frozen=True)
class ClaimResult:
    fixture: str
    label: str
    expected: object
    computed: object

    @property
    def ok(self) -> bool:
        return self.expected == self.computed


@dataclass(frozen=True)
class Fixture:
    name: str
    instance: Instance
    claims: tuple[Claim, ...]
    mechanism: Optional[Mechanism] = None
    deviations: tuple[tuple[int, Fraction], ...] = ()

    def check(self) -> list[ClaimResult]:
        return [ClaimResult(self.name, c.label, c.expected, c.compute()) for c in self.claims]


def _coords(p: Placement, inst: Instance) -> tuple[Fraction, Fraction]:
    return p.coords(inst)


def _opt_coords(inst: Instance, objective: Objective):
    return lambda: _coords(brute_force_opt(inst, objective).placement, inst)


def _opt_value(inst: Instance, objective: Objective):
    return lambda: brute_force_opt(inst, objective).value


def _mech_coords(mech: Mechanism, inst: Instance):
    return lambda: _coords(run(mech, inst), inst)


def _true_cost_under_opt(true: Instance, reported: Instance, objective: Objective, agent: int):
    def compute():
        p = brute_force_opt(reported, objective).placement
        a = true.agents[agent]
        return agent_cost(p, a.x, a.pref, true)

    return compute


def _placements_with_coords(inst: Instance, coords) -> list[Placement]:
    return [
        Placement(s1, s2)
        for s1 in range(inst.m)
        for s2 in range(inst.m)
        if s1 != s2 and (inst.alternatives[s1], inst.alternatives[s2]) == coords
    ]


def _cost_of_coords(inst: Instance, coords, agent: int):
    def compute():
        a = inst.agents[agent]
        return agent_cost(_placements_with_coords(inst, coords)[0], a.x, a.pref, inst)

    return compute


def _others(inst: Instance, coords, objective: Objective, pick):
    """min/max of the objective over placements not at ``coords``."""

    def compute():
        vals = [
            objective(Placement(s1, s2), inst)
            for s1 in range(inst.m)
            for s2 in range(inst.m)
            if s1 != s2 and (inst.alternatives[s1], inst.alternatives[s2]) != coords
        ]
        return pick(vals)

    return compute


def counterexample_fixtures() -> list[Fixture]:
    """The counterexample and lower-bound instances, with eps = 1/100."""
    e = EPS
    one = Fraction(1)

    x = Instance.build([0, 2], [-1 - 2 * e, -1, 1 + 3 * e])
    x_dev = x.with_locations([Fraction(-1), Fraction(2)])
    sc_not_sp = Fixture(
        "sc-opt-not-sp",
        x,
        (
            Claim("OPT_sc(x)", (-one, 1 + 3 * e), _opt_coords(x, Objective.SUM)),
            Claim("sc(OPT, x)", Fraction(403, 100), _opt_value(x, Objective.SUM)),
            Claim("c_1(OPT_sc(x), x_1)", 1 + 3 * e, _true_cost_under_opt(x, x, Objective.SUM, 0)),
            Claim("OPT_sc(x') for x_1'=-1", (-1 - 2 * e, -one), _opt_coords(x_dev, Objective.SUM)),
            Claim(
                "c_1(OPT_sc(x'), x_1)", 1 + 2 * e, _true_cost_under_opt(x, x_dev, Objective.SUM, 0)
            ),
        ),
        OPT_SC,
        ((0, Fraction(-1)),),
    )

    x = Instance.build([-e, e], [-1, 1, 1 + e])
    x_dev = x.with_locations([-e, Fraction(2)])
    mc_not_sp = Fixture(
        "mc-opt-not-sp",
        x,
        (
            Claim("OPT_mc(x)", (-one, one), _opt_coords(x, Objective.MAX)),
            Claim("mc(OPT, x)", 1 + e, _opt_value(x, Objective.MAX)),
            Claim("c_2(OPT_mc(x), x_2)", 1 + e, _true_cost_under_opt(x, x, Objective.MAX, 1)),
            Claim("OPT_mc(x') for x_2'=2", (one, 1 + e), _opt_coords(x_dev, Objective.MAX)),
            Claim("c_2(OPT_mc(x'), x_2)", one, _true_cost_under_opt(x, x_dev, Objective.MAX, 1)),
        ),
        OPT_MC,
        ((1, Fraction(2)),),
    )

    quad = [-1, -1, 1, 1]
    x = Instance.build([-e, e], quad)
    x_dev = x.with_locations([-one, e])
    sum_lb = Fixture(
        "sum-lower-bound",
        x,
        (
            Claim("c_1((1,1), x_1)", 1 + e, _cost_of_coords(x, (one, one), 0)),
            Claim("c_1((-1,1), x_1)", 1 + e, _cost_of_coords(x, (-one, one), 0)),
            Claim("OPT_sc(x')", (-one, -one), _opt_coords(x_dev, Objective.SUM)),
            Claim("sc(OPT, x')", 1 + e, _opt_value(x_dev, Objective.SUM)),
            Claim("min sc(y, x') over y != (-1,-1)", 3 - e, _others(x_dev, (-one, -one), Objective.SUM, min)),
            Claim("c_1((-1,-1), x_1)", 1 - e, _cost_of_coords(x, (-one, -one), 0)),
            Claim("M1(x')", (-one, -one), _mech_coords(M1, x_dev)),
        ),
    )

    x = Instance.build([-e, e], quad)
    x_dev = x.with_locations([-2 - e, e])
    max_lb = Fixture(
        "max-lower-bound",
        x,
        (
            Claim("OPT_mc(x')", (-one, -one), _opt_coords(x_dev, Objective.MAX)),
            Claim("mc(OPT, x')", 1 + e, _opt_value(x_dev, Objective.MAX)),
            Claim("min mc(y, x') over y != (-1,-1)", 3 + e, _others(x_dev, (-one, -one), Objective.MAX, min)),
            Claim("max mc(y, x') over y != (-1,-1)", 3 + e, _others(x_dev, (-one, -one), Objective.MAX, max)),
            Claim("c_1((-1,-1), x_1)", 1 - e, _cost_of_coords(x, (-one, -one), 0)),
            Claim("M2(x')", (-one, -one), _mech_coords(M2, x_dev)),
        ),
    )
    return [sc_not_sp, mc_not_sp, sum_lb, max_lb]


def fixture_by_name(name: str) -> Fixture:
    for f in counterexample_fixtures():
        if f.name == name:
            return f
    raise KeyError(name)

