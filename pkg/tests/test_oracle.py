import itertools

import pytest
from hypothesis import given, strategies as st

from hetfac.generate import GeneratorConfig, generate_corpus
from hetfac.model import Instance, Objective, Placement, Preference, SettingError
from hetfac.oracle import brute_force_opt, opt_max_center_peak, opt_sum_in_ap

from conftest import F, instances


def naive_opt(inst, objective):
    """Independent enumeration straight from the cost definition."""
    best = None
    for s1, s2 in itertools.permutations(range(inst.m), 2):
        y = (inst.alternatives[s1], inst.alternatives[s2])
        costs = []
        for a in inst.agents:
            wanted = {Preference.F1: [0], Preference.F2: [1], Preference.BOTH: [0, 1]}[a.pref]
            costs.append(max(abs(y[j] - a.x) for j in wanted))
        v = sum(costs) if objective is Objective.SUM else max(costs)
        if best is None or v < best:
            best = v
    return best


class TestBruteForce:
    def test_sum_counterexample(self):
        inst = Instance.build([0, 2], ["-51/50", -1, "103/100"])
        r = brute_force_opt(inst, Objective.SUM)
        assert r.placement.coords(inst) == (-1, F("103/100"))
        assert r.value == F("403/100")

    def test_max_counterexample(self):
        inst = Instance.build(["-1/100", "1/100"], [-1, 1, "101/100"])
        r = brute_force_opt(inst, Objective.MAX)
        assert r.placement.coords(inst) == (-1, 1)
        assert r.value == F("101/100")

    def test_colocated_zero(self):
        inst = Instance.build([3], [3, 3])
        assert brute_force_opt(inst, Objective.SUM).value == 0
        assert brute_force_opt(inst, Objective.MAX).value == 0

    def test_lexicographic_canonical_optimum(self):
        inst = Instance.build([0], [0, 0, 0])
        r = brute_force_opt(inst, Objective.SUM)
        assert r.placement == Placement(0, 1)
        assert len(r.all_optima) == 6

    def test_heterogeneous_order_matters(self):
        inst = Instance.build([0, 10], [0, 10], [Preference.F2, Preference.F1])
        r = brute_force_opt(inst, Objective.SUM)
        assert r.placement.coords(inst) == (10, 0) and r.value == 0


class TestStructured:
    def test_sum_in_ap_counterexample(self):
        inst = Instance.build([0, 2], ["-51/50", -1, "103/100"])
        assert opt_sum_in_ap(inst).placement.coords(inst) == (-1, F("103/100"))

    def test_two_alternatives_single_pair(self):
        inst = Instance.build([7, -3], [1, 2])
        assert opt_sum_in_ap(inst).placement == Placement(0, 1)

    def test_center_peak_counterexample(self):
        inst = Instance.build(["-1/100", "1/100"], [-1, 1, "101/100"])
        r = opt_max_center_peak(inst)
        assert r.placement.coords(inst) == (-1, 1) and r.value == F("101/100")

    def test_center_peak_symmetric(self):
        inst = Instance.build([-2, 2], [-3, -1, 1, 3])
        assert opt_max_center_peak(inst).placement.coords(inst) == (-1, 1)

    @pytest.mark.parametrize("solver", [opt_sum_in_ap, opt_max_center_peak])
    def test_requires_compulsory(self, solver):
        inst = Instance.build([0, 1], [0, 1], [Preference.BOTH, Preference.F1])
        with pytest.raises(SettingError, match="compulsory setting required"):
            solver(inst)


@given(instances(max_n=4, max_m=5), st.sampled_from(list(Objective)))
def test_brute_force_matches_naive_enumeration(inst, objective):
    assert brute_force_opt(inst, objective).value == naive_opt(inst, objective)


@given(instances(), st.sampled_from(list(Objective)))
def test_all_optima_attain_value(inst, objective):
    r = brute_force_opt(inst, objective)
    assert r.placement == min(r.all_optima)
    assert all(objective(p, inst) == r.value for p in r.all_optima)


@given(instances(), st.sampled_from(list(Objective)), st.randoms(use_true_random=False),
       st.fractions(-5, 5, max_denominator=9))
def test_value_invariant_under_permutation_and_translation(inst, objective, rnd, t):
    order = list(range(inst.n))
    rnd.shuffle(order)
    v = brute_force_opt(inst, objective).value
    assert brute_force_opt(inst.permuted(order), objective).value == v
    assert brute_force_opt(inst.translated(t), objective).value == v


@given(instances(compulsory=True))
def test_sum_optimum_lies_in_adjacent_pairs(inst):
    assert opt_sum_in_ap(inst).value == brute_force_opt(inst, Objective.SUM).value


@given(instances(compulsory=True))
def test_center_peak_is_max_optimal(inst):
    assert opt_max_center_peak(inst).value == brute_force_opt(inst, Objective.MAX).value


def test_structured_optima_on_generated_corpus():
    corpus = generate_corpus(GeneratorConfig(), 500, seed=11)
    for inst in corpus:
        assert opt_sum_in_ap(inst).value == naive_opt(inst, Objective.SUM)
        assert opt_max_center_peak(inst).value == naive_opt(inst, Objective.MAX)
