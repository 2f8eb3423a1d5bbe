"""Seeded random instances for fuzzing and audit corpora."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .model import Agent, Instance, Preference

SETTINGS = ("compulsory", "optional", "single")


@dataclass(frozen=True)
class GeneratorConfig:
    """Corpus shape.

    ``setting`` picks the preference profile: everyone wants both facilities
    (compulsory), each agent draws one of the three classes uniformly
    (optional), or everyone wants F1 only (single, for the one-facility rules).
    """

    setting: str = "compulsory"
    n_min: int = 1
    n_max: int = 6
    m_min: int = 2
    m_max: int = 6
    max_denominator: int = 100
    low: int = -10
    high: int = 10
    duplicate_prob: Fraction = Fraction(1, 4)

    def __post_init__(self):
        if self.setting not in SETTINGS:
            raise ValueError(f"setting must be one of {SETTINGS}")
        if not 1 <= self.n_min <= self.n_max:
            raise ValueError("need 1 <= n_min <= n_max")
        if not 2 <= self.m_min <= self.m_max:
            raise ValueError("need 2 <= m_min <= m_max")
        if self.low >= self.high or self.max_denominator < 1:
            raise ValueError("bad coordinate range")


def random_rational(rng: random.Random, cfg: GeneratorConfig) -> Fraction:
    q = rng.randint(1, cfg.max_denominator)
    return Fraction(rng.randint(cfg.low * q, cfg.high * q), q)


def _pref(rng: random.Random, setting: str) -> Preference:
    if setting == "compulsory":
        return Preference.BOTH
    if setting == "single":
        return Preference.F1
    return rng.choice((Preference.F1, Preference.F2, Preference.BOTH))


def random_instance(rng: random.Random, cfg: GeneratorConfig) -> Instance:
    n = rng.randint(cfg.n_min, cfg.n_max)
    m = rng.randint(cfg.m_min, cfg.m_max)
    agents = tuple(Agent(random_rational(rng, cfg), _pref(rng, cfg.setting)) for _ in range(n))
    alts = [random_rational(rng, cfg)]
    while len(alts) < m:
        if rng.random() < cfg.duplicate_prob:
            alts.append(rng.choice(alts))
        else:
            alts.append(random_rational(rng, cfg))
    return Instance(agents, tuple(alts))


def generate_corpus(cfg: GeneratorConfig, size: int, seed: int) -> list[Instance]:
    rng = random.Random(seed)
    return [random_instance(rng, cfg) for _ in range(size)]
