"""Empirical takeover and level-leaving times, plus the copy-only reference
process used for lower bounds.

Takeover runs start from a worst-case-consistent plateau population: j1
members carry a fixed string of fitness i and the mu - j1 fillers sit exactly
one fitness level below, so plus-selection never ejects fit members in favor
of fillers. "Fit" means fitness >= i, except in the degenerate i = 0
construction where a strictly worse filler is impossible and every string is
trivially at fitness >= 0; there the j1 designated members carry a marker
that offspring inherit from their parent, and the marked lineage count plays
the role of the fit count.

The copy-only process is simulated at the level of counts. Its law depends
only on the number of desired members, so this is exact, not an approximation.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .bounds import takeover_bound_general
from .engines import EaConfig, EvolutionState, Variant, resolve_budget
from .genotype import ConfigError, MultiOptOneMax, OneMax, UniqueOptGeneric
from .rng import BinomialSampler, mix64
from .stats import SampleStats, summarize


@dataclass(frozen=True)
class TakeoverSpec:
    """Plateau takeover measurement: count of fitness >= i members from j1 to j2."""

    n: int
    mu: int
    lam: int
    i: int
    j1: int
    j2: int
    c: float = 1.0
    replicates: int = 100
    seed: int = 0
    max_iterations: int | None = None   # safety cap; None derives one

    def validate(self) -> None:
        if not (1 <= self.j1 < self.j2 <= self.mu):
            raise ConfigError(
                f"need 1 <= j1 < j2 <= mu, got j1={self.j1}, j2={self.j2}, mu={self.mu}")
        if not 0 <= self.i <= self.n - 1:
            raise ConfigError(f"need 0 <= i <= n-1, got i={self.i}, n={self.n}")
        if self.replicates < 1:
            raise ConfigError("replicates must be >= 1")
        EaConfig(self.n, self.mu, self.lam, Variant.PLUS, self.c).validate()


@dataclass(frozen=True)
class Ea0Spec:
    """Copy-only growth measurement: desired count from j1 to j2."""

    n: int
    mu: int
    lam: int
    j1: int
    j2: int
    replicates: int = 100
    seed: int = 0
    max_iterations: int | None = None

    def validate(self) -> None:
        if not (1 <= self.j1 < self.j2 <= self.mu):
            raise ConfigError(
                f"need 1 <= j1 < j2 <= mu, got j1={self.j1}, j2={self.j2}, mu={self.mu}")
        if self.n < 2 or self.lam < 1:
            raise ConfigError("need n >= 2 and lambda >= 1")
        if self.replicates < 1:
            raise ConfigError("replicates must be >= 1")


def _plateau_masks(n, i, j1, mu):
    """j1 copies of the fixed fitness-i string plus mu - j1 fillers one level
    below (for i = 0 the filler is the same flat string)."""
    level = (1 << i) - 1
    filler = (1 << (i - 1)) - 1 if i >= 1 else 0
    return [level] * j1 + [filler] * (mu - j1)


def _takeover_cap(spec: TakeoverSpec) -> int:
    if spec.max_iterations is not None:
        return spec.max_iterations
    bound = takeover_bound_general(spec.mu, spec.lam, spec.j1, spec.j2)
    return int(math.ceil(50.0 * (bound + spec.j2 + 10.0)))


def measure_takeover(spec: TakeoverSpec) -> SampleStats:
    """Sample tau: iterations of the plus engine until >= j2 fit members.

    For i >= 1 the fit count is non-decreasing under plus-selection, so the
    safety cap is never binding in practice; in the i = 0 marker construction
    the marked lineage competes on equal terms and can die out, so capped
    runs are censored there.
    """
    spec.validate()
    cap = _takeover_cap(spec)
    config = EaConfig(spec.n, spec.mu, spec.lam, Variant.PLUS, spec.c)
    initial = _plateau_masks(spec.n, spec.i, spec.j1, spec.mu)
    f = OneMax(spec.n)
    samples = []
    exhausted = 0
    for r in range(spec.replicates):
        rng = random.Random(mix64(spec.seed, r))
        es = EvolutionState(config, f, rng=rng, initial_masks=list(initial))
        tau = (_takeover_once_marked(es, spec, cap) if spec.i == 0
               else _takeover_once(es, spec, cap))
        if tau is None:
            exhausted += 1
        else:
            samples.append(tau)
    return summarize(samples, exhausted)


def _takeover_once(es, spec, cap):
    level, j2 = spec.i, spec.j2
    t = 0
    while t < cap:
        es.step()
        t += 1
        if sum(1 for fv in es.fits if fv >= level) >= j2:
            return t
    return None


def _takeover_once_marked(es, spec, cap):
    # i = 0: offspring inherit the parent's marker, survivors keep theirs
    mu, j2 = spec.mu, spec.j2
    flags = [True] * spec.j1 + [False] * (mu - spec.j1)
    t = 0
    while t < cap:
        es.step()
        t += 1
        parent_idx = es.last_parent_idx
        flags = [flags[s] if s < mu else flags[parent_idx[s - mu]]
                 for s in es.last_sources]
        if sum(flags) >= j2:
            return t
    return None


def ea0_once(rng, n, mu, lam, j1, j2, cap):
    """One copy-only run: (iterations to reach j2 or None, desired-count trace).

    Each of the lambda offspring picks a uniform parent and is accepted only
    when that parent is desired and mutation changed nothing, which happens
    with probability (1 - 1/n)^n; the count is capped at mu.
    """
    q_copy = (1.0 - 1.0 / n) ** n
    samplers = {}
    j = j1
    t = 0
    trace = [j]
    while j < j2:
        if t >= cap:
            return None, trace
        sampler = samplers.get(j)
        if sampler is None:
            sampler = BinomialSampler(lam, j * q_copy / mu)
            samplers[j] = sampler
        j = min(mu, j + sampler.draw(rng))
        t += 1
        trace.append(j)
    return t, trace


def _ea0_cap(spec: Ea0Spec) -> int:
    if spec.max_iterations is not None:
        return spec.max_iterations
    q_copy = (1.0 - 1.0 / spec.n) ** spec.n
    p1 = 1.0 - (1.0 - q_copy * spec.j1 / spec.mu) ** spec.lam
    return max(1000, int(math.ceil(200.0 * (spec.j2 - spec.j1) / p1)))


def run_ea0(spec: Ea0Spec) -> SampleStats:
    """Sample tau*: first time the desired count reaches j2, starting at j1."""
    spec.validate()
    cap = _ea0_cap(spec)
    samples = []
    exhausted = 0
    for r in range(spec.replicates):
        rng = random.Random(mix64(spec.seed, r))
        tau, _ = ea0_once(rng, spec.n, spec.mu, spec.lam, spec.j1, spec.j2, cap)
        if tau is None:
            exhausted += 1
        else:
            samples.append(tau)
    return summarize(samples, exhausted)


def _level_masks(f, n, i, mu):
    if isinstance(f, UniqueOptGeneric):
        level = f.target.mask ^ ((1 << (n - i)) - 1)
        filler = f.target.mask ^ ((1 << (n - i + 1)) - 1) if i >= 1 else level
    elif isinstance(f, (OneMax, MultiOptOneMax)):
        level = (1 << i) - 1
        filler = (1 << (i - 1)) - 1 if i >= 1 else level
    else:
        raise ConfigError(f"cannot construct fitness-level strings for {f!r}")
    return [level] + [filler] * (mu - 1)


def measure_level_time(config: EaConfig, f, i: int, replicates: int) -> SampleStats:
    """Sample the level-leaving time: iterations until best fitness exceeds i,
    starting from one member at fitness exactly i and mu - 1 one level below."""
    config.validate()
    if not 0 <= i <= config.n - 1:
        raise ConfigError(f"need 0 <= i <= n-1, got i={i}, n={config.n}")
    if replicates < 1:
        raise ConfigError("replicates must be >= 1")
    cap = resolve_budget(config)
    initial = _level_masks(f, config.n, i, config.mu)
    samples = []
    exhausted = 0
    for r in range(replicates):
        rng = random.Random(mix64(config.seed, r))
        es = EvolutionState(config, f, rng=rng, initial_masks=list(initial))
        t = 0
        while t < cap:
            es.step()
            t += 1
            if es.best_fitness > i:
                samples.append(t)
                break
        else:
            exhausted += 1
    return summarize(samples, exhausted)
