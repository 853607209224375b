"""The four algorithm variants with full trajectory instrumentation.

Variants: elitist plus-selection (best mu of mu+lambda), comma-selection
(best mu of the lambda offspring, needs lambda >= mu), and the fair-parent
plus variant (mu = lambda, exactly one offspring per parent). The (1+1)
special case is plus-selection with mu = lambda = 1 and runs on a dedicated
fast path with the same law.

`run` executes a whole run; `EvolutionState` exposes one iteration at a
time together with offspring parentage and survivor sources, which is what
the takeover and family-tree instrumentation builds on.
"""

from __future__ import annotations

import math
import random
from bisect import bisect_right
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum

from .bounds import master_bound
from .genotype import BitString, ConfigError
from .rng import _sampler, mix64

#: budget applied when EaConfig.max_iterations is None, in multiples of the
#: master-bound total (rounded up), so sweeps terminate even at adversarial
#: parameters.
DEFAULT_BUDGET_MULT = 10.0


class Variant(Enum):
    PLUS = "plus"
    COMMA = "comma"
    FAIRPLUS = "fairplus"


class TiePolicy(Enum):
    # prefer offspring over parents, break remaining ties uniformly
    OFFSPRING_FIRST_RANDOM = "offspring-first-random"
    # break all ties uniformly over parents and offspring together
    UNIFORM_RANDOM = "uniform-random"


@dataclass(frozen=True)
class EaConfig:
    """Full run specification. p = c/n is the per-bit mutation probability."""

    n: int
    mu: int
    lam: int
    variant: Variant = Variant.PLUS
    c: float = 1.0
    tie_policy: TiePolicy = TiePolicy.OFFSPRING_FIRST_RANDOM
    max_iterations: int | None = None
    seed: int = 0

    @property
    def p(self) -> float:
        return self.c / self.n

    def validate(self) -> None:
        if self.n < 1:
            raise ConfigError(f"n must be >= 1, got {self.n}")
        if self.mu < 1:
            raise ConfigError(f"mu must be >= 1, got {self.mu}")
        if self.lam < 1:
            raise ConfigError(f"lambda must be >= 1, got {self.lam}")
        if not 0.0 < self.c <= self.n:
            raise ConfigError(f"mutation scale c must satisfy 0 < c <= n, got {self.c}")
        if self.variant is Variant.COMMA and self.lam < self.mu:
            raise ConfigError("comma selection cannot fill the population: needs lambda >= mu")
        if self.variant is Variant.FAIRPLUS and self.lam != self.mu:
            raise ConfigError("fair-parent variant needs lambda = mu")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ConfigError("max_iterations must be >= 1")
        if not isinstance(self.seed, int):
            raise ConfigError("seed must be an integer")


def resolve_budget(config: EaConfig) -> int:
    """Iteration budget: explicit max_iterations, else 10x the master bound."""
    if config.max_iterations is not None:
        return config.max_iterations
    report = master_bound(max(config.n, 2), config.mu, config.lam)
    return int(math.ceil(DEFAULT_BUDGET_MULT * report.total))


@dataclass(frozen=True)
class Population:
    """Multiset of (genotype, cached fitness) pairs of size mu."""

    members: tuple

    def __len__(self):
        return len(self.members)

    def best(self):
        return max(self.members, key=lambda m: m[1])

    def fitness_values(self):
        return [fit for _, fit in self.members]


@dataclass(frozen=True)
class RunResult:
    """Outcome of one run.

    iterations_to_opt is None when the budget ran out (the Budget-Exhausted
    marker); otherwise the number of iterations executed before an optimum
    entered the population, with 0 meaning the initial population already
    contained one. Traces carry one entry for the initial population plus one
    per executed iteration.
    """

    iterations_to_opt: int | None
    evaluations: int
    best_fitness_trace: tuple
    best_count_trace: tuple
    hit_optimum: bool

    @property
    def exhausted(self) -> bool:
        return self.iterations_to_opt is None


def _make_offspring(rng, masks, n, lam, sampler, fair):
    """lambda offspring masks and their parent indices.

    Plus/comma pick each parent uniformly with replacement; the fair variant
    mutates parent k into offspring k.
    """
    cum = sampler._cum
    rr = rng.random
    sample = rng.sample
    randrange = rng.randrange
    positions = range(n)
    full = (1 << n) - 1
    mu = len(masks)
    off_masks = []
    parent_idx = []
    for k in range(lam):
        i = k if fair else randrange(mu)
        parent = masks[i]
        flips = bisect_right(cum, rr())
        if flips == 0:
            child = parent
        elif flips == n:
            child = parent ^ full
        else:
            m = 0
            for pos in sample(positions, flips):
                m |= 1 << pos
            child = parent ^ m
        off_masks.append(child)
        parent_idx.append(i)
    return off_masks, parent_idx


def _select(rng, mu, par_masks, par_fits, off_masks, off_fits,
            comma, offspring_first, want_sources):
    """Keep the best mu candidates; ties per policy.

    Returns (masks, fits, sources); sources[j] is the combined index of
    survivor j (parent i -> i, offspring k -> mu + k), or None when not asked.
    Comma selection considers offspring only.
    """
    if comma:
        fits_all = off_fits
    else:
        fits_all = par_fits + off_fits
    cut = sorted(fits_all, reverse=True)[mu - 1]

    new_masks = []
    new_fits = []
    sources = [] if want_sources else None
    tie_par = []
    tie_off = []
    if not comma:
        for i, fv in enumerate(par_fits):
            if fv > cut:
                new_masks.append(par_masks[i])
                new_fits.append(fv)
                if want_sources:
                    sources.append(i)
            elif fv == cut:
                tie_par.append(i)
    for k, fv in enumerate(off_fits):
        if fv > cut:
            new_masks.append(off_masks[k])
            new_fits.append(fv)
            if want_sources:
                sources.append(mu + k)
        elif fv == cut:
            tie_off.append(k)

    need = mu - len(new_masks)
    if need:
        if comma or not offspring_first:
            pool = [(1, i) for i in tie_par] + [(0, k) for k in tie_off]
            for is_par, idx in rng.sample(pool, need):
                if is_par:
                    new_masks.append(par_masks[idx])
                    new_fits.append(par_fits[idx])
                    if want_sources:
                        sources.append(idx)
                else:
                    new_masks.append(off_masks[idx])
                    new_fits.append(off_fits[idx])
                    if want_sources:
                        sources.append(mu + idx)
        else:
            if len(tie_off) >= need:
                chosen_off = rng.sample(tie_off, need)
                chosen_par = []
            else:
                chosen_off = tie_off
                chosen_par = rng.sample(tie_par, need - len(tie_off))
            for k in chosen_off:
                new_masks.append(off_masks[k])
                new_fits.append(off_fits[k])
                if want_sources:
                    sources.append(mu + k)
            for i in chosen_par:
                new_masks.append(par_masks[i])
                new_fits.append(par_fits[i])
                if want_sources:
                    sources.append(i)
    return new_masks, new_fits, sources


def _run_one_plus_one(rng, f, n, sampler, budget, offspring_first,
                      mask, fit, ftrace, ctrace):
    # fast path for mu = lambda = 1 plus-selection; same law as the generic
    # path (accept offspring when strictly better, ties per policy)
    cum = sampler._cum
    rr = rng.random
    sample = rng.sample
    positions = range(n)
    full = (1 << n) - 1
    value = f.value
    thr = f.opt_threshold
    append_f = ftrace.append
    append_c = ctrace.append
    t = 0
    while t < budget:
        flips = bisect_right(cum, rr())
        if flips == 0:
            child = mask
        elif flips == n:
            child = mask ^ full
        else:
            m = 0
            for pos in sample(positions, flips):
                m |= 1 << pos
            child = mask ^ m
        cf = value(child)
        t += 1
        if cf > fit or (cf == fit and (offspring_first or rr() < 0.5)):
            mask = child
            fit = cf
        append_f(fit)
        append_c(1)
        if fit >= thr:
            return RunResult(t, 1 + t, tuple(ftrace), tuple(ctrace), True)
    return RunResult(None, 1 + budget, tuple(ftrace), tuple(ctrace), False)


def run(config: EaConfig, f) -> RunResult:
    """Execute one run of the configured variant on fitness f.

    The initial population is uniform random. Termination is checked on the
    initial population and then after every selection step; running out of
    budget is a normal, flagged result, never an exception.
    """
    config.validate()
    if f.n != config.n:
        raise ConfigError(f"dimension mismatch: config n={config.n}, fitness n={f.n}")
    n, mu, lam = config.n, config.mu, config.lam
    rng = random.Random(config.seed)
    budget = resolve_budget(config)
    sampler = _sampler(n, config.c / n)
    value = f.value
    thr = f.opt_threshold

    masks = [rng.getrandbits(n) for _ in range(mu)]
    fits = [value(m) for m in masks]
    best = max(fits)
    ftrace = [best]
    ctrace = [fits.count(best)]
    if best >= thr:
        return RunResult(0, mu, tuple(ftrace), tuple(ctrace), True)

    comma = config.variant is Variant.COMMA
    fair = config.variant is Variant.FAIRPLUS
    offspring_first = config.tie_policy is TiePolicy.OFFSPRING_FIRST_RANDOM

    if mu == 1 and lam == 1 and not comma:
        return _run_one_plus_one(rng, f, n, sampler, budget, offspring_first,
                                 masks[0], fits[0], ftrace, ctrace)

    t = 0
    while t < budget:
        off_masks, _ = _make_offspring(rng, masks, n, lam, sampler, fair)
        off_fits = [value(m) for m in off_masks]
        masks, fits, _ = _select(rng, mu, masks, fits, off_masks, off_fits,
                                 comma, offspring_first, False)
        t += 1
        best = max(fits)
        ftrace.append(best)
        ctrace.append(fits.count(best))
        if best >= thr:
            return RunResult(t, mu + lam * t, tuple(ftrace), tuple(ctrace), True)
    return RunResult(None, mu + lam * budget, tuple(ftrace), tuple(ctrace), False)


def _run_one(args):
    config, f, seed = args
    return run(replace(config, seed=seed), f)


def run_batch(config: EaConfig, f, replicates: int, workers: int | None = None):
    """Independent replicates; replicate r runs with seed mix64(config.seed, r).

    Results are keyed by replicate index, so the output is bit-identical for
    any worker count and any scheduling.
    """
    if replicates < 1:
        raise ConfigError("replicates must be >= 1")
    config.validate()
    seeds = [mix64(config.seed, r) for r in range(replicates)]
    if workers is not None and workers > 1:
        jobs = [(config, f, s) for s in seeds]
        chunk = max(1, replicates // (workers * 4))
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(_run_one, jobs, chunksize=chunk))
    return [run(replace(config, seed=s), f) for s in seeds]


class EvolutionState:
    """Stepwise engine used by instrumented experiments.

    After each step() the previous iteration's internals are exposed:
    last_parent_idx[k] is the parent of offspring k, last_off_masks/fits the
    offspring, and last_sources[j] the combined index (parent i -> i,
    offspring k -> mu + k) that survivor j came from. Wrappers use these to
    carry per-member metadata (markers, ancestry depths) across selection.
    """

    def __init__(self, config: EaConfig, f, rng=None, initial_masks=None):
        config.validate()
        if f.n != config.n:
            raise ConfigError(f"dimension mismatch: config n={config.n}, fitness n={f.n}")
        self.config = config
        self.fitness = f
        self.rng = rng if rng is not None else random.Random(config.seed)
        n, mu = config.n, config.mu
        if initial_masks is None:
            self.masks = [self.rng.getrandbits(n) for _ in range(mu)]
        else:
            masks = list(initial_masks)
            if len(masks) != mu:
                raise ConfigError(f"initial population must have mu={mu} members")
            for m in masks:
                if not 0 <= m < (1 << n):
                    raise ConfigError("initial mask out of range for length n")
            self.masks = masks
        self.fits = [f.value(m) for m in self.masks]
        self._sampler = _sampler(n, config.c / n)
        self._comma = config.variant is Variant.COMMA
        self._fair = config.variant is Variant.FAIRPLUS
        self._offspring_first = config.tie_policy is TiePolicy.OFFSPRING_FIRST_RANDOM
        self.iteration = 0
        self.last_parent_idx = None
        self.last_off_masks = None
        self.last_off_fits = None
        self.last_sources = None

    @property
    def best_fitness(self):
        return max(self.fits)

    @property
    def best_count(self):
        best = max(self.fits)
        return self.fits.count(best)

    def step(self) -> None:
        """One iteration: offspring, evaluation, selection."""
        cfg = self.config
        off_masks, parent_idx = _make_offspring(
            self.rng, self.masks, cfg.n, cfg.lam, self._sampler, self._fair)
        value = self.fitness.value
        off_fits = [value(m) for m in off_masks]
        new_masks, new_fits, sources = _select(
            self.rng, cfg.mu, self.masks, self.fits, off_masks, off_fits,
            self._comma, self._offspring_first, True)
        self.last_parent_idx = parent_idx
        self.last_off_masks = off_masks
        self.last_off_fits = off_fits
        self.last_sources = sources
        self.masks = new_masks
        self.fits = new_fits
        self.iteration += 1

    def population(self) -> Population:
        n = self.config.n
        return Population(tuple((BitString(n, m), fit)
                                for m, fit in zip(self.masks, self.fits)))
