"""Scenario-level studies: what knowledge and leadership are worth.

The knowledge evaluator maps a per-user knowledge level to the policy that
level supports and prices the induced outcome: private knowledge plays
best-response/Nash, one better-informed leader plays the commitment
solution, and jointly complete knowledge plays the welfare-maximizing
point.  The ensemble study repeats the Nash-versus-leadership comparison
over randomly drawn multipath channels and reports the rate ratios.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EnsembleUnstableError, SpectrumGameError
from .matrix_games import NormalFormGame, best_response_dynamics, stackelberg_finite
from .power_games import (
    RegionSample,
    iterative_water_filling,
    rate_region_sweep,
    stackelberg_leader_search,
    weighted_sum_optimize,
)
from .spectrum import FrequencyGrid, NoiseProfile, PowerBudget, PowerScenario, generate_multipath_channels

__all__ = [
    "KNOWLEDGE_LEVELS",
    "KnowledgeProfile",
    "EnsembleReport",
    "value_of_knowledge",
    "channel_ensemble_study",
    "region_comparison",
]

KNOWLEDGE_LEVELS = ("private", "heterogeneous_leader", "complete")


@dataclass(frozen=True, eq=False)
class KnowledgeProfile:
    """Per-user knowledge level; at most one leader, complete is all-or-none."""

    levels: tuple

    def __post_init__(self):
        levels = tuple(str(v) for v in self.levels)
        for v in levels:
            if v not in KNOWLEDGE_LEVELS:
                raise ValueError(f"unknown knowledge level {v!r}")
        if sum(v == "heterogeneous_leader" for v in levels) > 1:
            raise ValueError("at most one user can be the better-informed leader")
        if any(v == "complete" for v in levels) and not all(v == "complete" for v in levels):
            raise ValueError("complete knowledge applies to all users jointly or none")
        object.__setattr__(self, "levels", levels)

    @property
    def leader(self):
        for i, v in enumerate(self.levels):
            if v == "heterogeneous_leader":
                return i
        return None

    @property
    def complete(self) -> bool:
        return all(v == "complete" for v in self.levels)


@dataclass(frozen=True, eq=False)
class EnsembleReport:
    """Rate ratios of leadership over Nash across channel realizations."""

    realizations: int
    skipped: int
    ratios: np.ndarray
    means: np.ndarray
    hist_edges: tuple
    hist_counts: tuple


def value_of_knowledge(
    scenario,
    profile: KnowledgeProfile,
    start_profile=None,
    weights=None,
    levels: int = 10,
    refine_rounds: int = 40,
    tol: float = 1e-8,
    max_iter: int = 500,
) -> np.ndarray:
    """Utility vector induced when each user plays what its knowledge supports.

    Finite games: all-private runs best-response dynamics from the configured
    start; a leader plays the commitment equilibrium; complete knowledge
    plays the profile maximizing the (weighted) utility sum.  Continuous
    power scenarios: iterative water-filling, the leader-commitment search,
    and the weighted rate-sum oracle respectively.
    """
    if isinstance(scenario, NormalFormGame):
        if profile.complete:
            w = np.ones(scenario.player_count) if weights is None else np.asarray(weights, float)
            best = max(
                scenario.profiles(),
                key=lambda pr: (float(w @ scenario.payoff_vector(pr)), tuple(-a for a in pr)),
            )
            return scenario.payoff_vector(best)
        if profile.leader is not None:
            _, utilities = stackelberg_finite(scenario, profile.leader)
            return utilities
        reached = best_response_dynamics(scenario, start_profile)
        return scenario.payoff_vector(reached)

    if not isinstance(scenario, PowerScenario):
        raise ValueError("scenario must be a NormalFormGame or a PowerScenario")
    if scenario.user_count != 2:
        raise ValueError("continuous knowledge evaluation supports two users")
    ch, noise, budgets, grid = scenario.channels, scenario.noise, scenario.budgets, scenario.grid
    if profile.complete:
        w = np.ones(2) if weights is None else np.asarray(weights, float)
        return weighted_sum_optimize(w, ch, noise, budgets, grid, levels=levels).rates
    if profile.leader is not None:
        res = stackelberg_leader_search(
            profile.leader, ch, noise, budgets, grid,
            levels=levels, refine_rounds=refine_rounds, tol=tol, max_iter=max_iter,
        )
        return res.rates
    res = iterative_water_filling(ch, noise, budgets, grid, tol=tol, max_iter=max_iter)
    if not res.converged:
        raise SpectrumGameError("iterative water-filling did not converge on this scenario")
    return res.rates


def _histogram(values: np.ndarray, bins: int = 20):
    lo, hi = float(values.min()), float(values.max())
    if hi - lo < 1e-12:
        lo, hi = lo - 0.5, hi + 0.5
    counts, edges = np.histogram(values, bins=bins, range=(lo, hi))
    return edges, counts


def channel_ensemble_study(
    realizations: int,
    seed: int,
    grid: FrequencyGrid,
    budgets: PowerBudget,
    tap_count: int = 4,
    noise_level: float = 1.0,
    direct_power: float = 1.0,
    cross_power: float = 0.5,
    leader: int = 0,
    levels: int = 10,
    refine_rounds: int = 40,
    tol: float = 1e-8,
    max_iter: int = 500,
) -> EnsembleReport:
    """Leadership-versus-Nash rate ratios over random multipath channels.

    Direct links carry unit total tap power and cross links half, the
    classic moderate-interference normalization.  Realizations where
    iterative water-filling fails to converge are skipped and redrawn (with
    the skip counted); once skips exceed the requested count the ensemble is
    declared unstable.  Each draw derives its own stream from (seed, attempt
    index), so reports are reproducible.
    """
    if realizations < 1:
        raise ValueError("need at least one realization")
    noise = NoiseProfile.flat(noise_level, 2, grid.bin_count)
    ratios = np.zeros((realizations, 2))
    collected = 0
    attempt = 0
    skipped = 0
    while collected < realizations:
        if skipped > realizations:
            raise EnsembleUnstableError(
                f"ensemble unstable: {skipped} skips before {realizations} usable realizations"
            )
        stream = np.random.SeedSequence(entropy=int(seed), spawn_key=(attempt,))
        attempt += 1
        ch = generate_multipath_channels(
            stream, grid, tap_count, user_count=2,
            direct_power=direct_power, cross_power=cross_power,
        )
        nash = iterative_water_filling(ch, noise, budgets, grid, tol=tol, max_iter=max_iter)
        if not nash.converged:
            skipped += 1
            continue
        led = stackelberg_leader_search(
            leader, ch, noise, budgets, grid,
            levels=levels, refine_rounds=refine_rounds, tol=tol, max_iter=max_iter,
        )
        ratios[collected] = led.rates / nash.rates
        collected += 1
    edges_counts = [_histogram(ratios[:, n]) for n in range(2)]
    return EnsembleReport(
        realizations=realizations,
        skipped=skipped,
        ratios=ratios,
        means=ratios.mean(axis=0),
        hist_edges=tuple(e for e, _ in edges_counts),
        hist_counts=tuple(c for _, c in edges_counts),
    )


def region_comparison(
    scenario: PowerScenario,
    budget_pairs,
    weight_list,
    leader: int = 0,
    levels: int = 10,
    refine_rounds: int = 40,
    tol: float = 1e-8,
    max_iter: int = 500,
) -> list:
    """Joined Nash / leadership / Pareto table for one scenario.

    Nash and leadership samples sweep the budget pairs; Pareto samples sweep
    the weight vectors at the scenario's own budgets.
    """
    if scenario.user_count != 2:
        raise ValueError("region comparison supports two users")
    ch, noise, grid = scenario.channels, scenario.noise, scenario.grid
    table: list[RegionSample] = []
    table += rate_region_sweep(
        "iw", ch, noise, grid, budget_pairs=budget_pairs, tol=tol, max_iter=max_iter
    )
    table += rate_region_sweep(
        "stackelberg", ch, noise, grid, budget_pairs=budget_pairs, leader=leader,
        levels=levels, refine_rounds=refine_rounds, tol=tol, max_iter=max_iter,
    )
    table += rate_region_sweep(
        "pareto", ch, noise, grid, weights=weight_list, budgets=scenario.budgets, levels=levels
    )
    return table
