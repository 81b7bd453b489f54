"""Rate adaptation: a Minstrel-style probabilistic selector driven by per-rate
EWMA success statistics with periodic probing, and a threshold-based ideal
selector used as a contrast and test oracle.

The Minstrel model keeps the simplifications that matter for positioning:
no retry chains, no aggregation, one probe rate per probe window, and untried
rates retain their previous EWMA. Upward adaptation is therefore slow (gated
by the probe cadence) while downward adaptation is fast, because the rates
below the current one keep their learned statistics.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .phy import Mcs


@dataclass(frozen=True)
class MinstrelConfig:
    ewma_weight: float = 0.25
    update_interval_s: float = 0.1
    probe_period: int = 10
    probe_fraction: float = 0.25  # share of a probe window sent at the probe rate

    def __post_init__(self):
        if not 0.0 < self.ewma_weight <= 1.0:
            raise ValueError("ewma_weight must be in (0, 1]")
        if self.update_interval_s <= 0:
            raise ValueError("update_interval_s must be positive")
        if self.probe_period < 2:
            raise ValueError("probe_period must be at least 2")
        if not 0.0 < self.probe_fraction <= 1.0:
            raise ValueError("probe_fraction must be in (0, 1]")


@dataclass(frozen=True)
class RaDecision:
    rate: int
    is_probe: bool


@dataclass(frozen=True)
class MinstrelState:
    ewma: np.ndarray        # per-MCS success probability estimate
    attempts: np.ndarray    # current-window counters
    successes: np.ndarray
    current_rate: int
    probe_counter: int
    config: MinstrelConfig
    rng: np.random.Generator


def init_state(
    table: tuple[Mcs, ...],
    rng: np.random.Generator,
    config: MinstrelConfig | None = None,
) -> MinstrelState:
    """Conservative start: only the lowest rate is assumed to work."""
    n = len(table)
    ewma = np.zeros(n)
    ewma[0] = 1.0
    return MinstrelState(
        ewma=ewma,
        attempts=np.zeros(n, dtype=np.int64),
        successes=np.zeros(n, dtype=np.int64),
        current_rate=0,
        probe_counter=0,
        config=config or MinstrelConfig(),
        rng=rng,
    )


def ewma_update(prev: float, window_success: float, weight: float) -> float:
    """Exponentially weighted average of per-window success ratios."""
    if not (0.0 <= prev <= 1.0 and 0.0 <= window_success <= 1.0 and 0.0 <= weight <= 1.0):
        raise ValueError("ewma inputs must lie in [0, 1]")
    return (1.0 - weight) * prev + weight * window_success


def best_rate(ewma: np.ndarray, table: tuple[Mcs, ...]) -> int:
    """Throughput-estimate argmax, ties resolved to the lower index."""
    products = np.array([m.phy_rate_bps for m in table]) * ewma
    return int(np.argmax(products))


def _probe_candidates(current: int, n_rates: int) -> list[int]:
    return [r for r in (current - 1, current + 1) if 0 <= r < n_rates]


def select_rate(state: MinstrelState, table: tuple[Mcs, ...]) -> RaDecision:
    """Rate for the next update window.

    Non-probe windows use the current best rate. Every probe_period-th window
    instead probes a randomly chosen non-current rate; candidates are the
    neighbours of the current rate, mirroring Minstrel's sampling locality.
    """
    probing = (state.probe_counter + 1) % state.config.probe_period == 0
    if probing:
        candidates = _probe_candidates(state.current_rate, len(table))
        if candidates:
            pick = candidates[int(state.rng.integers(len(candidates)))]
            return RaDecision(rate=pick, is_probe=True)
    return RaDecision(rate=state.current_rate, is_probe=False)


def on_window_end(
    state: MinstrelState,
    attempts: np.ndarray,
    successes: np.ndarray,
    table: tuple[Mcs, ...],
) -> MinstrelState:
    """Fold one window of per-rate outcomes into the EWMA statistics.

    Untried rates keep their previous estimate; the current rate is recomputed
    from the updated throughput products; window counters reset; the probe
    counter advances even when nothing was attempted.
    """
    attempts = np.asarray(attempts, dtype=np.int64)
    successes = np.asarray(successes, dtype=np.int64)
    if np.any(successes > attempts) or np.any(attempts < 0) or np.any(successes < 0):
        raise ValueError("successes must not exceed attempts")
    ewma = state.ewma.copy()
    tried = attempts > 0
    if np.any(tried):
        ratios = successes[tried] / attempts[tried]
        w = state.config.ewma_weight
        ewma[tried] = (1.0 - w) * ewma[tried] + w * ratios
    return replace(
        state,
        ewma=ewma,
        attempts=np.zeros_like(state.attempts),
        successes=np.zeros_like(state.successes),
        current_rate=best_rate(ewma, table),
        probe_counter=state.probe_counter + 1,
    )


def ideal_rate(snr_db: float, table: tuple[Mcs, ...]) -> int:
    """Highest MCS index whose anchor is met; index 0 when none qualify."""
    chosen = 0
    for mcs in table:
        if snr_db >= mcs.min_snr_db:
            chosen = mcs.index
    return chosen


class MinstrelSelector:
    """Stateful per-link wrapper used by the traffic simulation."""

    def __init__(
        self,
        table: tuple[Mcs, ...],
        rng: np.random.Generator,
        config: MinstrelConfig | None = None,
    ):
        self.table = table
        self.state = init_state(table, rng, config)
        self._attempts = np.zeros(len(table), dtype=np.int64)
        self._successes = np.zeros(len(table), dtype=np.int64)

    def select(self, snr_db: float) -> RaDecision:
        return select_rate(self.state, self.table)

    def window_plan(self, snr_db: float) -> list[tuple[int, float]]:
        """(rate, packet share) slices for the next window. Probe windows send
        probe_fraction of their packets at the probe rate, the rest at the
        current rate, mirroring Minstrel's sparse sampling frames."""
        decision = self.select(snr_db)
        if not decision.is_probe:
            return [(decision.rate, 1.0)]
        frac = self.state.config.probe_fraction
        if frac >= 1.0:
            return [(decision.rate, 1.0)]
        return [(self.state.current_rate, 1.0 - frac), (decision.rate, frac)]

    def record(self, rate: int, attempted: int, delivered: int) -> None:
        self._attempts[rate] += attempted
        self._successes[rate] += delivered

    def end_window(self) -> None:
        self.state = on_window_end(self.state, self._attempts, self._successes, self.table)
        self._attempts[:] = 0
        self._successes[:] = 0

    @property
    def current_rate(self) -> int:
        return self.state.current_rate


class IdealSelector:
    """Threshold selector with no memory; oracle contrast to Minstrel."""

    def __init__(self, table: tuple[Mcs, ...]):
        self.table = table
        self._last = 0

    def select(self, snr_db: float) -> RaDecision:
        self._last = ideal_rate(snr_db, self.table)
        return RaDecision(rate=self._last, is_probe=False)

    def window_plan(self, snr_db: float) -> list[tuple[int, float]]:
        return [(self.select(snr_db).rate, 1.0)]

    def record(self, rate: int, attempted: int, delivered: int) -> None:
        pass

    def end_window(self) -> None:
        pass

    @property
    def current_rate(self) -> int:
        return self._last
