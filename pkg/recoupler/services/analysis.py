"""
Order-availability statistics and the prime-counting checks behind them.
"""

import math
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from recoupler.core.config import get_settings
from recoupler.core.exceptions import (
    BadProgressionError,
    DomainTooSmallError,
    InvalidParameterError,
    RegistryExhaustedError,
)
from recoupler.schemas.analysis import (
    CTableSummary,
    GapStats,
    IntervalScan,
    PaleyReachability,
    PaleyScan,
    RosserCheck,
    RosserScan,
)
from recoupler.services.hadamard import OrderRegistry, get_registry
from recoupler.services.primes import PrimeSieve, get_sieve
from recoupler.utils.logger import analysis_logger as logger

CSV_COLUMNS = ["n", "n_under", "n_over", "delta", "c"]

# Rosser's upper bound needs log x > 3/2
ROSSER_MIN_X = math.exp(1.5)


def _sieve(sieve: Optional[PrimeSieve] = None) -> PrimeSieve:
    return sieve or get_sieve(get_settings().analysis.sieve_bound)


# Order statistics

def c_table(max_n: int, registry: Optional[OrderRegistry] = None) -> List[GapStats]:
    """Gap and overhead c = n_bar/n for every n in 1..max_n."""
    if max_n < 1:
        raise InvalidParameterError("max_n", max_n, "must be at least 1")
    registry = registry or get_registry()
    orders = np.asarray(registry.orders, dtype=np.int64)
    n = np.arange(1, max_n + 1, dtype=np.int64)
    over_index = np.searchsorted(orders, n, side="left")
    if over_index[-1] >= orders.size:
        first = int(n[np.argmax(over_index >= orders.size)])
        raise RegistryExhaustedError(first, registry.bound)
    n_over = orders[over_index]
    n_under = np.where(over_index > 0, orders[np.maximum(over_index - 1, 0)], 0)

    stats = []
    for value, under, over in zip(n.tolist(), n_under.tolist(), n_over.tolist()):
        ratio = Fraction(over, value)
        stats.append(
            GapStats(
                n=value,
                n_under=under,
                n_over=over,
                delta=over - under,
                c_fraction=f"{ratio.numerator}/{ratio.denominator}",
                c=float(ratio),
            )
        )
    return stats


def c_table_frame(stats: Sequence[GapStats]) -> pd.DataFrame:
    return pd.DataFrame([s.model_dump() for s in stats], columns=CSV_COLUMNS)


def write_c_table_csv(stats: Sequence[GapStats], path: Union[str, Path]) -> None:
    c_table_frame(stats).to_csv(path, index=False, float_format="%.12g")


def gap_summary(stats: Sequence[GapStats]) -> CTableSummary:
    """Max and median c, how often c exceeds 1.1, and our gaps beside the literature figures."""
    settings = get_settings().analysis
    frame = c_table_frame(stats)
    worst = int(frame["c"].idxmax())

    def max_gap(limit: int) -> Optional[int]:
        if frame["n"].max() < limit:
            return None
        return int(frame.loc[frame["n"] <= limit, "delta"].max())

    summary = CTableSummary(
        max_n=int(frame["n"].max()),
        max_c=float(frame["c"].max()),
        max_c_at=int(frame.loc[worst, "n"]),
        median_c=float(frame["c"].median()),
        count_c_above_1_1=int((frame["c"] > 1.1).sum()),
        max_gap_below_1000=max_gap(1000),
        max_gap_below_10000=max_gap(10000),
        literature_max_gap_1000=settings.literature_max_gap_1000,
        literature_max_gap_10000=settings.literature_max_gap_10000,
        all_c_below_2=bool((frame["c"] < 2).all()),
    )
    summary.notes.append(
        "Published gap figures count every known Hadamard order; this registry only "
        "holds Sylvester and prime Paley orders and their products."
    )
    logger.info(
        "Order statistics",
        max_n=summary.max_n,
        max_c=summary.max_c,
        median_c=summary.median_c,
    )
    return summary


def plot_c_table(stats: Sequence[GapStats], path: Union[str, Path]) -> None:
    """Scatter c against n and the gap against n, saved as an image."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    frame = c_table_frame(stats)
    fig, (top, bottom) = plt.subplots(2, 1, figsize=(8, 6), sharex=True)
    top.plot(frame["n"], frame["c"], ".", markersize=2)
    top.axhline(2.0, color="grey", linewidth=0.8, linestyle="--")
    top.set_ylabel("c = n_bar / n")
    bottom.plot(frame["n"], frame["delta"], ".", markersize=2)
    bottom.set_ylabel("gap")
    bottom.set_xlabel("n")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


# Prime counting

def prime_pi(x: int, sieve: Optional[PrimeSieve] = None) -> int:
    return _sieve(sieve).pi(x)


def prime_pi_ap(x: int, a: int, q: int, sieve: Optional[PrimeSieve] = None) -> int:
    """Primes p <= x with p = a (mod q)."""
    if q < 1 or math.gcd(a, q) != 1:
        raise BadProgressionError(a, q)
    if x < 2:
        return 0
    primes = _sieve(sieve).primes_between(1, x)
    return int(np.count_nonzero(primes % q == a % q))


def rosser_check(x: int, sieve: Optional[PrimeSieve] = None) -> RosserCheck:
    """x/(log x - 1/2) < pi(x) < x/(log x - 3/2)."""
    if x <= ROSSER_MIN_X:
        raise DomainTooSmallError(x, ROSSER_MIN_X)
    log_x = math.log(x)
    lower = x / (log_x - 0.5)
    upper = x / (log_x - 1.5)
    count = prime_pi(x, sieve)
    return RosserCheck(x=x, lower=lower, pi=count, upper=upper, holds=lower < count < upper)


def rosser_scan(start: int, stop: int, sieve: Optional[PrimeSieve] = None) -> RosserScan:
    """Evaluate the double inequality for every integer x in [start, stop)."""
    sieve = _sieve(sieve)
    first = max(start, math.floor(ROSSER_MIN_X) + 1)
    x = np.arange(first, stop, dtype=np.int64)
    if x.size:
        sieve.pi(int(x[-1]))
    log_x = np.log(x.astype(np.float64))
    counts = sieve.pi_table[x] if x.size else x
    holds = (x / (log_x - 0.5) < counts) & (counts < x / (log_x - 1.5))
    failures = x[~holds].tolist()
    return RosserScan(start=start, stop=stop, checked=int(x.size), failures=failures)


def prime_in_interval(n: int, epsilon: float, sieve: Optional[PrimeSieve] = None) -> Optional[int]:
    """Smallest prime in (n, n(1 + epsilon)], or None."""
    high = math.floor(n * (1 + epsilon))
    primes = _sieve(sieve).primes_between(n, high)
    return int(primes[0]) if primes.size else None


def interval_scan(start: int, stop: int, margin: float = 0.0, sieve: Optional[PrimeSieve] = None) -> IntervalScan:
    """Look for a prime in (n, n(1 + 2/log n + margin)] for every n in [start, stop)."""
    sieve = _sieve(sieve)
    first = max(start, 3)
    misses = [
        n for n in range(first, stop)
        if prime_in_interval(n, 2 / math.log(n) + margin, sieve) is None
    ]
    return IntervalScan(start=start, stop=stop, margin=margin, checked=max(stop - first, 0), misses=misses)


def paley_reachability(
    n: int,
    r: int,
    epsilon: Optional[float] = None,
    registry: Optional[OrderRegistry] = None,
    sieve: Optional[PrimeSieve] = None,
) -> PaleyReachability:
    """Primes in (n, n(1+eps)^r], how many are 3 mod 4, and whether n_bar stays under the window.

    A prime q = 3 mod 4 in the window gives the order q + 1, so
    n_bar(n) <= n(1+eps)^r + 1 whenever one is found.
    """
    if n < 3:
        raise InvalidParameterError("n", n, "must be at least 3")
    if r < 1:
        raise InvalidParameterError("r", r, "must be at least 1")
    epsilon = 2 / math.log(n) if epsilon is None else epsilon
    reach = n * (1 + epsilon) ** r
    high = math.floor(reach)
    primes = _sieve(sieve).primes_between(n, high)
    three = int(np.count_nonzero(primes % 4 == 3))

    n_bar = bound_holds = None
    if registry is not None or high + 1 <= get_settings().registry.bound:
        registry = registry or get_registry()
        try:
            n_bar = registry.n_bar(n)
            bound_holds = n_bar <= reach + 1
        except RegistryExhaustedError:
            pass
    return PaleyReachability(
        n=n,
        r=r,
        epsilon=epsilon,
        window_high=high,
        primes_found=int(primes.size),
        primes_3mod4=three,
        has_3mod4=three > 0,
        n_bar=n_bar,
        bound_holds=bound_holds,
    )


def paley_scan(
    start: int,
    stop: int,
    r: int,
    registry: Optional[OrderRegistry] = None,
    sieve: Optional[PrimeSieve] = None,
) -> PaleyScan:
    """Fraction of n in [start, stop) whose window holds a prime 3 mod 4, against 1 - 2^-r."""
    sieve = _sieve(sieve)
    found = 0
    checked = 0
    bound_failures = []
    for n in range(max(start, 3), stop):
        result = paley_reachability(n, r, registry=registry, sieve=sieve)
        checked += 1
        found += result.has_3mod4
        if result.has_3mod4 and result.bound_holds is False:
            bound_failures.append(n)
    fraction = found / checked if checked else 0.0
    expected = 1 - 2.0 ** (-r)
    return PaleyScan(
        start=start,
        stop=stop,
        r=r,
        checked=checked,
        fraction_with_3mod4=fraction,
        expected_lower=expected,
        holds=fraction >= expected,
        bound_failures=bound_failures,
    )
