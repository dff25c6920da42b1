"""Probability model for mu(n) and its empirical checks.

The model treats mu(1), mu(2), ... as i.i.d. draws from

    mu  : -1, 0, +1  with probabilities 3/pi^2, 1 - 6/pi^2, 3/pi^2
    |mu|:  0, 1      with probabilities 1 - 6/pi^2, 6/pi^2

and derives CLT normalizations, exceedance probabilities and two upper
bounds for M(n) from it.  Nothing here argues that the model is *true*;
the empirical functions only measure how well the tables fit it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core_mu import MertensSeries, MuTable, OmegaTable
from .errors import InvalidArgument, MoebiusLabError

SQUAREFREE_DENSITY = 6.0 / math.pi**2
MU_SIGMA = math.sqrt(SQUAREFREE_DENSITY)
ABS_VARIANCE = SQUAREFREE_DENSITY * (1.0 - SQUAREFREE_DENSITY)

DEFAULT_BLOCK_LENS = (1_000, 10_000, 100_000)
DEFAULT_MAX_BLOCKS = 200
HIST_BINS = 41
HIST_RANGE = (-4.0, 4.0)
MIN_CLT_BLOCK = 10_000
MIN_CLT_BLOCKS = 30


class IdentityViolation(MoebiusLabError):
    """Two routes to the same exact quantity disagreed."""


@dataclass(frozen=True)
class DistributionRule:
    support: tuple[int, ...]
    probs: tuple[float, ...]
    mean: float
    variance: float

    def __post_init__(self):
        if len(self.support) != len(self.probs):
            raise InvalidArgument("support and probs differ in length")
        if abs(math.fsum(self.probs) - 1.0) > 1e-12 or self.variance < 0:
            raise InvalidArgument("not a probability distribution")

    def prob(self, value: int) -> float:
        return self.probs[self.support.index(value)]


def theoretical_distribution(absolute: bool = False) -> DistributionRule:
    """Distribution of mu(k) (or |mu(k)| with ``absolute=True``) under the model."""
    rho = SQUAREFREE_DENSITY
    if absolute:
        return DistributionRule((0, 1), (1.0 - rho, rho), rho, rho * (1.0 - rho))
    return DistributionRule((-1, 0, 1), (rho / 2, 1.0 - rho, rho / 2), 0.0, rho)


@dataclass(frozen=True)
class BlockStatsRow:
    block_index: int
    block_len: int
    count_minus: int
    count_zero: int
    count_plus: int

    @property
    def p_e_minus(self) -> float:
        return self.count_minus / self.block_len

    @property
    def p_e_zero(self) -> float:
        return self.count_zero / self.block_len

    @property
    def p_e_plus(self) -> float:
        return self.count_plus / self.block_len

    @property
    def p_e_abs(self) -> float:
        """Empirical probability of |mu| = 1."""
        return (self.count_minus + self.count_plus) / self.block_len

    def expected_counts(self) -> tuple[float, float, float]:
        """N * p_t for -1, 0, +1."""
        rule = theoretical_distribution()
        return tuple(self.block_len * p for p in rule.probs)

    def max_deviation(self) -> float:
        rule = theoretical_distribution()
        pe = (self.p_e_minus, self.p_e_zero, self.p_e_plus)
        return max(abs(a - b) for a, b in zip(pe, rule.probs))


def _blocks(table: MuTable, block_len: int, max_blocks: int | None) -> np.ndarray:
    """(count, block_len) view of consecutive full blocks starting at n = 1."""
    if block_len < 1:
        raise InvalidArgument(f"block_len must be >= 1, got {block_len}")
    count = table.n_max // block_len
    if max_blocks is not None:
        count = min(count, max_blocks)
    if count < 1:
        raise InvalidArgument(f"no full block of length {block_len} fits in n_max={table.n_max}")
    # trailing partial block is dropped, never padded
    return table.body()[: count * block_len].reshape(count, block_len)


def block_frequencies(
    table: MuTable, block_len: int, max_blocks: int | None = DEFAULT_MAX_BLOCKS
) -> list[BlockStatsRow]:
    blocks = _blocks(table, block_len, max_blocks)
    minus = np.count_nonzero(blocks == -1, axis=1)
    plus = np.count_nonzero(blocks == 1, axis=1)
    zero = block_len - minus - plus
    return [
        BlockStatsRow(i + 1, block_len, int(a), int(b), int(c))
        for i, (a, b, c) in enumerate(zip(minus, zero, plus))
    ]


def global_frequencies(table: MuTable) -> dict[int, float]:
    """p_e for -1, 0, +1 over the whole table."""
    body = table.body()
    n = table.n_max
    minus = int(np.count_nonzero(body == -1))
    plus = int(np.count_nonzero(body == 1))
    return {-1: minus / n, 0: (n - minus - plus) / n, 1: plus / n}


def squarefree_count(table: MuTable, x: int) -> int:
    return int(np.count_nonzero(table.values[1 : x + 1]))


def squarefree_residual(table: MuTable, x: int) -> float:
    """(Q(x) - 6x/pi^2) / sqrt(x), Q(x) the number of squarefree n <= x."""
    if x < 1:
        raise InvalidArgument(f"x must be >= 1, got {x}")
    if x > table.n_max:
        raise InvalidArgument(f"x={x} beyond table n_max={table.n_max}")
    return (squarefree_count(table, x) - SQUAREFREE_DENSITY * x) / math.sqrt(x)


def _finite(x: float) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise InvalidArgument(f"argument must be finite, got {x}")
    return x


def normal_cdf(x: float) -> float:
    """Standard normal CDF via erfc, accurate in both tails."""
    x = _finite(x)
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def normal_sf(x: float) -> float:
    """1 - normal_cdf(x) without cancellation."""
    x = _finite(x)
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def normal_pdf(x):
    return np.exp(-0.5 * np.square(x)) / math.sqrt(2.0 * math.pi)


def normal_quantile(p: float) -> float:
    """K with normal_cdf(K) = p, by bisection.

    The upper half is solved against the survival function so that p close
    to 1 keeps its resolution.
    """
    p = float(p)
    if not 0.0 < p < 1.0:
        raise InvalidArgument(f"p must lie in (0, 1), got {p}")
    if p == 0.5:
        return 0.0
    if p > 0.5:
        target, f, lo, hi = 1.0 - p, normal_sf, 0.0, 40.0
        decreasing = True
    else:
        target, f, lo, hi = p, normal_cdf, -40.0, 0.0
        decreasing = False
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        below = f(mid) < target
        if below != decreasing:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def k_alpha_half(alpha: float) -> float:
    """Two-sided critical value: the integral of the density over [-K, K] is 1 - alpha."""
    _check_alpha(alpha)
    return normal_quantile(1.0 - alpha / 2.0)


def _check_alpha(alpha: float, allow_one: bool = False) -> float:
    alpha = float(alpha)
    ok = 0.0 < alpha < 1.0 or (allow_one and alpha == 1.0)
    if not ok:
        raise InvalidArgument(f"alpha must lie in (0, 1{']' if allow_one else ')'}, got {alpha}")
    return alpha


def mertens_type_prob(c: float) -> float:
    """P{M(n) > c sqrt(n)} in the large-n limit of the model."""
    c = _finite(c)
    if c <= 0:
        raise InvalidArgument(f"C must be > 0, got {c}")
    return normal_sf(c / MU_SIGMA)


@dataclass(frozen=True)
class BoundReport:
    n: int
    alpha: float
    k_alpha_2: float  # multiplier of sigma*sqrt(n); 1/sqrt(alpha) for the Chebyshev form
    bound: float
    observed_m: int
    holds: bool
    method: str = "clt"
    confidence: float = 0.0  # probability the bound holds under the model (a lower bound for chebyshev)
    two_sided: bool = False
    mean_interval: tuple[float, float] | None = None
    squarefree_m: int | None = None
    notes: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        d = dict(self.__dict__)
        d["mean_interval"] = list(self.mean_interval) if self.mean_interval else None
        return d


def _observed(series: MertensSeries, n: int) -> int:
    if not 1 <= n <= series.n_max:
        raise InvalidArgument(f"n={n} outside 1..{series.n_max}")
    return series[n]


def _holds(m: int, bound: float, two_sided: bool) -> bool:
    return abs(m) <= bound if two_sided else m <= bound


def clt_bound(n: int, alpha: float, series: MertensSeries, two_sided: bool = False) -> BoundReport:
    """M(n) <= sigma * K_{alpha/2} * sqrt(n), holding with probability 1 - alpha."""
    alpha = _check_alpha(alpha)
    m = _observed(series, n)
    k = k_alpha_half(alpha)
    bound = MU_SIGMA * k * math.sqrt(n)
    half = MU_SIGMA / math.sqrt(n) * k
    return BoundReport(
        n=n,
        alpha=alpha,
        k_alpha_2=k,
        bound=bound,
        observed_m=m,
        holds=_holds(m, bound, two_sided),
        method="clt",
        confidence=1.0 - alpha,
        two_sided=two_sided,
        mean_interval=(-half, half),
    )


def squarefree_mertens(omega: OmegaTable, n: int) -> int:
    """M(n) recomputed as the sum of (-1)**omega(k) over squarefree k <= n."""
    if n > omega.n_max:
        raise InvalidArgument(f"n={n} beyond omega table n_max={omega.n_max}")
    w = omega.omega[1 : n + 1]
    sf = omega.squarefree[1 : n + 1]
    odd = int(np.count_nonzero(sf & (w % 2 == 1)))
    return int(np.count_nonzero(sf)) - 2 * odd


def chebyshev_bound(
    n: int, alpha: float, series: MertensSeries, omega: OmegaTable, two_sided: bool = False
) -> BoundReport:
    """M(n) <= sigma / sqrt(alpha) * sqrt(n), with probability greater than 1 - alpha.

    Also re-derives M(n) from omega over the squarefree k <= n and raises
    IdentityViolation if it disagrees with the prefix sum.
    """
    alpha = _check_alpha(alpha, allow_one=True)
    m = _observed(series, n)
    sq_m = squarefree_mertens(omega, n)
    if sq_m != m:
        raise IdentityViolation(f"squarefree sum gives M({n})={sq_m}, prefix sum gives {m}")
    bound = math.sqrt(SQUAREFREE_DENSITY / alpha) * math.sqrt(n)
    notes = []
    if alpha == SQUAREFREE_DENSITY:
        notes.append(f"bound is sqrt(n); holds with probability > 1 - 6/pi^2 = {1 - SQUAREFREE_DENSITY:.4f}")
    return BoundReport(
        n=n,
        alpha=alpha,
        k_alpha_2=1.0 / math.sqrt(alpha),
        bound=bound,
        observed_m=m,
        holds=_holds(m, bound, two_sided),
        method="chebyshev",
        confidence=1.0 - alpha,
        two_sided=two_sided,
        squarefree_m=sq_m,
        notes=notes,
    )


def _clt_blocks(table: MuTable, block_len: int, max_blocks: int | None) -> np.ndarray:
    if block_len < MIN_CLT_BLOCK:
        raise InvalidArgument(f"block_len must be >= {MIN_CLT_BLOCK} for the CLT regime, got {block_len}")
    blocks = _blocks(table, block_len, max_blocks)
    if blocks.shape[0] < MIN_CLT_BLOCKS:
        raise InvalidArgument(f"need at least {MIN_CLT_BLOCKS} blocks, only {blocks.shape[0]} fit")
    return blocks


def normalized_mertens_samples(
    table: MuTable, block_len: int, max_blocks: int | None = DEFAULT_MAX_BLOCKS
) -> np.ndarray:
    """Block sums of mu, each divided by sqrt(6 N / pi^2)."""
    blocks = _clt_blocks(table, block_len, max_blocks)
    sums = blocks.sum(axis=1, dtype=np.int64)
    return sums / math.sqrt(SQUAREFREE_DENSITY * block_len)


def _abs_standardize(count, n):
    return (count - SQUAREFREE_DENSITY * n) / np.sqrt(n * ABS_VARIANCE)


def abs_sum_stat(table: MuTable, n: int) -> float:
    """Standardized sum of |mu(k)| for k <= n."""
    if n < 1:
        raise InvalidArgument(f"n must be >= 1, got {n}")
    if n > table.n_max:
        raise InvalidArgument(f"n={n} beyond table n_max={table.n_max}")
    return float(_abs_standardize(squarefree_count(table, n), n))


def abs_block_stats(table: MuTable, block_len: int, max_blocks: int | None = DEFAULT_MAX_BLOCKS) -> np.ndarray:
    """abs_sum_stat applied to each disjoint block instead of the prefix."""
    blocks = _clt_blocks(table, block_len, max_blocks)
    return _abs_standardize(np.count_nonzero(blocks, axis=1), block_len)


def abs_sum_exceedance(c: float, n: int) -> float:
    """P{sum_{k<=n} |mu(k)| > c n} under the model."""
    c = _finite(c)
    if n < 1:
        raise InvalidArgument(f"n must be >= 1, got {n}")
    z = (c - SQUAREFREE_DENSITY) * n / math.sqrt(n * ABS_VARIANCE)
    return normal_sf(z)


def histogram(samples, bin_count: int = HIST_BINS, range: tuple[float, float] = HIST_RANGE):
    """Density-normalized histogram as a list of (bin_center, density)."""
    samples = np.asarray(samples, dtype=np.float64)
    if samples.size == 0:
        raise InvalidArgument("no samples")
    if bin_count < 1:
        raise InvalidArgument(f"bin_count must be >= 1, got {bin_count}")
    lo, hi = range
    if not hi > lo:
        raise InvalidArgument(f"empty range {range}")
    inside = np.count_nonzero((samples >= lo) & (samples <= hi))
    if inside == 0:
        raise InvalidArgument(f"no samples inside {range}")
    density, edges = np.histogram(samples, bins=bin_count, range=(lo, hi), density=True)
    centers = 0.5 * (edges[:-1] + edges[1:])
    return list(zip(centers.tolist(), density.tolist()))
