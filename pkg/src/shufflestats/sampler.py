"""Random generation of shuffled permutations, with exact reference checks.

Two independent samplers live here. The first grows a permutation one
symbol at a time through weighted insertions; after n-1 steps the result
carries the k-shuffle law exactly, with no rejection and no enumeration.
The second simulates the physical riffle (binomial cut, uniformly random
interleave) and exists to cross-validate the first. Empirical output is
summarized against the exact pmfs from :mod:`shufflestats.measures` via a
Pearson chi-square test with tail-bin merging plus per-bin binomial
z-scores.

Randomness comes from counter-based Philox streams keyed by
``(seed, stream_id)``. Each stream draws a fixed, precomputed number of
samples and the per-stream histograms are merged in stream-id order, so
aggregate output is reproducible no matter how the threads are scheduled.
Where a draw must hit an exact rational probability, the rational is
converted to an integer threshold out of 2**53 and compared against a
uniform 53-bit integer; the per-draw bias is below 2**-53.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping

import numpy as np
from scipy import stats as _scipy_stats

from .errors import CertificationError, UserInputError
from .measures import ExactPmf, c_pmf_C, d_pmf_C, d_pmf_R, parsimony_distance
from .permutations import Permutation, cyclic_rotate, descent_count, insert_symbol

MEASURE_CODES = ("R", "C")
STATISTIC_NAMES = ("d", "c", "parsimony")
MAX_RIFFLE_ROUNDS = 62

_THRESHOLD_BITS = 53
_SCALE = 1 << _THRESHOLD_BITS
_MIN_EXPECTED = 5.0
_TREE_CAP = 8


@dataclass(frozen=True)
class SamplerConfig:
    """Parameters of one sampling run.

    The triple (seed, streams, count) pins the output exactly: the same
    config always produces the same SampleSummary, byte for byte.
    """

    k: int
    n: int
    count: int
    seed: int
    streams: int = 8

    def __post_init__(self) -> None:
        if self.k < 1:
            raise UserInputError(f"k must be a positive integer, got {self.k}")
        if self.n < 1:
            raise UserInputError(f"n must be a positive integer, got {self.n}")
        if self.count < 1:
            raise UserInputError(f"count must be positive, got {self.count}")
        if self.streams < 1:
            raise UserInputError(f"streams must be positive, got {self.streams}")
        if not 0 <= self.seed < 2**64:
            raise UserInputError("seed must fit in an unsigned 64-bit integer")


@dataclass(frozen=True)
class SampleSummary:
    """Histogram of a sampled statistic plus its fit against the exact pmf.

    The histogram and empirical pmf are keyed by the exact support (bins
    with zero observations are present), chi_square and p_value come from
    the merged-bin Pearson test, and max_bin_z is the largest absolute
    per-bin binomial z-score before any merging.
    """

    histogram: dict[int, int]
    empirical_pmf: dict[int, float]
    chi_square: float
    p_value: float
    max_bin_z: float

    @property
    def count(self) -> int:
        return sum(self.histogram.values())


def _stream_generator(seed: int, stream_id: int) -> np.random.Generator:
    """Philox generator for one stream, keyed by (seed, stream_id)."""
    return np.random.Generator(np.random.Philox(key=[seed, stream_id]))


def _stream_counts(count: int, streams: int) -> list[int]:
    """Fixed per-stream sample counts; the remainder goes to the low ids.

    >>> _stream_counts(10, 4)
    [3, 3, 2, 2]
    """
    base, extra = divmod(count, streams)
    return [base + (sid < extra) for sid in range(streams)]


def _case_thresholds(k: int, m: int) -> np.ndarray:
    """53-bit thresholds for drawing a case-1 insertion at deck size m.

    Entry d is floor(2**53 * (d+1)(m+k-d) / (k(m+1))), the total case-1
    probability for a permutation of m symbols with d descents. States
    with d >= k are unreachable and get the always-accept threshold.
    """
    out = np.empty(m, dtype=np.uint64)
    for d in range(m):
        if d >= k:
            out[d] = _SCALE
            continue
        p1 = Fraction((d + 1) * (m + k - d), k * (m + 1))
        out[d] = min((p1.numerator * _SCALE) // p1.denominator, _SCALE)
    return out


def _insertion_step(k: int, m: int, words: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Insert symbol m+1 into every row of an (count, m) array of words.

    Case 1 inserts after slot m or after a descent slot and keeps the
    descent count; case 2 inserts after slot 0 or after an ascent slot
    and raises it by one. The case is drawn first, then a slot uniformly
    among the d+1 (case 1) or m-d (case 2) qualifying slots.
    """
    count = words.shape[0]
    desc = words[:, :-1] > words[:, 1:]
    d = desc.sum(axis=1)
    u = rng.integers(0, _SCALE, size=count, dtype=np.uint64)
    case1 = u < _case_thresholds(k, m)[d]
    t = rng.integers(0, np.where(case1, d + 1, m - d))
    qualifies = np.empty((count, m + 1), dtype=bool)
    qualifies[:, 0] = ~case1
    if m > 1:
        qualifies[:, 1:m] = desc == case1[:, None]
    qualifies[:, m] = case1
    j = np.argmax(qualifies.cumsum(axis=1) > t[:, None], axis=1)
    idx = np.arange(m + 1, dtype=np.int64)[None, :]
    src = np.clip(idx - (idx > j[:, None]), 0, m - 1)
    out = np.take_along_axis(words, src, axis=1)
    out[np.arange(count), j] = m + 1
    return out


def _insertion_words(k: int, n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Batch of `count` words drawn from the k-shuffle measure on n symbols."""
    words = np.ones((count, 1), dtype=np.int32)
    for m in range(1, n):
        words = _insertion_step(k, m, words, rng)
    return words


def sample_R(k: int, n: int, rng: np.random.Generator) -> Permutation:
    """Draw one permutation of n symbols from the k-shuffle measure.

    Starts from the one-symbol identity and performs n-1 weighted
    insertions; the output is exact, not approximate.
    """
    if k < 1:
        raise UserInputError(f"k must be a positive integer, got {k}")
    if n < 1:
        raise UserInputError(f"n must be a positive integer, got {n}")
    word = _insertion_words(k, n, 1, rng)[0]
    return Permutation._from_trusted(tuple(int(s) for s in word))


def sample_C(k: int, n: int, rng: np.random.Generator) -> Permutation:
    """Draw one permutation from the cut-then-shuffle measure.

    A k-shuffle draw followed by a uniformly random cyclic rotation.
    """
    if n < 2:
        raise UserInputError(f"the cut measure needs n >= 2, got n={n}")
    p = sample_R(k, n, rng)
    return cyclic_rotate(p, int(rng.integers(0, n)))


def gsr_shuffle(p: Permutation, rng: np.random.Generator) -> Permutation:
    """One physical riffle applied to a deck in the order given by p.

    The deck is cut at a Binomial(n, 1/2) position, then cards drop from
    the bottoms of the two packets with probability proportional to the
    packets' current sizes, building the shuffled pile bottom up. Every
    interleaving of the two packets is equally likely.
    """
    n = p.n
    cut = int(rng.binomial(n, 0.5))
    top, bottom = list(p.word[:cut]), list(p.word[cut:])
    out = [0] * n
    a, b = len(top), len(bottom)
    for pos in range(n - 1, -1, -1):
        if int(rng.integers(0, a + b)) < a:
            a -= 1
            out[pos] = top[a]
        else:
            b -= 1
            out[pos] = bottom[b]
    return Permutation._from_trusted(tuple(out))


def gsr_iterate(n: int, rounds: int, rng: np.random.Generator) -> Permutation:
    """Riffle a sorted n-card deck `rounds` times.

    The INVERSE of the returned permutation has descent count distributed
    as d_pmf_R(2**rounds, n); callers comparing against the closed-form
    pmf must invert first.
    """
    if n < 1:
        raise UserInputError(f"n must be a positive integer, got {n}")
    if rounds < 0:
        raise UserInputError(f"rounds must be nonnegative, got {rounds}")
    p = Permutation.identity(n)
    for _ in range(rounds):
        p = gsr_shuffle(p, rng)
    return p


def _gsr_words(n: int, rounds: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Vectorized r-round riffle of `count` sorted decks.

    Dropping cards proportionally to packet sizes makes every
    interleaving equally likely, so each round places the top packet's
    cards at a uniformly random size-`cut` subset of positions and fills
    both packets in order.
    """
    words = np.tile(np.arange(1, n + 1, dtype=np.int32), (count, 1))
    for _ in range(rounds):
        cut = rng.binomial(n, 0.5, size=count)
        ranks = np.argsort(np.argsort(rng.random((count, n)), axis=1), axis=1)
        in_top = ranks < cut[:, None]
        src = np.where(
            in_top,
            in_top.cumsum(axis=1) - 1,
            cut[:, None] + (~in_top).cumsum(axis=1) - 1,
        )
        words = np.take_along_axis(words, src, axis=1)
    return words


def _descents_per_row(words: np.ndarray) -> np.ndarray:
    return (words[:, :-1] > words[:, 1:]).sum(axis=1)


def _cyclic_descents_per_row(words: np.ndarray) -> np.ndarray:
    return _descents_per_row(words) + (words[:, -1] > words[:, 0])


def _inverse_descents(words: np.ndarray) -> np.ndarray:
    """Descent count of the inverse of each row."""
    n = words.shape[1]
    inv = np.empty_like(words)
    np.put_along_axis(inv, words - 1, np.arange(1, n + 1, dtype=words.dtype)[None, :], axis=1)
    return _descents_per_row(inv)


def _parsimony_table(n: int, flavor: str) -> np.ndarray:
    """Lookup table mapping a statistic value to its parsimony distance."""
    if flavor == "riffle":
        return np.array([parsimony_distance(d, flavor) for d in range(n)], dtype=np.int64)
    return np.array([0] + [parsimony_distance(c, flavor) for c in range(1, n)], dtype=np.int64)


def _check_measure_statistic(measure: str, k: int, n: int, statistic: str) -> None:
    if measure not in MEASURE_CODES:
        raise UserInputError(f"unknown measure {measure!r}; expected one of {MEASURE_CODES}")
    if statistic not in STATISTIC_NAMES:
        raise UserInputError(f"unknown statistic {statistic!r}; expected one of {STATISTIC_NAMES}")
    if k < 1 or n < 1:
        raise UserInputError(f"k and n must be positive, got k={k}, n={n}")
    if measure == "C" and n < 2:
        raise UserInputError(f"the cut measure needs n >= 2, got n={n}")
    if measure == "R" and statistic == "c":
        raise UserInputError(
            "statistic 'c' under measure 'R' has no closed-form reference pmf; "
            "sample under measure 'C' or use statistic 'd'"
        )


def exact_statistic_pmf(measure: str, k: int, n: int, statistic: str) -> ExactPmf:
    """Exact reference distribution for a sampled statistic.

    Under measure "R" the parsimony statistic is the pushforward of the
    descent count; under "C" it is the pushforward of the cyclic descent
    count. The pair (measure "R", statistic "c") is rejected.
    """
    _check_measure_statistic(measure, k, n, statistic)
    if measure == "R":
        base = d_pmf_R(k, n)
        if statistic == "d":
            return base
        return base.pushforward(lambda v: parsimony_distance(v, "riffle"))
    if statistic == "d":
        return d_pmf_C(k, n)
    base = c_pmf_C(k, n)
    if statistic == "c":
        return base
    return base.pushforward(lambda v: parsimony_distance(v, "cut_riffle"))


def _run_streams(
    config: SamplerConfig, worker: Callable[[np.random.Generator, int], np.ndarray]
) -> np.ndarray:
    """Run one worker per stream and merge the histograms in id order."""
    chunks = _stream_counts(config.count, config.streams)

    def run(sid: int) -> np.ndarray:
        return worker(_stream_generator(config.seed, sid), chunks[sid])

    with ThreadPoolExecutor(max_workers=config.streams) as pool:
        parts = list(pool.map(run, range(config.streams)))
    width = max(part.shape[0] for part in parts)
    merged = np.zeros(width, dtype=np.int64)
    for part in parts:
        merged[: part.shape[0]] += part
    return merged


def _fit(observed: Mapping[int, int], exact: ExactPmf, count: int) -> tuple[float, float, float]:
    """Pearson chi-square with tail merging, plus the largest per-bin z.

    Bins are merged (smallest expected count into its smaller neighbor)
    until every expected count reaches 5; degrees of freedom are the
    merged bin count minus one. The z-scores are computed on the
    original, unmerged bins. A point-mass reference needs no test and
    scores chi_square 0, p_value 1.
    """
    support = exact.support
    probs = {v: float(exact.prob(v)) for v in support}
    max_z = 0.0
    for v in support:
        p = probs[v]
        if p >= 1.0:
            continue
        z = (observed[v] - count * p) / math.sqrt(count * p * (1.0 - p))
        max_z = max(max_z, abs(z))
    if len(support) == 1:
        return 0.0, 1.0, 0.0
    bins = [[float(observed[v]), count * probs[v]] for v in support]
    while len(bins) > 1 and min(exp for _, exp in bins) < _MIN_EXPECTED:
        i = min(range(len(bins)), key=lambda idx: bins[idx][1])
        if i == 0:
            j = 1
        elif i == len(bins) - 1:
            j = i - 1
        else:
            j = i - 1 if bins[i - 1][1] <= bins[i + 1][1] else i + 1
        bins[j][0] += bins[i][0]
        bins[j][1] += bins[i][1]
        del bins[i]
    if len(bins) < 2:
        raise UserInputError(
            f"undersized sample: {count} draws cannot give every merged bin "
            f"an expected count of {_MIN_EXPECTED}"
        )
    chi_square = sum((obs - exp) ** 2 / exp for obs, exp in bins)
    p_value = float(_scipy_stats.chi2.sf(chi_square, len(bins) - 1))
    return chi_square, p_value, max_z


def _summarize(bin_counts: np.ndarray, exact: ExactPmf, count: int) -> SampleSummary:
    """Build a SampleSummary from raw bincounts, policing the support.

    A sample landing outside the exact support has probability zero, so
    its appearance means the sampler itself is wrong; that raises
    CertificationError rather than feeding the fit.
    """
    support_set = set(exact.support)
    stray = {
        int(v): int(c) for v, c in enumerate(bin_counts) if c and int(v) not in support_set
    }
    if stray:
        raise CertificationError(f"samples outside the exact support: {stray}")
    observed = {
        v: int(bin_counts[v]) if v < bin_counts.shape[0] else 0 for v in exact.support
    }
    total = sum(observed.values())
    if total != count:
        raise CertificationError(f"histogram totals {total}, expected {count}")
    chi_square, p_value, max_z = _fit(observed, exact, count)
    empirical = {v: observed[v] / count for v in exact.support}
    return SampleSummary(
        histogram=observed,
        empirical_pmf=empirical,
        chi_square=chi_square,
        p_value=p_value,
        max_bin_z=max_z,
    )


def goodness_of_fit(summary: SampleSummary, exact: ExactPmf) -> tuple[float, float, float]:
    """Recompute (chi_square, p_value, max_bin_z) against a reference pmf.

    Unlike the internal path, the reference here may differ from the pmf
    the summary was built against; observations outside its support are
    impossible under the reference and force p_value to 0.
    """
    count = sum(summary.histogram.values())
    observed = {v: summary.histogram.get(v, 0) for v in exact.support}
    stray = count - sum(observed.values())
    if stray:
        return math.inf, 0.0, math.inf
    return _fit(observed, exact, count)


def per_bin_z(histogram: Mapping[int, int], exact: ExactPmf, count: int) -> dict[int, float]:
    """Binomial z-score of each support bin, keyed by statistic value."""
    out: dict[int, float] = {}
    for v in exact.support:
        p = float(exact.prob(v))
        if p >= 1.0:
            out[v] = 0.0
            continue
        out[v] = (histogram.get(v, 0) - count * p) / math.sqrt(count * p * (1.0 - p))
    return out


def sample_statistic(measure: str, statistic: str, config: SamplerConfig) -> SampleSummary:
    """Sample a statistic under a measure and summarize against its exact pmf."""
    _check_measure_statistic(measure, config.k, config.n, statistic)
    exact = exact_statistic_pmf(measure, config.k, config.n, statistic)
    width = exact.support[-1] + 1
    k, n = config.k, config.n
    table = None
    if statistic == "parsimony":
        table = _parsimony_table(n, "riffle" if measure == "R" else "cut_riffle")

    def worker(rng: np.random.Generator, chunk: int) -> np.ndarray:
        if chunk == 0:
            return np.zeros(width, dtype=np.int64)
        words = _insertion_words(k, n, chunk, rng)
        if measure == "C":
            shift = rng.integers(0, n, size=chunk)
            cols = (np.arange(n, dtype=np.int64)[None, :] + shift[:, None]) % n
            words = np.take_along_axis(words, cols, axis=1)
        if statistic == "d":
            values = _descents_per_row(words)
        elif statistic == "c":
            values = _cyclic_descents_per_row(words)
        elif measure == "R":
            values = table[_descents_per_row(words)]
        else:
            values = table[_cyclic_descents_per_row(words)]
        return np.bincount(values, minlength=width)

    return _summarize(_run_streams(config, worker), exact, config.count)


def sample_parsimony(
    n: int, r: int, flavor: str, count: int, seed: int, streams: int = 8
) -> SampleSummary:
    """Empirical parsimony-distance distribution after r shuffle rounds.

    Flavor "riffle" samples the k-shuffle measure at k = 2**r and maps
    the descent count; "cut_riffle" samples the cut measure and maps the
    cyclic descent count.
    """
    if flavor not in ("riffle", "cut_riffle"):
        raise UserInputError(f"unknown flavor {flavor!r}")
    if r < 0:
        raise UserInputError(f"rounds must be nonnegative, got {r}")
    if r > MAX_RIFFLE_ROUNDS:
        raise UserInputError(f"rounds {r} exceeds the {MAX_RIFFLE_ROUNDS}-round guard")
    measure = "R" if flavor == "riffle" else "C"
    config = SamplerConfig(k=1 << r, n=n, count=count, seed=seed, streams=streams)
    return sample_statistic(measure, "parsimony", config)


def riffle_summary(
    n: int, rounds: int, count: int, seed: int, streams: int = 8
) -> SampleSummary:
    """Riffle sorted decks `rounds` times and fit inverse descent counts.

    This is the physical-simulation counterpart of sample_statistic: the
    decks are shuffled card by card, each result is inverted, and the
    inverse descent histogram is tested against d_pmf_R(2**rounds, n).
    """
    if rounds < 0:
        raise UserInputError(f"rounds must be nonnegative, got {rounds}")
    if rounds > MAX_RIFFLE_ROUNDS:
        raise UserInputError(f"rounds {rounds} exceeds the {MAX_RIFFLE_ROUNDS}-round guard")
    config = SamplerConfig(k=1 << rounds, n=n, count=count, seed=seed, streams=streams)
    exact = d_pmf_R(1 << rounds, n)
    width = exact.support[-1] + 1

    def worker(rng: np.random.Generator, chunk: int) -> np.ndarray:
        if chunk == 0:
            return np.zeros(width, dtype=np.int64)
        words = _gsr_words(n, rounds, chunk, rng)
        return np.bincount(_inverse_descents(words), minlength=width)

    return _summarize(_run_streams(config, worker), exact, config.count)


def sample_from_pmf(pmf: ExactPmf, count: int, rng: np.random.Generator) -> np.ndarray:
    """Draw integers from an exact pmf by inverse transform.

    Cumulative masses become integer thresholds out of 2**53, so every
    atom's realized probability is within 2**-53 of its exact value.
    """
    if count < 1:
        raise UserInputError(f"count must be positive, got {count}")
    thresholds = []
    cum = Fraction(0)
    for _, mass in pmf.items():
        cum += mass
        thresholds.append((cum.numerator * _SCALE) // cum.denominator)
    u = rng.integers(0, _SCALE, size=count, dtype=np.uint64)
    idx = np.searchsorted(np.array(thresholds, dtype=np.uint64), u, side="right")
    return np.array(pmf.support, dtype=np.int64)[idx]


def summarize_values(values: np.ndarray, exact: ExactPmf) -> SampleSummary:
    """Histogram an array of sampled values and fit it against a pmf."""
    arr = np.asarray(values, dtype=np.int64)
    if arr.size == 0:
        raise UserInputError("cannot summarize an empty sample")
    if arr.min() < 0:
        raise CertificationError("sampled statistic values must be nonnegative")
    counts = np.bincount(arr, minlength=exact.support[-1] + 1)
    return _summarize(counts, exact, arr.size)


def decision_tree_distribution(k: int, n: int) -> dict[Permutation, Fraction]:
    """Exhaustive expansion of the insertion chain, no randomness involved.

    Returns the exact law on permutations of n symbols after n-1
    insertion steps, as a dict of rational masses. Intended for small n;
    the expansion is capped at n = 8.
    """
    if k < 1 or n < 1:
        raise UserInputError(f"k and n must be positive, got k={k}, n={n}")
    if n > _TREE_CAP:
        raise UserInputError(f"decision-tree expansion is capped at n = {_TREE_CAP}")
    dist = {Permutation.identity(1): Fraction(1)}
    for m in range(1, n):
        grown: dict[Permutation, Fraction] = {}
        for p, mass in dist.items():
            d = descent_count(p)
            word = p.word
            case1 = Fraction(m + k - d, k * (m + 1))
            case2 = Fraction(k - d - 1, k * (m + 1))
            for j in range(m + 1):
                if j == m or (j > 0 and word[j - 1] > word[j]):
                    step = case1
                else:
                    step = case2
                if step == 0:
                    continue
                tau = insert_symbol(p, j)
                grown[tau] = grown.get(tau, Fraction(0)) + mass * step
        dist = grown
    return dist


def insertion_normalization(n_max: int = 50, k_max: int = 50) -> int:
    """Verify the two-case probabilities sum to one over reachable states.

    Checks (d+1)(n+k-d) + (n-d)(k-d-1) = k(n+1) in exact rationals for
    every state with d <= min(n-1, k-1), n <= n_max, k <= k_max. Returns
    the number of states verified; raises CertificationError on failure.
    """
    if n_max < 1 or k_max < 1:
        raise UserInputError("normalization sweep needs n_max >= 1 and k_max >= 1")
    checked = 0
    for n in range(1, n_max + 1):
        for k in range(1, k_max + 1):
            for d in range(min(n - 1, k - 1) + 1):
                total = Fraction((d + 1) * (n + k - d), k * (n + 1)) + Fraction(
                    (n - d) * (k - d - 1), k * (n + 1)
                )
                if total != 1:
                    raise CertificationError(
                        f"insertion probabilities sum to {total} at n={n}, k={k}, d={d}"
                    )
                checked += 1
    return checked
