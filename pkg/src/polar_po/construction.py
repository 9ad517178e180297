"""Reliability orders for rate-matched polar codes and their refinement by partial-order pairs."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .bec_engine import degenerate_positions
from .ratematch import as_spec, check_length

# Two-segment approximation of phi(x) = 1 - E[tanh(L/2)], L ~ N(x, 2x):
#   x <= 10: exp(A x^B + C)
#   x >  10: sqrt(pi/x) exp(-x/4) (1 - 10/(7x))
PHI_A, PHI_B, PHI_C = -0.4527, 0.86, 0.0218
PHI_SPLIT = 10.0
PW_BETA = 2.0 ** 0.25


def log_phi(x) -> np.ndarray:
    """``log phi(x)``, clipped to ``<= 0`` so that ``phi`` stays a probability."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    lo = (x > 0) & (x <= PHI_SPLIT)
    hi = x > PHI_SPLIT
    out[lo] = PHI_A * x[lo] ** PHI_B + PHI_C
    xh = x[hi]
    out[hi] = 0.5 * np.log(np.pi / xh) - xh / 4 + np.log1p(-10.0 / (7.0 * xh))
    return np.minimum(out, 0.0)


def inverse_log_phi(target, iters: int = 80) -> np.ndarray:
    """Smallest mean whose ``log_phi`` reaches ``target`` (vectorized bisection)."""
    target = np.asarray(target, dtype=float)
    lo = np.zeros_like(target)
    hi = np.ones_like(target)
    while True:
        grow = log_phi(hi) > target
        if not grow.any():
            break
        hi = np.where(grow, 2 * hi, hi)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        above = log_phi(mid) > target
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    return 0.5 * (lo + hi)


def _check_mean(m1, m2):
    """Mean after a check node: ``phi^-1(1 - (1 - phi(m1))(1 - phi(m2)))``."""
    l1, l2 = log_phi(m1), log_phi(m2)
    s = np.logaddexp(l1, l2)
    with np.errstate(divide="ignore"):
        l = s + np.log1p(-np.exp(l1 + l2 - s))
    out = inverse_log_phi(l)
    return np.where((m1 == 0) | (m2 == 0), 0.0, out)


@dataclass
class ReliabilityOrder:
    """Scores per 1-based position and the induced order, most reliable first.

    Degenerate positions come last regardless of score.  Equal scores are
    broken towards the larger position.
    """

    N: int
    scores: np.ndarray
    provenance: str
    degenerate: frozenset = frozenset()
    order: np.ndarray = field(init=False)

    def __post_init__(self):
        check_length(self.N)
        self.scores = np.asarray(self.scores, dtype=float)
        if self.scores.shape != (self.N,):
            raise ValueError("need one score per position")
        pos = np.arange(1, self.N + 1)
        dead = np.isin(pos, list(self.degenerate))
        # lexsort: last key is primary
        idx = np.lexsort((-pos, -self.scores, dead))
        self.order = pos[idx]

    def rank(self) -> np.ndarray:
        """``rank[p - 1]`` is the 0-based rank of position ``p`` (0 = most reliable)."""
        r = np.empty(self.N, dtype=int)
        r[self.order - 1] = np.arange(self.N)
        return r

    def usable(self) -> int:
        return self.N - len(self.degenerate)


def ga_reliabilities(spec, N: int, design_snr_db: float) -> ReliabilityOrder:
    """Gaussian-approximation density evolution under rate matching.

    Transmitted bits start at mean LLR ``4 * 10^(snr/10)`` (unit-energy BPSK,
    ``s2 = 1/(2 * 10^(snr/10))``), punctured bits at 0.  Shortened bits are
    carried in a separate boolean "certain" mask and reported with score
    ``+inf``.
    """
    spec = as_spec(spec)
    n = check_length(N)
    if not np.isfinite(design_snr_db):
        raise ValueError("design SNR must be finite")
    if not spec.is_none and N < 2**spec.m:
        raise ValueError(f"N={N} is smaller than 2^m={2**spec.m}")
    mean = np.full(N, 4.0 * 10 ** (design_snr_db / 10))
    certain = np.zeros(N, dtype=bool)
    mask = spec.mask(N)
    if spec.kind == "puncture":
        mean[mask] = 0.0
    elif spec.kind == "shorten":
        certain[mask] = True
        mean[mask] = 0.0

    for s in range(n):
        blocks = 1 << s
        m = mean.reshape(blocks, 2, -1)
        c = certain.reshape(blocks, 2, -1)
        a, b = m[:, 0].copy(), m[:, 1].copy()
        ca, cb = c[:, 0].copy(), c[:, 1].copy()
        # check node: a certain input passes the other one through
        up = _check_mean(a, b)
        up = np.where(ca, b, np.where(cb, a, up))
        m[:, 0] = up
        m[:, 1] = a + b
        c[:, 0] = ca & cb
        c[:, 1] = ca | cb
    scores = np.where(certain, np.inf, mean)
    return ReliabilityOrder(N, scores, f"GA({design_snr_db:g} dB)", frozenset(degenerate_positions(spec, N)))


def pw_scores(N: int, beta: float = PW_BETA) -> np.ndarray:
    """Polarization weight ``sum_j b_j beta^j`` of each 0-based index ``i = sum_j b_j 2^j``."""
    n = check_length(N)
    i = np.arange(N)
    bits = (i[:, None] >> np.arange(n)[None, :]) & 1
    return bits @ (beta ** np.arange(n))


def pw_sequence(N: int, spec=None, beta: float = PW_BETA) -> ReliabilityOrder:
    """SNR-independent beta-expansion order.

    The most significant index bit is the first path bit, so it gets the
    largest weight ``beta^(n-1)``.  When ``spec`` is given its degenerate
    positions are moved to the end.
    """
    dead = frozenset() if spec is None else frozenset(degenerate_positions(as_spec(spec), N))
    return ReliabilityOrder(N, pw_scores(N, beta), "PW", dead)


def select_info_set(order: ReliabilityOrder, K: int, spec=None, N: int | None = None) -> list[int]:
    """Top-``K`` non-degenerate positions of ``order``, sorted ascending."""
    N = order.N if N is None else N
    if N != order.N:
        raise ValueError("order length does not match N")
    dead = set(order.degenerate)
    if spec is not None:
        dead |= degenerate_positions(as_spec(spec), N)
    usable = [int(p) for p in order.order if p not in dead]
    if not 0 <= K <= len(usable):
        raise ValueError(f"K={K} exceeds the {len(usable)} usable positions")
    return sorted(usable[:K])


@dataclass
class Improvement:
    """Outcome of :func:`improve_with_pos`."""

    info_set: list[int]
    base_set: list[int]
    swaps: list[tuple[int, int]]

    @property
    def changed(self) -> bool:
        return self.info_set != self.base_set


def _pair_positions(pairs: Iterable) -> list[tuple[int, int]]:
    """Accept ``(lesser, greater)`` tuples or :class:`PoPair`-like objects (1-based positions)."""
    from .path_algebra import path_position

    out = []
    for p in pairs:
        if hasattr(p, "lesser"):
            out.append((path_position(p.lesser), path_position(p.greater)))
        else:
            a, b = p
            a = path_position(a) if isinstance(a, str) else int(a)
            b = path_position(b) if isinstance(b, str) else int(b)
            out.append((a, b))
    return sorted(set(out))


def improve_with_pos(base: ReliabilityOrder, pos, K: int, spec=None) -> Improvement:
    """Repair the top-``K`` set of ``base`` with PO pairs ``(lesser, greater)``.

    While some pair has its lesser position inside the set and its greater
    outside, the two are exchanged.  Pairs are scanned in lexicographic order
    and the scan restarts after every sweep with a swap.  Each exchange moves
    the set strictly upward in the partial order, so the loop ends; the result
    contains no violated pair.
    """
    start = select_info_set(base, K, spec)
    dead = set(base.degenerate)
    if spec is not None:
        dead |= degenerate_positions(as_spec(spec), base.N)
    pairs = [(a, b) for a, b in _pair_positions(pos) if a != b and b not in dead]
    inside = np.zeros(base.N + 1, dtype=bool)
    inside[start] = True
    swaps = []
    limit = len(pairs) * max(K, 1) + 1
    changed = True
    while changed:
        changed = False
        for a, b in pairs:
            if inside[a] and not inside[b]:
                inside[a], inside[b] = False, True
                swaps.append((a, b))
                changed = True
        if len(swaps) > limit:
            raise RuntimeError("pair set contains a cycle; improvement does not terminate")
    return Improvement(sorted(np.nonzero(inside)[0].tolist()), start, swaps)


def order_violations(order: ReliabilityOrder, pairs) -> list[tuple[int, int]]:
    """Pairs ``(lesser, greater)`` that ``order`` ranks the wrong way round."""
    r = order.rank()
    return [(a, b) for a, b in _pair_positions(pairs) if r[b - 1] > r[a - 1]]


def set_violations(info_set, pairs) -> list[tuple[int, int]]:
    """Pairs with the lesser position in ``info_set`` and the greater outside."""
    s = set(info_set)
    return [(a, b) for a, b in _pair_positions(pairs) if a in s and b not in s]
