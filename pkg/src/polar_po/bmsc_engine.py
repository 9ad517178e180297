"""Exact polar density evolution on finite binary-input symmetric channels.

A symmetric channel is stored as a mixture of binary symmetric channels:
atom ``k`` is a BSC with crossover ``q[k]`` in [0, 1/2] used with
probability ``p[k]``.  This is the half-alphabet form of the symmetrized
output alphabet, atom ``k`` standing for the LLR pair ``+-log((1-q)/q)``.
``q = 0`` is the certain (infinite-LLR) atom and ``q = 1/2`` the useless one,
so neither needs a large float.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm

from .bec_engine import path_bhattacharyya, traditional_f
from .path_algebra import parse_path
from .ratematch import as_spec, check_length

MERGE_DECIMALS = 12


@dataclass(frozen=True, eq=False)
class FiniteBmsc:
    """Finite symmetric channel as BSC atoms ``(q, p)``; see module docstring."""

    q: np.ndarray
    p: np.ndarray
    label: str = field(default="", compare=False)

    def __post_init__(self):
        q, p = np.asarray(self.q, float), np.asarray(self.p, float)
        if q.shape != p.shape or q.ndim != 1 or q.size == 0:
            raise ValueError("atoms must be two equal-length 1-d arrays")
        if np.any(q < 0) or np.any(q > 0.5 + 1e-15) or np.any(p < 0):
            raise ValueError("crossovers must lie in [0, 1/2], masses must be nonnegative")
        if abs(p.sum() - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
        q, p = _merge(np.minimum(q, 0.5), p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    # constructors -------------------------------------------------------
    @classmethod
    def bsc(cls, delta: float) -> "FiniteBmsc":
        if not 0 <= delta <= 1:
            raise ValueError("crossover must lie in [0, 1]")
        return cls(np.array([min(delta, 1 - delta)]), np.array([1.0]), f"bsc:{delta:g}")

    @classmethod
    def bec(cls, eps: float) -> "FiniteBmsc":
        if not 0 <= eps <= 1:
            raise ValueError("erasure probability must lie in [0, 1]")
        return cls(np.array([0.0, 0.5]), np.array([1 - eps, eps]), f"bec:{eps:g}")

    @classmethod
    def certain(cls) -> "FiniteBmsc":
        """Perfect channel, used for shortened bits."""
        return cls(np.array([0.0]), np.array([1.0]), "certain")

    @classmethod
    def noise(cls) -> "FiniteBmsc":
        """Single-output channel with LLR 0, used for punctured bits."""
        return cls(np.array([0.5]), np.array([1.0]), "noise")

    @classmethod
    def from_llr(cls, llr, prob, label: str = "") -> "FiniteBmsc":
        """From LLR magnitudes (``inf`` allowed) and their total probabilities."""
        llr = np.abs(np.asarray(llr, float))
        with np.errstate(over="ignore"):
            q = 1.0 / (1.0 + np.exp(llr))
        return cls(q, np.asarray(prob, float), label)

    @classmethod
    def awgn(cls, snr_db: float, levels: int = 64) -> "FiniteBmsc":
        """Quantized BPSK-AWGN channel at Es/N0 = ``snr_db``.

        With noise variance ``s2 = 1/(2 * 10^(snr/10))`` the LLR given a
        transmitted 0 is Gaussian with mean ``mu = 2/s2`` and variance
        ``2 mu``.  ``|LLR|`` is cut into ``levels`` cells, uniform on
        ``[0, mu + 8 sqrt(2 mu)]`` with the last cell open; each cell keeps its
        probability and takes the LLR of its lower edge.  Moving every output
        to a less reliable value gives a degraded version of the true channel.
        """
        if levels < 2:
            raise ValueError("need at least two quantization levels")
        s2 = 1.0 / (2.0 * 10 ** (snr_db / 10))
        mu = 2.0 / s2
        sd = math.sqrt(2 * mu)
        edges = np.linspace(0.0, mu + 8 * sd, levels)
        upper = np.append(edges[1:], np.inf)
        # P(|L| in [a, b)) = P(L in [a, b)) + P(L in (-b, -a])
        mass = (norm.cdf(upper, mu, sd) - norm.cdf(edges, mu, sd)) + (
            norm.cdf(-edges, mu, sd) - norm.cdf(-upper, mu, sd)
        )
        mass /= mass.sum()
        return cls.from_llr(edges, mass, f"awgn:{snr_db:g}dB/q{levels}")

    # properties ---------------------------------------------------------
    @property
    def llr(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log1p(-self.q) - np.log(self.q)

    @property
    def atoms(self) -> list[tuple[float, float]]:
        """``(|LLR|, probability)`` pairs, most reliable first."""
        return list(zip(self.llr.tolist(), self.p.tolist()))

    @property
    def bhattacharyya(self) -> float:
        return float(np.sum(self.p * 2.0 * np.sqrt(self.q * (1.0 - self.q))))

    @property
    def error_probability(self) -> float:
        return float(np.sum(self.p * self.q))

    def __len__(self) -> int:
        return self.q.size

    def __repr__(self) -> str:
        return f"FiniteBmsc({self.label or 'custom'}, atoms={len(self)}, Z={self.bhattacharyya:.6g})"


def _merge(q: np.ndarray, p: np.ndarray):
    """Merge atoms whose LLR magnitudes agree to 12 decimals; most reliable first.

    Bucketing on the LLR rather than on ``q`` keeps the tolerance relative for
    very reliable atoms, where ``q`` itself is tiny.
    """
    keep = p > 0
    if not keep.any():
        keep = np.ones_like(p, dtype=bool)
    q, p = q[keep], p[keep]
    with np.errstate(divide="ignore"):
        key = -np.round(np.log1p(-q) - np.log(q), MERGE_DECIMALS)
    uniq, inv = np.unique(key, return_inverse=True)
    mass = np.bincount(inv, weights=p, minlength=uniq.size)
    qsum = np.bincount(inv, weights=p * q, minlength=uniq.size)
    qm = qsum / np.where(mass > 0, mass, 1.0)
    return qm, mass


def transform_up(W1: FiniteBmsc, W2: FiniteBmsc) -> FiniteBmsc:
    """Check-node combination: the bit is the XOR of the two inputs' bits."""
    q1, q2 = W1.q[:, None], W2.q[None, :]
    q = q1 * (1 - q2) + q2 * (1 - q1)
    p = W1.p[:, None] * W2.p[None, :]
    return FiniteBmsc(q.ravel(), p.ravel() / p.sum(), "up")


def transform_down(W1: FiniteBmsc, W2: FiniteBmsc) -> FiniteBmsc:
    """Variable-node combination: both inputs observe the same bit."""
    q1, q2 = W1.q[:, None], W2.q[None, :]
    p12 = W1.p[:, None] * W2.p[None, :]
    agree = (1 - q1) * (1 - q2) + q1 * q2
    a, b = q1 * (1 - q2), q2 * (1 - q1)
    disagree = a + b
    with np.errstate(invalid="ignore", divide="ignore"):
        q_agree = np.where(agree > 0, q1 * q2 / np.where(agree > 0, agree, 1), 0.0)
        q_dis = np.where(disagree > 0, np.minimum(a, b) / np.where(disagree > 0, disagree, 1), 0.0)
    q = np.concatenate([q_agree.ravel(), q_dis.ravel()])
    p = np.concatenate([(p12 * agree).ravel(), (p12 * disagree).ravel()])
    return FiniteBmsc(q, p / p.sum(), "down")


def rate_matched_channel_vector(W: FiniteBmsc, spec, N: int) -> list[FiniteBmsc]:
    """Channels seen by the ``N`` coded bits: noise where punctured, certain where shortened."""
    spec = as_spec(spec)
    check_length(N)
    special = FiniteBmsc.noise() if spec.kind == "puncture" else FiniteBmsc.certain()
    return [special if mk else W for mk in spec.mask(N)]


def synthetic_channel(W: FiniteBmsc, spec, alpha, max_length: int = 4) -> FiniteBmsc:
    """Synthetic channel ``W^alpha`` of the rate-matched length-``2^|alpha|`` code.

    Follows the butterfly from the outermost stage: bit ``k`` selects the up
    or down outputs of stage ``k``.  Equal input pairs are transformed once.
    """
    spec, alpha = as_spec(spec), parse_path(alpha)
    if len(alpha) > max_length:
        raise ValueError(f"exact density evolution limited to |alpha| <= {max_length}")
    if not spec.is_none and len(alpha) < spec.m:
        raise ValueError(f"path length {len(alpha)} is shorter than m={spec.m}")
    vec = rate_matched_channel_vector(W, spec, 2 ** len(alpha))
    for bit in alpha:
        h = len(vec) // 2
        op = transform_up if bit == "0" else transform_down
        cache: dict[tuple[int, int], FiniteBmsc] = {}
        nxt = []
        for a, b in zip(vec[:h], vec[h:]):
            key = (id(a), id(b))
            if key not in cache:
                cache[key] = op(a, b)
            nxt.append(cache[key])
        vec = nxt
    return vec[0]


def synthetic_bhattacharyya(W: FiniteBmsc, spec, alpha, max_length: int = 4) -> float:
    """``Z(W^alpha)`` under rate matching."""
    return synthetic_channel(W, spec, alpha, max_length).bhattacharyya


@dataclass(frozen=True)
class BoundsReport:
    """Sandwich ``lower <= exact <= upper`` for one synthetic channel.

    ``lower = sqrt(f_gamma(Z_alpha(x^2)))`` and ``upper = f_gamma(Z_alpha(x))``
    with ``x = Z(W)``; ``exact`` is ``Z(W^(alpha gamma))``.
    """

    path: str
    gamma: str
    spec: str
    x: float
    lower: float
    exact: float
    upper: float
    tol: float = 1e-12

    @property
    def passed(self) -> bool:
        return self.lower <= self.exact + self.tol and self.exact <= self.upper + self.tol

    @property
    def upper_gap(self) -> float:
        return self.upper - self.exact


def check_bounds(W: FiniteBmsc, spec, alpha, gamma: str = "", max_length: int = 4,
                 tol: float = 1e-12) -> BoundsReport:
    """Compare the exact synthetic Bhattacharyya value with its erasure-channel bounds."""
    spec, alpha = as_spec(spec), parse_path(alpha)
    x = W.bhattacharyya
    tau = alpha + gamma
    exact = synthetic_bhattacharyya(W, spec, tau, max_length)
    up = path_bhattacharyya(spec, alpha, min(x, 1.0))
    lo = path_bhattacharyya(spec, alpha, min(x * x, 1.0))
    if gamma:
        up = traditional_f(gamma, up)
        lo = traditional_f(gamma, lo)
    return BoundsReport(alpha, gamma, str(spec), x, math.sqrt(lo), exact, up, tol)


_LITERAL = re.compile(r"^(bec|bsc|awgn):([0-9.eE+-]+)(db)?$")


def parse_channel(text: str, levels: int = 64) -> FiniteBmsc:
    """Parse ``"bec:0.5"``, ``"bsc:0.11"`` or ``"awgn:2.2dB"``."""
    m = _LITERAL.match(text.strip().lower())
    if m is None:
        raise ValueError(f"malformed channel literal {text!r}")
    kind, val = m[1], float(m[2])
    if kind == "bec":
        return FiniteBmsc.bec(val)
    if kind == "bsc":
        return FiniteBmsc.bsc(val)
    return FiniteBmsc.awgn(val, levels)

