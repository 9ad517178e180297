"""Deciding and enumerating partial orders between synthetic channels.

``a ⪯ b`` means ``b`` is at least as reliable as ``a``: the Bhattacharyya
function of ``b`` is pointwise no larger than that of ``a``.

Evidence ladder, strongest first:

1. structural rules (inference from certified premises);
2. exact certification of a difference polynomial in Bernstein form;
3. a log-domain grid scan, which can only give ``NumericHolds``.
"""

from __future__ import annotations

import enum
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .bec_engine import (
    Grid,
    X,
    default_grid,
    degenerate_positions,
    path_log,
    path_polynomial,
    path_table,
    path_value_exact,
    traditional_f_inverse_log,
)
from .path_algebra import parse_path, position_path
from .ratematch import NONE, RateMatchSpec, as_spec, check_length

TOL = 1e-12


class PoStatus(str, enum.Enum):
    CERTIFIED_HOLDS = "CertifiedHolds"
    CERTIFIED_FAILS = "CertifiedFails"
    NUMERIC_HOLDS = "NumericHolds"
    INCONCLUSIVE = "Inconclusive"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class PoVerdict:
    """Outcome of one dominance question with the evidence behind it.

    ``witness`` (for failures) is a rational ``x`` at which the supposedly
    more reliable function exceeds the other by more than ``1e-12``;
    ``values`` holds ``(Z_lesser(x), Z_greater(x))`` there.
    """

    status: PoStatus
    evidence: str
    rule: str | None = None
    witness: Fraction | None = None
    values: tuple[float, float] | None = None

    @property
    def holds(self) -> bool:
        return self.status in (PoStatus.CERTIFIED_HOLDS, PoStatus.NUMERIC_HOLDS)

    @property
    def certified(self) -> bool:
        return self.status in (PoStatus.CERTIFIED_HOLDS, PoStatus.CERTIFIED_FAILS)

    def to_dict(self) -> dict:
        out = {"status": str(self.status), "evidence": self.evidence, "rule": self.rule}
        if self.witness is not None:
            out["witness"] = str(self.witness)
            out["witness_float"] = float(self.witness)
            out["values"] = list(self.values)
        return out


@dataclass(frozen=True)
class PoPair:
    """``lesser ⪯ greater`` in the given sense, with its verdict."""

    lesser: str
    greater: str
    sense: str
    spec: RateMatchSpec
    verdict: PoVerdict

    def __post_init__(self):
        if len(self.lesser) != len(self.greater):
            raise ValueError("paths of a pair must have equal length")

    def to_record(self) -> dict:
        return {"a": self.lesser, "b": self.greater, "sense": self.sense,
                "rule": self.verdict.rule or self.verdict.evidence, "status": str(self.verdict.status)}


def _holds(evidence: str, rule: str | None = None, numeric: bool = False) -> PoVerdict:
    return PoVerdict(PoStatus.NUMERIC_HOLDS if numeric else PoStatus.CERTIFIED_HOLDS, evidence, rule)


def _weakest(*verdicts: PoVerdict) -> PoStatus:
    if any(v.status == PoStatus.NUMERIC_HOLDS for v in verdicts):
        return PoStatus.NUMERIC_HOLDS
    return PoStatus.CERTIFIED_HOLDS


def _check_pair(spec: RateMatchSpec, a: str, b: str) -> tuple[str, str]:
    a, b = parse_path(a), parse_path(b)
    if len(a) != len(b):
        raise ValueError(f"path lengths differ: {len(a)} vs {len(b)}")
    if not spec.is_none and len(a) < spec.m:
        raise ValueError(f"paths shorter than m={spec.m}")
    return a, b


# ---------------------------------------------------------------- grid comparison
def log_leq(lz_s, lw_s, lz_b, lw_b, rtol: float = TOL) -> np.ndarray:
    """Pointwise ``s <= b`` on log pairs, compared on whichever side is small.

    Where ``b < 1/2`` the test is ``log s <= log b + tol``, otherwise
    ``log(1-s) >= log(1-b) - tol``.  Either way the tolerance is relative to
    the small quantity, which keeps tails near 0 and 1 meaningful.  ``tol``
    is ``rtol * max(1, |log|)`` because rounding in a log value grows with
    its magnitude.
    """
    small = lz_b < np.log(0.5)
    with np.errstate(invalid="ignore"):
        ok_z = lz_s <= lz_b + rtol * np.maximum(1.0, np.abs(lz_b))
        ok_w = lw_s >= lw_b - rtol * np.maximum(1.0, np.abs(lw_b))
    return np.where(small, ok_z, ok_w)


def _grid_verdict(spec, a, b, grid: Grid, rtol: float) -> PoVerdict:
    za, wa = path_log(spec, a, grid.lx, grid.lw)
    zb, wb = path_log(spec, b, grid.lx, grid.lw)
    ok = log_leq(zb, wb, za, wa, rtol)
    if ok.all():
        return _holds(f"grid:{grid.label}", numeric=True)
    # confirm the worst violation exactly
    gap = np.where(ok, -np.inf, np.exp(zb) - np.exp(za))
    for i in np.argsort(gap)[::-1][:5]:
        if not np.isfinite(gap[i]):
            break
        x = Fraction(float(grid.x[i])).limit_denominator(1 << 30)
        va, vb = path_value_exact(spec, a, x), path_value_exact(spec, b, x)
        if vb - va > TOL:
            return PoVerdict(PoStatus.CERTIFIED_FAILS, f"grid:{grid.label}+exact-witness",
                             witness=x, values=(float(va), float(vb)))
    return PoVerdict(PoStatus.INCONCLUSIVE, f"grid:{grid.label}: violation below tolerance")


def dominates(spec, alpha, gamma, method: str = "auto", grid: Grid | None = None,
              max_exact_length: int = 10, rtol: float = TOL) -> PoVerdict:
    """Decide ``alpha ⪯ gamma``, i.e. ``Z_gamma(x) <= Z_alpha(x)`` on [0, 1].

    Parameters
    ----------
    method : {"auto", "exact", "grid"}
        ``auto`` certifies exactly when the paths are short enough and falls
        back to the grid when certification is inconclusive.
    max_exact_length : int
        Longest path handled by the polynomial backend under ``auto``.
    """
    spec = as_spec(spec)
    alpha, gamma = _check_pair(spec, alpha, gamma)
    if alpha == gamma:
        return _holds("reflexive", "reflexive")
    use_exact = method == "exact" or (method == "auto" and len(alpha) <= max_exact_length)
    if method not in ("auto", "exact", "grid"):
        raise ValueError(f"unknown method {method!r}")
    if use_exact:
        diff = path_polynomial(spec, alpha) - path_polynomial(spec, gamma)
        status, x = diff.certify_nonnegative(tol=TOL)
        if status == "holds":
            return _holds("exact-Bernstein")
        if status == "fails":
            va, vb = path_value_exact(spec, alpha, x), path_value_exact(spec, gamma, x)
            return PoVerdict(PoStatus.CERTIFIED_FAILS, "exact-Bernstein", witness=x,
                             values=(float(va), float(vb)))
        if method == "exact":
            return PoVerdict(PoStatus.INCONCLUSIVE, "exact-Bernstein: budget exhausted")
    return _grid_verdict(spec, alpha, gamma, grid or default_grid(), rtol)


# ---------------------------------------------------------------- structural rules
def classic_po(c: str, d: str) -> bool:
    """Mother-code order generated by ``0 -> 1`` flips and ``0..1 -> 1..0`` swaps.

    Equivalent to: every prefix of ``d`` holds at least as many ones as the
    same-length prefix of ``c``.
    """
    if len(c) != len(d):
        return False
    cc = cd = 0
    for u, v in zip(c, d):
        cc += u == "1"
        cd += v == "1"
        if cd < cc:
            return False
    return True


def traditional_po(c: str, d: str, max_exact_length: int = 10) -> PoVerdict:
    """Mother-code erasure-channel order ``c ⪯ d`` (no rate matching)."""
    if c == d:
        return _holds("reflexive", "reflexive")
    if classic_po(c, d):
        return _holds("classic-order", "classic")
    v = dominates(NONE, c, d, max_exact_length=max_exact_length)
    return v


def _swap_rule(a: str, b: str) -> bool:
    diff = [i for i, (u, v) in enumerate(zip(a, b)) if u != v]
    return len(diff) == 2 and a[diff[0]] == "0" and a[diff[1]] == "1" and b[diff[0]] == "1" and b[diff[1]] == "0"


def _leading_form(s: str, m: int):
    """``p`` if ``s[:m] == 0^p 1^(m-p)``, else None."""
    head = s[:m]
    p = len(head) - len(head.lstrip("0"))
    return p if head == "0" * p + "1" * (m - p) else None


def structural_po(spec, a, b, mother_po: Callable[[str, str], PoVerdict] | None = None,
                  premise_exact_length: int = 8, _depth: int = 0) -> PoVerdict:
    """Try to derive ``a ⪯ b`` from the rule catalogue without comparing the functions.

    Rules, tried in order:

    R2  single swap ``p0r1q ⪯ p1r0q``;
    R5  shared prefix of length ``>= m``, with the suffixes ordered by the
        mother-code order (``mother_po``, default :func:`traditional_po`);
    R4  ``γ0α ⪯ γ1β`` with ``|γ| = m-1`` and the whole strings ordered by the
        mother-code order;
    R3  ``0^p 1^(m-p) α ⪯ 0^q 1^(m-q) γ``, ``q <= p``, for ``1/2^m``
        puncturing, again with a mother-code premise;
    R1  split ``a = a'c``, ``b = b'd`` at ``k >= m`` with ``a' ⪯ b'``
        (recursively, or exactly when ``k`` is small) and ``c ⪯ d`` in the
        mother-code order.

    Returns ``Inconclusive`` when nothing applies.
    """
    spec = as_spec(spec)
    a, b = _check_pair(spec, a, b)
    mother = mother_po or traditional_po
    n, m = len(a), spec.m
    if a == b:
        return _holds("reflexive", "reflexive")
    if _swap_rule(a, b):
        return _holds("structural", "R2-swap")
    # R5: identical leading bits, at least m of them
    k = 0
    while k < n and a[k] == b[k]:
        k += 1
    if k >= max(m, 1):
        prem = mother(a[k:], b[k:])
        if prem.holds:
            return PoVerdict(_weakest(prem), f"structural<-{prem.evidence}", "R5-shared-prefix")
    if m >= 1:
        if a[: m - 1] == b[: m - 1] and a[m - 1] == "0" and b[m - 1] == "1":
            prem = mother(a, b)
            if prem.holds:
                return PoVerdict(_weakest(prem), f"structural<-{prem.evidence}", "R4-gamma0-gamma1")
        if spec.kind == "puncture" and spec.numerator == 1:
            p, q = _leading_form(a, m), _leading_form(b, m)
            if p is not None and q is not None and q <= p:
                prem = mother(a, b)
                if prem.holds:
                    return PoVerdict(_weakest(prem), f"structural<-{prem.evidence}", "R3-0p1q")
    if _depth < 2:
        for k in range(n - 1, max(m, 1) - 1, -1):
            c, d = a[k:], b[k:]
            if not (c == d or classic_po(c, d)):
                continue
            head = structural_po(spec, a[:k], b[:k], mother, premise_exact_length, _depth + 1)
            if not head.holds and k <= premise_exact_length:
                head = dominates(spec, a[:k], b[:k], method="exact")
            if head.holds:
                return PoVerdict(_weakest(head), f"structural<-{head.rule or head.evidence}", "R1-recursion")
    return PoVerdict(PoStatus.INCONCLUSIVE, "structural: no rule applies")


# ---------------------------------------------------------------- sufficient condition
def h_function_log(spec, tau, grid: Grid):
    """Log pair of ``h_tau = f_tau^{-1} ∘ Z_tau`` on ``grid``."""
    lz, lw = path_log(spec, tau, grid.lx, grid.lw)
    return traditional_f_inverse_log(tau, lz, lw)


def check_sufficient_condition(spec, tau1, tau2, grid: Grid | None = None,
                               rtol: float = 1e-10) -> PoVerdict:
    """Decide ``h_tau1(x) <= h_tau2(x)`` on [0, 1] for ``|tau1| = |tau2| = m``.

    The inverse maps involve square roots, so apart from ``tau1 == tau2``
    (an identity) this is a grid check, ``NumericHolds`` at best.  A
    violation larger than the tolerance gives ``CertifiedFails`` after being
    recomputed in extended precision.
    """
    spec = as_spec(spec)
    tau1, tau2 = parse_path(tau1), parse_path(tau2)
    if len(tau1) != spec.m or len(tau2) != spec.m:
        raise ValueError(f"both prefixes must have length m={spec.m}")
    if tau1 == tau2:
        return _holds("identity", "reflexive")
    grid = grid or default_grid()
    z1, w1 = h_function_log(spec, tau1, grid)
    z2, w2 = h_function_log(spec, tau2, grid)
    ok = log_leq(z1, w1, z2, w2, rtol)
    if ok.all():
        return _holds(f"grid:{grid.label}", numeric=True)
    i = int(np.argmax(np.where(ok, -np.inf, np.exp(z1) - np.exp(z2))))
    x = Fraction(float(grid.x[i])).limit_denominator(1 << 30)
    v1, v2 = _h_mp(spec, tau1, x), _h_mp(spec, tau2, x)
    if v1 - v2 > TOL:
        return PoVerdict(PoStatus.CERTIFIED_FAILS, "grid+mpmath-witness", witness=x, values=(float(v2), float(v1)))
    return PoVerdict(PoStatus.INCONCLUSIVE, "grid: violation below tolerance")


def _h_mp(spec, tau, x: Fraction):
    import mpmath

    with mpmath.workdps(60):
        z = path_value_exact(spec, tau, x)
        v = mpmath.mpf(z.numerator) / z.denominator
        for bit in reversed(tau):
            v = 1 - mpmath.sqrt(1 - v) if bit == "0" else mpmath.sqrt(v)
        return float(v)


# ---------------------------------------------------------------- BEC -> BMSC
def _chain_verdict(spec, lesser: str, greater: str, method: str, grid: Grid | None,
                   max_exact_length: int, rtol: float) -> PoVerdict:
    """Certify ``Z_greater(x) <= sqrt(Z_lesser(x^2))`` on [0, 1].

    Squared, this is the polynomial inequality ``Z_greater(x)^2 <= Z_lesser(x^2)``.
    """
    n = len(lesser)
    if method != "grid" and n <= max_exact_length:
        lower = path_bhattacharyya_poly_sq(spec, lesser)
        upper = path_polynomial(spec, greater).square()
        status, x = (lower - upper).certify_nonnegative(tol=TOL)
        if status == "holds":
            return _holds("exact-Bernstein")
        if status == "fails":
            return PoVerdict(PoStatus.CERTIFIED_FAILS, "exact-Bernstein", witness=x,
                             values=(float(lower.evaluate_exact(x)), float(upper.evaluate_exact(x))))
        if method == "exact":
            return PoVerdict(PoStatus.INCONCLUSIVE, "exact-Bernstein: budget exhausted")
    grid = grid or default_grid()
    sq = _squared(grid)
    zl, wl = path_log(spec, lesser, sq.lx, sq.lw)
    zl, wl = zl / 2, wl - np.log1p(np.exp(zl / 2))
    zg, wg = path_log(spec, greater, grid.lx, grid.lw)
    if log_leq(zg, wg, zl, wl, rtol).all():
        return _holds(f"grid:{grid.label}", numeric=True)
    return PoVerdict(PoStatus.INCONCLUSIVE, f"grid:{grid.label}: bound chain not closed")


def _squared(grid: Grid) -> Grid:
    """The points ``x^2``; ``log(1 - x^2) = log(1 - x) + log(1 + x)``."""
    return Grid(grid.x**2, 2 * grid.lx, grid.lw + np.log1p(grid.x), grid.label)


def path_bhattacharyya_poly_sq(spec, alpha):
    """Exact ``Z_alpha(x^2)`` as a polynomial in ``x``."""
    from .bec_engine import path_bhattacharyya

    return path_bhattacharyya(spec, alpha, X.square())


def bmsc_transfer(spec, gamma, alpha, form: str = "theorem", method: str = "auto",
                  grid: Grid | None = None, max_exact_length: int = 10, rtol: float = TOL) -> PoPair:
    """Carry an erasure-channel order over to every symmetric channel.

    ``form="theorem"``: ``γ ⪯ α`` (erasure) gives ``γ1 ⪯ 1α`` (all channels).
    ``form="corollary"``: ``1γ ⪯ α1`` (erasure) gives ``γ ⪯ α``.
    ``form="bounds"``: ``Z_α(x) <= sqrt(Z_γ(x^2))`` gives ``γ ⪯ α``; this is
    the inequality both forms reduce to through the upper and lower bounds.

    An unproven premise yields ``Inconclusive``; a failed premise only means
    the transfer does not apply, so it is also ``Inconclusive``.
    """
    spec = as_spec(spec)
    gamma, alpha = _check_pair(spec, gamma, alpha)
    if form == "theorem":
        prem = dominates(spec, gamma, alpha, method, grid, max_exact_length, rtol)
        lesser, greater = gamma + "1", "1" + alpha
        tag = "theorem:γ1⪯1α"
    elif form == "corollary":
        prem = dominates(spec, "1" + gamma, alpha + "1", method, grid, max_exact_length, rtol)
        lesser, greater = gamma, alpha
        tag = "corollary:1γ⪯α1"
    elif form == "bounds":
        prem = _chain_verdict(spec, gamma, alpha, method, grid, max_exact_length, rtol)
        lesser, greater = gamma, alpha
        tag = "bounds:Zα(x)≤√Zγ(x²)"
    else:
        raise ValueError(f"unknown transfer form {form!r}")
    if prem.holds:
        verdict = PoVerdict(prem.status, f"{tag} via {prem.evidence}", f"transfer-{form}")
    else:
        verdict = PoVerdict(PoStatus.INCONCLUSIVE, f"{tag}: premise {prem.status}", f"transfer-{form}")
    return PoPair(lesser, greater, "BMSC", spec, verdict)


def bmsc_po(spec, a, b, method: str = "auto", grid: Grid | None = None,
            max_exact_length: int = 10) -> PoVerdict:
    """Best available verdict on ``a ⪯ b`` for all symmetric channels.

    Tries the bound chain, then the theorem and corollary forms.  A certified
    erasure-channel failure is also a failure here, since the erasure
    channel is one of the channels quantified over.
    """
    spec = as_spec(spec)
    a, b = _check_pair(spec, a, b)
    if a == b:
        return _holds("reflexive", "reflexive")
    tries = [bmsc_transfer(spec, a, b, "bounds", method, grid, max_exact_length)]
    if a.endswith("1") and b.startswith("1") and len(a) - 1 >= spec.m:
        tries.append(bmsc_transfer(spec, a[:-1], b[1:], "theorem", method, grid, max_exact_length))
    tries.append(bmsc_transfer(spec, a, b, "corollary", method, grid, max_exact_length))
    for pair in tries:
        if pair.verdict.holds:
            return pair.verdict
    bec = dominates(spec, a, b, method, grid, max_exact_length)
    if bec.status == PoStatus.CERTIFIED_FAILS:
        return PoVerdict(PoStatus.CERTIFIED_FAILS, f"erasure-channel counterexample ({bec.evidence})",
                         witness=bec.witness, values=bec.values)
    return PoVerdict(PoStatus.INCONCLUSIVE, "no transfer applies")


# ---------------------------------------------------------------- enumeration
MotherHook = Callable[[int], np.ndarray]


def bec_suffix_hook(grid: Grid | None = None, rtol: float = TOL) -> MotherHook:
    """Default mother-code hook: erasure-channel dominance on grid, per suffix length.

    The returned callable maps ``t`` to a boolean matrix ``D`` over the ``2^t``
    suffixes (position order) with ``D[u, v]`` meaning ``u ⪯ v``.
    """
    grid = grid or default_grid()
    cache: dict[int, np.ndarray] = {}

    def hook(t: int) -> np.ndarray:
        if t not in cache:
            lz, lw = path_table(NONE, t, grid)
            cache[t] = _relation(lz, lw, lz, lw, rtol)
        return cache[t]

    hook.label = f"bec-grid:{grid.label}"  # type: ignore[attr-defined]
    return hook


def classic_suffix_hook(t: int) -> np.ndarray:
    """Mother-code hook using only the flip/swap order of :func:`classic_po`."""
    paths = [position_path(i + 1, t) for i in range(2**t)]
    ones = np.array([[p[:k].count("1") for k in range(1, t + 1)] for p in paths])
    return np.all(ones[None, :, :] >= ones[:, None, :], axis=2)


classic_suffix_hook.label = "classic"  # type: ignore[attr-defined]


def _relation(lz_hi, lw_hi, lz_lo, lw_lo, rtol, threads: int = 1) -> np.ndarray:
    """``R[i, j]``: row ``j`` of the ``lo`` table is <= row ``i`` of the ``hi`` table everywhere."""
    n = lz_hi.shape[0]
    R = np.zeros((n, lz_lo.shape[0]), dtype=bool)

    def rows(i0, i1):
        for i in range(i0, i1):
            R[i] = log_leq(lz_lo, lw_lo, lz_hi[i], lw_hi[i], rtol).all(axis=1)

    step = max(1, n // (4 * threads))
    chunks = [(i, min(n, i + step)) for i in range(0, n, step)]
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            list(ex.map(lambda c: rows(*c), chunks))
    else:
        for c in chunks:
            rows(*c)
    return R


@dataclass
class EnumerationResult:
    """Pair counts over the non-degenerate channels of one code.

    ``relation[i, j]`` (theorem pairs) and ``combined[i, j]`` mean
    ``positions[i] ⪯ positions[j]`` with ``positions`` the 1-based indices of
    the non-degenerate channels.
    """

    spec: RateMatchSpec
    N: int
    positions: np.ndarray
    relation: np.ndarray = field(repr=False)
    combined: np.ndarray | None = field(repr=False)
    config: dict

    @property
    def candidates(self) -> int:
        k = len(self.positions)
        return k * (k - 1) // 2

    @staticmethod
    def _count(R: np.ndarray) -> int:
        R = R.copy()
        np.fill_diagonal(R, False)
        return int(np.triu(R | R.T, 1).sum())

    @property
    def theorem_count(self) -> int:
        return self._count(self.relation)

    @property
    def combined_count(self) -> int | None:
        return None if self.combined is None else self._count(self.combined)

    def ordered_pairs(self, which: str = "theorem") -> list[tuple[int, int]]:
        """``(lesser, greater)`` position pairs, excluding the diagonal."""
        R = (self.relation if which == "theorem" else self.combined).copy()
        np.fill_diagonal(R, False)
        i, j = np.nonzero(R)
        return list(zip(self.positions[i].tolist(), self.positions[j].tolist()))

    def records(self, which: str = "combined") -> list[dict]:
        """JSON-ready pair records ``{a, b, sense, rule, status}``."""
        n = check_length(self.N)
        out = []
        R = self.relation.copy()
        np.fill_diagonal(R, False)
        C = R if self.combined is None else self.combined.copy()
        np.fill_diagonal(C, False)
        rule_t = f"transfer-{self.config['transfer']}"
        for i, j in zip(*np.nonzero(C if which == "combined" else R)):
            a, b = position_path(int(self.positions[i]), n), position_path(int(self.positions[j]), n)
            if R[i, j]:
                out.append({"a": a, "b": b, "sense": "BMSC", "rule": rule_t, "status": "NumericHolds"})
            else:
                out.append({"a": a, "b": b, "sense": "BEC", "rule": "R5-shared-prefix", "status": "NumericHolds"})
        return out

    def summary(self) -> dict:
        return {
            "spec": str(self.spec),
            "N": self.N,
            "candidates": self.candidates,
            "theorem_count": self.theorem_count,
            "combined_count": self.combined_count,
            "combined_is_lower_bound": self.combined is None,
            "config": self.config,
        }


def default_threads() -> int:
    env = os.environ.get("POLAR_PO_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def enumerate_pairs(spec, N: int, mother_po_hook: MotherHook | None | str = "default",
                    transfer: str = "bounds", grid: Grid | None = None, rtol: float = TOL,
                    prefix_min: int | None = None, threads: int | None = None,
                    max_N: int = 1 << 16) -> EnumerationResult:
    """Enumerate certified pairs among all non-degenerate synthetic channels.

    Parameters
    ----------
    transfer : {"bounds", "theorem", "corollary", "theorem+corollary"}
        How the all-channel pairs are obtained.  ``bounds`` accepts ``a ⪯ b``
        when ``Z_b(x) <= sqrt(Z_a(x^2))`` on the grid.  ``theorem`` takes
        ``γ1 ⪯ 1α`` from ``γ ⪯ α`` at length ``n-1``; ``corollary`` takes
        ``γ ⪯ α`` from ``1γ ⪯ α1`` at length ``n+1``.
    mother_po_hook : callable, "default", "classic" or None
        Order used on suffixes after stripping a shared prefix of length at
        least ``prefix_min`` (default ``m + 1``).  ``None`` skips that step;
        the combined count is then reported as a lower bound.
    """
    spec = as_spec(spec)
    n = check_length(N)
    if N > max_N:
        raise ValueError(f"N={N} exceeds the enumeration limit {max_N}")
    if not spec.is_none and N < 2**spec.m:
        raise ValueError(f"N={N} is smaller than 2^m")
    grid = grid or default_grid()
    threads = threads or default_threads()
    dead = degenerate_positions(spec, N)
    positions = np.array([i for i in range(1, N + 1) if i not in dead])
    idx = positions - 1

    if transfer == "bounds":
        lz, lw = path_table(spec, n, grid)
        # sqrt(Z(x^2)) on the same grid
        sq = _squared(grid)
        lz2, lw2 = path_table(spec, n, sq)
        lzl, lwl = lz2 / 2, lw2 - np.log1p(np.exp(lz2 / 2))
        R = _relation(lzl[idx], lwl[idx], lz[idx], lw[idx], rtol, threads)
    elif transfer in ("theorem", "corollary", "theorem+corollary"):
        R = np.zeros((len(idx), len(idx)), dtype=bool)
        where = {int(p): k for k, p in enumerate(idx)}
        if "theorem" in transfer:
            lz, lw = path_table(spec, n - 1, grid)
            D = _relation(lz, lw, lz, lw, rtol, threads)
            g, a = np.nonzero(D)
            lesser = 2 * g + 1              # γ1
            greater = a + (1 << (n - 1))     # 1α
            _mark(R, where, lesser, greater)
        if "corollary" in transfer:
            lz, lw = path_table(spec, n + 1, grid)
            ones = np.arange(N) + N          # 1γ
            ends = 2 * np.arange(N) + 1      # α1
            D = _relation(lz[ones], lw[ones], lz[ends], lw[ends], rtol, threads)
            g, a = np.nonzero(D)
            _mark(R, where, g, a)
    else:
        raise ValueError(f"unknown transfer {transfer!r}")

    if prefix_min is None:
        prefix_min = spec.m + 1
    combined = None
    hook_label = None
    if mother_po_hook is not None:
        if mother_po_hook == "default":
            mother_po_hook = bec_suffix_hook(grid, rtol)
        elif mother_po_hook == "classic":
            mother_po_hook = classic_suffix_hook
        hook_label = getattr(mother_po_hook, "label", getattr(mother_po_hook, "__name__", "custom"))
        combined = R.copy()
        xor = idx[:, None] ^ idx[None, :]
        bits = np.zeros_like(xor)
        for b in range(n):
            bits[xor >= (1 << b)] = b + 1
        lcp = n - bits
        for t in range(1, n - prefix_min + 1):
            sel = lcp == n - t
            if not sel.any():
                continue
            D = np.asarray(mother_po_hook(t), dtype=bool)
            mask = (1 << t) - 1
            u = (idx & mask)[:, None]
            v = (idx & mask)[None, :]
            combined |= sel & D[u, v]

    config = {
        "transfer": transfer,
        "grid": grid.label,
        "grid_points": len(grid),
        "comparison": "log-domain, relative tolerance on the small side",
        "rtol": rtol,
        "mother_po_hook": hook_label,
        "prefix_min": prefix_min,
        "degenerate": len(dead),
    }
    return EnumerationResult(spec, N, positions, R, combined, config)


def _mark(R, where, lesser, greater):
    for i, j in zip(lesser.tolist(), greater.tolist()):
        a, b = where.get(i), where.get(j)
        if a is not None and b is not None:
            R[a, b] = True


def save_pairs(result: EnumerationResult, path: str, which: str = "combined") -> None:
    with open(path, "w") as fh:
        json.dump({"summary": result.summary(), "pairs": result.records(which)}, fh, indent=0)
