"""Numerical verification suites for the geometric-mean step and the squaring inequality.

These are witnesses, not proofs: every claim is evaluated on explicit data
and the largest violation is reported.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bec_engine import Grid, default_grid, path_log, polarize_vector
from .path_algebra import all_paths, build_convolution_mapping, conv_layer
from .ratematch import RateMatchSpec, as_spec, check_length

TOL = 1e-12


def core_inequality(a, b):
    """Both sides of ``sqrt(ab) + b - sqrt(ab) b <= sqrt((a + b - ab)(2b - b^2))``."""
    a, b = np.asarray(a, float), np.asarray(b, float)
    g = np.sqrt(a * b)
    return g + b - g * b, np.sqrt((a + b - a * b) * (2 * b - b * b))


def pair_schedule(N: int, P: int) -> list[tuple[int, int, int]]:
    """Pairs ``(i, j, layer)`` averaged by the chain, outermost layer first.

    ``Z_0`` holds ``a`` on positions ``1..P`` and ``b`` on the rest.  For
    ``P <= N/2`` the pairs are ``(x, f(x))`` from the convolution mapping of
    ``{1..P}`` onto ``{P+1..2P}``; for larger ``P`` they are the mirror images
    ``(N+1-y, N+1-x)`` of the mapping built for ``N - P``.  Ties within a layer
    go to the smaller first index.
    """
    check_length(N)
    if not 1 <= P <= N:
        raise ValueError(f"P={P} out of range 1..{N}")
    if P == N:
        return []
    if P <= N // 2:
        pairs = list(build_convolution_mapping(P).pairs)
    else:
        pairs = sorted((N + 1 - y, N + 1 - x) for x, y in build_convolution_mapping(N - P).pairs)
    sched = [(i, j, conv_layer(i, j, N)) for i, j in pairs]
    sched.sort(key=lambda t: (t[2], t[0]))
    return sched


@dataclass
class AveragingChain:
    """Vectors ``Z_0, ..., Z_K`` where step ``k`` replaces one scheduled pair by its geometric mean.

    ``a`` and ``b`` may be arrays; each column is an independent chain.
    """

    N: int
    P: int
    a: np.ndarray
    b: np.ndarray
    schedule: list[tuple[int, int, int]] = field(default_factory=list)

    def __post_init__(self):
        self.a = np.atleast_1d(np.asarray(self.a, float))
        self.b = np.atleast_1d(np.asarray(self.b, float))
        if not self.schedule:
            self.schedule = pair_schedule(self.N, self.P)

    def initial(self) -> np.ndarray:
        Z = np.empty((self.N,) + np.broadcast(self.a, self.b).shape)
        Z[: self.P] = self.a
        Z[self.P :] = self.b
        return Z

    def vectors(self):
        """Yield ``Z_0, Z_1, ...`` (fresh arrays)."""
        Z = self.initial()
        g = np.sqrt(self.a * self.b)
        yield Z.copy()
        for i, j, _ in self.schedule:
            Z[i - 1] = g
            Z[j - 1] = g
            yield Z.copy()


@dataclass
class ChainReport:
    N: int
    P: int
    draws: int
    steps: int
    max_violation: float
    boundary: bool = False

    @property
    def passed(self) -> bool:
        return self.max_violation <= TOL


def verify_geometric_mean_step(N: int, P: int, a, b) -> ChainReport:
    """Check ``h(Z_{k+1}) <= h(Z_k)`` componentwise along the whole chain.

    ``a`` and ``b`` may be scalars or equal-shape arrays of draws; the
    returned violation is the maximum of ``h(Z_{k+1}) - h(Z_k)`` over steps,
    positions and draws (``0`` or negative means monotone).
    """
    chain = AveragingChain(N, P, a, b)
    boundary = bool(np.any((chain.a <= 0) | (chain.a >= 1) | (chain.b <= 0) | (chain.b >= 1)))
    if np.any((chain.a < 0) | (chain.a > 1) | (chain.b < 0) | (chain.b > 1)):
        raise ValueError("a and b must lie in [0, 1]")
    worst = -np.inf
    prev = None
    steps = 0
    for Z in chain.vectors():
        cur = polarize_vector(Z)
        if prev is not None:
            worst = max(worst, float(np.max(cur - prev)))
            steps += 1
        prev = cur
    return ChainReport(N, P, chain.a.size, steps, 0.0 if steps == 0 else max(worst, 0.0), boundary)


@dataclass
class SquaringReport:
    spec: str
    beta: str
    max_violation: float
    points: int

    @property
    def passed(self) -> bool:
        return self.max_violation <= TOL


def verify_squaring_inequality(spec, beta, grid: Grid | None = None, m: int | None = None) -> SquaringReport:
    """Largest value of ``Z_{1 beta}(x) - Z_beta(x^2)`` over the grid, for ``|beta| = m``.

    ``m`` defaults to the exponent of ``spec``; passing it only adds a check.
    """
    spec = as_spec(spec)
    if m is not None and m != spec.m:
        raise ValueError(f"m={m} does not match {spec}")
    if len(beta) != spec.m:
        raise ValueError(f"|beta| must equal m={spec.m}")
    grid = grid or default_grid()
    x = grid.x
    with np.errstate(divide="ignore"):
        lx2, lw2 = 2 * grid.lx, grid.lw + np.log1p(x)
    left, _ = path_log(spec, beta, lx2, lw2)
    right, _ = path_log(spec, "1" + beta, grid.lx, grid.lw)
    viol = float(np.max(np.exp(right) - np.exp(left)))
    return SquaringReport(str(spec), beta, max(viol, 0.0), len(grid))


def all_specs(m_max: int, kinds=("puncture", "shorten")) -> list[RateMatchSpec]:
    """Every pattern ``P/2^m`` with odd ``P < 2^m`` and ``1 <= m <= m_max``."""
    return [RateMatchSpec(k, p, m) for k in kinds for m in range(1, m_max + 1) for p in range(1, 2**m, 2)]


@dataclass
class SuiteSummary:
    suite: str
    tuples: int
    max_violation: float
    failures: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"suite": self.suite, "tuples": self.tuples, "max_violation": self.max_violation,
                "failures": self.failures}


def sweep_squaring(m_values=(2, 3, 4), points: int = 2049) -> SuiteSummary:
    """Squaring inequality for every pattern with ``m`` in ``m_values`` and every ``|beta| = m``."""
    grid = default_grid(points)
    out = SuiteSummary("appendixC", 0, 0.0)
    for spec in all_specs(max(m_values)):
        if spec.m not in m_values:
            continue
        for beta in all_paths(spec.m):
            r = verify_squaring_inequality(spec, beta, grid)
            out.tuples += 1
            out.max_violation = max(out.max_violation, r.max_violation)
            if not r.passed:
                out.failures.append({"spec": r.spec, "beta": beta, "violation": r.max_violation})
    return out


def sweep_geometric_mean(N_max: int = 64, draws: int = 10_000, seed: int = 0) -> SuiteSummary:
    """Averaging chains for every ``N <= N_max``, every ``P``, ``draws`` random ``(a, b)`` each."""
    rng = np.random.default_rng(seed)
    out = SuiteSummary("appendixB", 0, 0.0)
    N = 2
    while N <= N_max:
        for P in range(1, N + 1):
            a = rng.uniform(0.0, 1.0, draws)
            b = rng.uniform(0.0, 1.0, draws)
            # keep draws inside the open interval
            a[a == 0] = 0.5
            b[b == 0] = 0.5
            r = verify_geometric_mean_step(N, P, a, b)
            out.tuples += draws
            out.max_violation = max(out.max_violation, r.max_violation)
            if not r.passed:
                out.failures.append({"N": N, "P": P, "violation": r.max_violation})
        N *= 2
    return out


def sweep_appendix_suites(limits: dict | None = None) -> dict:
    """Run both suites; ``limits`` keys: ``m_max``, ``grid``, ``N_max``, ``draws``, ``seed``."""
    lim = {"m_max": 4, "grid": 2049, "N_max": 64, "draws": 10_000, "seed": 0}
    lim.update(limits or {})
    c = sweep_squaring(tuple(range(1, lim["m_max"] + 1)), lim["grid"])
    b = sweep_geometric_mean(lim["N_max"], lim["draws"], lim["seed"])
    return {"limits": lim, "appendixC": c.to_dict(), "appendixB": b.to_dict()}


def equality_cases(spec, beta) -> tuple[float, float]:
    """Violation magnitudes of the squaring inequality at ``x = 0`` and ``x = 1``."""
    spec = as_spec(spec)
    from .bec_engine import path_bhattacharyya

    out = []
    for x in (0.0, 1.0):
        out.append(abs(path_bhattacharyya(spec, "1" + beta, x) - path_bhattacharyya(spec, beta, x * x)))
    return tuple(out)



BSC_DELTAS = tuple(round(0.05 * k, 2) for k in range(1, 10))


def sweep_bounds(deltas=BSC_DELTAS, m_max: int = 2, max_length: int = 4) -> SuiteSummary:
    """Sandwich bounds on BSC synthetic channels for every pattern with ``m <= m_max``.

    Also checks that on the erasure channel the upper bound is attained.
    """
    from .bmsc_engine import FiniteBmsc, check_bounds

    out = SuiteSummary("bounds", 0, 0.0)
    specs = all_specs(m_max)
    channels = [FiniteBmsc.bsc(d) for d in deltas]
    for spec in specs:
        for k in range(spec.m, max_length + 1):
            for alpha in all_paths(k):
                for W in channels:
                    r = check_bounds(W, spec, alpha, max_length=max_length)
                    out.tuples += 1
                    viol = max(r.lower - r.exact, r.exact - r.upper, 0.0)
                    out.max_violation = max(out.max_violation, viol)
                    if not r.passed:
                        out.failures.append({"spec": str(spec), "path": alpha, "channel": W.label,
                                             "lower": r.lower, "exact": r.exact, "upper": r.upper})
                for eps in (0.1, 0.3, 0.5, 0.7, 0.9):
                    r = check_bounds(FiniteBmsc.bec(eps), spec, alpha, max_length=max_length)
                    out.tuples += 1
                    gap = abs(r.upper_gap)
                    out.max_violation = max(out.max_violation, gap)
                    if gap > TOL or not r.passed:
                        out.failures.append({"spec": str(spec), "path": alpha, "channel": f"bec:{eps}",
                                             "upper_gap": r.upper_gap})
    return out


def transfer_soundness(n: int = 3, specs=("punc:1/2", "short:1/2"), deltas=BSC_DELTAS) -> SuiteSummary:
    """Every symmetric-channel order found by :func:`~polar_po.po_core.bmsc_po` checked on BSCs.

    A contradiction is a pair ``a ⪯ b`` reported as holding while some BSC
    gives ``Z(W^b) > Z(W^a) + 1e-12``.
    """
    from .bmsc_engine import FiniteBmsc, synthetic_bhattacharyya
    from .po_core import bmsc_po

    out = SuiteSummary("transfer", 0, 0.0)
    channels = [FiniteBmsc.bsc(d) for d in deltas]
    for text in specs:
        spec = as_spec(text)
        paths = all_paths(n)
        Z = {W.label: {a: synthetic_bhattacharyya(W, spec, a, max_length=n) for a in paths} for W in channels}
        for a in paths:
            for b in paths:
                if a == b or not bmsc_po(spec, a, b).holds:
                    continue
                for W in channels:
                    out.tuples += 1
                    viol = Z[W.label][b] - Z[W.label][a]
                    out.max_violation = max(out.max_violation, viol, 0.0)
                    if viol > TOL:
                        out.failures.append({"spec": str(spec), "a": a, "b": b, "channel": W.label,
                                             "violation": viol})
    return out
