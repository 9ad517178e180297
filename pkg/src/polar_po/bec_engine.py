"""Bhattacharyya-parameter evolution on the erasure channel.

Values can be handled in three forms:

* exact, as :class:`~polar_po.polynomial.BernsteinPoly` in the erasure
  probability ``x``;
* float arrays in linear scale;
* log pairs ``(log z, log(1 - z))``, which keep full relative accuracy at
  both ends of [0, 1] and are what the grid backend uses.

Gate rules on a pair ``(a, b)``::

    up   (check):    a + b - ab = a + b (1 - a)
    down (variable): ab
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .path_algebra import parse_path, path_position
from .polynomial import BernsteinPoly
from .ratematch import RateMatchSpec, as_spec, check_length

ONE = BernsteinPoly.constant(1)
ZERO = BernsteinPoly((0,))
X = BernsteinPoly.identity()


# ---------------------------------------------------------------- grids
@dataclass(frozen=True)
class Grid:
    """Evaluation points on [0, 1] together with accurate ``log x`` and ``log(1-x)``."""

    x: np.ndarray
    lx: np.ndarray
    lw: np.ndarray
    label: str = "custom"

    @classmethod
    def from_points(cls, x, label: str = "custom") -> "Grid":
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            return cls(x, np.log(x), np.log1p(-x), label)

    def __len__(self) -> int:
        return self.x.size

    def refine(self, factor: int = 10) -> "Grid":
        """Chebyshev grid with ``factor`` times the points, same tails."""
        n = (len(self) - 1) * factor + 1
        return default_grid(n, label=f"{self.label}x{factor}")


def chebyshev_points(n: int) -> np.ndarray:
    """``n`` Chebyshev-Lobatto points mapped to [0, 1], endpoints included."""
    return 0.5 - 0.5 * np.cos(np.pi * np.arange(n) / (n - 1))


def default_grid(points: int = 2049, tail_points: int = 200, tail_span: float = 60.0,
                 label: str | None = None) -> Grid:
    """Chebyshev points plus logistic tail points reaching ``x ~ exp(-tail_span)``.

    Tail points are parametrised by ``t`` with ``x = 1/(1 + e^-t)``, so both
    ``log x`` and ``log(1-x)`` are exact to rounding even where ``x`` or
    ``1 - x`` is far below machine epsilon.  The interior endpoints 0 and 1
    are dropped; every path function is 0 or 1 there (or constant).
    """
    xc = chebyshev_points(points)[1:-1]
    with np.errstate(divide="ignore"):
        lx_c, lw_c = np.log(xc), np.log1p(-xc)
    t = np.linspace(-tail_span, tail_span, tail_points)
    lx_t, lw_t = -np.logaddexp(0.0, -t), -np.logaddexp(0.0, t)
    x_t = np.exp(lx_t)
    x = np.concatenate([xc, x_t])
    lx = np.concatenate([lx_c, lx_t])
    lw = np.concatenate([lw_c, lw_t])
    order = np.lexsort((lw, lx))
    return Grid(x[order], lx[order], lw[order], label or f"cheb{points}+tails{tail_points}")


# ---------------------------------------------------------------- initial vectors
def initial_vector(spec, N: int, x=None):
    """Initial Bhattacharyya vector of a rate-matched length-``N`` code.

    Parameters
    ----------
    spec : RateMatchSpec or str
    N : int
        Mother code length, a power of two with ``N >= 2^m``.
    x : float, array, BernsteinPoly or None
        Erasure probability.  ``None`` gives the symbolic vector (polynomials
        in ``x``); an array of shape ``S`` gives a float array ``(N,) + S``.
    """
    spec = as_spec(spec)
    check_length(N)
    mask = spec.mask(N)
    fixed = 1.0 if spec.kind == "puncture" else 0.0
    if x is None or isinstance(x, BernsteinPoly):
        sym = X if x is None else x
        const = ONE if spec.kind == "puncture" else ZERO
        return [const if mk else sym for mk in mask]
    x = np.asarray(x, dtype=float)
    if np.any((x < 0) | (x > 1)):
        raise ValueError("erasure probability must lie in [0, 1]")
    out = np.broadcast_to(x, (N,) + x.shape).copy()
    out[mask] = fixed
    return out


def initial_log_vector(spec, N: int, grid: Grid):
    """Log-pair form of :func:`initial_vector` on a grid: arrays ``(N, G)``."""
    spec = as_spec(spec)
    mask = spec.mask(N)
    lz = np.broadcast_to(grid.lx, (N, len(grid))).copy()
    lw = np.broadcast_to(grid.lw, (N, len(grid))).copy()
    if spec.kind == "puncture":
        lz[mask], lw[mask] = 0.0, -np.inf
    elif spec.kind == "shorten":
        lz[mask], lw[mask] = -np.inf, 0.0
    return lz, lw


# ---------------------------------------------------------------- butterfly
def _stage_views(arr: np.ndarray, stage: int):
    """Top and bottom operands of every gate at ``stage`` (0 = outermost)."""
    N = arr.shape[0]
    blocks = 1 << stage
    v = arr.reshape((blocks, 2, N // (2 * blocks)) + arr.shape[1:])
    return v[:, 0], v[:, 1]


def polarize_vector(Z):
    """Apply the full butterfly ``h`` to a Bhattacharyya vector.

    At the outermost stage entries ``i`` and ``i + N/2`` combine into
    ``(up, down)``; the up outputs fill the first half, the down outputs the
    second, and each half is polarized recursively.  Works on float arrays
    (first axis is the position) and on lists of polynomials.
    """
    if isinstance(Z, (list, tuple)) and Z and isinstance(Z[0], BernsteinPoly):
        return _polarize_exact(list(Z))
    Z = np.array(Z, dtype=float)
    n = check_length(Z.shape[0])
    for s in range(n):
        top, bot = _stage_views(Z, s)
        a, b = top.copy(), bot.copy()
        top[...] = np.clip(a + b - a * b, 0.0, 1.0)
        bot[...] = np.clip(a * b, 0.0, 1.0)
    return Z


def _polarize_exact(Z: list[BernsteinPoly]) -> list[BernsteinPoly]:
    check_length(len(Z))
    if len(Z) == 1:
        return Z
    h = len(Z) // 2
    up, down = [], []
    for a, b in zip(Z[:h], Z[h:]):
        w = a.complement() * b.complement()
        up.append(w.complement())
        down.append(a * b)
    return _polarize_exact(up) + _polarize_exact(down)


def polarize_log(lz: np.ndarray, lw: np.ndarray):
    """Butterfly on log pairs; arrays of shape ``(N, ...)`` are not modified."""
    lz, lw = np.array(lz, dtype=float), np.array(lw, dtype=float)
    n = check_length(lz.shape[0])
    for s in range(n):
        zt, zb = _stage_views(lz, s)
        wt, wb = _stage_views(lw, s)
        za, zb_, wa, wb_ = zt.copy(), zb.copy(), wt.copy(), wb.copy()
        # rounding can push a log-probability above 0
        zt[...] = np.minimum(np.logaddexp(za, zb_ + wa), 0.0)
        wt[...] = wa + wb_
        zb[...] = za + zb_
        wb[...] = np.minimum(np.logaddexp(wa, za + wb_), 0.0)
    return lz, lw


# ---------------------------------------------------------------- scalar stages
def _log_step(lz, lw, bit: str):
    with np.errstate(invalid="ignore"):
        if bit == "0":
            return np.minimum(lz + np.log1p(np.exp(lw)), 0.0), 2.0 * lw
        return 2.0 * lz, np.minimum(lw + np.log1p(np.exp(lz)), 0.0)


def _exact_step(z: BernsteinPoly, bit: str) -> BernsteinPoly:
    if bit == "0":
        return z.complement().square().complement()
    return z.square()


def _check_unit(v):
    v = np.asarray(v, dtype=float)
    if np.any((v < 0) | (v > 1)) or np.any(np.isnan(v)):
        raise ValueError("arguments must lie in [0, 1]")
    return v


def traditional_f(alpha, x):
    """``f_alpha(x)``: ``f0(v) = 2v - v^2`` and ``f1(v) = v^2``, first bit applied first."""
    alpha = parse_path(alpha)
    if isinstance(x, BernsteinPoly):
        for b in alpha:
            x = _exact_step(x, b)
        return x
    v = _check_unit(x).copy()
    for b in alpha:
        v = 2 * v - v * v if b == "0" else v * v
    return v if v.ndim else float(v)


def traditional_f_inverse(alpha, y):
    """Inverse of :func:`traditional_f` built from ``sqrt(y)`` and ``1 - sqrt(1-y)``."""
    alpha = parse_path(alpha)
    v = _check_unit(y).copy()
    for b in reversed(alpha):
        v = 1.0 - np.sqrt(1.0 - v) if b == "0" else np.sqrt(v)
    return v if v.ndim else float(v)


def traditional_f_log(alpha, lz, lw):
    """:func:`traditional_f` on log pairs."""
    for b in parse_path(alpha):
        lz, lw = _log_step(lz, lw, b)
    return lz, lw


def traditional_f_inverse_log(alpha, lz, lw):
    """:func:`traditional_f_inverse` on log pairs."""
    for b in reversed(parse_path(alpha)):
        with np.errstate(invalid="ignore"):
            if b == "0":
                # w' = sqrt(w), z' = z / (1 + sqrt(w))
                lz, lw = lz - np.log1p(np.exp(lw / 2)), lw / 2
            else:
                lz, lw = lz / 2, lw - np.log1p(np.exp(lz / 2))
    return lz, lw


# ---------------------------------------------------------------- path functions
def _check_path(spec: RateMatchSpec, alpha: str) -> None:
    if not spec.is_none and len(alpha) < spec.m:
        raise ValueError(f"path length {len(alpha)} is shorter than m={spec.m}")


@dataclass
class ErasureFunction:
    """``x -> Z_{spec, alpha}(x)`` with an exact or a sampled backend.

    For ``backend="exact"`` the polynomial is in ``poly``; for
    ``backend="grid"`` the log pair ``(lz, lw)`` holds the values on ``grid``.
    """

    spec: RateMatchSpec
    path: str
    backend: str
    poly: BernsteinPoly | None = None
    grid: Grid | None = None
    lz: np.ndarray | None = field(default=None, repr=False)
    lw: np.ndarray | None = field(default=None, repr=False)

    @property
    def size(self) -> int:
        """Degree for the exact backend, number of points for the grid."""
        return self.poly.degree if self.backend == "exact" else len(self.grid)

    @property
    def values(self) -> np.ndarray:
        """Function values on the grid (grid backend) in linear scale."""
        if self.backend != "grid":
            raise ValueError("values are only stored for the grid backend")
        return np.exp(self.lz)

    def on_grid(self, grid: Grid):
        """Log pair on ``grid``, computed from whichever backend is present."""
        if self.backend == "exact":
            return self.poly.log_evaluate(grid.lx, grid.lw), self.poly.complement().log_evaluate(grid.lx, grid.lw)
        if grid is self.grid:
            return self.lz, self.lw
        return path_log(self.spec, self.path, grid.lx, grid.lw)

    def __call__(self, x):
        if self.backend == "exact":
            out = self.poly.evaluate(x)
        else:
            out = np.interp(np.asarray(x, dtype=float), self.grid.x, self.values)
        out = np.asarray(out)
        return out.reshape(np.shape(x)) if np.ndim(x) else float(out.ravel()[0])


def path_polynomial(spec, alpha, shortcut: bool = True) -> BernsteinPoly:
    """Exact ``Z_{spec, alpha}`` as a polynomial in the erasure probability."""
    spec, alpha = as_spec(spec), parse_path(alpha)
    _check_path(spec, alpha)
    if not shortcut:
        vec = _polarize_exact(initial_vector(spec, 2 ** len(alpha)))
        return vec[path_position(alpha) - 1]
    m = spec.m
    if m:
        z = _polarize_exact(initial_vector(spec, 2**m))[path_position(alpha[:m]) - 1]
    else:
        z = X
    return traditional_f(alpha[m:], z) if len(alpha) > m else z


def path_log(spec, alpha, lx, lw, shortcut: bool = True):
    """Log pair of ``Z_{spec, alpha}`` at points given by ``(log x, log(1-x))``."""
    spec, alpha = as_spec(spec), parse_path(alpha)
    _check_path(spec, alpha)
    lx, lw = np.atleast_1d(np.asarray(lx, float)).ravel(), np.atleast_1d(np.asarray(lw, float)).ravel()
    grid = Grid(np.exp(lx), lx, lw)
    k = len(alpha) if not shortcut else spec.m
    if k:
        lz0, lw0 = initial_log_vector(spec, 2**k, grid)
        vz, vw = polarize_log(lz0, lw0)
        i = path_position(alpha[:k]) - 1
        lz, lw_ = vz[i], vw[i]
    else:
        lz, lw_ = lx, lw
    return traditional_f_log(alpha[k:], lz, lw_) if len(alpha) > k else (lz, lw_)


def path_function(spec, alpha, backend: str = "exact", grid: Grid | None = None,
                  shortcut: bool = True, max_exact_length: int = 12) -> ErasureFunction:
    """Build the :class:`ErasureFunction` of one path.

    Raises
    ------
    ValueError
        Path shorter than ``m``, or longer than ``max_exact_length`` for the
        exact backend.
    """
    spec, alpha = as_spec(spec), parse_path(alpha)
    _check_path(spec, alpha)
    if backend == "exact":
        if len(alpha) > max_exact_length:
            raise ValueError(f"exact backend limited to paths of length <= {max_exact_length}")
        return ErasureFunction(spec, alpha, "exact", poly=path_polynomial(spec, alpha, shortcut))
    if backend == "grid":
        grid = grid or default_grid()
        lz, lw = path_log(spec, alpha, grid.lx, grid.lw, shortcut)
        return ErasureFunction(spec, alpha, "grid", grid=grid, lz=lz, lw=lw)
    raise ValueError(f"unknown backend {backend!r}")


def path_bhattacharyya(spec, alpha, x=None, shortcut: bool = True):
    """``Z_{spec, alpha}`` at ``x``.

    With ``x=None`` the exact polynomial is returned.  Float inputs are
    evaluated in the log domain, so tiny values keep their relative accuracy.
    """
    if x is None:
        return path_polynomial(spec, alpha, shortcut)
    if isinstance(x, BernsteinPoly):
        spec_, a = as_spec(spec), parse_path(alpha)
        _check_path(spec_, a)
        vec = _polarize_exact(initial_vector(spec_, 2 ** len(a), x))
        return vec[path_position(a) - 1]
    xv = _check_unit(x)
    with np.errstate(divide="ignore"):
        lz, _ = path_log(spec, alpha, np.log(xv), np.log1p(-xv), shortcut)
    out = np.exp(lz).reshape(xv.shape)
    return out if out.ndim else float(out)


def path_table(spec, n: int, grid: Grid):
    """Log pairs of all ``2^n`` path functions on ``grid``, in position order.

    Returns arrays ``(lz, lw)`` of shape ``(2^n, len(grid))``; row ``i`` is the
    path with ``path_position == i + 1``.
    """
    spec = as_spec(spec)
    m = spec.m
    if n < m:
        raise ValueError(f"n={n} is smaller than m={m}")
    if m:
        lz, lw = polarize_log(*initial_log_vector(spec, 2**m, grid))
    else:
        lz, lw = grid.lx[None, :].copy(), grid.lw[None, :].copy()
    for _ in range(n - m):
        z0, w0 = _log_step(lz, lw, "0")
        z1, w1 = _log_step(lz, lw, "1")
        lz = np.stack([z0, z1], axis=1).reshape(-1, len(grid))
        lw = np.stack([w0, w1], axis=1).reshape(-1, len(grid))
    return lz, lw


def degenerate_positions(spec, N: int) -> set[int]:
    """1-based positions whose function is constant (1 for puncturing, 0 for shortening).

    Every path function is nondecreasing with ``Z(1) = 1`` under puncturing and
    ``Z(0) = 0`` under shortening, so it is identically 1 iff ``Z(0) = 1`` and
    identically 0 iff ``Z(1) = 0``.  Those boundary values are evolved exactly
    in 0/1 integer arithmetic.
    """
    spec = as_spec(spec)
    check_length(N)
    if spec.is_none:
        return set()
    x = 0 if spec.kind == "puncture" else 1
    vec = [1 if spec.kind == "puncture" else 0] * N
    for i, mk in enumerate(spec.mask(N)):
        if not mk:
            vec[i] = x
    out = polarize_vector(np.array(vec, dtype=float)).astype(int)
    target = 1 if spec.kind == "puncture" else 0
    return {i + 1 for i, v in enumerate(out) if v == target}


def path_value_exact(spec, alpha, x) -> Fraction:
    """Exact rational ``Z_{spec, alpha}(x)`` for rational ``x``.

    Evolves the ``2^m`` prefix vector in rational arithmetic and then applies
    the scalar stages, so it works for paths longer than the polynomial
    backend allows.
    """
    spec, alpha = as_spec(spec), parse_path(alpha)
    _check_path(spec, alpha)
    x = Fraction(x)
    if not 0 <= x <= 1:
        raise ValueError("x must lie in [0, 1]")
    m = spec.m
    if m:
        fixed = Fraction(1) if spec.kind == "puncture" else Fraction(0)
        vec = [fixed if mk else x for mk in spec.mask(2**m)]
        z = _polarize_rational(vec)[path_position(alpha[:m]) - 1]
    else:
        z = x
    for b in alpha[m:]:
        z = 2 * z - z * z if b == "0" else z * z
    return z


def _polarize_rational(Z: list) -> list:
    if len(Z) == 1:
        return Z
    h = len(Z) // 2
    up = [a + b - a * b for a, b in zip(Z[:h], Z[h:])]
    down = [a * b for a, b in zip(Z[:h], Z[h:])]
    return _polarize_rational(up) + _polarize_rational(down)
