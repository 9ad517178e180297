"""Exact univariate polynomials on [0, 1] with big-integer coefficients.

A :class:`BernsteinPoly` of degree ``d`` stores integers ``c_k`` with

    p(x) = sum_k c_k x^k (1 - x)^(d - k),

i.e. Bernstein coefficients scaled by ``binom(d, k)``.  In this form a
product is a plain convolution of the coefficient sequences, so every
polarization operation reduces to big-integer multiplication (done with
Kronecker substitution).  Power-basis coefficients are available on demand.

Nonnegativity of all ``c_k`` certifies ``p >= 0`` on [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import gmpy2
import numpy as np

# Packed operands above this many bits are multiplied with GMP.
_GMP_BITS = 1 << 14


def _pack(coeffs, width: int) -> int:
    return int.from_bytes(b"".join(c.to_bytes(width, "little") for c in coeffs), "little")


def _unpack(value: int, width: int, count: int) -> list[int]:
    data = value.to_bytes(width * count, "little")
    return [int.from_bytes(data[i * width : (i + 1) * width], "little") for i in range(count)]


def _convolve_nonneg(a: list[int], b: list[int]) -> list[int]:
    """Convolution of two nonnegative integer sequences via one big multiply."""
    if not a or not b:
        return []
    ma, mb = max(a), max(b)
    if ma == 0 or mb == 0:
        return [0] * (len(a) + len(b) - 1)
    if len(a) == 1:
        return [a[0] * c for c in b]
    if len(b) == 1:
        return [b[0] * c for c in a]
    bits = ma.bit_length() + mb.bit_length() + min(len(a), len(b)).bit_length()
    width = (bits + 8) // 8
    pa = _pack(a, width)
    pb = pa if b is a else _pack(b, width)
    if pa.bit_length() + pb.bit_length() > _GMP_BITS:
        prod = int(gmpy2.mpz(pa) * gmpy2.mpz(pb)) if b is not a else int(gmpy2.square(gmpy2.mpz(pa)))
    else:
        prod = pa * pb
    return _unpack(prod, width, len(a) + len(b) - 1)


def convolve(a: list[int], b: list[int]) -> list[int]:
    """Exact convolution of signed integer sequences."""
    if all(c >= 0 for c in a) and all(c >= 0 for c in b):
        return _convolve_nonneg(a, b)
    ap, an = [max(c, 0) for c in a], [max(-c, 0) for c in a]
    bp, bn = [max(c, 0) for c in b], [max(-c, 0) for c in b]
    out = [0] * (len(a) + len(b) - 1)
    for s, u, v in ((1, ap, bp), (1, an, bn), (-1, ap, bn), (-1, an, bp)):
        if any(u) and any(v):
            for k, c in enumerate(_convolve_nonneg(u, v)):
                out[k] += s * c
    return out


@lru_cache(maxsize=64)
def binomial_row(d: int) -> tuple[int, ...]:
    """``(binom(d, 0), ..., binom(d, d))``: the constant 1 at degree ``d``."""
    row = [1] * (d + 1)
    for k in range(1, d):
        row[k] = row[k - 1] * (d - k + 1) // k
    return tuple(row)


@dataclass(frozen=True, eq=False)
class BernsteinPoly:
    """Polynomial ``sum_k coef[k] x^k (1-x)^(d-k)`` with integer ``coef``."""

    coef: tuple[int, ...]

    @property
    def degree(self) -> int:
        """Representation degree (an upper bound on the true degree)."""
        return len(self.coef) - 1

    # construction -------------------------------------------------------
    @classmethod
    def constant(cls, value: int, degree: int = 0) -> "BernsteinPoly":
        return cls(tuple(value * c for c in binomial_row(degree)))

    @classmethod
    def identity(cls) -> "BernsteinPoly":
        """The polynomial ``x`` at degree 1."""
        return cls((0, 1))

    @classmethod
    def from_power(cls, coeffs, degree: int | None = None) -> "BernsteinPoly":
        """Build from power-basis integer coefficients ``a_0 + a_1 x + ...``.

        Uses ``x^j = x^j (x + (1-x))^(d-j)``, so ``c_k = sum_j a_j binom(d-j, k-j)``.
        """
        a = [int(c) for c in coeffs]
        d = len(a) - 1 if degree is None else degree
        if d < len(a) - 1:
            raise ValueError("degree below the polynomial's length")
        a += [0] * (d + 1 - len(a))
        c = [0] * (d + 1)
        for j, aj in enumerate(a):
            if aj:
                for i, b in enumerate(binomial_row(d - j)):
                    c[j + i] += aj * b
        return cls(tuple(c))

    # conversion ---------------------------------------------------------
    def power_coefficients(self) -> list[int]:
        """Power-basis coefficients, trailing zeros stripped (at least one entry)."""
        d = self.degree
        a = [0] * (d + 1)
        for k, ck in enumerate(self.coef):
            if ck:
                # x^k (1-x)^(d-k) = sum_i (-1)^i binom(d-k, i) x^(k+i)
                for i, b in enumerate(binomial_row(d - k)):
                    a[k + i] += -ck * b if i & 1 else ck * b
        while len(a) > 1 and a[-1] == 0:
            a.pop()
        return a

    def bernstein_coefficients(self) -> list[Fraction]:
        """Unscaled Bernstein coefficients ``c_k / binom(d, k)``."""
        row = binomial_row(self.degree)
        return [Fraction(c, b) for c, b in zip(self.coef, row)]

    def elevate(self, degree: int) -> "BernsteinPoly":
        """Same polynomial represented at a higher degree."""
        r = degree - self.degree
        if r < 0:
            raise ValueError("cannot lower the representation degree")
        if r == 0:
            return self
        return BernsteinPoly(tuple(convolve(list(self.coef), list(binomial_row(r)))))

    # arithmetic ---------------------------------------------------------
    def _align(self, other: "BernsteinPoly"):
        d = max(self.degree, other.degree)
        return self.elevate(d).coef, other.elevate(d).coef

    def __add__(self, other):
        if isinstance(other, int):
            other = BernsteinPoly.constant(other)
        a, b = self._align(other)
        return BernsteinPoly(tuple(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __neg__(self):
        return BernsteinPoly(tuple(-c for c in self.coef))

    def __sub__(self, other):
        if isinstance(other, int):
            other = BernsteinPoly.constant(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return BernsteinPoly(tuple(other * c for c in self.coef))
        return BernsteinPoly(tuple(convolve(list(self.coef), list(other.coef))))

    __rmul__ = __mul__

    def square(self) -> "BernsteinPoly":
        c = list(self.coef)
        if all(v >= 0 for v in c):
            return BernsteinPoly(tuple(_convolve_nonneg(c, c)))
        return self * self

    def complement(self) -> "BernsteinPoly":
        """``1 - p`` at the same degree."""
        return BernsteinPoly(tuple(b - c for b, c in zip(binomial_row(self.degree), self.coef)))

    def __eq__(self, other):
        if isinstance(other, int):
            other = BernsteinPoly.constant(other)
        if not isinstance(other, BernsteinPoly):
            return NotImplemented
        a, b = self._align(other)
        return a == b

    def __hash__(self):
        return hash(tuple(self.power_coefficients()))

    def __repr__(self):
        return f"BernsteinPoly(degree={self.degree}, power={_format_power(self.power_coefficients())})"

    # evaluation ---------------------------------------------------------
    def evaluate_exact(self, x) -> Fraction:
        """Exact value at a rational point."""
        x = Fraction(x)
        p, q = x.numerator, x.denominator
        r = q - p
        d = self.degree
        # sum_k c_k p^k r^(d-k) over the common denominator q^d
        total = 0
        pk = 1
        rpow = [1] * (d + 1)
        for i in range(1, d + 1):
            rpow[i] = rpow[i - 1] * r
        for k, c in enumerate(self.coef):
            if c:
                total += c * pk * rpow[d - k]
            pk *= p
        return Fraction(total, q**d)

    def log_terms(self, sign: int = 1) -> np.ndarray:
        """``log(sign * c_k)`` with ``-inf`` where that term is absent."""
        return np.array([math.log(sign * c) if sign * c > 0 else -np.inf for c in self.coef])

    def log_evaluate(self, lx, lw, chunk: int = 256) -> np.ndarray:
        """``log p`` from ``lx = log x`` and ``lw = log(1-x)`` (nonnegative ``coef`` only).

        Every term is nonnegative, so the log-sum-exp is accurate to a few
        ulps even where ``p`` underflows in linear scale.
        """
        if any(c < 0 for c in self.coef):
            raise ValueError("log_evaluate needs nonnegative coefficients")
        return _log_sum(self.log_terms(), np.asarray(lx, float), np.asarray(lw, float), chunk)

    def evaluate(self, x, chunk: int = 256) -> np.ndarray:
        """Float evaluation on ``x`` in [0, 1] (signed coefficients allowed)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        with np.errstate(divide="ignore"):
            lx, lw = np.log(x), np.log1p(-x)
        pos = _log_sum(self.log_terms(1), lx, lw, chunk)
        neg = _log_sum(self.log_terms(-1), lx, lw, chunk)
        return np.exp(pos) - np.exp(neg)

    # certification ------------------------------------------------------
    def certify_nonnegative(self, *, max_degree: int = 1024, max_splits: int = 256,
                            tol: float = 1e-12, probe=None):
        """Try to decide ``p >= 0`` on [0, 1] exactly.

        Returns ``(status, witness)`` with status ``"holds"``, ``"fails"``
        (``witness`` is a rational ``x`` with ``p(x) < -tol``, checked in exact
        arithmetic) or ``"unknown"``.

        Coefficients that are all nonnegative certify directly.  Otherwise a
        float scan on ``probe`` looks for a witness, and failing that the
        interval is bisected by integer de Casteljau steps until every piece
        has nonnegative Bernstein coefficients or the budget runs out.
        """
        if all(c >= 0 for c in self.coef):
            return "holds", None
        witness = self._find_witness(probe, tol)
        if witness is not None:
            return "fails", witness
        d = self.degree
        if d > max_degree:
            return "unknown", None
        fact = [1] * (d + 1)
        for i in range(1, d + 1):
            fact[i] = fact[i - 1] * i
        # d!-scaled Bernstein coefficients, integers
        beta = np.array([c * fact[k] * fact[d - k] for k, c in enumerate(self.coef)], dtype=object)
        stack = [(beta, Fraction(0), Fraction(1))]
        splits = 0
        while stack:
            b, lo, hi = stack.pop()
            if all(v >= 0 for v in b):
                continue
            if b[0] < 0 or b[-1] < 0:
                x = lo if b[0] < 0 else hi
                val = self.evaluate_exact(x)
                if val < -tol:
                    return "fails", x
                return "unknown", None
            if splits >= max_splits:
                return "unknown", None
            splits += 1
            left, right = _de_casteljau_half(b)
            mid = (lo + hi) / 2
            stack.append((right, mid, hi))
            stack.append((left, lo, mid))
        return "holds", None

    def _find_witness(self, probe, tol):
        if probe is None:
            probe = 0.5 - 0.5 * np.cos(np.pi * np.arange(513) / 512)
        vals = self.evaluate(probe)
        order = np.argsort(vals)[:5]
        for i in order:
            if vals[i] >= -tol:
                break
            x = Fraction(float(probe[i])).limit_denominator(1 << 30)
            if self.evaluate_exact(x) < -tol:
                return x
        return None


def _de_casteljau_half(b: np.ndarray):
    """Split scaled Bernstein coefficients at the midpoint.

    Uses unnormalised sums ``c_k + c_{k+1}`` so everything stays integral;
    both halves come back scaled by ``2^d``, which does not affect signs.
    """
    d = len(b) - 1
    left = [b[0] << d]
    right = [b[-1] << d]
    cur = b
    for r in range(1, d + 1):
        cur = cur[:-1] + cur[1:]
        left.append(cur[0] << (d - r))
        right.append(cur[-1] << (d - r))
    return np.array(left, dtype=object), np.array(right[::-1], dtype=object)


def _log_sum(logc: np.ndarray, lx: np.ndarray, lw: np.ndarray, chunk: int) -> np.ndarray:
    keep = np.isfinite(logc)
    out = np.full(lx.shape, -np.inf)
    if not keep.any():
        return out
    k = np.nonzero(keep)[0]
    d = len(logc) - 1
    kk, jj, lc = k.astype(float), (d - k).astype(float), logc[keep]
    flat_x, flat_w, res = lx.ravel(), lw.ravel(), out.ravel()
    for s in range(0, flat_x.size, chunk):
        ax, aw = flat_x[s : s + chunk, None], flat_w[s : s + chunk, None]
        with np.errstate(invalid="ignore"):
            # 0 * log(0) must count as 0 at the endpoints
            tx = np.where(kk == 0, 0.0, kk * ax)
            tw = np.where(jj == 0, 0.0, jj * aw)
        t = lc + tx + tw
        m = t.max(axis=1, keepdims=True)
        safe = np.where(np.isfinite(m), m, 0.0)
        with np.errstate(divide="ignore"):
            res[s : s + chunk] = (safe + np.log(np.exp(t - safe).sum(axis=1, keepdims=True)))[:, 0]
        res[s : s + chunk] = np.where(np.isfinite(m[:, 0]), res[s : s + chunk], -np.inf)
    return res.reshape(lx.shape)


def _format_power(a: list[int]) -> str:
    terms = []
    for k, c in enumerate(a):
        if c == 0:
            continue
        mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
        if k and abs(c) == 1:
            terms.append(("-" if c < 0 else "") + mono)
        else:
            terms.append(f"{c}{mono}")
    if not terms:
        return "0"
    s = " + ".join(terms)
    return s.replace("+ -", "- ")


def format_power(poly: BernsteinPoly) -> str:
    """Human-readable power-basis form such as ``2x - x^2``."""
    return _format_power(poly.power_coefficients())
