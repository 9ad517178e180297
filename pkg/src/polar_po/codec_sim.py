"""Polar encoding, rate-matched transmission, SC/SCL decoding and frame-error simulation.

Bit vectors live in *position order*: entry ``p - 1`` carries the bit on
the synthetic channel whose 1-based position is ``p``, i.e. on the path
``bin(p - 1)``.  In that order the codeword is ``x = v F^{(x)n}`` with
positions paired ``(i, i + N/2)`` at the outermost stage, exactly as in the
erasure evolution.  :func:`encode` takes the conventional input ``u`` with
``v = u B_N`` (bit reversal), so ``encode`` is ``u -> u B_N F^{(x)n}``.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from numba import njit
from scipy.stats import binomtest

from .bec_engine import degenerate_positions
from .ratematch import RateMatchSpec, as_spec, check_length

CRC12_POLY = 0x80F  # x^12 + x^11 + x^3 + x^2 + x + 1
CERTAIN = np.inf


# ---------------------------------------------------------------- transforms
def bitrev(N: int) -> np.ndarray:
    """Bit-reversal permutation of ``range(N)``."""
    n = check_length(N)
    i = np.arange(N)
    out = np.zeros(N, dtype=np.int64)
    for b in range(n):
        out |= ((i >> b) & 1) << (n - 1 - b)
    return out


def polar_transform(v) -> np.ndarray:
    """``v F^{(x)n}`` over GF(2) along the last axis."""
    x = np.array(v, dtype=np.uint8)
    N = x.shape[-1]
    n = check_length(N)
    lead = x.shape[:-1]
    for s in range(n):
        blk = x.reshape(lead + (1 << s, 2, N >> (s + 1)))
        blk[..., 0, :] ^= blk[..., 1, :]
    return x


def encode(u) -> np.ndarray:
    """Codeword ``u B_N F^{(x)n}``; the map is an involution."""
    u = np.asarray(u, dtype=np.uint8)
    if u.ndim == 0:
        raise ValueError("need a bit vector")
    N = u.shape[-1]
    check_length(N)
    return polar_transform(u[..., bitrev(N)])


# ---------------------------------------------------------------- CRC
def crc_generator(k: int, poly: int = CRC12_POLY, r: int = 12) -> np.ndarray:
    """``(k, r)`` GF(2) matrix mapping a ``k``-bit message to its CRC (zero initial state)."""
    G = np.zeros((k, r), dtype=np.uint8)
    for i in range(k):
        reg = 0
        # message e_i, most significant bit first, followed by r zeros
        for bit in [1 if j == i else 0 for j in range(k)] + [0] * r:
            top = (reg >> (r - 1)) & 1
            reg = ((reg << 1) & ((1 << r) - 1)) | bit
            if top:
                reg ^= poly & ((1 << r) - 1)
        G[i] = [(reg >> (r - 1 - j)) & 1 for j in range(r)]
    return G


def crc_remainder(bits, poly: int = CRC12_POLY, r: int = 12) -> np.ndarray:
    """CRC of each row of ``bits`` by plain polynomial long division (reference implementation)."""
    bits = np.atleast_2d(np.asarray(bits, dtype=np.uint8))
    out = np.zeros((bits.shape[0], r), dtype=np.uint8)
    full = ((1 << r) | poly)
    for row, msg in enumerate(bits):
        reg = 0
        for b in list(msg) + [0] * r:
            reg = (reg << 1) | int(b)
            if reg >> r:
                reg ^= full
        out[row] = [(reg >> (r - 1 - j)) & 1 for j in range(r)]
    return out


def crc_attach(msg, G: np.ndarray) -> np.ndarray:
    msg = np.asarray(msg, dtype=np.uint8)
    return np.concatenate([msg, (msg.astype(np.int64) @ G) & 1], axis=-1).astype(np.uint8)


def crc_check(word, G: np.ndarray) -> np.ndarray:
    word = np.asarray(word, dtype=np.uint8)
    k = G.shape[0]
    return np.all(((word[..., :k].astype(np.int64) @ G) & 1) == word[..., k:], axis=-1)


# ---------------------------------------------------------------- configuration
@dataclass
class CodeConfig:
    """A rate-matched polar code.

    ``K`` counts every non-frozen position, CRC bits included, so the payload
    is ``K - crc_length`` bits and the rate on the air is that over ``M``.
    """

    N: int
    K: int
    spec: RateMatchSpec
    info_set: list[int]
    crc_length: int = 12
    crc_polynomial: int = CRC12_POLY
    list_sizes: tuple[int, ...] = (1, 2, 4, 8)
    label: str = ""
    _G: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self.spec = as_spec(self.spec)
        check_length(self.N)
        self.info_set = sorted(int(p) for p in self.info_set)
        if len(self.info_set) != self.K or len(set(self.info_set)) != self.K:
            raise ValueError(f"info_set must hold K={self.K} distinct positions")
        if self.info_set and not (1 <= self.info_set[0] and self.info_set[-1] <= self.N):
            raise ValueError("info positions out of range")
        dead = degenerate_positions(self.spec, self.N)
        if dead & set(self.info_set):
            raise ValueError("info_set contains degenerate positions")
        if self.spec.kind == "shorten":
            # shortened code bits are the last ones; they stay 0 iff every later position is frozen
            last = self.N - self.spec.count(self.N)
            if any(p > last for p in self.info_set):
                raise ValueError("shortened code bits would not be forced to zero")
        if self.K and not 0 <= self.crc_length < self.K:
            raise ValueError("K must exceed the CRC length")
        if any(L < 1 or L & (L - 1) for L in self.list_sizes):
            raise ValueError("list sizes must be powers of two")
        r = self.crc_length if self.K else 0
        self._G = crc_generator(self.K - r, self.crc_polynomial, r) if r else np.zeros((self.K, 0), np.uint8)

    @property
    def payload(self) -> int:
        return self.K - (self.crc_length if self.K else 0)

    @property
    def crc_bits(self) -> int:
        return self.K - self.payload

    @property
    def M(self) -> int:
        """Transmitted length after rate matching."""
        return self.spec.transmitted_length(self.N)

    @property
    def rate(self) -> float:
        return self.payload / self.M

    @property
    def frozen(self) -> np.ndarray:
        f = np.ones(self.N, dtype=np.bool_)
        f[np.asarray(self.info_set, dtype=np.int64) - 1] = False
        return f

    @property
    def crc_matrix(self) -> np.ndarray:
        return self._G

    def to_dict(self) -> dict:
        return {"N": self.N, "K": self.K, "spec": str(self.spec), "info_set": self.info_set,
                "crc_length": self.crc_length, "crc_polynomial": hex(self.crc_polynomial),
                "list_sizes": list(self.list_sizes), "label": self.label}

    @classmethod
    def from_dict(cls, d: dict) -> "CodeConfig":
        poly = d.get("crc_polynomial", CRC12_POLY)
        return cls(int(d["N"]), int(d["K"]), RateMatchSpec.parse(d["spec"]), list(d["info_set"]),
                   int(d.get("crc_length", 12)), int(poly, 16) if isinstance(poly, str) else int(poly),
                   tuple(d.get("list_sizes", (1, 2, 4, 8))), d.get("label", ""))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "CodeConfig":
        return cls.from_dict(json.loads(text))


def place_bits(config: CodeConfig, payload) -> np.ndarray:
    """Position-order input ``v``: payload plus CRC on the info positions, zeros elsewhere."""
    payload = np.atleast_2d(np.asarray(payload, dtype=np.uint8))
    word = crc_attach(payload, config.crc_matrix) if config.crc_bits else payload
    v = np.zeros((payload.shape[0], config.N), dtype=np.uint8)
    v[:, np.asarray(config.info_set, dtype=np.int64) - 1] = word
    return v


def codeword(config: CodeConfig, payload) -> np.ndarray:
    return polar_transform(place_bits(config, payload))


# ---------------------------------------------------------------- channel
def ebn0_sigma(ebn0_db: float, rate: float) -> float:
    """Noise standard deviation for unit-energy BPSK at the given Eb/N0 and code rate."""
    if math.isinf(ebn0_db) and ebn0_db > 0:
        return 0.0
    return math.sqrt(1.0 / (2.0 * rate * 10 ** (ebn0_db / 10)))


def transmit(x, spec, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """LLRs seen by the decoder for codewords ``x`` (rows) over BPSK-AWGN.

    Transmitted bits get ``2 y / sigma^2``, punctured bits 0, shortened bits
    the certain value ``+inf``.  A shortened bit equal to 1 is a configuration
    error.  ``sigma = 0`` yields ``+-inf`` on every transmitted bit.
    """
    spec = as_spec(spec)
    x = np.atleast_2d(np.asarray(x, dtype=np.uint8))
    N = x.shape[1]
    mask = spec.mask(N)
    if spec.kind == "shorten" and np.any(x[:, mask]):
        raise ValueError("shortened code bits must be zero")
    s = 1.0 - 2.0 * x[:, ~mask]
    if sigma == 0:
        ch = s * np.inf
    else:
        y = s + sigma * rng.standard_normal(s.shape)
        ch = 2.0 * y / sigma**2
    llr = np.empty(x.shape, dtype=float)
    llr[:, ~mask] = ch
    llr[:, mask] = 0.0 if spec.kind == "puncture" else CERTAIN
    return llr


def transmit_bec(x, spec, eps: float, rng: np.random.Generator) -> np.ndarray:
    """Erasure-channel emulation: LLR 0 on erasures, ``+-inf`` elsewhere."""
    spec = as_spec(spec)
    x = np.atleast_2d(np.asarray(x, dtype=np.uint8))
    llr = (1.0 - 2.0 * x) * np.inf
    mask = spec.mask(x.shape[1])
    erased = rng.random(x.shape) < eps
    llr[erased & ~mask] = 0.0
    if spec.kind == "puncture":
        llr[:, mask] = 0.0
    elif spec.kind == "shorten":
        llr[:, mask] = CERTAIN
    return llr


# ---------------------------------------------------------------- LLR kernels
def boxplus(a, b):
    """Exact check-node rule ``2 atanh(tanh(a/2) tanh(b/2))``, safe for infinite inputs.

    When the smaller magnitude is below 1 the tanh form is used directly; it
    keeps relative accuracy for tiny outputs.  Otherwise the value is written
    as ``+-(min + correction)`` with two ``log1p`` terms, which avoids
    ``atanh`` near 1.
    """
    a, b = np.asarray(a, float), np.asarray(b, float)
    aa, bb = np.abs(a), np.abs(b)
    m = np.minimum(aa, bb)
    s = np.where((a > 0) == (b > 0), 1.0, -1.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        corr = np.log1p(np.exp(-(aa + bb))) - np.log1p(np.exp(-np.abs(aa - bb)))
        small = 2.0 * np.arctanh(np.tanh(aa / 2) * np.tanh(bb / 2))
    corr = np.where(np.isinf(aa) | np.isinf(bb), 0.0, corr)
    return np.where(m == 0, 0.0, s * np.where(m < 1.0, small, m + corr))


def g_combine(a, b, c):
    """Variable-node rule ``b + (1 - 2c) a``; contradictory certainties give 0."""
    with np.errstate(invalid="ignore"):
        out = b + (1.0 - 2.0 * c) * a
    return np.where(np.isnan(out), 0.0, out)


@njit(cache=True, nogil=True)
def _bp(a, b):
    aa, bb = abs(a), abs(b)
    m = min(aa, bb)
    if m == 0.0:
        return 0.0
    s = 1.0 if (a > 0) == (b > 0) else -1.0
    if m < 1.0:
        return s * 2.0 * math.atanh(math.tanh(aa / 2) * math.tanh(bb / 2))
    if math.isinf(aa) or math.isinf(bb):
        return s * m
    return s * (m + math.log1p(math.exp(-(aa + bb))) - math.log1p(math.exp(-abs(aa - bb))))


@njit(cache=True, nogil=True)
def _g(a, b, c):
    out = b - a if c else b + a
    return 0.0 if out != out else out


@njit(cache=True, nogil=True)
def _penalty(llr, bit):
    """``log(1 + exp(-(1 - 2 bit) llr))``, the path-metric increment."""
    x = -llr if bit else llr
    if x >= 0:
        return math.log1p(math.exp(-x))
    return -x + math.log1p(math.exp(x))


# ---------------------------------------------------------------- SC (numpy, batched)
def sc_decode(llr, config: CodeConfig) -> np.ndarray:
    """Successive-cancellation decoding of rows of ``llr``; returns position-order ``v``."""
    llr = np.atleast_2d(np.asarray(llr, dtype=float))
    frozen = config.frozen
    out = np.zeros(llr.shape, dtype=np.uint8)

    def node(L, lo):
        M = L.shape[1]
        if frozen[lo:lo + M].all():
            return np.zeros(L.shape, dtype=np.uint8)
        if M == 1:
            u = (L[:, 0] < 0).astype(np.uint8)
            out[:, lo] = u
            return u[:, None]
        h = M // 2
        a, b = L[:, :h], L[:, h:]
        cl = node(boxplus(a, b), lo)
        cr = node(g_combine(a, b, cl), lo + h)
        return np.concatenate([cl ^ cr, cr], axis=1)

    node(llr, 0)
    return out


def genie_llrs(llr) -> np.ndarray:
    """Leaf LLR of every position when all earlier bits are known to be 0."""
    llr = np.atleast_2d(np.asarray(llr, dtype=float))
    L = llr
    N = L.shape[1]
    n = check_length(N)
    for s in range(n):
        blk = L.reshape(L.shape[0], 1 << s, 2, N >> (s + 1))
        a, b = blk[:, :, 0], blk[:, :, 1]
        L = np.stack([boxplus(a, b), g_combine(a, b, 0.0)], axis=2).reshape(L.shape[0], N)
    return L


# ---------------------------------------------------------------- SCL (numba)
@njit(cache=True, nogil=True)
def _alloc(ref, lam, L):
    for k in range(L):
        if ref[lam, k] == 0:
            ref[lam, k] = 1
            return k
    return -1


@njit(cache=True, nogil=True)
def _writable(ptr, ref, l, lam, L):
    k = ptr[l, lam]
    if ref[lam, k] > 1:
        ref[lam, k] -= 1
        k = _alloc(ref, lam, L)
        ptr[l, lam] = k
    return k


@njit(cache=True, nogil=True)
def _scl_batch(llr, frozen, L, info_pos, G, r, out, metrics):
    B, N = llr.shape
    n = 0
    while (1 << n) < N:
        n += 1
    P = np.zeros((n + 1, L, N))
    C = np.zeros((n + 1, L, N), dtype=np.uint8)
    pptr = np.zeros((L, n + 1), dtype=np.int64)
    cptr = np.zeros((L, n + 1), dtype=np.int64)
    pref = np.zeros((n + 1, L), dtype=np.int64)
    cref = np.zeros((n + 1, L), dtype=np.int64)
    pm = np.zeros(L)
    active = np.zeros(L, dtype=np.bool_)
    bits = np.zeros((L, N), dtype=np.uint8)
    tmp = np.zeros(N, dtype=np.uint8)
    cand = np.zeros(2 * L)
    keep = np.zeros((L, 2), dtype=np.bool_)
    hard = np.zeros(L, dtype=np.int64)
    kp = info_pos.size - r

    for f in range(B):
        pref[:] = 0
        cref[:] = 0
        pptr[:] = 0
        cptr[:] = 0
        for lam in range(n + 1):
            pref[lam, 0] = 1
            cref[lam, 0] = 1
        active[:] = False
        active[0] = True
        pm[:] = 0.0
        ch = llr[f]

        for phi in range(N):
            # LLRs down to the leaf
            if phi == 0:
                d = 1
            else:
                t = 0
                while not (phi >> t) & 1:
                    t += 1
                d = n - t
            for l in range(L):
                if not active[l]:
                    continue
                for lam in range(d, n + 1):
                    M = N >> lam
                    k = _writable(pptr, pref, l, lam, L)
                    if lam == 1:
                        par = ch
                    else:
                        par = P[lam - 1, pptr[l, lam - 1]]
                    child = P[lam, k]
                    if lam == d and phi > 0:
                        cl = C[lam, cptr[l, lam]]
                        for i in range(M):
                            child[i] = _g(par[i], par[i + M], cl[i])
                    else:
                        for i in range(M):
                            child[i] = _bp(par[i], par[i + M])

            # decisions
            if frozen[phi]:
                for l in range(L):
                    if active[l]:
                        pm[l] += _penalty(P[n, pptr[l, n]][0], 0)
                        bits[l, phi] = 0
            else:
                nact = 0
                for l in range(L):
                    if active[l]:
                        nact += 1
                        lv = P[n, pptr[l, n]][0]
                        # hard decision first, so exact metric ties follow the LLR sign
                        hard[l] = 1 if lv < 0 else 0
                        cand[2 * l] = pm[l] + _penalty(lv, hard[l])
                        cand[2 * l + 1] = pm[l] + _penalty(lv, 1 - hard[l])
                    else:
                        cand[2 * l] = np.inf
                        cand[2 * l + 1] = np.inf
                order = np.argsort(cand, kind="mergesort")
                keep[:] = False
                nkeep = min(L, 2 * nact)
                for q in range(nkeep):
                    l = order[q] // 2
                    keep[l, hard[l] ^ (order[q] % 2)] = True
                # kill
                for l in range(L):
                    if active[l] and not keep[l, 0] and not keep[l, 1]:
                        active[l] = False
                        for lam in range(n + 1):
                            pref[lam, pptr[l, lam]] -= 1
                            cref[lam, cptr[l, lam]] -= 1
                # extend / clone
                for l in range(L):
                    if not active[l] or not (keep[l, 0] or keep[l, 1]):
                        continue
                    v0 = cand[2 * l + hard[l]]
                    v1 = cand[2 * l + 1 - hard[l]]
                    if keep[l, 0] and keep[l, 1]:
                        nl = -1
                        for j in range(L):
                            if not active[j] and not keep[j, 0] and not keep[j, 1]:
                                nl = j
                                break
                        active[nl] = True
                        for lam in range(n + 1):
                            pptr[nl, lam] = pptr[l, lam]
                            cptr[nl, lam] = cptr[l, lam]
                            pref[lam, pptr[l, lam]] += 1
                            cref[lam, cptr[l, lam]] += 1
                        bits[nl, :phi] = bits[l, :phi]
                        bits[nl, phi] = 1
                        pm[nl] = v1
                        bits[l, phi] = 0
                        pm[l] = v0
                    elif keep[l, 0]:
                        bits[l, phi] = 0
                        pm[l] = v0
                    else:
                        bits[l, phi] = 1
                        pm[l] = v1

            # partial sums back up the tree
            for l in range(L):
                if not active[l]:
                    continue
                tmp[0] = bits[l, phi]
                lam = n
                while lam >= 1:
                    M = N >> lam
                    if not (phi >> (n - lam)) & 1:
                        k = _writable(cptr, cref, l, lam, L)
                        dst = C[lam, k]
                        for i in range(M):
                            dst[i] = tmp[i]
                        break
                    cl = C[lam, cptr[l, lam]]
                    for i in range(M):
                        v = tmp[i]
                        tmp[M + i] = v
                        tmp[i] = cl[i] ^ v
                    lam -= 1

        # final choice: best metric passing the CRC, else best metric
        best = -1
        bestpm = np.inf
        for l in range(L):
            if active[l] and (best < 0 or pm[l] < bestpm):
                best = l
                bestpm = pm[l]
        if r > 0:
            idx = np.argsort(np.where(active, pm, np.inf), kind="mergesort")
            for q in range(L):
                l = idx[q]
                if not active[l]:
                    break
                ok = True
                for j in range(r):
                    acc = 0
                    for i in range(kp):
                        acc ^= bits[l, info_pos[i]] & G[i, j]
                    if acc != bits[l, info_pos[kp + j]]:
                        ok = False
                        break
                if ok:
                    best = l
                    break
        out[f] = bits[best]
        metrics[f] = pm[best]


def scl_decode(llr, config: CodeConfig, L: int, return_metric: bool = False):
    """Successive-cancellation list decoding with CRC selection; returns position-order ``v``.

    With ``L = 1`` the decisions coincide with :func:`sc_decode`.
    """
    if L < 1 or L & (L - 1):
        raise ValueError("list size must be a power of two")
    llr = np.ascontiguousarray(np.atleast_2d(np.asarray(llr, dtype=float)))
    out = np.zeros(llr.shape, dtype=np.uint8)
    metric = np.zeros(llr.shape[0])
    info = np.asarray(config.info_set, dtype=np.int64) - 1
    G = np.ascontiguousarray(config.crc_matrix.astype(np.uint8))
    _scl_batch(llr, config.frozen, L, info, G, config.crc_bits, out, metric)
    return (out, metric) if return_metric else out


# ---------------------------------------------------------------- experiments
@dataclass
class FerPoint:
    """Frame-error count at one SNR with a 95% Clopper-Pearson interval."""

    snr_db: float
    L: int
    trials: int
    frame_errors: int
    label: str = ""

    @property
    def fer(self) -> float:
        return self.frame_errors / self.trials if self.trials else float("nan")

    @property
    def confidence_interval(self) -> tuple[float, float]:
        if not self.trials:
            return (0.0, 1.0)
        ci = binomtest(self.frame_errors, self.trials).proportion_ci(0.95, method="exact")
        return (float(ci.low), float(ci.high))

    def to_row(self) -> dict:
        lo, hi = self.confidence_interval
        return {"snr_db": self.snr_db, "L": self.L, "trials": self.trials, "errors": self.frame_errors,
                "fer": self.fer, "ci_lo": lo, "ci_hi": hi}


def _block_rng(seed: int, snr_db: float, block: int) -> np.random.Generator:
    key = int(round(snr_db * 1000)) if math.isfinite(snr_db) else 10**9
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(key & 0xFFFFFFFF, block)))


def _simulate_block(configs, snr_db, L, seed, block, size):
    """Frame errors of every config on one block; all configs share payload and noise."""
    base = configs[0]
    rng = _block_rng(seed, snr_db, block)
    payload = rng.integers(0, 2, (size, base.payload), dtype=np.uint8)
    noise = rng.standard_normal((size, base.M))
    sigma = ebn0_sigma(snr_db, base.rate)
    errs = []
    for cfg in configs:
        x = codeword(cfg, payload)
        mask = cfg.spec.mask(cfg.N)
        s = 1.0 - 2.0 * x[:, ~mask]
        llr = np.empty(x.shape)
        llr[:, ~mask] = s * np.inf if sigma == 0 else 2.0 * (s + sigma * noise) / sigma**2
        llr[:, mask] = 0.0 if cfg.spec.kind == "puncture" else CERTAIN
        v = scl_decode(llr, cfg, L)
        info = np.asarray(cfg.info_set, dtype=np.int64) - 1
        got = v[:, info[: cfg.payload]]
        errs.append(np.any(got != payload, axis=1))
    return errs


def paired_run(configs, snr_db: float, L: int, max_trials: int = 100_000, target_errors: int = 100,
               seed: int = 0, block_size: int = 200, threads: int = 1) -> np.ndarray:
    """Per-frame error indicators ``(len(configs), trials)`` on common random numbers.

    Blocks are processed in order and the run stops after the first block
    at which every config has ``target_errors`` errors, or at ``max_trials``.
    The result does not depend on ``threads``.
    """
    configs = list(configs)
    keys = {(c.N, c.payload, str(c.spec)) for c in configs}
    if len(keys) != 1:
        raise ValueError("paired configs need equal N, payload and rate matching")
    nblocks = -(-max_trials // block_size)
    rows = [[] for _ in configs]
    counts = np.zeros(len(configs), dtype=int)
    b = 0
    pool = ThreadPoolExecutor(threads) if threads > 1 else None
    try:
        while b < nblocks:
            batch = list(range(b, min(nblocks, b + max(1, threads))))
            sizes = [min(block_size, max_trials - j * block_size) for j in batch]
            args = [(configs, snr_db, L, seed, j, s) for j, s in zip(batch, sizes)]
            res = list(pool.map(lambda a: _simulate_block(*a), args)) if pool else [_simulate_block(*a) for a in args]
            done = False
            for r in res:
                for k, e in enumerate(r):
                    rows[k].append(e)
                    counts[k] += int(e.sum())
                b += 1
                if np.all(counts >= target_errors):
                    done = True
                    break
            if done:
                break
    finally:
        if pool:
            pool.shutdown()
    return np.array([np.concatenate(r) if r else np.zeros(0, bool) for r in rows])


def fer_experiment(config: CodeConfig, snr_grid, max_trials: int = 100_000, target_errors: int = 100,
                   seed: int = 0, list_sizes=None, block_size: int = 200, threads: int = 1) -> list[FerPoint]:
    """FER per SNR and list size; deterministic in ``seed`` for any ``threads``."""
    out = []
    for snr in snr_grid:
        for L in (list_sizes or config.list_sizes):
            e = paired_run([config], float(snr), int(L), max_trials, target_errors, seed, block_size, threads)[0]
            out.append(FerPoint(float(snr), int(L), int(e.size), int(e.sum()), config.label))
    return out


@dataclass
class PairedComparison:
    """Frame-level comparison of two codes on identical noise."""

    snr_db: float
    L: int
    trials: int
    errors_a: int
    errors_b: int
    only_a: int
    only_b: int

    @property
    def p_value(self) -> float:
        """One-sided exact test of ``FER_a >= FER_b`` on the discordant frames.

        Small values support ``a`` having the lower error rate.
        """
        n = self.only_a + self.only_b
        if n == 0:
            return 1.0
        return float(binomtest(self.only_a, n, 0.5, alternative="less").pvalue)

    def to_dict(self) -> dict:
        return {**asdict(self), "p_value": self.p_value}


def compare_codes(a: CodeConfig, b: CodeConfig, snr_db: float, L: int, **kw) -> PairedComparison:
    ea, eb = paired_run([a, b], snr_db, L, **kw)
    return PairedComparison(snr_db, L, int(ea.size), int(ea.sum()), int(eb.sum()),
                            int((ea & ~eb).sum()), int((eb & ~ea).sum()))


def write_fer_csv(points, path) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, ["snr_db", "L", "trials", "errors", "fer", "ci_lo", "ci_hi"])
        w.writeheader()
        for p in points:
            w.writerow(p.to_row())
