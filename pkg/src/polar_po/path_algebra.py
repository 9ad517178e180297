"""Polarization paths, position convolution and convolution mappings.

A path is a bit string such as ``"0110"``.  Bit ``k`` selects the branch at
polarization stage ``k``; the first bit acts at the outermost stage, whose
gates combine positions ``i`` and ``i + N/2``.  ``'0'`` is the up (check)
branch and ``'1'`` the down (variable) branch.

Positions are 1-based throughout this module.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

from .ratematch import check_length


def parse_path(bits) -> str:
    """Normalise a path given as a string or a sequence of 0/1 to a string."""
    if isinstance(bits, str):
        s = bits.strip()
    else:
        s = "".join(str(int(b)) for b in bits)
    if not s or set(s) - {"0", "1"}:
        raise ValueError(f"invalid polarization path {bits!r}")
    return s


def path_position(path: str) -> int:
    """1-based position of the synthetic channel selected by ``path``."""
    return int(parse_path(path), 2) + 1


def position_path(position: int, n: int) -> str:
    """Inverse of :func:`path_position` for paths of length ``n``."""
    if not 1 <= position <= 2**n:
        raise ValueError(f"position {position} out of range for n={n}")
    return format(position - 1, f"0{n}b")


def all_paths(n: int) -> list[str]:
    """All paths of length ``n`` in position order."""
    return ["".join(t) for t in itertools.product("01", repeat=n)]


def _check_pair(i: int, j: int, N: int) -> None:
    check_length(N)
    if not (1 <= i <= N and 1 <= j <= N):
        raise ValueError(f"positions ({i}, {j}) out of range 1..{N}")
    if i >= j:
        raise ValueError(f"expected i < j, got ({i}, {j})")


def _block(k: int) -> int:
    # s with 2^s < k <= 2^(s+1); k = 1 maps to s = -1
    return (k - 1).bit_length() - 1


def convolves(i: int, j: int, N: int) -> bool:
    """True if positions ``i < j`` meet as operands of one butterfly gate.

    Uses the block recursion: if ``j`` lies in a higher dyadic block than
    ``i`` the offset must be exactly that block's size, otherwise both are
    shifted down one block and the test repeats.
    """
    _check_pair(i, j, N)
    while True:
        s, q = _block(i), _block(j)
        if s < q:
            return j - i == 2**q
        i -= 2**q
        j -= 2**q


def convolves_xor(i: int, j: int) -> bool:
    """Closed form of :func:`convolves`: ``(i-1) ^ (j-1)`` is a power of two."""
    d = (i - 1) ^ (j - 1)
    return d > 0 and d & (d - 1) == 0


def conv_layer(i: int, j: int, N: int) -> int:
    """Stage (1 = outermost) at which positions ``i`` and ``j`` are gate operands."""
    if not convolves(i, j, N):
        raise ValueError(f"positions {i} and {j} do not convolve for N={N}")
    n = check_length(N)
    return n - ((i - 1) ^ (j - 1)).bit_length() + 1


def butterfly_pairs(N: int) -> dict[tuple[int, int], int]:
    """Trace the butterfly literally and record every gate's operand pair.

    Runs the same recursion that polarizes a vector (split into halves,
    combine element ``k`` of one half with element ``k`` of the other, recurse
    into the up and down outputs), carrying original position labels instead
    of values.  Returns ``{(i, j): layer}``.
    """
    n = check_length(N)
    found: dict[tuple[int, int], int] = {}

    def walk(labels: list[int], layer: int) -> None:
        if len(labels) == 1:
            return
        h = len(labels) // 2
        for a, b in zip(labels[:h], labels[h:]):
            found[(min(a, b), max(a, b))] = layer
        # Both gate outputs sit where the top operand was; the down half
        # keeps the bottom labels so later gates are still seen by position.
        walk(labels[:h], layer + 1)
        walk(labels[h:], layer + 1)

    walk(list(range(1, N + 1)), 1)
    assert all(1 <= v <= n for v in found.values())
    return found


@dataclass(frozen=True)
class ConvMapping:
    """Bijection from ``{1..K}`` onto ``{K+1..2K}`` whose pairs all convolve."""

    K: int
    pairs: tuple[tuple[int, int], ...]

    @property
    def N(self) -> int:
        """Ambient butterfly length ``2^ceil(log2(2K))``."""
        return 1 << (2 * self.K - 1).bit_length()

    def as_dict(self) -> dict[int, int]:
        return dict(self.pairs)

    def __call__(self, x: int) -> int:
        return self.as_dict()[x]

    def to_json(self) -> str:
        return json.dumps([list(p) for p in self.pairs])

    @classmethod
    def from_json(cls, text: str) -> "ConvMapping":
        pairs = tuple(tuple(p) for p in json.loads(text))
        return cls(len(pairs), pairs)

    def is_valid(self, oracle=None) -> bool:
        """Check the bijection property and that every pair convolves.

        ``oracle`` maps ``(i, j, N)`` to a bool; the default is a literal
        butterfly trace.
        """
        xs = sorted(x for x, _ in self.pairs)
        ys = sorted(y for _, y in self.pairs)
        if xs != list(range(1, self.K + 1)) or ys != list(range(self.K + 1, 2 * self.K + 1)):
            return False
        if oracle is None:
            traced = butterfly_pairs(self.N)
            return all((x, y) in traced for x, y in self.pairs)
        return all(oracle(x, y, self.N) for x, y in self.pairs)


def build_convolution_mapping(K: int) -> ConvMapping:
    """Construct a convolution mapping between ``{1..K}`` and ``{K+1..2K}``.

    The first block shifts ``1..2K-2^(q+1)`` by ``2^(q+1)`` (where
    ``2^q < K <= 2^(q+1)``).  The still unmatched middle ``lo..hi`` is then
    handled repeatedly: with ``2^t <= hi - lo < 2^(t+1)`` the left part
    ``lo..hi-2^t`` is shifted by ``2^t`` and the gap shrinks to the interval
    between the two new blocks, until it closes.
    """
    if K < 1:
        raise ValueError("K must be a positive integer")
    # K = 1 gives q = -1 and a single shift by 2^0.
    q = _block(K)
    offset = 2 ** (q + 1)
    pairs = [(x, x + offset) for x in range(1, 2 * K - offset + 1)]
    lo, hi = 2 * K - offset + 1, offset
    while lo < hi:
        t = (hi - lo).bit_length() - 1
        step = 2**t
        pairs.extend((x, x + step) for x in range(lo, hi - step + 1))
        lo, hi = hi - step + 1, lo + step - 1
    pairs.sort()
    return ConvMapping(K, tuple(pairs))
