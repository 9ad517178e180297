"""Sequential rate-matching patterns.

A pattern is written ``P/2^m``: for any mother length ``N = 2^n >= 2^m`` the
first (puncturing) or last (shortening) ``P * N / 2^m`` coded bits are
affected.  ``P`` must be odd, which makes the fraction irreducible.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

_SPEC_RE = re.compile(
    r"^(?P<kind>punc|puncture|short|shorten):(?P<num>\d+)/(?:(?P<den>\d+)|2\^(?P<exp>\d+))$"
)

_KIND_ALIASES = {"punc": "puncture", "puncture": "puncture", "short": "shorten", "shorten": "shorten"}


@dataclass(frozen=True)
class RateMatchSpec:
    """Rate-matching pattern ``numerator / 2**exponent``.

    ``kind`` is one of ``"none"``, ``"puncture"`` or ``"shorten"``.  For
    ``"none"`` the numerator and exponent are ignored and normalised to
    ``(0, 0)``.
    """

    kind: str = "none"
    numerator: int = 0
    exponent: int = 0

    def __post_init__(self):
        if self.kind not in ("none", "puncture", "shorten"):
            raise ValueError(f"unknown rate-matching kind {self.kind!r}")
        if self.kind == "none":
            object.__setattr__(self, "numerator", 0)
            object.__setattr__(self, "exponent", 0)
            return
        if self.exponent < 1:
            raise ValueError("exponent m must be a positive integer")
        if self.numerator < 1 or self.numerator % 2 == 0:
            raise ValueError("numerator must be a positive odd integer")
        if self.numerator >= 2**self.exponent:
            raise ValueError("numerator must be smaller than 2^m")

    @classmethod
    def parse(cls, text: str) -> "RateMatchSpec":
        """Parse ``"none"``, ``"punc:1/4"``, ``"short:3/2^3"`` and similar."""
        text = text.strip().lower()
        if text in ("none", ""):
            return cls()
        match = _SPEC_RE.match(text)
        if match is None:
            raise ValueError(f"malformed rate-matching spec {text!r}")
        num = int(match["num"])
        if match["exp"] is not None:
            exp = int(match["exp"])
        else:
            den = int(match["den"])
            if den < 2 or den & (den - 1):
                raise ValueError(f"denominator must be a power of two, got {den}")
            exp = den.bit_length() - 1
        return cls(_KIND_ALIASES[match["kind"]], num, exp)

    @property
    def m(self) -> int:
        """Number of leading polarization stages affected by the pattern."""
        return self.exponent

    @property
    def is_none(self) -> bool:
        return self.kind == "none"

    def count(self, N: int) -> int:
        """Number of punctured or shortened bits at mother length ``N``."""
        if self.is_none:
            return 0
        check_length(N)
        if N < 2**self.exponent:
            raise ValueError(f"N={N} is smaller than 2^m={2**self.exponent}")
        return self.numerator * N // 2**self.exponent

    def mask(self, N: int) -> np.ndarray:
        """Boolean mask of the affected coded-bit positions (0-based)."""
        out = np.zeros(N, dtype=bool)
        c = self.count(N)
        if self.kind == "puncture":
            out[:c] = True
        elif self.kind == "shorten":
            out[N - c :] = True
        return out

    def transmitted_length(self, N: int) -> int:
        return N - self.count(N)

    def __str__(self) -> str:
        if self.is_none:
            return "none"
        short = "punc" if self.kind == "puncture" else "short"
        return f"{short}:{self.numerator}/{2**self.exponent}"


NONE = RateMatchSpec()


def as_spec(spec) -> RateMatchSpec:
    if isinstance(spec, RateMatchSpec):
        return spec
    if spec is None:
        return NONE
    return RateMatchSpec.parse(str(spec))


def check_length(N: int) -> int:
    """Return ``log2(N)``, raising if ``N`` is not a positive power of two."""
    if not isinstance(N, (int, np.integer)) or N < 1 or N & (N - 1):
        raise ValueError(f"length must be a power of two, got {N!r}")
    return int(N).bit_length() - 1
