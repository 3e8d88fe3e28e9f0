"""Truth-value arithmetic: De Morgan triples on [0,1] and their interval lifting.

A logic family bundles a T-norm (fuzzy AND), its De Morgan dual S-norm
(fuzzy OR) and the standard complement 1-x.  The Frank parametric family
interpolates between the three classical families: min-max (s -> 0),
product (s -> 1) and Lukasiewicz (s -> infinity).  The nilpotent family is
provided for completeness but its T-norm is discontinuous on x+y=1, so it
carries no Lipschitz guarantee.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "TruthValueError",
    "TruthInterval",
    "LogicFamily",
    "truth_value",
    "quantize",
]

# Construction tolerates this much rounding noise outside [0,1]; anything
# further out is a logic bug and is rejected.
_CLAMP_SLACK = 1e-12

# Frank parameters this close to 1 are evaluated as the product logic: the
# log formula has a removable singularity at s=1 and is unstable near it.
_FRANK_PRODUCT_BAND = 1e-6

_FAMILY_KINDS = ("minmax", "product", "lukasiewicz", "nilpotent", "frank")


class TruthValueError(ValueError):
    """Raised when a number cannot be interpreted as a degree in [0,1]."""


def truth_value(x: float) -> float:
    """Validate ``x`` as a degree in [0,1], clamping away <= 1e-12 of noise."""
    x = float(x)
    if not math.isfinite(x) or x < -_CLAMP_SLACK or x > 1.0 + _CLAMP_SLACK:
        raise TruthValueError(f"not a truth value in [0,1]: {x!r}")
    return min(1.0, max(0.0, x))


def quantize(x: float, q: int) -> float:
    """Snap ``x`` to the nearest element of {i/2^q}, ties to even ``i``."""
    if q < 1:
        raise ValueError(f"quantization level must be >= 1, got {q}")
    scale = float(2**q)
    # Python's round() rounds half to even, which is the tie rule we document.
    return min(1.0, round(truth_value(x) * scale) / scale)


@dataclass(frozen=True)
class TruthInterval:
    """A sub-interval [lo, hi] of the unit interval.

    Used as the value domain of interval (type-2) analyses: the width of
    the interval measures uncertainty about the degree itself.
    """

    lo: float
    hi: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "lo", truth_value(self.lo))
        object.__setattr__(self, "hi", truth_value(self.hi))
        if self.lo > self.hi:
            raise TruthValueError(f"interval endpoints out of order: [{self.lo}, {self.hi}]")

    @staticmethod
    def degenerate(x: float) -> "TruthInterval":
        x = truth_value(x)
        return TruthInterval(x, x)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, x: float, slack: float = 1e-12) -> bool:
        return self.lo - slack <= x <= self.hi + slack

    def encloses(self, other: "TruthInterval", slack: float = 1e-12) -> bool:
        return self.lo - slack <= other.lo and other.hi <= self.hi + slack


BOTTOM = TruthInterval(0.0, 0.0)
TOP = TruthInterval(1.0, 1.0)


@dataclass(frozen=True)
class LogicFamily:
    """A (T-norm, S-norm, C-norm) triple; the S-norm is always the De Morgan
    dual of the T-norm, so duality holds bit-exactly by construction."""

    kind: str
    s: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in _FAMILY_KINDS:
            raise ValueError(f"unknown logic family {self.kind!r}")
        if self.kind == "frank":
            s = self.s
            if s is None or not math.isfinite(s) or s <= 0.0 or s == 1.0:
                raise ValueError(
                    f"frank parameter must be finite, > 0 and != 1, got {s!r} "
                    "(the limits 0, 1, inf are minmax, product and lukasiewicz)"
                )
        elif self.s is not None:
            raise ValueError(f"{self.kind} takes no parameter")

    # -- construction ------------------------------------------------------

    @classmethod
    def minmax(cls) -> "LogicFamily":
        return cls("minmax")

    @classmethod
    def product(cls) -> "LogicFamily":
        return cls("product")

    @classmethod
    def lukasiewicz(cls) -> "LogicFamily":
        return cls("lukasiewicz")

    @classmethod
    def nilpotent(cls) -> "LogicFamily":
        return cls("nilpotent")

    @classmethod
    def frank(cls, s: float) -> "LogicFamily":
        return cls("frank", float(s))

    @classmethod
    def parse(cls, text: str) -> "LogicFamily":
        """Parse "minmax" | "product" | "lukasiewicz" | "nilpotent" | "frank:<s>"."""
        name = text.strip().lower()
        if name.startswith("frank:"):
            try:
                s = float(name[len("frank:"):])
            except ValueError:
                raise ValueError(f"bad frank parameter in {text!r}") from None
            return cls.frank(s)
        if name in ("minmax", "product", "lukasiewicz", "nilpotent"):
            return cls(name)
        raise ValueError(
            f"unknown logic family {text!r}; expected minmax, product, "
            "lukasiewicz, nilpotent or frank:<s>"
        )

    def __str__(self) -> str:
        if self.kind == "frank":
            return f"frank:{self.s!r}"
        return self.kind

    # -- scalar norms ------------------------------------------------------

    def tnorm(self, x: float, y: float) -> float:
        """Fuzzy conjunction; commutative, associative, monotone, identity 1."""
        x = truth_value(x)
        y = truth_value(y)
        kind = self.kind
        if kind == "minmax":
            return min(x, y)
        if kind == "product":
            return x * y
        if kind == "lukasiewicz":
            return max(x + y - 1.0, 0.0)
        if kind == "nilpotent":
            return min(x, y) if x + y > 1.0 else 0.0
        s = self.s
        if abs(s - 1.0) <= _FRANK_PRODUCT_BAND:
            return x * y
        ls = math.log(s)
        # log_s(1 + (s^x - 1)(s^y - 1)/(s - 1)); expm1/log1p keep the
        # evaluation stable for s close to 0 or very large.
        ratio = math.expm1(x * ls) * math.expm1(y * ls) / (s - 1.0)
        return min(1.0, max(0.0, math.log1p(ratio) / ls))

    def snorm(self, x: float, y: float) -> float:
        """Fuzzy disjunction, derived as cnorm(tnorm(cnorm(x), cnorm(y)))."""
        return self.cnorm(self.tnorm(self.cnorm(x), self.cnorm(y)))

    def cnorm(self, x: float) -> float:
        """Involutive complement 1-x."""
        return 1.0 - truth_value(x)

    # -- interval lifting ---------------------------------------------------

    def interval_tnorm(self, x: TruthInterval, y: TruthInterval) -> TruthInterval:
        lo = self.tnorm(x.lo, y.lo)
        hi = self.tnorm(x.hi, y.hi)
        # Monotonicity makes lo <= hi in exact arithmetic; guard the rounding.
        return TruthInterval(min(lo, hi), max(lo, hi))

    def interval_snorm(self, x: TruthInterval, y: TruthInterval) -> TruthInterval:
        lo = self.snorm(x.lo, y.lo)
        hi = self.snorm(x.hi, y.hi)
        return TruthInterval(min(lo, hi), max(lo, hi))

    def interval_cnorm(self, x: TruthInterval) -> TruthInterval:
        return TruthInterval(1.0 - x.hi, 1.0 - x.lo)
