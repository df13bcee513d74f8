"""Exact arithmetic in the Novikov ring/field over Z2 with rational exponents.

Elements are finite Z2-combinations of monomials T^q with q an exact rational,
optionally truncated at a rational precision bound P (exponents >= P are
unrepresented).  All arithmetic tracks the tightest sound precision of its
output, so truncation never silently corrupts low-order terms.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

INF = float("inf")

_MONOMIAL_RE = re.compile(
    r"""^\s*(?:
        (?P<one>1)
      | T\^\{(?P<braced>-?\d+(?:/\d+)?)\}
      | T\^(?P<plain>-?\d+(?:/\d+)?)
      | (?P<bare>T)
    )\s*$""",
    re.VERBOSE,
)


def _min_prec(p: Optional[Fraction], q: Optional[Fraction]) -> Optional[Fraction]:
    if p is None:
        return q
    if q is None:
        return p
    return min(p, q)


@dataclass(frozen=True)
class NovikovElement:
    """A finite Z2-series sum_i T^{q_i}, exponents strictly increasing.

    ``precision`` is the truncation bound: terms with exponent >= precision
    are unknown/unrepresented.  ``None`` means the element is exact.
    """

    exponents: tuple[Fraction, ...]
    precision: Optional[Fraction] = None

    def __post_init__(self):
        exps = tuple(Fraction(e) for e in self.exponents)
        if self.precision is not None:
            prec = Fraction(self.precision)
            exps = tuple(e for e in exps if e < prec)
            object.__setattr__(self, "precision", prec)
        if any(exps[i] >= exps[i + 1] for i in range(len(exps) - 1)):
            exps = tuple(sorted(exps))
            if any(exps[i] == exps[i + 1] for i in range(len(exps) - 1)):
                raise ValueError("duplicate exponents; Z2 cancellation not applied")
        object.__setattr__(self, "exponents", exps)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(precision: Optional[Fraction] = None) -> "NovikovElement":
        return NovikovElement((), precision)

    @staticmethod
    def one() -> "NovikovElement":
        return NovikovElement((Fraction(0),))

    @staticmethod
    def monomial(exponent) -> "NovikovElement":
        return NovikovElement((Fraction(exponent),))

    @staticmethod
    def from_exponents(exps: Iterable, precision=None) -> "NovikovElement":
        """Build from an iterable of exponents with Z2 cancellation."""
        seen: dict[Fraction, int] = {}
        for e in exps:
            q = Fraction(e)
            seen[q] = seen.get(q, 0) ^ 1
        prec = None if precision is None else Fraction(precision)
        return NovikovElement(tuple(sorted(q for q, c in seen.items() if c)), prec)

    # -- basic queries -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.exponents

    def __bool__(self) -> bool:
        return bool(self.exponents)

    @property
    def valuation(self):
        """Least exponent; +inf for the zero element."""
        return self.exponents[0] if self.exponents else INF

    def coefficient(self, exponent) -> int:
        q = Fraction(exponent)
        if self.precision is not None and q >= self.precision:
            raise ValueError(f"exponent {q} is beyond precision {self.precision}")
        return 1 if q in set(self.exponents) else 0

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "NovikovElement") -> "NovikovElement":
        prec = _min_prec(self.precision, other.precision)
        sym = set(self.exponents) ^ set(other.exponents)
        return NovikovElement(tuple(sorted(sym)), prec)

    def __mul__(self, other: "NovikovElement") -> "NovikovElement":
        # Tightest sound precision: a missing term T^{>=Pa} of self times the
        # lowest term of other first pollutes exponent Pa + val(other); if both
        # factors are truncated their missing tails pollute at Pa + Pb.
        prec = None
        if self.precision is not None and other.exponents:
            prec = _min_prec(prec, self.precision + other.valuation)
        if other.precision is not None and self.exponents:
            prec = _min_prec(prec, other.precision + self.valuation)
        if self.precision is not None and other.precision is not None:
            prec = _min_prec(prec, self.precision + other.precision)
        counts: dict[Fraction, int] = {}
        for a in self.exponents:
            for b in other.exponents:
                q = a + b
                counts[q] = counts.get(q, 0) ^ 1
        exps = [q for q, c in counts.items() if c]
        return NovikovElement(tuple(sorted(exps)), prec)

    def scale(self, exponent) -> "NovikovElement":
        """Multiply by the monomial T^exponent."""
        q = Fraction(exponent)
        prec = None if self.precision is None else self.precision + q
        return NovikovElement(tuple(e + q for e in self.exponents), prec)

    def truncate(self, precision) -> "NovikovElement":
        prec = _min_prec(self.precision, Fraction(precision))
        return NovikovElement(tuple(e for e in self.exponents if e < prec), prec)

    def invert(self, precision) -> "NovikovElement":
        """Inverse b with self*b = 1 up to terms of exponent >= precision.

        Writes self = T^v (1 + x) with val(x) > 0 and sums the geometric
        series for (1+x)^{-1} in characteristic 2.
        """
        if not self.exponents:
            raise ZeroDivisionError("cannot invert the zero Novikov element")
        prec = Fraction(precision)
        v = self.valuation
        if self.precision is None and len(self.exponents) == 1:
            return NovikovElement.monomial(-v)
        # self * b = (1+x) c exactly, so computing c = (1+x)^{-1} mod T^prec
        # makes the product correct below the requested precision; x inherits
        # the input's own truncation bound so the result never overclaims.
        unit = NovikovElement.one()
        x_prec = None if self.precision is None else self.precision - v
        x = NovikovElement(tuple(e - v for e in self.exponents[1:]), x_prec).truncate(prec)
        c = unit.truncate(prec if x_prec is None else min(prec, x_prec))
        while True:
            nxt = (unit + (x * c)).truncate(prec)
            if nxt == c:
                break
            c = nxt
        return c.scale(-v)

    # -- formatting --------------------------------------------------------

    def __str__(self) -> str:
        if not self.exponents:
            return "0"
        return " + ".join(format_exponent(e) for e in self.exponents)

    @staticmethod
    def parse(text: str) -> "NovikovElement":
        text = text.strip()
        if text == "0" or not text:
            return NovikovElement.zero()
        exps = []
        for part in text.split("+"):
            m = _MONOMIAL_RE.match(part)
            if m is None:
                raise ValueError(f"cannot parse Novikov monomial {part!r}")
            if m.group("one"):
                exps.append(Fraction(0))
            elif m.group("bare"):
                exps.append(Fraction(1))
            else:
                exps.append(Fraction(m.group("braced") or m.group("plain")))
        return NovikovElement.from_exponents(exps)

    def to_json(self) -> list[str]:
        return [str(e) for e in self.exponents]

    @staticmethod
    def from_json(data: Iterable[str]) -> "NovikovElement":
        return NovikovElement.from_exponents(Fraction(s) for s in data)


def format_exponent(e: Fraction) -> str:
    if e == 0:
        return "1"
    if e == 1:
        return "T"
    return "T^{%s}" % e


NOV_ZERO = NovikovElement.zero()
NOV_ONE = NovikovElement.one()


# -- series generators -------------------------------------------------------

def series_odd_squares(precision) -> NovikovElement:
    """sum_{n>=0} T^{(2n+1)^2}, truncated below ``precision``."""
    prec = Fraction(precision)
    exps = []
    n = 0
    while Fraction((2 * n + 1) ** 2) < prec:
        exps.append(Fraction((2 * n + 1) ** 2))
        n += 1
    return NovikovElement(tuple(exps), prec)


def series_theta(beta, scale, precision) -> NovikovElement:
    """sum_{n in Z} T^{scale*(n+beta)^2}, truncated below ``precision``."""
    prec = Fraction(precision)
    b = Fraction(beta)
    c = Fraction(scale)
    if c <= 0:
        raise ValueError("theta scale must be positive")
    exps = []
    n = 0
    while True:
        hit = False
        for m in ({n, -n} if n else {0}):
            e = c * (m + b) ** 2
            if e < prec:
                exps.append(e)
                hit = True
        if not hit and n > abs(b) + 1:
            break
        n += 1
    return NovikovElement.from_exponents(exps, prec)


def series_divisor_sum(n_param: int, precision) -> NovikovElement:
    """sum_{k>=0} #{d = +-1 mod 2N, d | 2k+1} T^{(2k+1)/N} over Z2."""
    N = int(n_param)
    if N < 1:
        raise ValueError("divisor_sum parameter must be >= 1")
    prec = Fraction(precision)
    exps = []
    k = 0
    while Fraction(2 * k + 1, N) < prec:
        v = 2 * k + 1
        count = 0
        for d in range(1, v + 1):
            if v % d == 0 and (d % (2 * N) == 1 or d % (2 * N) == 2 * N - 1):
                count ^= 1
        if count:
            exps.append(Fraction(v, N))
        k += 1
    return NovikovElement(tuple(exps), prec)


def series_generate(kind: str, precision, **params) -> NovikovElement:
    """Dispatcher used by the CLI; see the individual generators."""
    if kind == "odd_squares":
        return series_odd_squares(precision)
    if kind == "theta":
        return series_theta(params["beta"], params.get("scale", 1), precision)
    if kind == "divisor_sum":
        return series_divisor_sum(params["n"], precision)
    raise ValueError(f"unknown series kind {kind!r}")


def inversion_recursion(exponent_set: Iterable[int], n_max: int) -> list[int]:
    """The g_n recursion: g_0 = 1, g_n = sum_{e in E\\{0}, e<=n} g_{n-e} mod 2.

    ``exponent_set`` is E, the set of integer exponents of f/T^{val}.
    Returns [g_0, ..., g_{n_max}].
    """
    E = sorted(set(int(e) for e in exponent_set))
    if not E or E[0] != 0:
        raise ValueError("recursion requires 0 in the exponent set")
    g = [0] * (n_max + 1)
    g[0] = 1
    for n in range(1, n_max + 1):
        acc = 0
        for e in E[1:]:
            if e > n:
                break
            acc ^= g[n - e]
        g[n] = acc
    return g
