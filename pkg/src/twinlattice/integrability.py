"""Growth series of a Weyl group against q_min and the L^p bounding series.

S_N = sum_{n <= N} n^p c_n q_min^-n is kept as an exact rational.  Convergence
of the infinite series is judged by a windowed ratio test on the last
coefficients, which is only evidence, so the verdict may be "inconclusive".
"""

from __future__ import annotations

import decimal
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .coxeter import SPHERE_CAP, CoxeterSystem, growth_coefficients

CONVERGES, DIVERGES, INCONCLUSIVE = "converges", "diverges", "inconclusive"
WINDOW = 10
MARGIN = Fraction(5, 100)
DECIMAL_DIGITS = 30


def fraction_to_decimal(x: Fraction, digits: int = DECIMAL_DIGITS) -> str:
    ctx = decimal.Context(prec=digits, rounding=decimal.ROUND_HALF_EVEN)
    return str(ctx.divide(decimal.Decimal(x.numerator), decimal.Decimal(x.denominator)))


def ratio_verdict(coeffs: tuple, q_min: int, window: int = WINDOW, margin: Fraction = MARGIN) -> str:
    """Ratio test on c_(n+1) / (c_n q_min) over the last ``window`` steps."""
    if coeffs[-1] == 0:
        return CONVERGES  # finite group: the series is a finite sum
    n_last = len(coeffs) - 1
    if n_last < window:
        return INCONCLUSIVE
    ratios = [Fraction(coeffs[n + 1], coeffs[n] * q_min) for n in range(n_last - window, n_last)]
    if all(r < 1 - margin for r in ratios):
        return CONVERGES
    if all(r > 1 + margin for r in ratios):
        return DIVERGES
    return INCONCLUSIVE


def partial_sums(coeffs: tuple, q_min: int, p: int) -> list[Fraction]:
    out, total = [], Fraction(0)
    for n, c in enumerate(coeffs):
        total += Fraction(n**p * c, q_min**n)
        out.append(total)
    return out


@dataclass(frozen=True)
class IntegrabilityReport:
    diagram: str
    q_min: int
    p: int
    truncation: int
    coefficients: tuple
    partial_sums: tuple
    growth_rate_estimate: float
    verdict: str
    finite: bool

    @property
    def total(self) -> Fraction:
        return self.partial_sums[-1]

    def as_dict(self) -> dict:
        return {
            "diagram": self.diagram,
            "q_min": self.q_min,
            "p": self.p,
            "N": self.truncation,
            "coefficients": list(self.coefficients),
            "partial_sums": [str(s) for s in self.partial_sums],
            "partial_sums_decimal": [fraction_to_decimal(s) for s in self.partial_sums],
            "growth_rate_estimate": fraction_to_decimal(Fraction(self.growth_rate_estimate), 12),
            "finite_group": self.finite,
            "verdict": self.verdict,
        }


def integrability_check(sys: CoxeterSystem, q_min: int, p: int, n: int,
                        diagram: Optional[str] = None, cap: int = SPHERE_CAP) -> IntegrabilityReport:
    if q_min < 2:
        raise ValueError("q_min must be at least 2")
    if p < 1:
        raise ValueError("p must be at least 1")
    if n < 10:
        raise ValueError("N must be at least 10")
    coeffs = growth_coefficients(sys, n, cap).coefficients
    sums = partial_sums(coeffs, q_min, p)
    c_last = coeffs[-1]
    return IntegrabilityReport(
        diagram=diagram or ",".join(sys.generators),
        q_min=q_min,
        p=p,
        truncation=n,
        coefficients=coeffs,
        partial_sums=tuple(sums),
        growth_rate_estimate=c_last ** (1.0 / n) if c_last else 0.0,
        verdict=ratio_verdict(coeffs, q_min),
        finite=c_last == 0,
    )
