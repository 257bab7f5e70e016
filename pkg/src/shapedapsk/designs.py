"""Named system designs at R = 3 bits/symbol on 32-APSK.

The DVB-style profiles are the degree profiles of the DVB-S2 normal-frame rate-3/5 and
rate-2/3 codes (degree-12 / degree-13 columns, degree-3 columns, accumulator). Four-degree
designs fix the degree-3 node fraction, which the degree-table rows only pin to two or
three printed decimals.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .ldpc.degrees import DegreeDistribution, solve_degree_fractions
from .shaping import SHAPING_3_2, SHAPING_4_2, ShapingCode

GAMMAS = (2.64, 4.64)
RING_SIZES = (4, 12, 16)
BITS_PER_SYMBOL = 5


@dataclass(frozen=True)
class Design:
    name: str
    rate: Fraction
    check_degree: int
    degrees: tuple[int, ...]
    a2: float | None = None
    shaping: ShapingCode | None = None

    def distribution(self) -> DegreeDistribution:
        dist = solve_degree_fractions(self.rate, self.check_degree, self.degrees, a2=self.a2)
        if dist is None:
            raise ValueError(f"{self.name}: infeasible degree profile")
        return dist

    @property
    def system_rate(self) -> Fraction:
        return system_rate(self.rate, self.shaping)


def system_rate(code_rate, shaping: ShapingCode | None, m: int = BITS_PER_SYMBOL) -> Fraction:
    """Information bits per symbol, Rc * (m + Rs - 1)."""
    rs = shaping.rate if shaping is not None else Fraction(1)
    return Fraction(code_rate) * (m + rs - 1)


DESIGNS = {
    d.name: d
    for d in [
        Design("uniform-dvb", Fraction(3, 5), 11, (2, 3, 12)),
        Design("uniform-d3", Fraction(3, 5), 11, (2, 4, 19)),
        # 4000 degree-25 columns at n = 64 800 fixes 6239 degree-3 columns
        Design("uniform-d4", Fraction(3, 5), 11, (2, 3, 4, 25), a2=6239 / 64800),
        Design("shaped-dvb", Fraction(2, 3), 10, (2, 3, 13), shaping=SHAPING_4_2),
        Design("shaped-d3", Fraction(9, 14), 10, (2, 3, 14), shaping=SHAPING_3_2),
        Design("shaped-d4", Fraction(9, 14), 10, (2, 3, 5, 13), a2=0.5486, shaping=SHAPING_3_2),
    ]
}
