"""The nine Neumann-Neumann variants and the three non-convergent formulations.

Every variant is written in terms of the primal state z and the primal
correction psi. A variant is a choice of

* Dirichlet step  - interface conditions for (z1, z2)
* Neumann step    - interface conditions for the corrections (psi1, psi2)
* update          - which traces of psi relax the interface data

Interface functionals at t = alpha used below::

    value   u(alpha)
    slope   u'(alpha)
    robin   u'(alpha) + d u(alpha)            (= dual / nu, via mu = nu (z' + d z))
    flux    sigma^2 u(alpha) + d u'(alpha)    (= dual slope / nu)
"""

from __future__ import annotations

import enum
from dataclasses import dataclass


class Dirichlet(enum.Enum):
    # category I: robin(z1) = f, z2 = g
    ROBIN_VALUE = "RD"
    # category II: z1 = f, z2 = g
    VALUE_VALUE = "DD"
    # category III: robin(z1) = f, robin(z2) = f
    ROBIN_ROBIN = "RR"


class Neumann(enum.Enum):
    # pair correction (psi, phi): flux jump on Omega1, slope jump on Omega2
    FLUX_SLOPE = "N1"
    # primal correction psi only: slope jumps on both sides
    SLOPE_SLOPE = "N2"
    # dual correction phi only: flux jumps on both sides
    FLUX_FLUX = "N3"


class Update(enum.Enum):
    # f <- f - theta (psi1 + psi2)(alpha)
    VALUE = "value"
    # f <- f - theta (robin psi1 + robin psi2)
    ROBIN = "robin"
    # f <- f - theta1 robin-sum, g <- g - theta2 value-sum
    ROBIN_VALUE_PAIR = "robin+value"
    # f <- f - theta1 value-sum, g <- g - theta2 value-sum
    VALUE_PAIR = "value+value"


@dataclass(frozen=True)
class _Recipe:
    dirichlet: Dirichlet
    neumann: Neumann
    update: Update
    two_unknowns: bool
    analysis_only: bool = False


class Variant(enum.Enum):
    NN1a = "NN1a"
    NN1b = "NN1b"
    NN1c = "NN1c"
    NN2a = "NN2a"
    NN2b = "NN2b"
    NN2c = "NN2c"
    NN3a = "NN3a"
    NN3b = "NN3b"
    NN3c = "NN3c"
    Raw1b = "Raw1b"
    Raw1c = "Raw1c"
    PairNN2a = "PairNN2a"

    @classmethod
    def parse(cls, tag: str) -> "Variant":
        key = tag.strip().lower().replace("_", "").replace("-", "")
        for member in cls:
            if member.value.lower() == key:
                return member
        raise ValueError(f"unknown variant {tag!r}; choose from {', '.join(v.value for v in cls)}")

    @property
    def recipe(self) -> _Recipe:
        return _RECIPES[self]

    @property
    def two_unknowns(self) -> bool:
        return self.recipe.two_unknowns

    @property
    def analysis_only(self) -> bool:
        return self.recipe.analysis_only

    @property
    def has_matrix(self) -> bool:
        return self.two_unknowns

    @property
    def category(self) -> int:
        return {Dirichlet.ROBIN_VALUE: 1, Dirichlet.VALUE_VALUE: 2, Dirichlet.ROBIN_ROBIN: 3}[
            self.recipe.dirichlet
        ]

    def __str__(self):
        return self.value


_D, _N, _U = Dirichlet, Neumann, Update
_RECIPES = {
    Variant.NN1a: _Recipe(_D.ROBIN_VALUE, _N.FLUX_SLOPE, _U.ROBIN_VALUE_PAIR, True),
    Variant.NN1b: _Recipe(_D.ROBIN_VALUE, _N.SLOPE_SLOPE, _U.VALUE, False),
    Variant.NN1c: _Recipe(_D.ROBIN_VALUE, _N.FLUX_FLUX, _U.ROBIN, False),
    Variant.NN2a: _Recipe(_D.VALUE_VALUE, _N.SLOPE_SLOPE, _U.VALUE, False),
    Variant.NN2b: _Recipe(_D.VALUE_VALUE, _N.FLUX_FLUX, _U.VALUE, False),
    Variant.NN2c: _Recipe(_D.VALUE_VALUE, _N.FLUX_SLOPE, _U.VALUE, False),
    Variant.NN3a: _Recipe(_D.ROBIN_ROBIN, _N.FLUX_FLUX, _U.ROBIN, False),
    Variant.NN3b: _Recipe(_D.ROBIN_ROBIN, _N.SLOPE_SLOPE, _U.ROBIN, False),
    Variant.NN3c: _Recipe(_D.ROBIN_ROBIN, _N.FLUX_SLOPE, _U.ROBIN, False),
    Variant.Raw1b: _Recipe(_D.ROBIN_VALUE, _N.SLOPE_SLOPE, _U.ROBIN_VALUE_PAIR, True, True),
    Variant.Raw1c: _Recipe(_D.ROBIN_VALUE, _N.FLUX_FLUX, _U.ROBIN_VALUE_PAIR, True, True),
    Variant.PairNN2a: _Recipe(_D.VALUE_VALUE, _N.SLOPE_SLOPE, _U.VALUE_PAIR, True, True),
}

NINE = tuple(v for v in Variant if not v.analysis_only)
SINGLE_THETA = tuple(v for v in NINE if not v.two_unknowns)
CONVERGENT = (Variant.NN1b, Variant.NN1c, Variant.NN2a, Variant.NN2c, Variant.NN3a, Variant.NN3c)
DIVERGENT = (Variant.NN2b, Variant.NN3b)
