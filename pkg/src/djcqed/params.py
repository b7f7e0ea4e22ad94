"""Coupling and decoherence parameters.

Couplings and detunings are angular frequencies (rad/s); rates are 1/s.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace

TWO_PI = 2 * math.pi
MHZ = 1e6
US = 1e-6

DEFAULT_G_OVER_2PI_MHZ = 15.0
REFERENCE_B0 = 24.0
DEFAULT_B1 = 10.0
TRANSMON_INVERSE_RATES_US = {
    "kappa": 5.0,
    "gamma21": 15.0,
    "gamma20": 150.0,
    "gamma10": 20.0,
    "gamma_phi2": 10.0,
    "gamma_phi1": 10.0,
}


@dataclass(frozen=True)
class CouplingParams:
    """Resonant and spurious qutrit-cavity couplings.

    ``b0 = δ01 / g01_spurious`` and ``b1 = -δ12 / g12_spurious`` fix the
    detunings of the off-resonant transitions.
    """

    g01: float
    g01_spurious: float
    g12: float
    g12_spurious: float
    b0: float
    b1: float

    def __post_init__(self):
        if self.g01 <= 0 or self.g12 <= 0:
            raise ValueError("resonant couplings g01, g12 must be positive")
        if self.g01_spurious < 0 or self.g12_spurious < 0:
            raise ValueError("spurious couplings must be non-negative")
        if self.b0 <= 0 or self.b1 <= 0:
            raise ValueError("b0 and b1 must be positive")

    @classmethod
    def transmon(cls, g_over_2pi_mhz: float = DEFAULT_G_OVER_2PI_MHZ,
                 b0: float = REFERENCE_B0, b1: float = DEFAULT_B1) -> "CouplingParams":
        """``g01 = g01' = g`` and ``g12 = g12' = √2 g``."""
        g = TWO_PI * g_over_2pi_mhz * MHZ
        return cls(g, g, math.sqrt(2) * g, math.sqrt(2) * g, b0, b1)

    @property
    def delta01(self) -> float:
        return self.b0 * self.g01_spurious

    @property
    def delta12(self) -> float:
        return -self.b1 * self.g12_spurious

    @property
    def max_angular_frequency(self) -> float:
        return max(abs(self.delta01), abs(self.delta12), self.g01, self.g12)

    def without_spurious(self) -> "CouplingParams":
        return replace(self, g01_spurious=0.0, g12_spurious=0.0)

    def with_b0(self, b0: float) -> "CouplingParams":
        return replace(self, b0=b0)


@dataclass(frozen=True)
class NoiseParams:
    kappa: float = 0.0
    gamma21: float = 0.0
    gamma20: float = 0.0
    gamma10: float = 0.0
    gamma_phi2: float = 0.0
    gamma_phi1: float = 0.0

    def __post_init__(self):
        for name, rate in asdict(self).items():
            if not rate >= 0:
                raise ValueError(f"{name} must be a non-negative rate, got {rate}")

    @classmethod
    def from_inverse_us(cls, **inverse_us: float) -> "NoiseParams":
        """Rates from lifetimes in microseconds, e.g. ``kappa=5.0`` for κ⁻¹ = 5 μs."""
        rates = {}
        for name, t in inverse_us.items():
            if t is None or math.isinf(t):
                rates[name] = 0.0
            elif t <= 0:
                raise ValueError(f"{name} inverse time must be positive, got {t}")
            else:
                rates[name] = 1.0 / (t * US)
        return cls(**rates)

    @classmethod
    def transmon(cls) -> "NoiseParams":
        return cls.from_inverse_us(**TRANSMON_INVERSE_RATES_US)

    @property
    def is_zero(self) -> bool:
        return not any(asdict(self).values())


# Fidelities reported for the three joint operations at b0 = 24, b1 = 10.
REFERENCE_FIDELITIES = {"U1": 0.991, "U2": 0.980, "U3": 0.972}
