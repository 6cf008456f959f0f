"""Named tolerance profiles shared by the CLI and the classification engine."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Tuple


@dataclass(frozen=True)
class Profile:
    name: str
    m_range: Tuple[int, int]     # sampling distances 10^-m around candidate points
    decades: int                 # consecutive growth steps required for unboundedness
    growth_factor: float
    boundary_tol: float          # relative distance that raises the BOUNDARY flag

    def classify_kwargs(self) -> dict:
        return {"m_range": self.m_range, "decades": self.decades, "boundary_tol": self.boundary_tol}

    def to_dict(self) -> dict:
        return asdict(self)


PROFILES = {
    "default": Profile("default", (2, 7), 3, 3.0, 1e-2),
    "strict": Profile("strict", (2, 8), 4, 3.0, 1e-3),
}


def get_profile(name: str) -> Profile:
    try:
        return PROFILES[name]
    except KeyError:
        raise ValueError(f"unknown tolerance profile {name!r}; choose from {sorted(PROFILES)}") from None
