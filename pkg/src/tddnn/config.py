"""Case presets and flat JSON case files."""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from types import MappingProxyType

from .spectral import ControlProblem, Spectrum, explicit_spectrum, log_grid_spectrum
from .variants import Variant

DEFAULT_GRID = (1e-2, 1e2, 200)


@dataclass(frozen=True)
class CaseConfig:
    """Problem scalars, eigenvalue grid and relaxation choices of one experiment.

    ``d_grid`` is (dmin, dmax, points) for a log grid or a tuple of explicit
    eigenvalues when ``explicit`` is set. ``thetas`` maps variant tags to a
    value; missing variants, or the string "auto", mean the numeric optimum.
    """

    name: str
    nu: float
    gamma: float
    T: float
    alpha: float
    d_grid: tuple = DEFAULT_GRID
    explicit: bool = False
    thetas: object = "auto"

    def __post_init__(self):
        self.problem  # validates the scalars
        if not self.explicit and len(self.d_grid) != 3:
            raise ValueError("d_grid must be (dmin, dmax, points)")
        if isinstance(self.thetas, dict):
            object.__setattr__(self, "thetas", MappingProxyType(dict(self.thetas)))

    @property
    def problem(self) -> ControlProblem:
        return ControlProblem(self.nu, self.gamma, self.T, self.alpha)

    def spectrum(self) -> Spectrum:
        if self.explicit:
            return explicit_spectrum(self.d_grid)
        dmin, dmax, points = self.d_grid
        return log_grid_spectrum(float(dmin), float(dmax), int(points))

    def theta_for(self, variant: Variant):
        """Configured theta (float or [theta1, theta2]) or None for auto."""
        if self.thetas == "auto" or not hasattr(self.thetas, "get"):
            return None
        value = self.thetas.get(variant.value, self.thetas.get(variant.value.lower()))
        return None if value in (None, "auto") else value

    def with_overrides(self, **kw) -> "CaseConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw) if kw else self


PRESETS = MappingProxyType(
    {
        "case-a": CaseConfig("case-a", nu=0.1, gamma=0.0, T=1.0, alpha=0.5),
        "case-b": CaseConfig("case-b", nu=10.0, gamma=10.0, T=5.0, alpha=1.0),
    }
)

_FIELDS = {"name", "nu", "gamma", "T", "alpha", "d_grid", "thetas"}


def load_case(source: str) -> CaseConfig:
    """A preset name or the path of a flat JSON case file."""
    if source in PRESETS:
        return PRESETS[source]
    path = Path(source)
    if not path.is_file():
        raise ValueError(f"unknown case {source!r}: not a preset ({', '.join(PRESETS)}) nor a file")
    doc = json.loads(path.read_text())
    if not isinstance(doc, dict):
        raise ValueError(f"{source}: case file must hold a JSON object")
    unknown = set(doc) - _FIELDS
    if unknown:
        raise ValueError(f"{source}: unknown keys {sorted(unknown)}")
    missing = {"nu", "gamma", "T", "alpha"} - set(doc)
    if missing:
        raise ValueError(f"{source}: missing keys {sorted(missing)}")
    # an object is a log grid, a list holds explicit eigenvalues
    grid = doc.get("d_grid", {"dmin": DEFAULT_GRID[0], "dmax": DEFAULT_GRID[1], "points": DEFAULT_GRID[2]})
    if isinstance(grid, dict):
        try:
            grid, explicit = (float(grid["dmin"]), float(grid["dmax"]), int(grid["points"])), False
        except KeyError as exc:
            raise ValueError(f"{source}: d_grid object needs dmin, dmax, points") from exc
    elif isinstance(grid, list) and grid:
        grid, explicit = tuple(float(v) for v in grid), True
    else:
        raise ValueError(f"{source}: d_grid must be an object or a non-empty list")
    return CaseConfig(
        name=str(doc.get("name", path.stem)),
        nu=float(doc["nu"]),
        gamma=float(doc["gamma"]),
        T=float(doc["T"]),
        alpha=float(doc["alpha"]),
        d_grid=tuple(grid),
        explicit=explicit,
        thetas=doc.get("thetas", "auto"),
    )
