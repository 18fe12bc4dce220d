"""
Delay Measure
=============

Finite delay measure on [0, delta] built from atoms and a piecewise-constant
density, with the exact delay functional H and its grid rule H_n.

The grid rule pairs the value at lag (i-1)/n with the mass of the half-open
cell [(i-1)/n, i/n) for i = 1..floor(n*delta), and the value at lag delta_n
with the mass of the closed cell [delta_n, delta].
"""

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, Any, List, Sequence, Tuple

import numpy as np

from ..core.exceptions import DomainError

logger = logging.getLogger(__name__)

# Tolerance when deciding whether a real number sits on a grid point.
GRID_TOLERANCE = 1e-9


def grid_lag_count(n: int, delta: float) -> int:
    """Return floor(n * delta), robust to representation error."""
    return int(math.floor(n * delta + GRID_TOLERANCE))


@dataclass(frozen=True)
class DelayMeasure:
    """
    Finite measure mu on [0, delta].

    Attributes:
        delta: Right endpoint of the support
        atoms: Tuple of (location, mass) point masses
        density_pieces: Tuple of (a, b, height) for the density on [a, b)
    """

    delta: float
    atoms: Tuple[Tuple[float, float], ...] = ()
    density_pieces: Tuple[Tuple[float, float, float], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple((float(u), float(w)) for u, w in self.atoms))
        object.__setattr__(
            self,
            "density_pieces",
            tuple((float(a), float(b), float(h)) for a, b, h in self.density_pieces),
        )
        self.validate()

    def validate(self) -> None:
        """Check support, positivity and disjointness."""
        if not (math.isfinite(self.delta) and self.delta > 0):
            raise DomainError(f"delta must be positive, got {self.delta}", field="delta", value=self.delta)

        for u, w in self.atoms:
            if not 0.0 <= u <= self.delta:
                raise DomainError(
                    f"Atom location {u} outside [0, {self.delta}]",
                    field="atoms",
                    value=u,
                )
            if not (math.isfinite(w) and w > 0):
                raise DomainError(f"Atom mass must be positive, got {w}", field="atoms", value=w)

        pieces = sorted(self.density_pieces)
        for a, b, h in pieces:
            if not 0.0 <= a < b <= self.delta:
                raise DomainError(
                    f"Density interval [{a}, {b}) outside [0, {self.delta}]",
                    field="density",
                    value=(a, b),
                )
            if not (math.isfinite(h) and h >= 0):
                raise DomainError(f"Density height must be >= 0, got {h}", field="density", value=h)
        for (a1, b1, _), (a2, _, _) in zip(pieces, pieces[1:]):
            if a2 < b1:
                raise DomainError(
                    f"Density intervals overlap at [{a2}, {b1})",
                    field="density",
                    constraint="pairwise disjoint",
                )

        if not self.total_mass > 0:
            raise DomainError("Delay measure has zero total mass", field="delay", constraint="total_mass > 0")

    # -------------------------------------------------------------------------
    # Constructors
    # -------------------------------------------------------------------------

    @classmethod
    def dirac(cls, delta: float, location: float = None, mass: float = 1.0) -> "DelayMeasure":
        """Point mass, by default at the right endpoint delta."""
        return cls(delta=delta, atoms=((delta if location is None else location, mass),))

    @classmethod
    def uniform(cls, delta: float, height: float = 1.0) -> "DelayMeasure":
        """Constant density on [0, delta)."""
        return cls(delta=delta, density_pieces=((0.0, delta, height),))

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "DelayMeasure":
        """Build from the config representation {"delta", "atoms", "density"}."""
        return cls(
            delta=float(data["delta"]),
            atoms=tuple(tuple(a) for a in data.get("atoms", []) or []),
            density_pieces=tuple(tuple(p) for p in data.get("density", []) or []),
        )

    def to_dict(self) -> Dict[str, Any]:
        """Convert to the config representation."""
        return {
            "delta": self.delta,
            "atoms": [list(a) for a in self.atoms],
            "density": [list(p) for p in self.density_pieces],
        }

    # -------------------------------------------------------------------------
    # Masses
    # -------------------------------------------------------------------------

    @property
    def total_mass(self) -> float:
        return sum(w for _, w in self.atoms) + sum(h * (b - a) for a, b, h in self.density_pieces)

    @property
    def is_dirac(self) -> bool:
        return len(self.atoms) == 1 and not any(h > 0 for _, _, h in self.density_pieces)

    def mass_of_interval(
        self,
        a: float,
        b: float,
        include_left: bool = True,
        include_right: bool = False,
    ) -> float:
        """
        Measure of an interval inside [0, delta].

        Args:
            a: Left endpoint
            b: Right endpoint
            include_left: Whether a belongs to the interval
            include_right: Whether b belongs to the interval

        Returns:
            Atom masses inside the interval plus density overlap length times height

        Raises:
            DomainError: If not 0 <= a <= b <= delta
        """
        if not 0.0 <= a <= b <= self.delta:
            raise DomainError(
                f"Interval [{a}, {b}] not inside [0, {self.delta}]",
                field="interval",
                value=(a, b),
                constraint="0 <= a <= b <= delta",
            )

        mass = 0.0
        for u, w in self.atoms:
            above = u > a or (include_left and u == a)
            below = u < b or (include_right and u == b)
            if above and below:
                mass += w
        for lo, hi, h in self.density_pieces:
            overlap = min(hi, b) - max(lo, a)
            if overlap > 0:
                mass += h * overlap
        return mass

    def cell_weights(self, n: int) -> np.ndarray:
        """
        Masses of the H_n cells at resolution n.

        Entry j (j < floor(n*delta)) is mu([j/n, (j+1)/n)); the last entry is
        mu([delta_n, delta]). The returned array is read-only.
        """
        return _cell_weights(self, int(n))

    # -------------------------------------------------------------------------
    # Delay functionals
    # -------------------------------------------------------------------------

    def h_exact(self, path: Callable[[float], Sequence[float]], resolution: int = 10_000) -> np.ndarray:
        """
        Exact delay functional H(F_{t-.}) = int_0^delta F_{t-u} mu(du).

        Args:
            path: Accessor u -> F_{t-u} for u in [0, delta]
            resolution: Midpoint subintervals per unit length for the density part

        Returns:
            The functional value (scalar paths give a length-1 array)
        """
        total = None
        for u, w in self.atoms:
            term = w * np.atleast_1d(np.asarray(path(u), dtype=float))
            total = term if total is None else total + term

        for a, b, h in self.density_pieces:
            if h == 0:
                continue
            pieces = max(1, int(math.ceil((b - a) * resolution)))
            width = (b - a) / pieces
            midpoints = a + width * (np.arange(pieces) + 0.5)
            values = np.array([np.atleast_1d(np.asarray(path(u), dtype=float)) for u in midpoints])
            term = h * width * values.sum(axis=0)
            total = term if total is None else total + term

        return total

    def h_discrete(self, window: np.ndarray, n: int) -> np.ndarray:
        """
        Grid rule H_n from a window of lagged observations.

        Args:
            window: Values X_{t-j/n} for j = 0..floor(n*delta), row j is lag j/n
            n: Grid resolution

        Raises:
            DomainError: If the window holds fewer than floor(n*delta) + 1 rows
        """
        window = np.asarray(window, dtype=float)
        weights = self.cell_weights(n)
        if window.shape[0] < weights.size:
            raise DomainError(
                f"Window of length {window.shape[0]} too short, need {weights.size}",
                field="window",
                constraint="length >= floor(n*delta) + 1",
            )
        return np.tensordot(weights, window[: weights.size], axes=1)

    def h_discrete_path(self, values: np.ndarray, n: int) -> np.ndarray:
        """
        Grid rule H_n at every admissible position of a path.

        Args:
            values: Path values on a grid of step 1/n, oldest first, shape (L, d)
            n: Grid resolution

        Returns:
            Array of shape (L - floor(n*delta), d); row p is H_n at the time of
            ``values[p + floor(n*delta)]``
        """
        values = np.asarray(values, dtype=float)
        weights = self.cell_weights(n)
        m = weights.size - 1
        if values.shape[0] <= m:
            raise DomainError(
                f"Path of length {values.shape[0]} shorter than the delay window {m + 1}",
                field="values",
            )
        windows = np.lib.stride_tricks.sliding_window_view(values, m + 1, axis=0)
        # windows[p, :, i] = values[p + i] and lag j = m - i
        return windows @ weights[::-1]


@lru_cache(maxsize=256)
def _cell_weights(measure: DelayMeasure, n: int) -> np.ndarray:
    if n < 1:
        raise DomainError(f"Grid resolution must be >= 1, got {n}", field="n", value=n)
    m = grid_lag_count(n, measure.delta)
    weights = np.zeros(m + 1)

    for u, w in measure.atoms:
        cell = int(math.floor(u * n + GRID_TOLERANCE))
        weights[min(cell, m)] += w

    delta_n = m / n
    for a, b, h in measure.density_pieces:
        if h == 0:
            continue
        for j in range(m):
            overlap = min(b, (j + 1) / n) - max(a, j / n)
            if overlap > 0:
                weights[j] += h * overlap
        overlap = min(b, measure.delta) - max(a, delta_n)
        if overlap > 0:
            weights[m] += h * overlap

    weights.setflags(write=False)
    return weights


@dataclass
class HistorySegment:
    """Observations on [-delta_n, 0]; row 0 is t = -floor(n*delta)/n."""

    values: np.ndarray
    n: int
    d: int = field(init=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        self.values = values[:, None] if values.ndim == 1 else values
        self.d = self.values.shape[1]
        if not np.all(np.isfinite(self.values)):
            raise DomainError("History segment has non-finite entries", field="history")

    @property
    def times(self) -> np.ndarray:
        m = self.values.shape[0] - 1
        return np.arange(-m, 1) / self.n

    def check_length(self, delta: float) -> None:
        """Raise unless the segment holds floor(n*delta) + 1 rows."""
        expected = grid_lag_count(self.n, delta) + 1
        if self.values.shape[0] != expected:
            raise DomainError(
                f"History segment has {self.values.shape[0]} rows, expected {expected}",
                field="history",
            )
