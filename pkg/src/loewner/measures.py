"""Atomic measures on the circle and the real line, time schedules, and
the integral transforms they induce (Herglotz kernels on the disk,
Nevanlinna kernels on a half-plane)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .disk import ANGLE_GAP, BoundaryPoint
from .errors import DomainError, PoleError, ValidationError

PROBABILITY_TOL = 1e-12


@dataclass(frozen=True)
class CircleAtom:
    position: BoundaryPoint
    weight: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.weight) and self.weight > 0.0):
            raise ValidationError(f"atom weight must be finite and > 0, got {self.weight}")


@dataclass(frozen=True)
class AtomicCircleMeasure:
    """Finite positive atomic measure on the unit circle.

    ``excluded`` optionally declares a circle point the measure must not
    charge (atoms within ANGLE_GAP of it are rejected).
    """

    atoms: tuple[CircleAtom, ...]
    excluded: BoundaryPoint | None = None

    def __post_init__(self) -> None:
        atoms = tuple(self.atoms)
        object.__setattr__(self, "atoms", atoms)
        for i, a in enumerate(atoms):
            for b in atoms[i + 1:]:
                if a.position.gap(b.position) <= ANGLE_GAP:
                    raise ValidationError(
                        f"atom positions coincide near angle {a.position.angle}"
                    )
            if self.excluded is not None and a.position.gap(self.excluded) <= ANGLE_GAP:
                raise ValidationError(
                    f"atom at angle {a.position.angle} sits at the excluded point"
                )

    @property
    def total_mass(self) -> float:
        return math.fsum(a.weight for a in self.atoms)

    def is_probability(self, tol: float = PROBABILITY_TOL) -> bool:
        return abs(self.total_mass - 1.0) <= tol

    def require_probability(self, tol: float = PROBABILITY_TOL) -> None:
        if not self.is_probability(tol):
            raise ValidationError(
                f"probability mass != 1: total mass is {self.total_mass!r}"
            )

    def mass_at(self, point: BoundaryPoint) -> float:
        return math.fsum(
            a.weight for a in self.atoms if a.position.gap(point) <= ANGLE_GAP
        )

    def to_dict(self) -> dict:
        return {
            "atoms": [
                {"angle": a.position.angle, "weight": a.weight} for a in self.atoms
            ],
            "excluded_angle": None if self.excluded is None else self.excluded.angle,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AtomicCircleMeasure":
        atoms = tuple(
            CircleAtom(BoundaryPoint(float(a["angle"])), float(a["weight"]))
            for a in d["atoms"]
        )
        exc = d.get("excluded_angle")
        return cls(atoms, None if exc is None else BoundaryPoint(float(exc)))


def circle_measure(pairs, excluded_angle: float | None = None) -> AtomicCircleMeasure:
    """Shorthand constructor from (angle, weight) pairs."""
    atoms = tuple(CircleAtom(BoundaryPoint(a), w) for a, w in pairs)
    exc = None if excluded_angle is None else BoundaryPoint(excluded_angle)
    return AtomicCircleMeasure(atoms, exc)


@dataclass(frozen=True)
class RealAtomicMeasure:
    """Finite positive atomic measure on the real line with a declared
    support window: atoms lie strictly inside (xi1, xi2) when ``inside``,
    and strictly outside [xi1, xi2] otherwise."""

    atoms: tuple[tuple[float, float], ...]
    support_window: tuple[float, float]
    inside: bool = True

    def __post_init__(self) -> None:
        xi1, xi2 = (float(v) for v in self.support_window)
        if not xi1 < xi2:
            raise ValidationError(f"support window requires xi1 < xi2, got {xi1}, {xi2}")
        object.__setattr__(self, "support_window", (xi1, xi2))
        atoms = tuple((float(t), float(w)) for t, w in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        for t, w in atoms:
            if not (math.isfinite(t) and math.isfinite(w) and w > 0.0):
                raise ValidationError(f"bad real atom ({t}, {w})")
            if self.inside and not (xi1 < t < xi2):
                raise ValidationError(f"atom location {t} not strictly inside ({xi1}, {xi2})")
            if not self.inside and xi1 <= t <= xi2:
                raise ValidationError(f"atom location {t} not outside [{xi1}, {xi2}]")

    @property
    def total_mass(self) -> float:
        return math.fsum(w for _, w in self.atoms)


@dataclass(frozen=True)
class ScheduleSegment:
    t_start: float
    t_end: float
    measure: AtomicCircleMeasure

    def __post_init__(self) -> None:
        if not self.t_end > self.t_start:
            raise ValidationError(
                f"segment needs t_start < t_end, got [{self.t_start}, {self.t_end})"
            )


@dataclass(frozen=True)
class MeasureSchedule:
    """Piecewise-constant-in-time circle measure on [0, end_time).

    Segments are right-open [t_start, t_end), contiguous, starting at 0.
    With ``hold_last`` the final measure extends to all later times.
    """

    segments: tuple[ScheduleSegment, ...]
    hold_last: bool = False

    def __post_init__(self) -> None:
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        if not segs:
            raise ValidationError("schedule needs at least one segment")
        if segs[0].t_start != 0.0:
            raise ValidationError("first segment must start at t = 0")
        for prev, nxt in zip(segs, segs[1:]):
            if abs(nxt.t_start - prev.t_end) > 1e-12:
                raise ValidationError(
                    f"segments not contiguous at t = {prev.t_end} vs {nxt.t_start}"
                )

    @property
    def end_time(self) -> float:
        return self.segments[-1].t_end

    def measure_at(self, t: float) -> AtomicCircleMeasure:
        t = float(t)
        if t < 0.0:
            raise DomainError(f"schedule time must be >= 0, got {t}")
        for seg in self.segments:
            if seg.t_start <= t < seg.t_end:
                return seg.measure
        if self.hold_last:
            return self.segments[-1].measure
        raise DomainError(
            f"t = {t} is past the schedule end {self.end_time} and hold_last is off"
        )

    def breakpoints(self, s: float, t: float) -> list[float]:
        """Segment boundaries strictly inside (s, t)."""
        cuts = [seg.t_end for seg in self.segments[:-1]]
        cuts.append(self.segments[-1].t_end)
        return [c for c in cuts if s < c < t]

    def integrate_mass_at(self, point: BoundaryPoint, s: float, t: float) -> float:
        """Integral over [s, t] of the mass the scheduled measure puts at a
        circle point; used to track boundary dilations."""
        if t < s or s < 0.0:
            raise DomainError(f"bad window [{s}, {t}]")
        total = 0.0
        for seg in self.segments:
            lo, hi = max(s, seg.t_start), min(t, seg.t_end)
            if hi > lo:
                total += (hi - lo) * seg.measure.mass_at(point)
        if t > self.end_time:
            if not self.hold_last:
                raise DomainError(f"window end {t} is past the schedule")
            total += (t - max(s, self.end_time)) * self.segments[-1].measure.mass_at(point)
        return total

    def to_dict(self) -> dict:
        d = {
            "segments": [
                {"t0": seg.t_start, "t1": seg.t_end, "measure": seg.measure.to_dict()}
                for seg in self.segments
            ]
        }
        if self.hold_last:
            d["hold_last"] = True
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "MeasureSchedule":
        segs = tuple(
            ScheduleSegment(
                float(s["t0"]), float(s["t1"]), AtomicCircleMeasure.from_dict(s["measure"])
            )
            for s in d["segments"]
        )
        return cls(segs, bool(d.get("hold_last", False)))


def measure_at(schedule: MeasureSchedule, t: float) -> AtomicCircleMeasure:
    """Functional form of MeasureSchedule.measure_at."""
    return schedule.measure_at(t)


def _guard_poles(den) -> None:
    if isinstance(den, np.ndarray):
        if np.min(np.abs(den)) < 1e-300:
            raise PoleError("evaluation point sits on a pole of the kernel")
    elif abs(den) < 1e-300:
        raise PoleError("evaluation point sits on a pole of the kernel")


def herglotz_eval(mu: AtomicCircleMeasure, imag_const: float, z):
    """sum_j w_j (sigma_j + z)/(sigma_j - z) + i*imag_const.

    Has nonnegative real part on the disk; the imaginary constant
    realizes the Im p(0) degree of freedom.
    """
    acc = 1j * float(imag_const)
    if isinstance(z, np.ndarray):
        acc = acc + np.zeros_like(z)
    for a in mu.atoms:
        s = a.position.value
        den = s - z
        _guard_poles(den)
        acc = acc + a.weight * (s + z) / den
    return acc


def corollary_q_eval(nu: AtomicCircleMeasure, z):
    """sum_j w_j (1 - kappa_j)/(1 + kappa_j z) for a probability measure
    charging nothing at angle 0."""
    nu.require_probability()
    origin = BoundaryPoint(0.0)
    for a in nu.atoms:
        if a.position.gap(origin) <= ANGLE_GAP:
            raise ValidationError("measure must exclude the point at angle 0")
    acc = 0j
    if isinstance(z, np.ndarray):
        acc = np.zeros_like(z)
    for a in nu.atoms:
        k = a.position.value
        den = 1.0 + k * z
        _guard_poles(den)
        acc = acc + a.weight * (1.0 - k) / den
    return acc


@dataclass(frozen=True)
class NevanlinnaRep:
    """Phi(z) = alpha + beta z + sum_k w_k (1 + t_k z)/(t_k - z), a
    self-map of the upper half-plane when beta >= 0."""

    alpha: float
    beta: float
    measure: RealAtomicMeasure = field(
        default_factory=lambda: RealAtomicMeasure((), (-1.0, 1.0))
    )

    def __post_init__(self) -> None:
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise ValidationError("alpha and beta must be finite")
        if self.beta < 0.0:
            raise ValidationError(f"beta must be >= 0, got {self.beta}")

    def derivative(self, x: float) -> float:
        """Phi'(x) = beta + sum w_k (1 + t_k^2)/(t_k - x)^2 at a real
        point off the support."""
        acc = self.beta
        for t, w in self.measure.atoms:
            acc += w * (1.0 + t * t) / (t - x) ** 2
        return acc


def nevanlinna_eval(rep: NevanlinnaRep, z):
    acc = rep.alpha + rep.beta * z
    for t, w in rep.measure.atoms:
        den = t - z
        _guard_poles(den)
        acc = acc + w * (1.0 + t * z) / den
    return acc
