"""Unit-disk geometry: boundary points, Mobius transforms, Cayley maps.

Interior points are plain ``complex`` values with |z| < 1 (see
``require_interior``).  Points of the unit circle get their own type,
``BoundaryPoint``, which stores the angle so that unit modulus is a
structural fact rather than a numerical one.  All types here are
immutable values and every operation is a pure function.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConstraintError, DomainError, PoleError, ValidationError

TWO_PI = 2.0 * math.pi

#: modulus below which a Mobius denominator counts as an exact pole
POLE_EPS = 1e-300

#: minimal angular separation for distinct boundary points
ANGLE_GAP = 1e-12


def require_interior(z: complex, name: str = "z") -> complex:
    """Validate |z| < 1 and return z as a complex number."""
    z = complex(z)
    if abs(z) >= 1.0:
        raise DomainError(f"{name} = {z} is not in the open unit disk")
    return z


@dataclass(frozen=True)
class BoundaryPoint:
    """The point exp(i*angle) of the unit circle.

    The angle is normalized into [0, 2*pi).  Storing the angle keeps the
    modulus exactly 1 by construction; boundary difference quotients are
    hypersensitive to off-circle drift, so this matters.
    """

    angle: float

    def __post_init__(self) -> None:
        a = float(self.angle) % TWO_PI
        if a == TWO_PI:  # guards against rounding of values just below 2*pi
            a = 0.0
        object.__setattr__(self, "angle", a)

    @classmethod
    def from_complex(cls, z: complex, tol: float = 1e-9) -> "BoundaryPoint":
        z = complex(z)
        if abs(abs(z) - 1.0) > tol:
            raise ValidationError(f"|{z}| = {abs(z)} is not on the unit circle")
        return cls(cmath.phase(z))

    @property
    def value(self) -> complex:
        return complex(math.cos(self.angle), math.sin(self.angle))

    def __complex__(self) -> complex:
        return self.value

    def gap(self, other: "BoundaryPoint") -> float:
        """Angular distance along the circle, in [0, pi]."""
        d = abs(self.angle - other.angle) % TWO_PI
        return min(d, TWO_PI - d)


def angle_gap(a: float, b: float) -> float:
    d = abs(a - b) % TWO_PI
    return min(d, TWO_PI - d)


@dataclass(frozen=True)
class MobiusTransform:
    """z -> (a z + b) / (c z + d) with ad - bc != 0.

    Coefficients are normalized so max(|a|,|b|,|c|,|d|) = 1, which keeps
    pole detection scale-free.
    """

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self) -> None:
        a, b, c, d = (complex(v) for v in (self.a, self.b, self.c, self.d))
        scale = max(abs(a), abs(b), abs(c), abs(d))
        if scale == 0.0:
            raise ValidationError("all Mobius coefficients are zero")
        a, b, c, d = a / scale, b / scale, c / scale, d / scale
        if a * d - b * c == 0:
            raise ValidationError("degenerate Mobius transform: ad - bc = 0")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)

    @classmethod
    def identity(cls) -> "MobiusTransform":
        return cls(1.0, 0.0, 0.0, 1.0)

    def apply(self, z):
        """Evaluate at a complex number or a numpy array of them."""
        if isinstance(z, np.ndarray):
            den = self.c * z + self.d
            if np.min(np.abs(den)) < POLE_EPS:
                raise PoleError("Mobius transform evaluated at its pole")
            return (self.a * z + self.b) / den
        z = complex(z)
        den = self.c * z + self.d
        if abs(den) < POLE_EPS:
            raise PoleError(f"Mobius transform has a pole at z = {z}")
        return (self.a * z + self.b) / den

    __call__ = apply

    def inverse(self) -> "MobiusTransform":
        return MobiusTransform(self.d, -self.b, -self.c, self.a)

    def compose(self, other: "MobiusTransform") -> "MobiusTransform":
        """Return self after other: z -> self(other(z))."""
        return MobiusTransform(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def derivative(self, z: complex) -> complex:
        det = self.a * self.d - self.b * self.c
        den = self.c * complex(z) + self.d
        if abs(den) < POLE_EPS:
            raise PoleError(f"Mobius derivative has a pole at z = {z}")
        return det / (den * den)

    def is_disk_automorphism(self, tol: float = 1e-12, samples: int = 16) -> bool:
        """Sampled check that the unit circle maps onto itself."""
        for k in range(samples):
            z = cmath.exp(1j * TWO_PI * k / samples)
            try:
                w = self.apply(z)
            except PoleError:
                return False
            if abs(abs(w) - 1.0) > tol:
                return False
        return True


def mobius_apply(m: MobiusTransform, z: complex):
    """Functional form of MobiusTransform.apply."""
    return m.apply(z)


@dataclass(frozen=True)
class CayleyMap:
    """z -> i (tau + z) / (tau - z), sending the disk onto the upper
    half-plane and tau to infinity."""

    tau: BoundaryPoint

    def forward(self, z):
        t = self.tau.value
        if isinstance(z, np.ndarray):
            den = t - z
            if np.min(np.abs(den)) < POLE_EPS:
                raise PoleError("Cayley map evaluated at tau")
            return 1j * (t + z) / den
        z = complex(z)
        den = t - z
        if abs(den) < POLE_EPS:
            raise PoleError(f"Cayley map has a pole at tau = {t}")
        return 1j * (t + z) / den

    __call__ = forward

    def inverse(self, w):
        t = self.tau.value
        if isinstance(w, np.ndarray):
            den = w + 1j
            if np.min(np.abs(den)) < POLE_EPS:
                raise PoleError("inverse Cayley map evaluated at its pole")
            return t * (w - 1j) / den
        w = complex(w)
        den = w + 1j
        if abs(den) < POLE_EPS:
            raise PoleError("inverse Cayley map has a pole at w = -i")
        return t * (w - 1j) / den

    def as_mobius(self) -> MobiusTransform:
        t = self.tau.value
        return MobiusTransform(1j, 1j * t, -1.0, t)

    def boundary_image(self, sigma: BoundaryPoint) -> float:
        """Image of a circle point other than tau; lands on the real axis."""
        if self.tau.gap(sigma) <= ANGLE_GAP:
            raise PoleError("boundary image of tau itself is infinite")
        return self.forward(sigma.value).real


def cayley(tau: BoundaryPoint, z: complex):
    return CayleyMap(tau).forward(z)


def cayley_inverse(tau: BoundaryPoint, w: complex):
    return CayleyMap(tau).inverse(w)


def pseudo_hyperbolic_distance(z1: complex, z2: complex) -> float:
    """|z1 - z2| / |1 - conj(z2) z1|, in [0, 1) for interior points."""
    z1 = require_interior(z1, "z1")
    z2 = require_interior(z2, "z2")
    return abs(z1 - z2) / abs(1.0 - z2.conjugate() * z1)


def build_automorphism(
    fix1: BoundaryPoint,
    fix2: BoundaryPoint,
    *,
    dilation_at_fix1: float | None = None,
    interior_pair: tuple[complex, complex] | None = None,
) -> MobiusTransform:
    """Disk automorphism with boundary fixed points fix1 and fix2.

    Exactly one extra constraint pins the map down: either the angular
    derivative at fix1 (``dilation_at_fix1``) or an interior point and
    its required image (``interior_pair``).  Construction conjugates to
    a half-plane where the fixed points sit at 0 and infinity and the
    map is w -> lam * w, so the result is exact and the derivative at
    fix2 is 1/lam.
    """
    if fix1.gap(fix2) <= ANGLE_GAP:
        raise DomainError("fixed points must be distinct")
    if (dilation_at_fix1 is None) == (interior_pair is None):
        raise DomainError("give exactly one of dilation_at_fix1, interior_pair")

    half = CayleyMap(fix2).as_mobius()  # fix2 -> infinity
    x1 = CayleyMap(fix2).boundary_image(fix1)
    shift = MobiusTransform(1.0, -x1, 0.0, 1.0)  # fix1 -> 0
    conj = shift.compose(half)

    if dilation_at_fix1 is not None:
        lam = float(dilation_at_fix1)
        if not lam > 0.0:
            raise DomainError("dilation must be positive")
    else:
        z0, w0 = interior_pair
        zeta = conj.apply(require_interior(z0, "interior_pair[0]"))
        omega = conj.apply(require_interior(w0, "interior_pair[1]"))
        lam = abs(omega) / abs(zeta)
        if abs(lam * zeta - omega) > 1e-9 * (1.0 + abs(omega)):
            raise ConstraintError(
                "interior pair is not reachable by an automorphism fixing the axis"
            )

    if lam == 1.0:
        return MobiusTransform.identity()
    scale = MobiusTransform(lam, 0.0, 0.0, 1.0)
    m = conj.inverse().compose(scale).compose(conj)
    if not m.is_disk_automorphism():
        raise ConstraintError("construction did not produce a disk automorphism")
    return m
