"""Infinitesimal generators and Herglotz vector fields.

Three field variants are supported, all in Berkson-Porta form
G(z, t) = (tau - z)(1 - conj(tau) z) p(z, t) with Re p >= 0:

* ``BerksonPortaField``: p is a constant with positive real part, an
  atomic Herglotz transform, or a schedule of such transforms.
* ``ReciprocalField``: p is the reciprocal of an atomic Herglotz
  transform, which plants boundary null points at the atoms.
* ``CorollaryField``: the specific normalized field
  G(z, t) = (1/4) (1 - z)^2 (1 + z) q(z, t) driven by a schedule of
  probability measures excluding angle 0; it has Denjoy-Wolff point 1
  and a boundary regular null point at -1 with unit null quotient.

Fields are immutable; evaluation is pure.  Within one schedule segment
every variant is constant in time, which the integrator exploits via
``frozen_at``.
"""

from __future__ import annotations

import math
from dataclasses import InitVar, dataclass
from typing import Callable, Union

import numpy as np

from .disk import ANGLE_GAP, BoundaryPoint, CayleyMap, MobiusTransform
from .errors import DomainError, InfeasibleError, ValidationError
from .extrapolate import default_radii, richardson
from .measures import (
    AtomicCircleMeasure,
    MeasureSchedule,
    NevanlinnaRep,
    RealAtomicMeasure,
    nevanlinna_eval,
)


def _herglotz_raw(measure: AtomicCircleMeasure, imag_const: float, z):
    acc = 1j * imag_const
    if isinstance(z, np.ndarray):
        acc = acc + np.zeros_like(z)
    for a in measure.atoms:
        s = a.position.value
        acc = acc + a.weight * (s + z) / (s - z)
    return acc


def _q_raw(measure: AtomicCircleMeasure, z):
    # kernel sum without the probability validation; validated callers only
    acc = 0j
    if isinstance(z, np.ndarray):
        acc = np.zeros_like(z)
    for a in measure.atoms:
        k = a.position.value
        acc = acc + a.weight * (1.0 - k) / (1.0 + k * z)
    return acc


def _require_tau(tau: complex) -> complex:
    tau = complex(tau)
    if abs(tau) > 1.0 + 1e-12:
        raise ValidationError(f"tau must lie in the closed disk, got |tau| = {abs(tau)}")
    return tau


def _tau_clear_of_atoms(tau: complex, positions) -> None:
    if abs(abs(tau) - 1.0) > 1e-9:
        return
    t = BoundaryPoint.from_complex(tau)
    for p in positions:
        if t.gap(p) <= ANGLE_GAP:
            raise ValidationError("tau coincides with a prescribed boundary point")


@dataclass(frozen=True)
class BerksonPortaField:
    """G(z, t) = (tau - z)(1 - conj(tau) z) p(z, t)."""

    tau: complex
    p_const: complex | None = None
    p_measure: AtomicCircleMeasure | None = None
    p_schedule: MeasureSchedule | None = None
    imag_const: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "tau", _require_tau(self.tau))
        given = [v is not None for v in (self.p_const, self.p_measure, self.p_schedule)]
        if sum(given) != 1:
            raise ValidationError("give exactly one of p_const, p_measure, p_schedule")
        if self.p_const is not None:
            object.__setattr__(self, "p_const", complex(self.p_const))
            if not self.p_const.real > 0.0:
                raise ValidationError("constant p needs Re p > 0")
        if self.p_measure is not None:
            _tau_clear_of_atoms(self.tau, (a.position for a in self.p_measure.atoms))
        if self.p_schedule is not None:
            for seg in self.p_schedule.segments:
                _tau_clear_of_atoms(self.tau, (a.position for a in seg.measure.atoms))

    @property
    def is_autonomous(self) -> bool:
        if self.p_schedule is None:
            return True
        return len(self.p_schedule.segments) == 1 and self.p_schedule.hold_last

    def breakpoints(self, s: float, t: float) -> list[float]:
        return [] if self.p_schedule is None else self.p_schedule.breakpoints(s, t)

    def p_at(self, t: float):
        """The Herglotz factor as a callable of z for the segment holding t."""
        if self.p_const is not None:
            c = self.p_const
            return lambda z: c if not isinstance(z, np.ndarray) else np.full_like(z, c)
        if self.p_measure is not None:
            mu, c = self.p_measure, self.imag_const
        else:
            mu, c = self.p_schedule.measure_at(t), self.imag_const
        return lambda z: _herglotz_raw(mu, c, z)

    def frozen_at(self, t: float) -> Callable:
        tau, taub = self.tau, self.tau.conjugate()
        p = self.p_at(t)
        return lambda z: (tau - z) * (1.0 - taub * z) * p(z)

    def evaluate(self, z, t: float = 0.0):
        return self.frozen_at(t)(z)

    def to_dict(self) -> dict:
        if self.p_const is not None:
            p = {"const_re": self.p_const.real, "const_im": self.p_const.imag}
        elif self.p_measure is not None:
            p = {"measure": self.p_measure.to_dict(), "imag_const": self.imag_const}
        else:
            p = {"schedule": self.p_schedule.to_dict(), "imag_const": self.imag_const}
        return {"kind": "berkson_porta", "tau": _tau_to_dict(self.tau), "p": p}


@dataclass(frozen=True)
class ReciprocalField:
    """G(z) = (tau - z)(1 - conj(tau) z) / p(z) with
    p(z) = sum_j alpha_j (sigma_j + z)/(sigma_j - z).

    The prescribed points sigma_j are zeros of G, hence boundary regular
    null points of the generated semiflow; p is zero-free on the disk
    because Re p > 0 there.
    """

    tau: complex
    data: tuple[tuple[BoundaryPoint, float], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "tau", _require_tau(self.tau))
        data = tuple((p, float(a)) for p, a in self.data)
        object.__setattr__(self, "data", data)
        if not data:
            raise ValidationError("need at least one (sigma, alpha) pair")
        for _, alpha in data:
            if not alpha > 0.0:
                raise ValidationError("alpha coefficients must be positive")
        pts = [p for p, _ in data]
        for i, p in enumerate(pts):
            for q in pts[i + 1:]:
                if p.gap(q) <= ANGLE_GAP:
                    raise ValidationError("prescribed sigma points must be distinct")
        _tau_clear_of_atoms(self.tau, pts)

    is_autonomous = True

    def breakpoints(self, s: float, t: float) -> list[float]:
        return []

    def _p(self, z):
        acc = 0j
        if isinstance(z, np.ndarray):
            acc = np.zeros_like(z)
        for p, alpha in self.data:
            s = p.value
            acc = acc + alpha * (s + z) / (s - z)
        return acc

    def frozen_at(self, t: float) -> Callable:
        tau, taub = self.tau, self.tau.conjugate()
        return lambda z: (tau - z) * (1.0 - taub * z) / self._p(z)

    def evaluate(self, z, t: float = 0.0):
        return self.frozen_at(t)(z)

    def to_dict(self) -> dict:
        return {
            "kind": "reciprocal",
            "tau": _tau_to_dict(self.tau),
            "data": [{"angle": p.angle, "alpha": a} for p, a in self.data],
        }


@dataclass(frozen=True)
class CorollaryField:
    """G(z, t) = (1/4)(1 - z)^2 (1 + z) q(z, t) with
    q(z, t) = sum_j w_j (1 - kappa_j)/(1 + kappa_j z) over a scheduled
    probability measure on the circle minus the point 1."""

    schedule: MeasureSchedule
    check: InitVar[bool] = True

    def __post_init__(self, check: bool) -> None:
        if not check:
            return
        origin = BoundaryPoint(0.0)
        for seg in self.schedule.segments:
            seg.measure.require_probability()
            if seg.measure.excluded is None or seg.measure.excluded.gap(origin) > ANGLE_GAP:
                raise ValidationError(
                    "corollary segment measures must declare angle 0 as excluded"
                )

    @property
    def is_autonomous(self) -> bool:
        return len(self.schedule.segments) == 1 and self.schedule.hold_last

    def breakpoints(self, s: float, t: float) -> list[float]:
        return self.schedule.breakpoints(s, t)

    def frozen_at(self, t: float) -> Callable:
        nu = self.schedule.measure_at(t)
        return lambda z: 0.25 * (1.0 - z) ** 2 * (1.0 + z) * _q_raw(nu, z)

    def evaluate(self, z, t: float = 0.0):
        return self.frozen_at(t)(z)

    def to_dict(self) -> dict:
        return {"kind": "corollary", "schedule": self.schedule.to_dict()}


FieldSpec = Union[BerksonPortaField, ReciprocalField, CorollaryField]


def field_eval(spec: FieldSpec, z, t: float = 0.0):
    """G(z, t) for any field variant."""
    return spec.evaluate(z, t)


def berkson_porta_p(spec: FieldSpec, z, t: float = 0.0):
    """The Herglotz factor p with G(z,t) = (tau-z)(1-conj(tau) z) p(z,t).

    Every variant factors this way (for the corollary variant tau = 1 and
    p(z,t) = (1+z) q(z,t) / 4); the extracted p must have Re p >= 0 on the
    disk, which is the admissibility test for being a generator.
    """
    if isinstance(spec, BerksonPortaField):
        return spec.p_at(t)(z)
    if isinstance(spec, ReciprocalField):
        return 1.0 / spec._p(z)
    nu = spec.schedule.measure_at(t)
    return 0.25 * (1.0 + z) * _q_raw(nu, z)


def prescribed_null_points(spec: FieldSpec) -> tuple[BoundaryPoint, ...]:
    """Boundary points the field data forces to be null points of G."""
    if isinstance(spec, ReciprocalField):
        return tuple(p for p, _ in spec.data)
    if isinstance(spec, CorollaryField):
        return (BoundaryPoint(math.pi),)
    return ()


def dw_point(spec: FieldSpec) -> complex:
    """The Denjoy-Wolff point the field data prescribes."""
    if isinstance(spec, CorollaryField):
        return 1.0 + 0j
    return spec.tau


@dataclass(frozen=True)
class NullQuotient:
    """Radial limit of G(z, t)/(z - sigma); finite at boundary regular
    null points, with divergence flagged rather than raised."""

    sigma: BoundaryPoint
    value: complex
    t: float
    error: float
    diverged: bool


def null_quotient(
    spec: FieldSpec, sigma: BoundaryPoint, t: float = 0.0, radii=None
) -> NullQuotient:
    radii = list(default_radii() if radii is None else radii)
    if any(not (0.0 < r < 1.0) for r in radii) or any(
        b <= a for a, b in zip(radii, radii[1:])
    ):
        raise DomainError("radii must be strictly increasing inside (0, 1)")
    s = sigma.value
    zs = np.asarray([r * s for r in radii])
    quotients = spec.evaluate(zs, t) / (zs - s)
    ex = richardson(quotients)
    diverged = ex.grew_unboundedly or ex.error > 1e-6 * (1.0 + abs(ex.value))
    return NullQuotient(sigma, ex.value, t, ex.error, diverged)


def _tau_to_dict(tau: complex) -> dict:
    if abs(abs(tau) - 1.0) <= 1e-12:
        return {"angle": BoundaryPoint.from_complex(tau).angle}
    return {"re": tau.real, "im": tau.imag}


def _tau_from_dict(d: dict) -> complex:
    if "angle" in d:
        return BoundaryPoint(float(d["angle"])).value
    return complex(float(d["re"]), float(d["im"]))


def field_to_dict(spec: FieldSpec) -> dict:
    return spec.to_dict()


def field_from_dict(d: dict, validate: bool = True) -> FieldSpec:
    kind = d.get("kind")
    if kind == "berkson_porta":
        _forbid(d, ("data", "schedule"))
        p = d["p"]
        if "const_re" in p:
            return BerksonPortaField(
                _tau_from_dict(d["tau"]),
                p_const=complex(float(p["const_re"]), float(p.get("const_im", 0.0))),
            )
        if "measure" in p:
            return BerksonPortaField(
                _tau_from_dict(d["tau"]),
                p_measure=AtomicCircleMeasure.from_dict(p["measure"]),
                imag_const=float(p.get("imag_const", 0.0)),
            )
        if "schedule" in p:
            return BerksonPortaField(
                _tau_from_dict(d["tau"]),
                p_schedule=MeasureSchedule.from_dict(p["schedule"]),
                imag_const=float(p.get("imag_const", 0.0)),
            )
        raise ValidationError("berkson_porta payload p must give const, measure or schedule")
    if kind == "reciprocal":
        _forbid(d, ("p", "schedule"))
        data = tuple(
            (BoundaryPoint(float(e["angle"])), float(e["alpha"])) for e in d["data"]
        )
        return ReciprocalField(_tau_from_dict(d["tau"]), data)
    if kind == "corollary":
        _forbid(d, ("p", "data", "tau"))
        return CorollaryField(MeasureSchedule.from_dict(d["schedule"]), check=validate)
    raise ValidationError(f"unknown field kind {kind!r}")


def _forbid(d: dict, keys) -> None:
    for k in keys:
        if k in d:
            raise ValidationError(f"field payload {k!r} does not belong to kind {d['kind']!r}")


@dataclass(frozen=True)
class ThreeBrfpMap:
    """Self-map of the disk with boundary regular fixed points sigma1,
    sigma2, tau, assembled as f = A^{-1} o Phi o A where Phi is a
    Nevanlinna transform fixing xi1, xi2 and A maps the disk onto the
    upper half-plane sending tau to infinity and the sigmas onto the
    xis.  Because A matches fixed points, the conjugation cancels in
    the chain rule and f'(sigma_j) = Phi'(xi_j), f'(tau) = 1/beta.
    """

    rep: NevanlinnaRep
    xi1: float
    xi2: float
    tau: BoundaryPoint
    sigma1: BoundaryPoint
    sigma2: BoundaryPoint
    cayley_in: CayleyMap
    align: MobiusTransform
    xi_for_sigma1: float
    xi_for_sigma2: float

    def __call__(self, z):
        w = self.align.apply(self.cayley_in.forward(z))
        phi = nevanlinna_eval(self.rep, w)
        back = self.align.inverse().apply(phi)
        return self.cayley_in.inverse(back)

    @property
    def tau_dilation(self) -> float:
        return 1.0 / self.rep.beta

    @property
    def sigma1_dilation(self) -> float:
        return self.rep.derivative(self.xi_for_sigma1)

    @property
    def sigma2_dilation(self) -> float:
        return self.rep.derivative(self.xi_for_sigma2)


def build_three_brfp_map(
    xi1: float,
    xi2: float,
    measure: RealAtomicMeasure,
    targets: tuple[BoundaryPoint, BoundaryPoint, BoundaryPoint],
) -> ThreeBrfpMap:
    """Solve Phi(xi1) = xi1, Phi(xi2) = xi2 for (alpha, beta) and wire the
    half-plane transform back to the disk.

    For measures supported inside (xi1, xi2) the solved beta equals
    1 + sum w_k (1 + t_k^2)/((xi2 - t_k)(t_k - xi1)) >= 1, so the dilation
    at tau is 1/beta <= 1.  Outside-support measures can drive beta to 0
    or below, which is rejected as infeasible.
    """
    xi1, xi2 = float(xi1), float(xi2)
    if not xi1 < xi2:
        raise DomainError(f"need xi1 < xi2, got {xi1}, {xi2} (singular system)")
    wxi1, wxi2 = measure.support_window
    if abs(wxi1 - xi1) > 1e-12 or abs(wxi2 - xi2) > 1e-12:
        raise ValidationError("measure support window does not match (xi1, xi2)")
    sigma1, sigma2, tau = targets
    for a, b in ((sigma1, sigma2), (sigma1, tau), (sigma2, tau)):
        if a.gap(b) <= ANGLE_GAP:
            raise DomainError("target boundary points must be pairwise distinct")

    correction = math.fsum(
        w * (1.0 + t * t) / ((t - xi2) * (t - xi1)) for t, w in measure.atoms
    )
    beta = 1.0 - correction
    if beta <= 0.0:
        raise InfeasibleError(f"solved beta = {beta} is not positive")
    s1 = math.fsum(w * (1.0 + t * xi1) / (t - xi1) for t, w in measure.atoms)
    alpha = xi1 * (1.0 - beta) - s1
    rep = NevanlinnaRep(alpha, beta, measure)
    for xi in (xi1, xi2):
        if abs(nevanlinna_eval(rep, complex(xi)) - xi) > 1e-12 * max(1.0, abs(xi)):
            raise ValidationError("fixed-point system solve lost precision")

    cayley_in = CayleyMap(tau)
    h1 = cayley_in.boundary_image(sigma1)
    h2 = cayley_in.boundary_image(sigma2)
    if h1 < h2:
        m1, m2 = xi1, xi2
    else:
        m1, m2 = xi2, xi1
    u = (m2 - m1) / (h2 - h1)
    v = m1 - u * h1
    align = MobiusTransform(u, v, 0.0, 1.0)
    return ThreeBrfpMap(
        rep, xi1, xi2, tau, sigma1, sigma2, cayley_in, align, m1, m2
    )


def three_brfp_map_eval(m: ThreeBrfpMap, z):
    return m(z)
