"""Initial value problem d w / dt = G(w, t), w(s) = z, solved forward in
time to produce evolution-family evaluators.

The workhorse is an embedded Dormand-Prince 4(5) pair with PI step-size
control.  Steps never cross a schedule breakpoint (the field is
discontinuous in t there, and crossing would wreck the order), and any
step landing within ``boundary_guard`` of the unit circle is rejected
and halved rather than projected back, so disk invariance failures are
loud instead of silent.  A classical fixed-step RK4 provides the
independent cross-validation oracle.

State may be a single complex number or a numpy array of them; an array
is advanced as one system with a shared step sequence.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, IntegrationError, NotTangentError, ValidationError
from .generators import FieldSpec, field_to_dict

# Dormand-Prince 4(5) tableau; the fifth-order solution is propagated and
# the seventh stage is first-same-as-last.
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
# difference between the propagated and the embedded fourth-order weights
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0
_PI_ALPHA = 0.7 / 5.0
_PI_BETA = 0.4 / 5.0


@dataclass(frozen=True)
class ToleranceSettings:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = 0.1
    min_step: float = 1e-12
    boundary_guard: float = 1e-14

    def __post_init__(self) -> None:
        if not (0.0 < self.min_step < self.max_step):
            raise ValidationError("need 0 < min_step < max_step")
        if self.rel_tol <= 0.0 or self.abs_tol <= 0.0:
            raise ValidationError("tolerances must be positive")


DEFAULT_TOL = ToleranceSettings()


def _step_once(fun, t, y, h, k1):
    """One Dormand-Prince step; returns (y5, err_vector, k7)."""
    ks = [k1]
    for row in _A[1:-1]:
        acc = row[0] * ks[0]
        for a, k in zip(row[1:], ks[1:]):
            acc = acc + a * k
        ks.append(fun(y + h * acc))
    row = _A[-1]
    acc = row[0] * ks[0]
    for a, k in zip(row[1:], ks[1:]):
        acc = acc + a * k
    y5 = y + h * acc
    k7 = fun(y5)
    ks.append(k7)
    err = _E[0] * ks[0]
    for e, k in zip(_E[1:], ks[1:]):
        if e != 0.0:
            err = err + e * k
    return y5, h * err, k7


def _integrate_window(fun, t0, t1, y, tol, guard, record):
    """Adaptive integration over [t0, t1] with a time-constant fun."""
    span = t1 - t0
    t = t0
    h = min(tol.max_step, span)
    k1 = fun(y)
    err_prev = 1.0
    while t < t1:
        h = min(h, t1 - t)
        # underflow only counts when the controller forced it, not when the
        # window remainder itself is tiny
        if h < tol.min_step and t1 - t > tol.min_step:
            raise IntegrationError(
                f"step size underflow at t = {t}", t=t, w=_unwrap(y)
            )
        y5, err_vec, k7 = _step_once(fun, t, y, h, k1)
        if guard and float(np.max(np.abs(y5))) >= 1.0 - tol.boundary_guard:
            h *= 0.5
            continue
        scale = tol.abs_tol + tol.rel_tol * np.maximum(np.abs(y), np.abs(y5))
        err = float(np.max(np.abs(err_vec) / scale))
        if err <= 1.0:
            t_new = t + h
            if t1 - t_new <= 1e-14 * max(1.0, abs(t1)):
                t_new = t1
            t, y, k1 = t_new, y5, k7
            if record is not None:
                record.append((t, _unwrap(y)))
            e = max(err, 1e-10)
            fac = _SAFETY * e ** (-_PI_ALPHA) * err_prev ** (_PI_BETA)
            h = min(h * min(_MAX_FACTOR, max(_MIN_FACTOR, fac)), tol.max_step)
            err_prev = e
        else:
            h *= max(_MIN_FACTOR, _SAFETY * err ** (-0.2))
    return y


def _as_state(z):
    arr = np.atleast_1d(np.asarray(z, dtype=complex))
    return arr.copy()


def _unwrap(y):
    return complex(y[0]) if y.shape == (1,) else y.copy()


def _validate_window(s: float, t: float) -> None:
    if not (0.0 <= s <= t):
        raise DomainError(f"need 0 <= s <= t, got s = {s}, t = {t}")


def _windows(spec: FieldSpec, s: float, t: float):
    cuts = [s] + spec.breakpoints(s, t) + [t]
    return list(zip(cuts, cuts[1:]))


def evolve(spec: FieldSpec, s: float, t: float, z, tol: ToleranceSettings | None = None,
           record: list | None = None):
    """phi_{s,t}(z): the unique solution of the initial value problem.

    ``z`` may be complex or a complex ndarray; the return type matches.
    With ``record``, accepted steps (t, w) are appended (scalar z only).
    """
    tol = tol or DEFAULT_TOL
    _validate_window(s, t)
    scalar = not isinstance(z, np.ndarray)
    y = _as_state(z)
    if float(np.max(np.abs(y))) >= 1.0:
        raise DomainError("initial point must lie in the open unit disk")
    if record is not None:
        if not scalar:
            raise DomainError("trajectory recording needs a scalar initial point")
        record.append((s, _unwrap(y)))
    if t == s:
        return complex(z) if scalar else np.asarray(z, dtype=complex).copy()
    for a, b in _windows(spec, s, t):
        g = spec.frozen_at(0.5 * (a + b))
        y = _integrate_window(g, a, b, y, tol, guard=True, record=record)
    return _unwrap(y) if scalar else y


def rk4_oracle(spec: FieldSpec, s: float, t: float, z, n_steps: int):
    """Classical fixed-step fourth-order Runge-Kutta cross-check.

    Uses a uniform grid of ``n_steps`` intervals with schedule breakpoints
    inserted; fails hard if any step leaves the closed disk.
    """
    if n_steps < 1:
        raise DomainError("n_steps must be >= 1")
    _validate_window(s, t)
    scalar = not isinstance(z, np.ndarray)
    y = _as_state(z)
    if t == s:
        return complex(z) if scalar else np.asarray(z, dtype=complex).copy()
    base = np.linspace(s, t, n_steps + 1)
    cuts = spec.breakpoints(s, t)
    grid = np.union1d(base, np.asarray(cuts, dtype=float)) if cuts else base
    edges = [s] + cuts + [t]
    for a, b in zip(edges, edges[1:]):
        g = spec.frozen_at(0.5 * (a + b))
        inside = grid[(grid >= a) & (grid <= b)]
        for t0, t1 in zip(inside, inside[1:]):
            h = t1 - t0
            k1 = g(y)
            k2 = g(y + 0.5 * h * k1)
            k3 = g(y + 0.5 * h * k2)
            k4 = g(y + h * k3)
            y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if float(np.max(np.abs(y))) >= 1.0:
                raise IntegrationError(
                    f"oracle state left the disk at t = {t1}", t=t1, w=_unwrap(y)
                )
    return _unwrap(y) if scalar else y


@dataclass(frozen=True)
class EvolutionEvaluator:
    """phi_{s,t} as an evaluate-at-point service; the s = t evaluator is
    the identity exactly, with no integration performed."""

    spec: FieldSpec
    s: float
    t: float
    tol: ToleranceSettings = field(default_factory=ToleranceSettings)

    def __post_init__(self) -> None:
        _validate_window(self.s, self.t)

    def __call__(self, z):
        if self.t == self.s:
            return z if not isinstance(z, np.ndarray) else z.copy()
        return evolve(self.spec, self.s, self.t, z, self.tol)


def evolution_map(spec: FieldSpec, s: float, t: float,
                  tol: ToleranceSettings | None = None) -> EvolutionEvaluator:
    return EvolutionEvaluator(spec, s, t, tol or DEFAULT_TOL)


def autonomous_semiflow(spec: FieldSpec, t: float, z,
                        tol: ToleranceSettings | None = None):
    """phi_t(z) for a time-constant field; phi_{t+s} = phi_t o phi_s."""
    if not spec.is_autonomous:
        raise DomainError("field data is not constant in time")
    return evolve(spec, 0.0, t, z, tol)


def field_digest(spec: FieldSpec) -> str:
    payload = json.dumps(field_to_dict(spec), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


@dataclass
class Trajectory:
    """Accepted integration samples of one trajectory t -> phi_{s,t}(z)."""

    samples: list[tuple[float, complex]]
    field_digest: str

    def write_csv(self, fh) -> None:
        fh.write("t,w_re,w_im\n")
        for t, w in self.samples:
            fh.write(f"{t:.17g},{w.real:.17g},{w.imag:.17g}\n")


def evolve_trajectory(spec: FieldSpec, s: float, t: float, z: complex,
                      tol: ToleranceSettings | None = None) -> Trajectory:
    samples: list[tuple[float, complex]] = []
    evolve(spec, s, t, complex(z), tol, record=samples)
    return Trajectory(samples, field_digest(spec))


_TANGENCY_TOL = 1e-8


def evolve_on_circle(spec: FieldSpec, s: float, t: float, theta,
                     tol: ToleranceSettings | None = None):
    """Boundary flow: angle(s) theta advance along d theta / dt =
    Im(G(e^{i theta}, t) e^{-i theta}).

    Valid only where the field is tangent to the circle; a detectable
    radial component raises NotTangentError.  Angles are returned
    unwrapped (they may leave [0, 2 pi)).
    """
    tol = tol or DEFAULT_TOL
    _validate_window(s, t)
    scalar = not isinstance(theta, np.ndarray)
    y = np.atleast_1d(np.asarray(theta, dtype=complex))
    if t == s:
        return float(np.real(y[0])) if scalar else np.real(y).copy()

    def wrap(g):
        def fun(ang):
            z = np.exp(1j * np.real(ang))
            gz = g(z) * np.conj(z)
            radial = float(np.max(np.abs(np.real(gz))))
            size = float(np.max(np.abs(gz)))
            if radial > _TANGENCY_TOL * (1.0 + size):
                raise NotTangentError(
                    f"field has radial boundary component {radial:.3g}"
                )
            return np.imag(gz).astype(complex)
        return fun

    for a, b in _windows(spec, s, t):
        fun = wrap(spec.frozen_at(0.5 * (a + b)))
        y = _integrate_window(fun, a, b, y, tol, guard=False, record=None)
    out = np.real(y)
    return float(out[0]) if scalar else out


class FlowWithBoundary:
    """Evaluator for phi_{s,t} that accepts interior points and, where the
    field is circle-tangent, boundary points as well."""

    def __init__(self, spec: FieldSpec, s: float, t: float,
                 tol: ToleranceSettings | None = None):
        self.spec = spec
        self.s = s
        self.t = t
        self.tol = tol or DEFAULT_TOL

    def __call__(self, z):
        if isinstance(z, np.ndarray):
            mods = np.abs(z)
            if np.max(np.abs(mods - 1.0)) <= 1e-12:
                ang = evolve_on_circle(self.spec, self.s, self.t, np.angle(z), self.tol)
                return np.exp(1j * ang)
            if np.max(mods) < 1.0:
                return evolve(self.spec, self.s, self.t, z, self.tol)
            raise DomainError("mixed interior/boundary evaluation batch")
        m = abs(z)
        if abs(m - 1.0) <= 1e-12:
            ang = evolve_on_circle(self.spec, self.s, self.t, float(np.angle(z)), self.tol)
            return complex(np.exp(1j * ang))
        return evolve(self.spec, self.s, self.t, complex(z), self.tol)
