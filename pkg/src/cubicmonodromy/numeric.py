"""Shared numerical machinery: homogeneous form spaces and path tracking.

All homotopies used in this package are straight segments in a coefficient
space (the 20 cubic-surface coefficients, the 10 plane-cubic coefficients,
or an affine image of family parameters), so the tracker below handles one
batched predictor/corrector loop for a system whose residual and Jacobian
are supplied by a callback.  The predictor is classical 4th-order
Runge-Kutta on the Davidenko equation; the corrector is Newton to a
relative tolerance of 1e-12, with step halving on divergence and failure
below step 1e-14.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


class PathTrackingError(RuntimeError):
    """Adaptive stepping underflowed or the corrector stopped converging."""


class SheetCollisionError(RuntimeError):
    """Two tracked sheets came within the collision tolerance."""


# ---------------------------------------------------------------------------
# Homogeneous form spaces
# ---------------------------------------------------------------------------


class FormSpace:
    """Dense homogeneous forms of fixed degree, graded-lex monomial order."""

    def __init__(self, nvars: int, degree: int):
        self.nvars = nvars
        self.degree = degree
        self.monomials = _monomials(nvars, degree)
        self.index = {e: i for i, e in enumerate(self.monomials)}
        self.dim = len(self.monomials)
        self.exponents = np.array(self.monomials, dtype=np.int64)
        self._grad_ops = None

    def monomial_values(self, points: np.ndarray) -> np.ndarray:
        """Values of every monomial at points of shape (..., nvars)."""
        pts = np.asarray(points, dtype=complex)
        pw = np.ones(pts.shape[:-1] + (self.nvars, self.degree + 1), dtype=complex)
        for k in range(1, self.degree + 1):
            pw[..., k] = pw[..., k - 1] * pts
        vals = np.ones(pts.shape[:-1] + (self.dim,), dtype=complex)
        for v in range(self.nvars):
            vals = vals * pw[..., v, self.exponents[:, v]]
        return vals

    def evaluate(self, coeffs: np.ndarray, points: np.ndarray) -> np.ndarray:
        return self.monomial_values(points) @ np.asarray(coeffs, dtype=complex)

    def gradient_ops(self) -> tuple["FormSpace", list[np.ndarray]]:
        """Lower-degree space plus matrices sending coeffs to d/dx_v coeffs."""
        if self._grad_ops is None:
            lower = form_space(self.nvars, self.degree - 1)
            ops = []
            for v in range(self.nvars):
                op = np.zeros((lower.dim, self.dim))
                for m, e in enumerate(self.monomials):
                    if e[v] == 0:
                        continue
                    e2 = list(e)
                    e2[v] -= 1
                    op[lower.index[tuple(e2)], m] = e[v]
                ops.append(op)
            self._grad_ops = (lower, ops)
        return self._grad_ops

    def gradient(self, coeffs: np.ndarray, points: np.ndarray) -> np.ndarray:
        """Gradient at points; shape (..., nvars)."""
        lower, ops = self.gradient_ops()
        mono = lower.monomial_values(points)
        cols = [mono @ (op @ np.asarray(coeffs, dtype=complex)) for op in ops]
        return np.stack(cols, axis=-1)

    def compose_matrix(self, coeffs: np.ndarray, m: np.ndarray) -> np.ndarray:
        """Coefficients of F(M x)."""
        m = np.asarray(m, dtype=complex)
        acc: dict[tuple[int, ...], complex] = {}
        for c, expo in zip(np.asarray(coeffs, dtype=complex), self.monomials):
            if c == 0:
                continue
            terms = {(0,) * self.nvars: complex(c)}
            for v in range(self.nvars):
                for _ in range(expo[v]):
                    new: dict[tuple[int, ...], complex] = {}
                    for e, cv in terms.items():
                        for j in range(self.nvars):
                            if m[v, j] == 0:
                                continue
                            e2 = list(e)
                            e2[j] += 1
                            key = tuple(e2)
                            new[key] = new.get(key, 0.0) + cv * m[v, j]
                    terms = new
            for e, cv in terms.items():
                acc[e] = acc.get(e, 0.0) + cv
        out = np.zeros(self.dim, dtype=complex)
        for e, cv in acc.items():
            out[self.index[e]] = cv
        return out

    def third_derivative_tensor(self, coeffs: np.ndarray) -> np.ndarray:
        """For degree-3 spaces: the symmetric tensor of third partials."""
        if self.degree != 3:
            raise ValueError("third derivatives only for cubic spaces")
        return np.einsum("m,mijk->ijk", np.asarray(coeffs, dtype=complex),
                         _third_derivative_constants(self.nvars))


def _monomials(nvars: int, degree: int) -> list[tuple[int, ...]]:
    out = [e for e in itertools.product(range(degree + 1), repeat=nvars)
           if sum(e) == degree]
    out.sort(reverse=True)
    return out


@lru_cache(maxsize=None)
def form_space(nvars: int, degree: int) -> FormSpace:
    return FormSpace(nvars, degree)


@lru_cache(maxsize=None)
def _third_derivative_constants(nvars: int) -> np.ndarray:
    space = form_space(nvars, 3)
    out = np.zeros((space.dim, nvars, nvars, nvars))
    for m, e in enumerate(space.monomials):
        for i in range(nvars):
            for j in range(nvars):
                for k in range(nvars):
                    e2 = list(e)
                    coef = 1
                    for v in (i, j, k):
                        coef *= e2[v]
                        e2[v] -= 1
                    if coef and all(x == 0 for x in e2):
                        out[m, i, j, k] = coef
    return out


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR with positive diagonal phases."""
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


# ---------------------------------------------------------------------------
# Adaptive path tracking
# ---------------------------------------------------------------------------


@dataclass
class TrackOptions:
    corrector_tol: float = 1e-12
    max_newton: int = 4
    h_init: float = 0.05
    h_min: float = 1e-14
    h_max: float = 0.2
    grow: float = 1.7
    shrink: float = 0.4
    collision_tol: float | None = None


@dataclass
class TrackTelemetry:
    steps: int = 0
    rejected: int = 0
    max_condition: float = 0.0
    max_corrector_residual: float = 0.0
    escalations: int = 0


class SegmentSystem:
    """Interface consumed by :func:`track_segment`.

    Subclasses supply residual R(z,t), Jacobian dR/dz and t-derivative
    dR/dt for a batch of sheets, plus optional housekeeping hooks.
    """

    def residual(self, state, t: float) -> np.ndarray:
        raise NotImplementedError

    def res_jac_dt(self, state, t: float):
        """Return (R, J, Rt) with shapes (n,k), (n,k,k), (n,k)."""
        raise NotImplementedError

    def update(self, state, delta) -> object:
        """Apply a Newton/predictor increment to the state."""
        raise NotImplementedError

    def normalize(self, state) -> object:
        """Housekeeping after an accepted step (e.g. chart switching)."""
        return state

    def scale(self, state, t: float) -> np.ndarray:
        """Per-sheet residual scale for convergence tests."""
        raise NotImplementedError

    def param_scale(self, state) -> np.ndarray:
        """Per-sheet magnitude of the unknowns, for relative step tests."""
        raise NotImplementedError

    def collision_gap(self, state) -> float:
        """Minimal pairwise separation of sheets (inf when not applicable)."""
        return np.inf


def _newton(system: SegmentSystem, state, t: float, opts: TrackOptions,
            telemetry: TrackTelemetry):
    """Newton-correct the whole batch at fixed t; returns state or None."""
    for _ in range(opts.max_newton):
        r, j, _ = system.res_jac_dt(state, t)
        try:
            delta = np.linalg.solve(j, r[..., None])[..., 0]
        except np.linalg.LinAlgError:
            return None
        state = system.update(state, -delta)
        step = np.abs(delta).max(axis=-1)
        if (step < opts.corrector_tol * system.param_scale(state)).all():
            res = np.abs(system.residual(state, t)).max(axis=-1)
            rel = res / system.scale(state, t)
            telemetry.max_corrector_residual = max(
                telemetry.max_corrector_residual, float(rel.max()))
            if (rel < 10 * opts.corrector_tol).all():
                return state
    return None


def _davidenko(system: SegmentSystem, state, t: float):
    _, j, rt = system.res_jac_dt(state, t)
    try:
        return -np.linalg.solve(j, rt[..., None])[..., 0]
    except np.linalg.LinAlgError:
        return None


def track_segment(system: SegmentSystem, state, opts: TrackOptions | None = None,
                  telemetry: TrackTelemetry | None = None):
    """Track all sheets of a segment from t=0 to t=1.

    The batch shares one adaptive step: a corrector failure on any sheet
    halves the step for all of them.  Raises PathTrackingError when the
    step underflows and SheetCollisionError when two sheets merge.
    """
    opts = opts or TrackOptions()
    telemetry = telemetry or TrackTelemetry()
    t = 0.0
    h = opts.h_init
    while t < 1.0:
        h = min(h, 1.0 - t)
        k1 = _davidenko(system, state, t)
        accepted = None
        if k1 is not None:
            k2 = _davidenko(system, system.update(state, 0.5 * h * k1), t + 0.5 * h)
            k3 = None if k2 is None else _davidenko(
                system, system.update(state, 0.5 * h * k2), t + 0.5 * h)
            k4 = None if k3 is None else _davidenko(
                system, system.update(state, h * k3), t + h)
            if k4 is not None:
                pred = system.update(state, (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4))
                accepted = _newton(system, pred, t + h, opts, telemetry)
        if accepted is None:
            telemetry.rejected += 1
            h *= opts.shrink
            if h < opts.h_min:
                raise PathTrackingError(f"step size underflow at t={t:.6g}")
            continue
        state = system.normalize(accepted)
        t += h
        telemetry.steps += 1
        if opts.collision_tol is not None:
            gap = system.collision_gap(state)
            if gap < opts.collision_tol:
                raise SheetCollisionError(f"sheet separation {gap:.3g} at t={t:.6g}")
        h = min(h * opts.grow, opts.h_max)
    # final polish at t=1
    polished = _newton(system, state, 1.0, opts, telemetry)
    if polished is None:
        raise PathTrackingError("final Newton polish failed at t=1")
    _, j, _ = system.res_jac_dt(polished, 1.0)
    conds = np.linalg.cond(j)
    telemetry.max_condition = max(telemetry.max_condition, float(np.max(conds)))
    return polished, telemetry
