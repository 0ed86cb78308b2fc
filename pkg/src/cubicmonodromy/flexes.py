"""The nine flexes of smooth plane cubics and their monodromy.

Flexes are the intersection of the curve with its Hessian; both are cubics
in (x, y, z) with 10 coefficients in graded-lex order.  The start system
is the Fermat member of the Hesse pencil, whose flexes are the nine base
points of the pencil.  Monodromy loops run in the full 10-coefficient
space and are expected to generate the affine special linear group
ASL2(F3) of order 216, identified through the collinearity structure of
the flexes (the Hesse configuration of 12 lines).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .numeric import (PathTrackingError, SegmentSystem, SheetCollisionError,
                      TrackOptions, TrackTelemetry, form_space, random_unitary,
                      track_segment)
from . import linesolver as ls
from .perms import Permutation

SPACE3 = form_space(3, 3)

FLEX_RESIDUAL_TOL = 1e-10
FLEX_DISTINCT_TOL = 1e-6
COLLINEAR_TOL = 1e-8


class FlexError(RuntimeError):
    """Flex solving failed (singular cubic or lost path)."""


@dataclass(frozen=True)
class PlaneCubicForm:
    """A plane cubic as 10 normalized complex coefficients."""

    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=complex).reshape(-1)
        if c.shape != (10,):
            raise FlexError(f"expected 10 coefficients, got {c.shape}")
        top = np.abs(c).max()
        if top == 0:
            raise FlexError("form is identically zero")
        object.__setattr__(self, "coefficients", c / top)
        self.coefficients.setflags(write=False)

    @staticmethod
    def from_monomial_dict(terms: dict[tuple[int, int, int], complex]) -> "PlaneCubicForm":
        c = np.zeros(10, dtype=complex)
        for e, v in terms.items():
            c[SPACE3.index[e]] += v
        return PlaneCubicForm(c)

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        return SPACE3.evaluate(self.coefficients, points)

    def to_json(self) -> list[list[float]]:
        return [[float(c.real), float(c.imag)] for c in self.coefficients]


def hesse_form(k: complex) -> PlaneCubicForm:
    """x^3 + y^3 + z^3 - 3k xyz; singular exactly when k^3 = 1."""
    if abs(k**3 - 1) < 1e-12:
        raise FlexError("k^3 = 1 gives a singular member of the Hesse pencil")
    return PlaneCubicForm.from_monomial_dict({
        (3, 0, 0): 1, (0, 3, 0): 1, (0, 0, 3): 1, (1, 1, 1): -3 * k,
    })


def _third_tensor(coeffs: np.ndarray) -> np.ndarray:
    return SPACE3.third_derivative_tensor(coeffs)


def hessian_form(f: PlaneCubicForm) -> PlaneCubicForm:
    """Determinant of the matrix of second partials, again a cubic."""
    return PlaneCubicForm(hessian_coefficients(f.coefficients))


def hessian_coefficients(coeffs: np.ndarray) -> np.ndarray:
    """Raw (unnormalized) coefficients of det D^2 F."""
    a = _third_tensor(np.asarray(coeffs, dtype=complex))
    # H(p) = det(sum_k A[:,:,k] p_k): expand over permutations into a cubic
    acc: dict[tuple[int, int, int], complex] = {}
    for sigma, sign in (((0, 1, 2), 1), ((1, 2, 0), 1), ((2, 0, 1), 1),
                        ((0, 2, 1), -1), ((2, 1, 0), -1), ((1, 0, 2), -1)):
        rows = [a[i, sigma[i], :] for i in range(3)]
        for k1 in range(3):
            if rows[0][k1] == 0:
                continue
            for k2 in range(3):
                if rows[1][k2] == 0:
                    continue
                for k3 in range(3):
                    if rows[2][k3] == 0:
                        continue
                    e = [0, 0, 0]
                    e[k1] += 1
                    e[k2] += 1
                    e[k3] += 1
                    key = tuple(e)
                    acc[key] = acc.get(key, 0.0) + sign * rows[0][k1] * rows[1][k2] * rows[2][k3]
    out = np.zeros(10, dtype=complex)
    for e, v in acc.items():
        out[SPACE3.index[e]] = v
    return out


def hesse_flexes() -> np.ndarray:
    """The nine flexes of every smooth Hesse member: rows, exactly.

    (0 : 1 : -g), (-g : 0 : 1), (1 : -g : 0) for cube roots of unity g.
    """
    zeta = np.exp(2j * np.pi / 3)
    rows = []
    for g in (1, zeta, zeta**2):
        rows.append([0, 1, -g])
        rows.append([-g, 0, 1])
        rows.append([1, -g, 0])
    return np.array(rows, dtype=complex)


def normalize_point(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=complex)
    p = p / np.linalg.norm(p)
    k = int(np.abs(p).argmax())
    return p * (abs(p[k]) / p[k])


@dataclass
class FlexSet:
    """Nine certified flex points with their residuals."""

    points: np.ndarray  # (9,3), unit norm, phase-fixed
    residuals: np.ndarray  # (9,) max of curve and Hessian residuals
    seed: int = 0

    def to_json(self) -> dict:
        return {
            "points": [[[c.real, c.imag] for c in row] for row in self.points],
            "residuals": list(map(float, self.residuals)),
            "seed": self.seed,
            "tolerances": {"residual": FLEX_RESIDUAL_TOL,
                           "distinct": FLEX_DISTINCT_TOL},
        }


# ---------------------------------------------------------------------------
# The flex system along a coefficient segment
# ---------------------------------------------------------------------------


class FlexSystem(SegmentSystem):
    """{F=0, det D^2 F=0} in a fixed affine frame, along c(t)."""

    def __init__(self, c_from: np.ndarray, c_to: np.ndarray, frame: np.ndarray):
        self.c_from = np.asarray(c_from, dtype=complex)
        self.c_to = np.asarray(c_to, dtype=complex)
        self.c_diff = self.c_to - self.c_from
        self.frame = np.asarray(frame, dtype=complex)
        self.a_from = _third_tensor(self.c_from)
        self.a_to = _third_tensor(self.c_to)
        self._grad_space, self._grad_ops = SPACE3.gradient_ops()

    def coeffs(self, t: float) -> np.ndarray:
        return (1 - t) * self.c_from + t * self.c_to

    def tensor(self, t: float) -> np.ndarray:
        return (1 - t) * self.a_from + t * self.a_to

    def points(self, state: np.ndarray) -> np.ndarray:
        uv1 = np.concatenate([state, np.ones((len(state), 1))], axis=1)
        return uv1 @ self.frame.T

    def residual(self, state: np.ndarray, t: float) -> np.ndarray:
        p = self.points(state)
        coeffs = self.coeffs(t)
        fvals = SPACE3.evaluate(coeffs, p)
        m = np.einsum("ijk,nk->nij", self.tensor(t), p)
        hvals = np.linalg.det(m)
        return np.stack([fvals, hvals], axis=-1)

    def res_jac_dt(self, state: np.ndarray, t: float):
        p = self.points(state)
        coeffs = self.coeffs(t)
        a = self.tensor(t)
        fvals = SPACE3.evaluate(coeffs, p)
        grads = SPACE3.gradient(coeffs, p)  # (n,3)
        m = np.einsum("ijk,nk->nij", a, p)
        hvals = np.linalg.det(m)
        adj = _adjugate3(m)
        w0, w1 = self.frame[:, 0], self.frame[:, 1]
        b0 = np.einsum("ijk,k->ij", a, w0)
        b1 = np.einsum("ijk,k->ij", a, w1)
        r = np.stack([fvals, hvals], axis=-1)
        j = np.empty((len(state), 2, 2), dtype=complex)
        j[:, 0, 0] = grads @ w0
        j[:, 0, 1] = grads @ w1
        j[:, 1, 0] = np.einsum("nij,ji->n", adj, b0)
        j[:, 1, 1] = np.einsum("nij,ji->n", adj, b1)
        # t-derivative: coefficient difference for F, tensor difference for H
        ft = SPACE3.evaluate(self.c_diff, p)
        da = self.a_to - self.a_from
        mdot = np.einsum("ijk,nk->nij", da, p)
        ht = np.einsum("nij,nji->n", adj, mdot)
        rt = np.stack([ft, ht], axis=-1)
        return r, j, rt

    def update(self, state: np.ndarray, delta: np.ndarray) -> np.ndarray:
        return state + delta

    def scale(self, state: np.ndarray, t: float) -> np.ndarray:
        cnorm = np.abs(self.coeffs(t)).max()
        nrm = 1.0 + np.abs(state).max(axis=1)
        return max(cnorm, (6 * cnorm) ** 3) * nrm**3

    def param_scale(self, state: np.ndarray) -> np.ndarray:
        return 1.0 + np.abs(state).max(axis=1)

    def collision_gap(self, state: np.ndarray) -> float:
        pts = self.points(state)
        pts = pts / np.linalg.norm(pts, axis=1, keepdims=True)
        d = ls.chordal_distance_matrix(pts, pts)
        np.fill_diagonal(d, np.inf)
        return float(d.min())


def _adjugate3(m: np.ndarray) -> np.ndarray:
    """Batched adjugate of 3x3 matrices."""
    out = np.empty_like(m)
    for i in range(3):
        for j in range(3):
            r = [k for k in range(3) if k != j]
            c = [k for k in range(3) if k != i]
            minor = m[..., r[0], c[0]] * m[..., r[1], c[1]] - \
                m[..., r[0], c[1]] * m[..., r[1], c[0]]
            out[..., i, j] = (-1) ** (i + j) * minor
    return out


def _state_from_points(points: np.ndarray, frame: np.ndarray) -> np.ndarray:
    q = points @ np.linalg.inv(frame).T
    if (np.abs(q[:, 2]) < 1e-9).any():
        raise FlexError("a flex sits at the frame's line at infinity")
    return q[:, :2] / q[:, 2:3]


def _certify(form: PlaneCubicForm, points: np.ndarray) -> np.ndarray:
    hess = hessian_coefficients(form.coefficients)
    fres = np.abs(SPACE3.evaluate(form.coefficients, points))
    hres = np.abs(SPACE3.evaluate(hess, points))
    nrm = np.linalg.norm(points, axis=1) ** 3
    fscale = np.abs(form.coefficients).max() * nrm
    hscale = np.abs(hess).max() * nrm
    return np.maximum(fres / fscale, hres / hscale)


def solve_flexes(form: PlaneCubicForm, seed: int = 0, attempts: int = 4,
                 options: TrackOptions | None = None) -> FlexSet:
    """The nine flexes, by continuation from the Fermat plane cubic."""
    rng = np.random.default_rng(seed)
    start_form = hesse_form(0.0)
    start_points = hesse_flexes()
    last: Exception | None = None
    for _ in range(attempts):
        gamma = np.exp(2j * np.pi * rng.uniform())
        frame = random_unitary(3, rng)
        c_from = gamma * SPACE3.compose_matrix(start_form.coefficients, frame)
        c_to = SPACE3.compose_matrix(form.coefficients, frame)
        try:
            state = _state_from_points(start_points @ np.linalg.inv(frame).T,
                                       np.eye(3, dtype=complex))
        except FlexError as exc:
            last = exc
            continue
        system = FlexSystem(c_from, c_to, np.eye(3, dtype=complex))
        try:
            state, _ = track_segment(system, state,
                                     options or TrackOptions(collision_tol=FLEX_DISTINCT_TOL))
        except (PathTrackingError, SheetCollisionError, np.linalg.LinAlgError) as exc:
            last = exc
            continue
        pts = np.array([normalize_point(p) for p in (system.points(state) @ frame.T)])
        residuals = _certify(form, pts)
        u = pts / np.linalg.norm(pts, axis=1, keepdims=True)
        d = ls.chordal_distance_matrix(u, u)
        np.fill_diagonal(d, np.inf)
        if d.min() <= FLEX_DISTINCT_TOL:
            last = FlexError(f"flexes not distinct (min distance {d.min():.3g})")
            continue
        if residuals.max() >= FLEX_RESIDUAL_TOL:
            last = FlexError(f"flex residual {residuals.max():.3g} above tolerance")
            continue
        return FlexSet(points=pts, residuals=residuals, seed=seed)
    raise FlexError(f"no certified flex solve in {attempts} attempts: {last}")


# ---------------------------------------------------------------------------
# Collinearity structure and the ASL2(F3) identification
# ---------------------------------------------------------------------------


def collinear_triples(points: np.ndarray, tol: float = COLLINEAR_TOL) -> list[tuple[int, int, int]]:
    """Index triples of collinear flexes (normalized determinant test)."""
    pts = points / np.linalg.norm(points, axis=1, keepdims=True)
    out = []
    for i, j, k in itertools.combinations(range(len(pts)), 3):
        det = np.linalg.det(np.vstack([pts[i], pts[j], pts[k]]))
        if abs(det) < tol:
            out.append((i, j, k))
    return out


def check_hesse_configuration(triples: list[tuple[int, int, int]], n: int = 9) -> None:
    """12 lines, 4 through each point."""
    if len(triples) != 12:
        raise FlexError(f"expected 12 collinear triples, found {len(triples)}")
    counts = [0] * n
    for t in triples:
        for i in t:
            counts[i] += 1
    if counts != [4] * n:
        raise FlexError(f"line counts per point are {counts}, expected all 4")


def f3_coordinate_bijections(triples: list[tuple[int, int, int]]):
    """All bijections flexes -> F3^2 adapted to the collinearity structure.

    A bijection is fixed by an origin, an ordered pair of lines through it
    (the axes), and an ordering of each axis; the rest of the table fills
    in through the rule that collinear triples sum to zero.  Yields maps
    point_index -> (x, y); invalid fills are skipped.
    """
    tset = [frozenset(t) for t in triples]
    for origin in range(9):
        through = [t for t in tset if origin in t]
        for l1, l2 in itertools.permutations(through, 2):
            a1 = sorted(l1 - {origin})
            a2 = sorted(l2 - {origin})
            for ax1 in (a1, a1[::-1]):
                for ax2 in (a2, a2[::-1]):
                    coords = {origin: (0, 0), ax1[0]: (1, 0), ax1[1]: (2, 0),
                              ax2[0]: (0, 1), ax2[1]: (0, 2)}
                    ok = True
                    while ok and len(coords) < 9:
                        progress = False
                        for t in tset:
                            known = [p for p in t if p in coords]
                            if len(known) == 2:
                                p, q = known
                                (r,) = t - {p, q}
                                rx = (-coords[p][0] - coords[q][0]) % 3
                                ry = (-coords[p][1] - coords[q][1]) % 3
                                if r in coords and coords[r] != (rx, ry):
                                    ok = False
                                    break
                                if r not in coords:
                                    coords[r] = (rx, ry)
                                    progress = True
                        if not progress:
                            break
                    if ok and len(coords) == 9:
                        consistent = all(
                            (sum(coords[p][0] for p in t) % 3 == 0
                             and sum(coords[p][1] for p in t) % 3 == 0)
                            for t in tset)
                        if consistent:
                            yield dict(coords)


def permutation_in_f3_coordinates(perm: Permutation,
                                  coords: dict[int, tuple[int, int]]) -> Permutation:
    """Transport a flex permutation to the 9 points of F3^2 (index 3x+y)."""
    imgs = [0] * 9
    for p, (x, y) in coords.items():
        qx, qy = coords[perm.images[p]]
        imgs[3 * x + y] = 3 * qx + qy
    return Permutation(imgs)


# ---------------------------------------------------------------------------
# Loop tracking for the degree-9 cover
# ---------------------------------------------------------------------------


def flexp9_family():
    """The full 10-coefficient space of plane cubics (degree-9 cover)."""
    from .forms import FamilySpec

    return FamilySpec(
        name="FlexP9",
        parameter_dim=10,
        evaluator=lambda p: PlaneCubicForm(p),
        coeff_map=lambda p: np.asarray(p, dtype=complex),
        symmetry_generators=(),
        known_punctures=(),
        degree=9,
    )


def flex_monodromy_campaign(budget: int = 40, seed: int = 0):
    """Random-loop campaign over the space of smooth plane cubics.

    Returns a degree-9 MonodromyReport; the expected group is ASL2(F3) of
    order 216.  Loops avoid the discriminant reactively: failed tracks are
    recorded and replaced by fresh random loops.
    """
    from .monodromy import Campaign, default_basepoint, run_campaign

    campaign = Campaign(family=flexp9_family(),
                        basepoint=default_basepoint("FlexP9", seed),
                        loop_budget=budget, seed=seed)
    return run_campaign(campaign)


def track_flex_loop(loop, base: FlexSet, frame_seed: int = 0,
                    options: TrackOptions | None = None):
    """Continue the nine flexes around a loop in coefficient space.

    The whole loop is tracked in one random unitary frame (composition
    with the frame is linear on coefficients, so segments stay segments).
    Returns a tracker.TrackedPermutation of degree 9.
    """
    from .tracker import TrackedPermutation

    rng = np.random.default_rng(frame_seed)
    frame = random_unitary(3, rng)
    frame_inv = np.linalg.inv(frame)
    opts = options or TrackOptions(collision_tol=FLEX_DISTINCT_TOL)
    state = _state_from_points(base.points @ frame_inv.T, np.eye(3, dtype=complex))
    telemetry = TrackTelemetry()
    system = None
    for a, b in zip(loop.waypoints[:-1], loop.waypoints[1:]):
        c_a = SPACE3.compose_matrix(loop.family.raw_coeffs(a), frame)
        c_b = SPACE3.compose_matrix(loop.family.raw_coeffs(b), frame)
        system = FlexSystem(c_a, c_b, np.eye(3, dtype=complex))
        state, telemetry = track_segment(system, state, opts, telemetry)
    end_pts = np.array([normalize_point(p) for p in (system.points(state) @ frame.T)])
    u_end = end_pts / np.linalg.norm(end_pts, axis=1, keepdims=True)
    u_base = base.points / np.linalg.norm(base.points, axis=1, keepdims=True)
    matching = ls.match_lines(u_end, u_base)
    d = ls.chordal_distance_matrix(u_end, u_end)
    np.fill_diagonal(d, np.inf)
    return TrackedPermutation(
        perm=Permutation(matching),
        max_corrector_residual=telemetry.max_corrector_residual,
        min_separation=float(d.min()),
        loop=loop,
    )
