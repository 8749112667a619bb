"""Best approximation by convex-polynomials in L2(mu) and in the uniform norm.

Both problems are posed over the probability simplex of monomial
coefficients.  ``best_l2`` runs a conditional-gradient method with away
steps and exact line search; after each step the iterate is re-optimized
over the affine hull of its active vertices (least squares on the
quadrature design, Wolfe-style minor cycles keep it feasible).
``best_uniform`` solves the discrete Chebyshev problem as a linear program
with the in-house simplex solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from ._logmath import LOG_MAX
from .errors import (Infeasible, InvalidMeasure, NonPSDModel, RangeOverflow, SupportViolation,
                     WeightVanishes)
from .lp import linprog
from .measures import Measure, moment, quadrature_rule, weighted_moment
from .polycore import ConvexPolynomial, make_convex

PSD_TOL = 1e-8
WEIGHT_FLOOR = 1e-12


@dataclass(frozen=True)
class ApproximationResult:
    poly: ConvexPolynomial
    error: float
    degree_cap: int
    iterations: int
    gap: float
    status: str  # "Converged" | "IterLimit" | "Stalled"

    @property
    def coeffs(self) -> np.ndarray:
        out = np.zeros(self.degree_cap + 1)
        out[: self.poly.coeffs.size] = self.poly.coeffs
        return out

    def to_dict(self) -> dict:
        return {
            "coeffs": [float(c) for c in self.poly.coeffs],
            "error": self.error,
            "degree_cap": self.degree_cap,
            "iterations": self.iterations,
            "gap": self.gap,
            "status": self.status,
        }


def _scales(x: np.ndarray, N: int) -> np.ndarray:
    """Column scales ``max|x|**k``; raises when they leave double range."""
    r = float(np.max(np.abs(x))) if x.size else 1.0
    if r > 1.0 and N * math.log(r) > LOG_MAX - 1.0:
        raise RangeOverflow(f"max|x|^{N} = {r}^{N} exceeds double range")
    return np.maximum(r, 1.0) ** np.arange(N + 1) if r >= 1.0 else np.ones(N + 1)


def _scaled_vander(x: np.ndarray, N: int):
    s = _scales(x, N)
    r = max(float(np.max(np.abs(x))), 1.0) if x.size else 1.0
    return np.vander(x / r, N + 1, increasing=True), s


@dataclass(frozen=True, eq=False)
class QuadraticModel:
    """``||sum_k a_k x^k - f||^2 = a.G.a - 2 a.b + constant``.

    ``nodes``/``weights``/``values`` hold a quadrature rule for the measure
    and the target values there; when present they are used for residuals,
    gradients and face solves (better conditioned than ``G`` itself).
    """

    gram: np.ndarray
    linear: np.ndarray
    constant: float
    nodes: Optional[np.ndarray] = None
    weights: Optional[np.ndarray] = None
    values: Optional[np.ndarray] = None

    @property
    def degree(self) -> int:
        return self.linear.size - 1

    @property
    def has_design(self) -> bool:
        return self.nodes is not None and bool(np.all(self.weights >= 0))

    @classmethod
    def from_rule(cls, nodes, weights, values, N: int) -> "QuadraticModel":
        """Model of the discrete measure ``sum_i w_i delta_{x_i}``."""
        x = np.asarray(nodes, dtype=float)
        w = np.asarray(weights, dtype=float)
        v = np.asarray(values, dtype=float)
        if not (x.shape == w.shape == v.shape) or x.ndim != 1:
            raise ValueError("nodes, weights and values must be 1-d of equal length")
        if np.any(w < 0):
            raise InvalidMeasure("quadrature weights must be nonnegative")
        Vt, s = _scaled_vander(x, N)
        sw = np.sqrt(w)
        R = sw[:, None] * Vt
        G = (R.T @ R) * np.outer(s, s)
        b = (R.T @ (sw * v)) * s
        return cls(G, b, float(np.sum(w * v * v)), x, w, v)

    @classmethod
    def from_samples(cls, x, y, N: int, sample_weight=None) -> "QuadraticModel":
        x = np.asarray(x, dtype=float)
        w = np.ones_like(x) / x.size if sample_weight is None else np.asarray(sample_weight, dtype=float)
        return cls.from_rule(x, w, y, N)

    def design(self):
        """(R, y, s): scaled design ``sqrt(w) x^k / s_k``, target, scales."""
        Vt, s = _scaled_vander(self.nodes, self.degree)
        sw = np.sqrt(self.weights)
        return sw[:, None] * Vt, sw * self.values, s

    def objective(self, a) -> float:
        a = np.asarray(a, dtype=float)
        return float(a @ self.gram @ a - 2 * a @ self.linear + self.constant)

    def residual_norm(self, a) -> float:
        """``||p - f||`` by quadrature when available, else from the quadratic form."""
        a = np.asarray(a, dtype=float)
        if self.has_design:
            R, y, s = self.design()
            return float(np.linalg.norm(R @ (a * s) - y))
        return math.sqrt(max(self.objective(a), 0.0))

    def check_psd(self) -> float:
        """Smallest eigenvalue of the diagonally scaled Gram matrix."""
        d = np.sqrt(np.maximum(np.diag(self.gram), 0.0))
        d = np.where(d > 0, d, 1.0)
        Gs = self.gram / np.outer(d, d)
        lam = np.linalg.eigvalsh(0.5 * (Gs + Gs.T))
        if lam[0] < -PSD_TOL * max(1.0, abs(lam[-1])):
            raise NonPSDModel(f"Gram matrix has eigenvalue {lam[0]!r} < 0")
        return float(lam[0])


def build_quadratic_model(mu: Measure, f: Optional[Callable], N: int) -> QuadraticModel:
    """Gram matrix from closed-form moments, linear terms by adaptive quadrature.

    A Gauss-Legendre rule exact for the polynomial part (and refined until
    the integrals of ``f`` and ``f^2`` settle) is stored alongside.
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    mom = np.array([moment(mu, n).value for n in range(2 * N + 1)])
    if not np.all(np.isfinite(mom)):
        raise RangeOverflow("moments up to 2N overflow doubles")
    idx = np.add.outer(np.arange(N + 1), np.arange(N + 1))
    G = mom[idx]
    if f is None:
        return QuadraticModel(G, np.zeros(N + 1), 0.0)
    b = np.array([weighted_moment(mu, f, n) for n in range(N + 1)])
    const = weighted_moment(mu, lambda x: np.asarray(f(x)) ** 2, 0)
    if mu.positive:
        probes = (f, lambda x: np.asarray(f(x)) ** 2)
        x, w = quadrature_rule(mu, probes, degree=N)
        v = np.broadcast_to(np.asarray(f(x), dtype=float), x.shape).copy()
        return QuadraticModel(G, b, float(const), x, w, v)
    return QuadraticModel(G, b, float(const))


# ------------------------------------------------------------------ L2


class _Problem:
    """Gradient and face-solve oracle in scaled coordinates."""

    def __init__(self, model: QuadraticModel):
        self.model = model
        self.n = model.degree + 1
        if model.has_design:
            self.R, self.y, self.s = model.design()
        else:
            self.R = None
            self.s = np.sqrt(np.maximum(np.diag(model.gram), 1e-300))

    def residual(self, a):
        return self.R @ (a * self.s) - self.y

    def value(self, a) -> float:
        if self.R is not None:
            r = self.residual(a)
            return float(r @ r)
        return self.model.objective(a)

    def grad(self, a):
        if self.R is not None:
            return 2.0 * (self.R.T @ self.residual(a)) * self.s
        return 2.0 * (self.model.gram @ a - self.model.linear)

    def edge_lengths(self, a):
        """``||x^k - p_a||`` for every vertex k."""
        if self.R is not None:
            Rs = self.R * self.s
            return np.linalg.norm(Rs - (Rs @ a)[:, None], axis=0)
        G = self.model.gram
        Ga = G @ a
        return np.sqrt(np.maximum(np.diag(G) - 2 * Ga + a @ Ga, 0.0))

    def curvature(self, d) -> float:
        """``d.G.d``."""
        if self.R is not None:
            v = self.R @ (d * self.s)
            return float(v @ v)
        return float(d @ self.model.gram @ d)

    def affine_minimizer(self, active):
        """Minimizer over ``{a : a_j = 0 off active, sum a = 1}`` (unconstrained in sign)."""
        active = list(active)
        out = np.zeros(self.n)
        if len(active) == 1:
            out[active[0]] = 1.0
            return out
        p, rest = active[0], active[1:]
        if self.R is not None:
            D = self.R[:, rest] * self.s[rest] - (self.R[:, [p]] * self.s[p])
            rhs = self.y - self.R[:, p] * self.s[p]
        else:
            G, b = self.model.gram, self.model.linear
            # normal equations of the eliminated problem
            E = np.zeros((self.n, len(rest)))
            E[rest, range(len(rest))] = 1.0
            E[p, :] = -1.0
            e = np.zeros(self.n)
            e[p] = 1.0
            H = E.T @ G @ E
            g = E.T @ (b - G @ e)
            z = np.linalg.lstsq(H, g, rcond=None)[0]
            out[rest] = z
            out[p] = 1.0 - z.sum()
            return out
        norms = np.linalg.norm(D, axis=0)
        norms = np.where(norms > 0, norms, 1.0)
        z = np.linalg.lstsq(D / norms, rhs, rcond=None)[0] / norms
        out[rest] = z
        out[p] = 1.0 - z.sum()
        return out


def _face_solve(prob: _Problem, a: np.ndarray, active: list):
    """Wolfe minor cycles: move toward the affine minimizer, dropping coordinates that hit zero."""
    a = a.copy()
    active = sorted(active, key=lambda j: -a[j])
    for _ in range(len(active) + 1):
        target = prob.affine_minimizer(active)
        if np.all(target[active] >= 0):
            if prob.value(target) <= prob.value(a):
                return target, active
            return a, active
        neg = [j for j in active if target[j] < 0]
        theta = min(a[j] / (a[j] - target[j]) for j in neg)
        a = a + theta * (target - a)
        a[a < 0] = 0.0
        drop = [j for j in neg if a[j] <= 1e-15 * max(1.0, float(np.max(np.abs(a))))]
        if not drop:
            drop = [min(neg, key=lambda j: a[j])]
        for j in drop:
            a[j] = 0.0
        active = [j for j in active if j not in drop]
        if not active:
            break
        a[active] /= a[active].sum()
        active = sorted(active, key=lambda j: -a[j])
    return a, active


def best_l2(model: QuadraticModel, tol: float = 1e-8, max_iter: int = 1000,
            initial: Optional[Sequence[float]] = None, stall_window: int = 25) -> ApproximationResult:
    """Minimize ``a.G.a - 2 a.b`` over the probability simplex.

    Each iteration takes a Frank-Wolfe or away step (whichever direction
    has the larger gap) with exact line search, then re-optimizes over the
    active face.  Stops with ``Converged`` when the Frank-Wolfe gap is at
    most ``tol``, ``Stalled`` when the objective stops decreasing for
    ``stall_window`` iterations (rounding floor), ``IterLimit`` otherwise.
    """
    if not tol > 0:
        raise ValueError("tol must be > 0")
    model.check_psd()
    prob = _Problem(model)
    n = prob.n
    if initial is not None:
        a = np.zeros(n)
        init = np.asarray(initial, dtype=float)[:n]
        a[: init.size] = init
        a = make_convex(a, "renormalize").coeffs
        a = np.pad(a, (0, n - a.size))
    else:
        vertex_obj = np.diag(model.gram) - 2 * model.linear
        a = np.zeros(n)
        a[int(np.argmin(vertex_obj))] = 1.0
    active = list(np.flatnonzero(a > 0))
    best_val = prob.value(a)
    since_best = 0
    status, gap, it = "IterLimit", math.inf, 0
    for it in range(1, max_iter + 1):
        g = prob.grad(a)
        ga = float(g @ a)
        s = int(np.argmin(g))
        gap = ga - float(g[s])
        if gap <= tol:
            status = "Converged"
            break
        # steepest edge: the descent rate per unit L2 length of e_k - a
        rates = (g - ga) / np.maximum(prob.edge_lengths(a), 1e-300)
        s = int(np.argmin(rates))
        v = max(active, key=lambda j: g[j])
        if ga - g[s] >= g[v] - ga or a[v] >= 1.0:
            d = -a.copy()
            d[s] += 1.0
            gmax = 1.0
        else:
            d = a.copy()
            d[v] -= 1.0
            gmax = a[v] / (1.0 - a[v])
        slope = float(g @ d)
        curv = prob.curvature(d)
        step = gmax if curv <= 0 else min(gmax, max(0.0, -slope / (2.0 * curv)))
        a = np.maximum(a + step * d, 0.0)
        a /= a.sum()
        active = list(np.flatnonzero(a > 0))
        if s not in active:
            active.append(s)
        a, active = _face_solve(prob, a, active)
        active = list(np.flatnonzero(a > 0))
        val = prob.value(a)
        if val < best_val - 1e-15 * max(1.0, abs(best_val)):
            best_val = val
            since_best = 0
        else:
            since_best += 1
            if since_best >= stall_window:
                status = "Stalled"
                break
    else:
        g = prob.grad(a)
        gap = float(g @ a - g.min())
    poly = make_convex(a, "renormalize")
    return ApproximationResult(poly, model.residual_norm(_padded(poly, n)), model.degree, it,
                               max(gap, 0.0), status)


def _padded(poly: ConvexPolynomial, n: int) -> np.ndarray:
    out = np.zeros(max(n, poly.coeffs.size))
    out[: poly.coeffs.size] = poly.coeffs
    return out[:n]


# -------------------------------------------------------------- uniform


def chebyshev_grid(a: float, b: float, size: int = 512) -> np.ndarray:
    """Chebyshev points of the first kind mapped to ``[a, b]``, ascending."""
    k = np.arange(size)
    t = np.cos(np.pi * (2 * k + 1) / (2 * size))
    return np.sort(0.5 * (a + b) + 0.5 * (b - a) * t)


@dataclass(frozen=True)
class UniformState:
    """Simplex basis of a discrete Chebyshev solve, for warm starts at higher degree."""

    degree: int
    grid_size: int
    basis: tuple


def _sup_error(x, fx, a) -> float:
    return float(np.max(np.abs(np.polynomial.polynomial.polyval(x, a) - fx)))


def _uniform_lp(x, fx, N, s, Vt):
    M = x.size
    nv = N + 2
    A_ub = np.empty((2 * M, nv))
    A_ub[:M, : N + 1] = Vt
    A_ub[M:, : N + 1] = -Vt
    A_ub[:, N + 1] = -1.0
    b_ub = np.concatenate([fx, -fx])
    A_eq = np.concatenate([1.0 / s, [0.0]])[None, :]
    c = np.zeros(nv)
    c[-1] = 1.0
    return c, A_ub, b_ub, A_eq


def _vertex_basis(x, fx, N, j):
    """Feasible basis at ``a = e_j`` with ``t`` equal to the max residual."""
    M = x.size
    nv = N + 2
    r = x**j - fx
    i = int(np.argmax(np.abs(r)))
    row = i if r[i] >= 0 else M + i
    basis = [nv + k for k in range(2 * M)]
    basis[row] = N + 1
    basis.append(j)
    return basis


def _lift_basis(state: UniformState, N: int):
    old_nv = state.degree + 2
    nv = N + 2
    out = []
    for j in state.basis:
        if j < state.degree + 1:
            out.append(j)
        elif j == state.degree + 1:
            out.append(N + 1)
        else:
            out.append(j - old_nv + nv)
    return out


def best_uniform(f, grid, N: int, max_iter: int = 20_000, tol: float = 1e-14,
                 warm_start: Optional[UniformState] = None, return_state: bool = False):
    """Discrete minimax fit over the simplex: ``min t`` with ``|p(x_i) - f(x_i)| <= t``.

    The primal LP (``2M`` inequality rows, ``N + 2`` columns) is solved with
    the two-phase simplex solver starting from the best single monomial, or
    from ``warm_start`` (a basis from a lower degree on the same grid).
    Monomials enter scaled by ``max|x|**k``.  Every vertex visited is a
    feasible convex-polynomial; the one with the smallest recomputed sup
    residual is returned, so rounding in late pivots never makes the answer
    worse than an earlier vertex.  ``gap`` is the distance from a Lagrangian
    lower bound built from the final simplex multipliers.  ``tol`` is the
    reduced-cost threshold; near the optimum at high degree the reduced
    costs of the scaled monomials are far below the usual ``1e-10``.
    """
    x = np.asarray(grid, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("grid must be nonempty")
    if N < 0:
        raise ValueError("N must be >= 0")
    fx = np.asarray(f(x) if callable(f) else f, dtype=float)
    fx = np.broadcast_to(fx, x.shape).astype(float)
    if not np.all(np.isfinite(fx)):
        raise ValueError("target is not finite on the grid")
    Vt, s = _scaled_vander(x, N)
    V = Vt * s
    if not np.all(np.isfinite(V)):
        raise RangeOverflow("monomial values overflow on the grid")
    c, A_ub, b_ub, A_eq = _uniform_lp(x, fx, N, s, Vt)

    best = {"err": math.inf, "a": None}

    def consider(a):
        if np.any(a < 0) or not a.sum() > 0:
            return
        a = a / a.sum()
        err = float(np.max(np.abs(V @ a - fx)))
        if err < best["err"]:
            best["err"], best["a"] = err, a

    def on_iterate(basis, xB):
        a = np.zeros(N + 1)
        for pos, j in enumerate(basis):
            if j <= N:
                a[j] = max(xB[pos], 0.0) / s[j]
        consider(a)

    j = int(np.argmin(np.max(np.abs(V - fx[:, None]), axis=0)))
    starts = [_vertex_basis(x, fx, N, j)]
    if warm_start is not None and warm_start.grid_size == x.size and warm_start.degree <= N:
        starts.insert(0, _lift_basis(warm_start, N))
    res = None
    for basis in starts:
        try:
            res = linprog(c, A_ub, b_ub, A_eq, [1.0], basis=basis, max_iter=max_iter,
                          tol=tol, on_iterate=on_iterate)
            break
        except ValueError:
            # a lifted basis can lose feasibility to rounding; fall back to a cold start
            continue
        except Infeasible:
            break
    if best["a"] is None:
        raise Infeasible("simplex solver produced no feasible vertex")
    a = best["a"]
    poly = make_convex(a, "renormalize")
    err = _sup_error(x, fx, _padded(poly, N + 1))
    gap = math.inf
    status = "IterLimit"
    if res is not None:
        M = x.size
        y = res.duals
        lam = -y[:M] + y[M:2 * M]
        tot = float(np.sum(np.abs(lam)))
        if tot > 0 and np.all(np.isfinite(lam)):
            lam = lam / tot
            bound = float(np.min(V.T @ lam) - lam @ fx)
            gap = max(err - bound, 0.0)
        status = {"optimal": "Converged", "iteration_limit": "IterLimit"}.get(res.status, "Stalled")
    result = ApproximationResult(poly, err, N, res.iterations if res else 0, gap, status)
    if return_state:
        state = UniformState(N, x.size, res.basis) if res is not None else None
        return result, state
    return result


# ------------------------------------------------------------- probes


def _admissible_gap(x: np.ndarray, fx: np.ndarray) -> np.ndarray:
    """Pointwise ``dist(f(x), {p(x) : p convex})`` where the value set is known.

    ``p([-1, 1]) in [-1, 1]``, ``p([0, 1]) in [0, 1]`` and ``p(x) >= 1`` for
    ``x >= 1``; elsewhere no constraint is used.
    """
    lo = np.full(x.shape, -np.inf)
    hi = np.full(x.shape, np.inf)
    m1 = (x >= -1) & (x < 0)
    lo[m1], hi[m1] = -1.0, 1.0
    m2 = (x >= 0) & (x <= 1)
    lo[m2], hi[m2] = 0.0, 1.0
    lo[x > 1] = 1.0
    return np.maximum(np.maximum(lo - fx, fx - hi), 0.0)


@dataclass(frozen=True)
class DensityReport:
    degrees: tuple
    errors: tuple
    results: tuple
    verdict: str  # "Dense-consistent" | "Obstructed" | "Inconclusive"
    lower_bound: float
    witness: Optional[float]
    mode: str

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "verdict": self.verdict,
            "lower_bound": self.lower_bound,
            "witness": self.witness,
            "curve": [
                {"degree": d, "error": r.error, "iterations": r.iterations, "gap": r.gap}
                for d, r in zip(self.degrees, self.results)
            ],
        }


def density_probe(a: float, b: float, f: Callable, degrees: Sequence[int], mode: str = "uniform",
                  threshold: float = 1e-2, grid_size: int = 512, tol: float = 1e-8,
                  max_iter: int = 1000) -> DensityReport:
    """Error curve of best convex-polynomial approximation of ``f`` on ``[a, b]``.

    ``uniform`` runs the discrete Chebyshev solver on a Chebyshev grid,
    warm-starting each degree from the previous basis; ``l2`` runs
    ``best_l2`` against Lebesgue measure, warm-started from the previous
    coefficients.  Verdicts: ``Obstructed`` when ``b >= -1`` and the
    pointwise value-range bound is positive (the bound is reported and is a
    true lower bound for every degree); ``Dense-consistent`` when the final
    error is below ``threshold`` times the first (or already negligible);
    ``Inconclusive`` otherwise.
    """
    if not a < b:
        raise ValueError("need a < b")
    degrees = [int(d) for d in degrees]
    if not degrees or any(d2 <= d1 for d1, d2 in zip(degrees, degrees[1:])):
        raise ValueError("degrees must be nonempty and increasing")
    if mode not in ("uniform", "l2"):
        raise ValueError(f"unknown mode {mode!r}")
    results = []
    x = chebyshev_grid(a, b, grid_size)
    fx = np.broadcast_to(np.asarray(f(x), dtype=float), x.shape)
    if mode == "uniform":
        state = None
        for N in degrees:
            r, state = best_uniform(f, x, N, warm_start=state, return_state=True)
            if results and r.error > results[-1].error:
                # nested feasible sets: a lower degree's answer is still feasible
                prev = results[-1]
                r = ApproximationResult(prev.poly, prev.error, N, r.iterations, r.gap, r.status)
            results.append(r)
        gaps = _admissible_gap(x, fx)
        bound = float(gaps.max())
        witness = float(x[int(np.argmax(gaps))]) if bound > 0 else None
    else:
        mu = Measure.lebesgue(a, b)
        prev = None
        for N in degrees:
            model = build_quadratic_model(mu, f, N)
            r = best_l2(model, tol=tol, max_iter=max_iter,
                        initial=None if prev is None else prev.poly.coeffs)
            if prev is not None and r.error > prev.error:
                r = ApproximationResult(prev.poly, model.residual_norm(_padded(prev.poly, N + 1)), N,
                                        r.iterations, r.gap, r.status)
            results.append(r)
            prev = r
        # L2 bound: integrate the squared pointwise gap over the region where it applies
        t, w = np.polynomial.legendre.leggauss(256)
        xs = 0.5 * (b - a) * t + 0.5 * (a + b)
        gaps = _admissible_gap(xs, np.asarray(f(xs), dtype=float) * np.ones_like(xs))
        bound = float(math.sqrt(0.5 * (b - a) * np.sum(w * gaps**2)))
        witness = float(xs[int(np.argmax(gaps))]) if bound > 0 else None
    errors = tuple(r.error for r in results)
    scale = max(1.0, float(np.max(np.abs(fx))))
    if b >= -1 and bound > 0:
        verdict = "Obstructed"
    elif errors[-1] <= threshold * errors[0] or errors[-1] <= 1e-8 * scale:
        verdict = "Dense-consistent"
    else:
        verdict = "Inconclusive"
    return DensityReport(tuple(degrees), errors, tuple(results), verdict, bound, witness, mode)


def weighted_density_probe(mu: Measure, f: Callable, target: Callable, N: int,
                           tol: float = 1e-8, max_iter: int = 1000) -> ApproximationResult:
    """Best ``p f`` approximation of ``target`` in L2(mu) over convex-polynomials ``p``.

    Reduces to ``best_l2`` for the measure ``|f|^2 dmu`` and target
    ``target / f``; the returned error is ``||p f - target||`` in L2(mu).
    """
    if mu.variation_from(-1.0) > 0:
        raise SupportViolation("the measure charges [-1, inf)")
    if not mu.positive:
        raise InvalidMeasure("weighted density probe needs a positive measure")
    x, w = quadrature_rule(mu, (f, target), degree=N)
    fx = np.broadcast_to(np.asarray(f(x), dtype=float), x.shape)
    tx = np.broadcast_to(np.asarray(target(x), dtype=float), x.shape)
    small = np.abs(fx) < WEIGHT_FLOOR
    if np.any(small):
        raise WeightVanishes(f"|f| < {WEIGHT_FLOOR} at x = {float(x[np.argmax(small)])!r}")
    model = QuadraticModel.from_rule(x, w * fx**2, tx / fx, N)
    r = best_l2(model, tol=tol, max_iter=max_iter)
    p = r.poly(x)
    err = float(np.sqrt(np.sum(w * (p * fx - tx) ** 2)))
    return ApproximationResult(r.poly, err, N, r.iterations, r.gap, r.status)


# ------------------------------------------------------------ estimator


class ConvexPolynomialRegressor(RegressorMixin, BaseEstimator):
    """Least-squares or minimax regression over convex-polynomials of bounded degree.

    Parameters
    ----------
    degree : int
        Largest exponent allowed.
    loss : {"l2", "uniform"}
        ``l2`` minimizes the (sample-weighted) mean squared residual,
        ``uniform`` the largest absolute residual.
    tol, max_iter : solver controls for the ``l2`` loss.
    """

    def __init__(self, degree: int = 10, loss: str = "l2", tol: float = 1e-8, max_iter: int = 1000):
        self.degree = degree
        self.loss = loss
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y, sample_weight=None):
        X, y = check_X_y(X, y, ensure_2d=True, y_numeric=True)
        if X.shape[1] != 1:
            raise ValueError("ConvexPolynomialRegressor expects a single feature")
        if self.loss not in ("l2", "uniform"):
            raise ValueError(f"unknown loss {self.loss!r}")
        if int(self.degree) < 0:
            raise ValueError("degree must be >= 0")
        x = X[:, 0]
        if self.loss == "l2":
            w = np.full(x.size, 1.0 / x.size) if sample_weight is None else np.asarray(sample_weight, float)
            model = QuadraticModel.from_rule(x, w, y, int(self.degree))
            res = best_l2(model, tol=self.tol, max_iter=self.max_iter)
        else:
            order = np.argsort(x)
            res = best_uniform(y[order], x[order], int(self.degree))
        self.result_ = res
        self.poly_ = res.poly
        self.coef_ = res.coeffs
        self.n_iter_ = res.iterations
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "poly_")
        X = check_array(X)
        return self.poly_(X[:, 0])
