"""Dense revised simplex method with Bland's anti-cycling rule.

Solves ``min c.x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0`` in two
phases.  Slack and artificial columns are unit vectors, so a basis splits
into structural columns and unit columns; only the square block of ``A``
on the rows not covered by basic unit columns is factorized, afresh at
every pivot.  Problems with many inequality rows but few active structural
variables (discrete Chebyshev fits) stay cheap.

Entering columns follow Dantzig's rule (most negative reduced cost) until a
run of degenerate pivots appears; from then on Bland's rule (lowest index
enters, lowest basic index leaves on ties) is used, which excludes cycling.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from .errors import Infeasible


@dataclass(frozen=True)
class LPResult:
    x: np.ndarray
    objective: float
    duals: np.ndarray  # multipliers of the ub rows then the eq rows
    status: str  # "optimal" | "unbounded" | "iteration_limit" | "numerical"
    iterations: int
    basis: tuple


class _Tableau:
    """Standard-form problem ``A z = b, z >= 0`` with unit-column bookkeeping."""

    def __init__(self, A, b, unit_row, unit_sign):
        self.A = A
        self.b = b
        self.m, self.n = A.shape
        self.unit_row = unit_row  # row of each unit column, -1 for structural
        self.unit_sign = unit_sign

    def factor(self, basis):
        basis = np.asarray(basis)
        rows = self.unit_row[basis]
        is_unit = rows >= 0
        covered = np.zeros(self.m, dtype=bool)
        covered[rows[is_unit]] = True
        R = np.flatnonzero(~covered)
        S = basis[~is_unit]
        if len(R) != len(S):
            raise np.linalg.LinAlgError("basis is singular")
        lu = None
        if len(S):
            with warnings.catch_warnings():
                warnings.simplefilter("error", LinAlgWarning)
                try:
                    lu = lu_factor(self.A[np.ix_(R, S)])
                except (LinAlgWarning, ValueError) as exc:
                    raise np.linalg.LinAlgError(str(exc)) from None
        L = rows[is_unit]
        return dict(R=R, S=S, L=L, sig=self.unit_sign[basis[is_unit]],
                    pos_unit=np.flatnonzero(is_unit), pos_struct=np.flatnonzero(~is_unit),
                    lu=lu, ALS=self.A[np.ix_(L, S)])

    def solve(self, f, r):
        """``B z = r`` with z ordered like the basis."""
        z = np.zeros(self.m)
        zS = lu_solve(f["lu"], r[f["R"]]) if f["lu"] is not None else np.zeros(0)
        z[f["pos_struct"]] = zS
        z[f["pos_unit"]] = (r[f["L"]] - f["ALS"] @ zS) / f["sig"]
        return z

    def solve_t(self, f, cB):
        """``B^T y = c_B``."""
        y = np.zeros(self.m)
        y[f["L"]] = cB[f["pos_unit"]] / f["sig"]
        if f["lu"] is not None:
            rhs = cB[f["pos_struct"]] - f["ALS"].T @ y[f["L"]]
            y[f["R"]] = lu_solve(f["lu"], rhs, trans=1)
        return y


def _simplex(T: _Tableau, c, basis, max_iter, tol, forbid=None, pivot_tol=1e-11,
             bland_after=50, on_iterate=None):
    """Primal simplex from a feasible ``basis``.  Returns (basis, status, iterations)."""
    allowed = np.ones(T.n, dtype=bool)
    if forbid is not None:
        allowed[forbid] = False
    cscale = max(1.0, float(np.max(np.abs(c)))) if c.size else 1.0
    degenerate_run = 0
    basis = list(basis)
    for it in range(max_iter):
        try:
            f = T.factor(basis)
        except np.linalg.LinAlgError:
            return basis, "numerical", it
        xB = T.solve(f, T.b)
        y = T.solve_t(f, c[basis])
        if not (np.all(np.isfinite(xB)) and np.all(np.isfinite(y))):
            return basis, "numerical", it
        if on_iterate is not None:
            on_iterate(basis, xB)
        reduced = c - T.A.T @ y
        reduced[basis] = 0.0
        candidates = np.flatnonzero((reduced < -tol * cscale) & allowed)
        if candidates.size == 0:
            return basis, "optimal", it
        if degenerate_run > bland_after:
            q = int(candidates[0])  # Bland: lowest improving index enters
        else:
            q = int(candidates[np.argmin(reduced[candidates])])
        d = T.solve(f, T.A[:, q])
        if not np.all(np.isfinite(d)):
            return basis, "numerical", it
        # absolute threshold: a relative one drops blocking rows when xB is large
        rows = np.flatnonzero(d > pivot_tol)
        if rows.size == 0:
            return basis, "unbounded", it
        ratios = np.maximum(xB[rows], 0.0) / d[rows]
        best = ratios.min()
        ties = rows[ratios <= best + tol * max(1.0, best)]
        # Bland: among tied rows the basic variable with lowest index leaves
        leave = int(ties[np.argmin(np.asarray(basis)[ties])])
        degenerate_run = degenerate_run + 1 if best <= tol else 0
        basis[leave] = q
    return basis, "iteration_limit", max_iter


def linprog(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, max_iter: int = 50_000,
            tol: float = 1e-10, basis: Optional[Sequence[int]] = None,
            on_iterate=None) -> LPResult:
    """Two-phase simplex; slack variables for inequalities, artificials where needed.

    ``basis`` optionally gives a primal feasible starting basis as indices
    into ``[x | slacks]``, one per row; phase one is then skipped.
    ``on_iterate(basis, xB)`` is called at every vertex of phase two.
    """
    c = np.asarray(c, dtype=float)
    nv = c.size
    A_ub = np.zeros((0, nv)) if A_ub is None else np.atleast_2d(np.asarray(A_ub, dtype=float))
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float).ravel()
    A_eq = np.zeros((0, nv)) if A_eq is None else np.atleast_2d(np.asarray(A_eq, dtype=float))
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float).ravel()
    mu, me = A_ub.shape[0], A_eq.shape[0]
    m = mu + me

    # standard form [x | slacks | artificials]; one artificial per row
    A = np.zeros((m, nv + mu + m))
    A[:mu, :nv] = A_ub
    A[:mu, nv:nv + mu] = np.eye(mu)
    A[mu:, :nv] = A_eq
    A[:, nv + mu:] = np.eye(m)
    b = np.concatenate([b_ub, b_eq])
    unit_row = np.full(A.shape[1], -1)
    unit_row[nv:nv + mu] = np.arange(mu)
    unit_row[nv + mu:] = np.arange(m)
    unit_sign = np.ones(A.shape[1])
    flip = np.zeros(m, dtype=bool) if basis is not None else b < 0
    A[flip, : nv + mu] *= -1
    b = np.where(flip, -b, b)
    unit_sign[nv:nv + mu][flip[:mu]] = -1.0
    T = _Tableau(A, b, unit_row, unit_sign)
    artificials = np.arange(nv + mu, nv + mu + m)
    iters = 0

    if basis is None:
        start = [nv + i if (i < mu and not flip[i]) else nv + mu + i for i in range(m)]
        if any(j >= nv + mu for j in start):
            c1 = np.zeros(A.shape[1])
            c1[artificials] = 1.0
            start, status, k = _simplex(T, c1, start, max_iter, tol)
            iters += k
            xB = T.solve(T.factor(start), b)
            if status != "optimal" or float(c1[start] @ xB) > 1e-9 * max(1.0, float(np.max(b))):
                raise Infeasible("phase one ended with positive artificial mass")
        basis = start
    else:
        basis = list(basis)
        xB = T.solve(T.factor(basis), b)
        if np.min(xB) < -1e-9 * max(1.0, float(np.max(np.abs(b)))):
            raise ValueError("starting basis is not primal feasible")

    c_run = np.zeros(A.shape[1])
    c_run[:nv] = c
    basis, status, k = _simplex(T, c_run, basis, max_iter, tol, forbid=artificials,
                                on_iterate=on_iterate)
    iters += k
    try:
        f = T.factor(basis)
    except np.linalg.LinAlgError:
        raise Infeasible("final basis is numerically singular") from None
    xB = T.solve(f, b)
    y = T.solve_t(f, c_run[basis])
    y = np.where(flip, -y, y)
    x = np.zeros(A.shape[1])
    x[basis] = xB
    x = np.maximum(x[:nv], 0.0)
    return LPResult(x, float(c @ x), y, status, iters, tuple(int(j) for j in basis))
