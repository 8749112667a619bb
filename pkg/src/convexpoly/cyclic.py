"""Multiplication by ``x`` on a quadrature discretization of ``L2(mu)``.

Functions are vectors of node values, so the operator is diagonal and
inner products are weighted sums.  Convex-cyclicity is probed by checking
that ``<x^n f, g>`` is unbounded above for random functionals ``g``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .approx import ApproximationResult, weighted_density_probe
from .errors import InvalidMeasure, ZeroVector
from .measures import (GROWTH_THRESHOLD, Bounded, Measure, MomentGrowthCertificate,
                       _node_logs, _piece_nodes, _vectorized, certify_sequence, distribution, moment)
from ._logmath import signed_logsumexp

Certificate = Union[MomentGrowthCertificate, Bounded]


@dataclass(frozen=True, eq=False)
class DiscretizedSpace:
    """Nodes and positive weights realizing ``L2(mu)``; exact for ``x^j x^k``, ``j + k <= 2 degree``."""

    nodes: np.ndarray
    weights: np.ndarray
    source: Measure
    degree: int

    def inner(self, f, g) -> float:
        return math.fsum(self.weights * np.asarray(f) * np.asarray(g))

    def norm(self, f) -> float:
        return math.sqrt(max(self.inner(f, f), 0.0))

    def values(self, f: Callable) -> np.ndarray:
        return np.broadcast_to(_vectorized(f, self.nodes), self.nodes.shape).astype(float)


def discretize(mu: Measure, degree: int) -> DiscretizedSpace:
    """Gauss-Legendre nodes per density piece plus the atoms as nodes."""
    if degree < 1:
        raise ValueError("degree must be >= 1")
    if not mu.positive:
        raise InvalidMeasure("L2(mu) needs a positive measure")
    xs = [np.array([x for x, _ in mu.atoms], dtype=float)]
    ws = [np.array([w for _, w in mu.atoms], dtype=float)]
    for p in mu.pieces:
        # exact for x^(2 degree) times the density
        q = max(degree + 1, degree + p.degree // 2 + 1)
        x, w = _piece_nodes(p, q)
        xs.append(x)
        ws.append(w)
    x, w = np.concatenate(xs), np.concatenate(ws)
    keep = w > 0
    x, w = x[keep], w[keep]
    x.setflags(write=False)
    w.setflags(write=False)
    return DiscretizedSpace(x, w, mu, degree)


def orbit_sequence(f, g, space: DiscretizedSpace, N: int, power: int = 1):
    """(signs, logs) of ``<M^(power n) f, g>`` for n = 0..N."""
    v = space.weights * np.asarray(f, dtype=float) * np.asarray(g, dtype=float)
    signs, logs = np.zeros(N + 1), np.full(N + 1, -math.inf)
    for n in range(N + 1):
        s, l = _node_logs(space.nodes, v, power * n)
        signs[n], logs[n] = signed_logsumexp(l, s)
    return signs, logs


def orbit_sup(f, g, space: DiscretizedSpace, N: int, power: int = 1,
              threshold: float = GROWTH_THRESHOLD) -> Certificate:
    """Growth certificate for ``n -> <M^(power n) f, g>``, or ``Bounded``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    signs, logs = orbit_sequence(f, g, space, N, power)
    return certify_sequence(signs, logs, N, threshold)


def functional_measure(f, g, space: DiscretizedSpace) -> Measure:
    """The signed atomic measure ``w f g`` whose moments are the orbit pairings."""
    return Measure.from_atoms(space.nodes, space.weights * np.asarray(f) * np.asarray(g))


@dataclass(frozen=True)
class TrialResult:
    trial: int
    certificate: Certificate

    @property
    def certified(self) -> bool:
        return isinstance(self.certificate, MomentGrowthCertificate)

    def to_dict(self) -> dict:
        return {"trial": self.trial, **self.certificate.to_dict()}


@dataclass(frozen=True)
class CyclicityVerdict:
    status: str  # "CyclicConsistent" | "NotCyclic" | "Inconclusive"
    trials: tuple
    horizon: int
    trial_count: int
    power: int = 1
    witness: Optional[str] = None
    failing: tuple = ()

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "horizon": self.horizon,
            "trials": self.trial_count,
            "power": self.power,
            "witness": self.witness,
            "failing": list(self.failing),
            "certificates": [t.to_dict() for t in self.trials],
        }


def trial_functional(seed: int, trial: int, size: int) -> np.ndarray:
    """Node values of the functional used in a trial; depends only on (seed, trial)."""
    return np.random.default_rng([int(seed), int(trial)]).standard_normal(size)


def _vector_values(f: Callable, space: DiscretizedSpace) -> np.ndarray:
    fv = space.values(f)
    if not np.all(np.isfinite(fv)):
        raise ValueError("the vector is not finite at every node")
    if np.all(fv == 0):
        raise ZeroVector("the vector vanishes at every node")
    return fv


def odd_power_test(f: Callable, mu: Measure, k: int, N: int, trials: int, seed: int,
                   threshold: float = GROWTH_THRESHOLD, workers: Optional[int] = None) -> CyclicityVerdict:
    """Convex-cyclicity evidence for ``M^k``: growth of ``<x^(k n) f, g>`` for random ``g``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    charge = mu.variation_from(-1.0)
    if charge > 0:
        return CyclicityVerdict("NotCyclic", (), N, trials, k,
                                f"mu([-1, inf)) = {charge!r} > 0")
    if k % 2 == 0:
        return CyclicityVerdict("NotCyclic", (), N, trials, k,
                                f"k = {k} is even: x^(k n) >= 0, so <x^(k n) f, -f> <= 0 for all n")
    space = discretize(mu, k * N)
    try:
        fv = _vector_values(f, space)
    except ZeroVector:
        return CyclicityVerdict("NotCyclic", (), N, trials, k, "f = 0 a.e.")

    def run(t):
        g = trial_functional(seed, t, space.nodes.size)
        return TrialResult(t, orbit_sup(fv, g, space, N, k, threshold))

    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = tuple(pool.map(run, range(trials)))
    failing = tuple(r.trial for r in results if not r.certified)
    status = "Inconclusive" if failing else "CyclicConsistent"
    return CyclicityVerdict(status, results, N, trials, k, None, failing)


def convex_cyclic_test(f: Callable, mu: Measure, N: int, trials: int, seed: int,
                       threshold: float = GROWTH_THRESHOLD, workers: Optional[int] = None) -> CyclicityVerdict:
    """Convex-cyclicity evidence for multiplication by ``x`` on ``L2(mu)``."""
    return odd_power_test(f, mu, 1, N, trials, seed, threshold, workers)


def revalidate_verdict(verdict: CyclicityVerdict, f: Callable, mu: Measure, seed: int,
                       rtol: float = 1e-9) -> bool:
    """Recompute every certified pairing through ``moment`` of an atomic measure."""
    space = discretize(mu, verdict.power * verdict.horizon)
    fv = space.values(f)
    for t in verdict.trials:
        if not t.certified:
            return False
        g = trial_functional(seed, t.trial, space.nodes.size)
        nu = functional_measure(fv, g, space)
        if not t.certificate.revalidate(lambda n: moment(nu, verdict.power * n), rtol):
            return False
    return True


# ------------------------------------------------------------ invariant sets


_SETS = {
    # closed region of the constraint, membership test at nodes, a scalar multiple that leaves the set
    "A": ((-1.0, 1.0), lambda h: np.abs(h) <= 1.0 + 1e-15, 2.0, "|f| <= 1 on [-1, 1]"),
    "B": ((0.0, math.inf), lambda h: h >= 0.0, -1.0, "f >= 0 on [0, inf)"),
}


def _region_mass(mu: Measure, lo: float, hi: float) -> float:
    """``mu([lo, hi])`` for a positive measure."""
    at_lo = math.fsum(w for x, w in mu.atoms if x == lo)
    return max(distribution(mu, hi) - distribution(mu, lo) + at_lo, 0.0)


@dataclass(frozen=True)
class InvariantSetReport:
    set_id: str
    definition: str
    region_nodes: int
    region_mass: float
    members_tested: int
    invariant: bool
    trivial: bool
    witness: Optional[dict]

    @property
    def status(self) -> str:
        if self.trivial:
            return "Trivial"
        return "Invariant" if self.invariant else "NotInvariant"

    def to_dict(self) -> dict:
        return {
            "set": self.set_id,
            "definition": self.definition,
            "status": self.status,
            "region_nodes": self.region_nodes,
            "region_mass": self.region_mass,
            "members_tested": self.members_tested,
            "invariant": self.invariant,
            "trivial": self.trivial,
            "witness": self.witness,
        }


def invariant_set_probe(mu: Measure, set_id: str, samples: int = 64, seed: int = 0,
                        degree: int = 32) -> InvariantSetReport:
    """Check ``M``-invariance of set A or B on its defining nodes and look for a non-subspace witness.

    Members are random normal fields made admissible on the region
    (clipped to [-1, 1] for A, made nonnegative for B).
    """
    if set_id not in _SETS:
        raise ValueError(f"unknown set {set_id!r}; expected 'A' or 'B'")
    (lo, hi), member, scalar, definition = _SETS[set_id]
    space = discretize(mu, degree)
    x = space.nodes
    region = (x >= lo) & (x <= hi)
    mass = _region_mass(mu, lo, hi)
    rng = np.random.default_rng([int(seed), ord(set_id)])
    invariant = True
    for _ in range(samples):
        h = rng.standard_normal(x.size)
        h[region] = np.clip(h[region], -1.0, 1.0) if set_id == "A" else np.abs(h[region])
        if not np.all(member((x * h)[region])):
            invariant = False
            break
    witness = None
    if mass > 0 and np.any(region):
        h = np.ones_like(x)
        bad = region & ~member(scalar * h)
        if np.any(bad):
            j = int(np.flatnonzero(bad)[0])
            witness = {"h": "1", "scalar": scalar, "node": float(x[j]),
                       "value": float(scalar * h[j]), "region_mass": mass}
    return InvariantSetReport(set_id, definition, int(region.sum()), mass, samples, invariant,
                              mass == 0, witness)


def scalar_closure_demo(f: Callable, c: float, mu: Measure, N: int, tol: float = 1e-8,
                        max_iter: int = 1000) -> ApproximationResult:
    """Best ``||p f - c f||`` in L2(mu) over convex-polynomials of degree ``N``."""
    c = float(c)
    if c == 0:
        raise ValueError("c must be nonzero")
    return weighted_density_probe(mu, f, lambda x: c * np.asarray(f(x), dtype=float), N,
                                  tol=tol, max_iter=max_iter)


__all__ = [
    "DiscretizedSpace", "discretize", "orbit_sequence", "orbit_sup", "functional_measure",
    "TrialResult", "CyclicityVerdict", "trial_functional", "odd_power_test", "convex_cyclic_test",
    "revalidate_verdict", "InvariantSetReport", "invariant_set_probe", "scalar_closure_demo",
]
