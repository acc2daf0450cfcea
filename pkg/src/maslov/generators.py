"""Seeded generators for frames, loops and charts with known ground truth.

Loops are built as unitary orbits of the horizontal plane: a diagonal block
of phases exp(i pi k_j t) applied to the horizontal frame (optionally
conjugated on the left by a fixed random unitary) closes up because the
endpoint matrix is real orthogonal, and the squared-determinant winding is
exactly sum(k_j) by construction.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInputError, TransversalityError
from .index import LagrangianPath
from .bundle import PhaseChart, TestFunction, q_psi
from .symplectic_core import (
    LagrangianFrame,
    SymplecticSpace,
    graph_coords,
    graph_frame,
    intersection_dim,
    j_frame,
    rotate_frame,
)


def rng_for(seed: int, trial: int | None = None) -> np.random.Generator:
    """Deterministic per-trial stream: seed-splitting by (seed, trial)."""
    if trial is None:
        return np.random.default_rng(seed)
    return np.random.default_rng([seed, trial])


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-ish unitary from the QR of a complex Gaussian matrix, with the
    R-diagonal phase fixed so the result is deterministic."""
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    phases = d / np.abs(d)
    return q * phases


def frame_from_unitary(space: SymplecticSpace, u: np.ndarray) -> LagrangianFrame:
    """The Lagrangian subspace u . horizontal, as the frame [Re u; Im u]."""
    cols = np.vstack([u.real, u.imag])
    return LagrangianFrame(space, cols, check=False)


def random_lagrangian(space: SymplecticSpace,
                      rng: np.random.Generator) -> LagrangianFrame:
    return frame_from_unitary(space, random_unitary(space.n, rng))


def random_lagrangian_clear_of(space: SymplecticSpace, rng: np.random.Generator,
                               others, min_gap: float = 2e-2,
                               attempts: int = 64) -> LagrangianFrame:
    """Random Lagrangian transversal to every frame in ``others``, with a
    singular-value margin so downstream signatures stay safely integral."""
    others = list(others)
    for _ in range(attempts):
        cand = random_lagrangian(space, rng)
        ok = True
        for f in others:
            svals = np.linalg.svd(np.hstack([cand.columns, f.columns]),
                                  compute_uv=False)
            if svals[-1] < min_gap * svals[0]:
                ok = False
                break
        if ok:
            return cand
    raise InvalidInputError(
        f"could not draw a frame clear of {len(others)} others "
        f"in {attempts} attempts"
    )


def _loop_resolution(requested: int, k: np.ndarray) -> int:
    if requested < 16:
        raise InvalidInputError(f"resolution must be >= 16, got {requested}")
    total = int(abs(np.sum(k)))
    peak = int(np.max(np.abs(k))) if k.size else 0
    # keep det^2 phase steps well below pi/2 and adjacent samples chart-close
    return max(requested, 16, 5 * total, 5 * peak)


def _phase_loop(space: SymplecticSpace, k: np.ndarray, resolution: int,
                left: np.ndarray | None = None) -> LagrangianPath:
    res = _loop_resolution(resolution, k)
    ts = np.linspace(0.0, 1.0, res + 1)
    frames = []
    for t in ts:
        d = np.diag(np.exp(1j * np.pi * k * t))
        u = d if left is None else left @ d
        frames.append(frame_from_unitary(space, u))
    return LagrangianPath(space, frames, ts, closed=True)


def generator_loop(space: SymplecticSpace, winding: int,
                   resolution: int = 256) -> LagrangianPath:
    """The canonical loop of winding k: first coordinate plane rotated by
    exp(i pi k t), the rest held fixed.  For n = 1, k = 1 this is
    span(cos(pi t), sin(pi t))."""
    k = np.zeros(space.n, dtype=int)
    k[0] = int(winding)
    return _phase_loop(space, k, resolution)


def _winding_split(winding: int, n: int, rng: np.random.Generator) -> np.ndarray:
    k = np.zeros(n, dtype=int)
    if n == 1:
        k[0] = int(winding)
        return k
    k += rng.integers(-2, 3, size=n)
    k[0] += int(winding) - int(k.sum())  # first slot absorbs the difference
    return k


def unitary_loop(space: SymplecticSpace, winding: int, resolution: int = 256,
                 rng: np.random.Generator | None = None) -> LagrangianPath:
    """A loop with prescribed total winding: random phase split across the
    diagonal, conjugated by a fixed random unitary."""
    rng = rng if rng is not None else rng_for(0)
    k = _winding_split(winding, space.n, rng)
    left = random_unitary(space.n, rng)
    return _phase_loop(space, k, resolution, left)


def random_loop(space: SymplecticSpace, resolution: int = 256,
                rng: np.random.Generator | None = None,
                max_winding: int = 3) -> tuple[LagrangianPath, int]:
    """A random loop together with its (known) winding number."""
    rng = rng if rng is not None else rng_for(0)
    winding = int(rng.integers(-max_winding, max_winding + 1))
    return unitary_loop(space, winding, resolution, rng), winding


def random_symmetric(m: int, rng: np.random.Generator,
                     scale: float = 1.0) -> np.ndarray:
    a = rng.standard_normal((m, m))
    return scale * 0.5 * (a + a.T)


def random_nondegenerate_symmetric(m: int, rng: np.random.Generator,
                                   min_rel: float = 1e-2,
                                   attempts: int = 64) -> np.ndarray:
    for _ in range(attempts):
        s = random_symmetric(m, rng)
        eigs = np.abs(np.linalg.eigvalsh(s))
        if eigs.min() > min_rel * eigs.max():
            return s
    raise InvalidInputError("could not draw a well-conditioned symmetric matrix")


def random_isotropic(space: SymplecticSpace, m: int,
                     rng: np.random.Generator):
    """Random isotropic subspace as the first m columns of a random
    Lagrangian frame."""
    from .symplectic_core import IsotropicSubspace

    frame = random_lagrangian(space, rng)
    return IsotropicSubspace(space, frame.columns[:, :m])


def signed_spectrum(size: int, positives: int,
                    rng: np.random.Generator) -> np.ndarray:
    """Symmetric matrix with prescribed signature 2*positives - size, via a
    random orthogonal conjugation of a +/- diagonal."""
    signs = np.array([1.0] * positives + [-1.0] * (size - positives))
    scales = rng.uniform(0.5, 1.5, size=size)
    q, _ = np.linalg.qr(rng.standard_normal((size, size)))
    return (q * (signs * scales)) @ q.T


def chart_for_graph(s_lambda: np.ndarray, big_n: int,
                    rng: np.random.Generator,
                    theta_positives: int | None = None) -> PhaseChart:
    """A quadratic phase chart whose tangent Lagrangian is the graph
    {xi = S x}, with an invertible theta-block of prescribed inertia.

    Any x-theta coupling works once the x-x block absorbs the induced
    correction, so charts for the same subspace can be drawn freely.
    """
    s = np.asarray(s_lambda, dtype=float)
    n = s.shape[0]
    if theta_positives is None:
        theta_positives = int(rng.integers(0, big_n + 1))
    tt = signed_spectrum(big_n, theta_positives, rng)
    xt = rng.standard_normal((n, big_n))
    xx = s + xt @ np.linalg.solve(tt, xt.T)
    return PhaseChart(n, big_n, 0.5 * (xx + xx.T), xt, tt)


def random_test_function(chart: PhaseChart, rng: np.random.Generator,
                         min_rel: float = 1e-3,
                         attempts: int = 64) -> TestFunction:
    """A test function whose pairing with the chart is safely nondegenerate."""
    for _ in range(attempts):
        psi = TestFunction(random_symmetric(chart.n, rng))
        q = q_psi(chart, psi)
        eigs = np.abs(q._eigs)
        if eigs.min() > min_rel * eigs.max():
            return psi
    raise InvalidInputError("could not draw an admissible test function")


def interpolation_arcs(a: LagrangianFrame, b: LagrangianFrame,
                       count: int = 3, resolution: int = 96):
    """Several genuinely different sampled paths from a to b, built in
    rotated chart complements."""
    arcs = []
    for theta in (0.0, 0.15, -0.2, 0.3, -0.35, 0.45):
        if len(arcs) == count:
            break
        delta = rotate_frame(j_frame(a), theta)
        if intersection_dim(delta, a) or intersection_dim(delta, b):
            continue
        base = j_frame(delta)
        try:
            ma = graph_coords(a, base)
            mb = graph_coords(b, base)
        except TransversalityError:
            continue
        ss = np.linspace(0.0, 1.0, resolution)
        frames = [graph_frame(base, (1 - s) * ma + s * mb) for s in ss]
        arcs.append(LagrangianPath(a.space, frames))
    if len(arcs) < count:
        raise InvalidInputError("could not build enough distinct arcs")
    return arcs
