"""Maslov-index engines over sampled paths of Lagrangian subspaces.

Two independent computations of the same integer: the winding degree of the
squared-determinant phase along a closed path, and half the sum of
crossing-form signature jumps against a reference Lagrangian.  On top of
them: closing an open path inside a transversal chart, the Hormander index
(signature formula and path definition), and the relative index of a loop
pair joined by a connecting path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    BetaSelectionError,
    ConcatenationError,
    DimensionMismatchError,
    InconsistentLoopError,
    InvalidInputError,
    MethodDomainError,
    NonRegularCrossingError,
    PreconditionError,
    ResolutionError,
    TransversalityError,
    UndersampledPathError,
)
from .symplectic_core import (
    LagrangianFrame,
    SymplecticSpace,
    det_squared_phase,
    graph_coords,
    graph_frame,
    graph_form,
    intersection_dim,
    j_frame,
    rotate_frame,
    same_subspace,
    signature,
)

PHASE_STEP_LIMIT = math.pi / 2   # resolution condition on det^2 phase steps
WINDING_RESIDUAL = 0.05          # max distance of the raw winding to an integer
REFINE_WIDTH = 1e-10             # golden-section bracket width for crossings
CROSSING_DIM_RTOL = 1e-8         # singular-value cut at a refined crossing
DEFAULT_TOL_CROSS = 1e-2         # dips below sqrt(tol_cross) get refined
AUTO_THETAS = (0.1, -0.1, 0.2, -0.2, 0.3, -0.3, 0.4, -0.4)

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class CrossingEvent:
    """A localized intersection of a path with the cycle of non-transversal
    Lagrangians: parameter, intersection dimension there, and (once computed)
    the signature jump sgn Q(t+) - sgn Q(t-)."""

    t_star: float
    crossing_dim: int
    jump: int | None = None


class LagrangianPath:
    """A sampled path or loop of Lagrangian subspaces over a grid in [0, 1].

    Between adjacent samples the path is interpolated inside the graph chart
    of the earlier sample, which keeps every interpolated subspace exactly
    Lagrangian and hits both endpoints.
    """

    __slots__ = ("space", "samples", "params", "closed")

    def __init__(self, space: SymplecticSpace, samples, params=None,
                 closed: bool = False):
        samples = tuple(samples)
        if len(samples) < 2:
            raise InvalidInputError("a path needs at least two samples")
        for s in samples:
            if not isinstance(s, LagrangianFrame) or s.space != space:
                raise DimensionMismatchError(
                    "all samples must be LagrangianFrames over the same space"
                )
        if params is None:
            params = np.linspace(0.0, 1.0, len(samples))
        params = np.asarray(params, dtype=float)
        if params.shape != (len(samples),):
            raise InvalidInputError("params must match the number of samples")
        if abs(params[0]) > 1e-12 or abs(params[-1] - 1.0) > 1e-12:
            raise InvalidInputError("params must start at 0 and end at 1")
        if np.any(np.diff(params) <= 0):
            raise InvalidInputError("params must be strictly increasing")
        params = params.copy()
        params[0], params[-1] = 0.0, 1.0
        if closed and not same_subspace(samples[0], samples[-1]):
            raise InvalidInputError(
                "closed path must end on the subspace it started from"
            )
        self.space = space
        self.samples = samples
        self.params = params
        self.params.flags.writeable = False
        self.closed = closed

    @classmethod
    def from_frames(cls, frames, params=None, closed=False) -> "LagrangianPath":
        frames = tuple(frames)
        if not frames:
            raise InvalidInputError("empty frame list")
        return cls(frames[0].space, frames, params, closed)

    def __len__(self):
        return len(self.samples)

    @property
    def start(self) -> LagrangianFrame:
        return self.samples[0]

    @property
    def end(self) -> LagrangianFrame:
        return self.samples[-1]

    def _segment(self, t: float) -> tuple[int, float]:
        k = int(np.searchsorted(self.params, t, side="right") - 1)
        k = min(max(k, 0), len(self.samples) - 2)
        t0, t1 = self.params[k], self.params[k + 1]
        return k, (t - t0) / (t1 - t0)

    def frame_at(self, t: float) -> LagrangianFrame:
        """Evaluate the interpolated path at any t in [0, 1]."""
        if not 0.0 <= t <= 1.0:
            raise InvalidInputError(f"parameter {t} outside [0, 1]")
        k, u = self._segment(t)
        if u <= 1e-14:
            return self.samples[k]
        if u >= 1.0 - 1e-14:
            return self.samples[k + 1]
        base = self.samples[k]
        try:
            m = graph_coords(self.samples[k + 1], base)
        except TransversalityError as exc:
            raise ResolutionError(
                f"samples at t={self.params[k]:.6g} and t={self.params[k+1]:.6g} "
                "are too far apart to interpolate; densify the grid"
            ) from exc
        return graph_frame(base, u * m)

    def reverse(self) -> "LagrangianPath":
        return LagrangianPath(
            self.space,
            tuple(reversed(self.samples)),
            1.0 - self.params[::-1],
            closed=self.closed,
        )


def concatenate_paths(paths) -> LagrangianPath:
    """Join paths end-to-start, reparametrized to [0, 1]; closed iff the
    total start and end span the same subspace."""
    paths = list(paths)
    if not paths:
        raise InvalidInputError("nothing to concatenate")
    space = paths[0].space
    for a, b in zip(paths, paths[1:]):
        if not same_subspace(a.end, b.start):
            raise ConcatenationError(
                "segment endpoints do not match span-wise at a junction"
            )
    k = len(paths)
    frames: list[LagrangianFrame] = []
    params: list[float] = []
    for i, p in enumerate(paths):
        lo, hi = i / k, (i + 1) / k
        seg_params = lo + (hi - lo) * p.params
        start = 1 if i > 0 else 0  # junction sample kept once
        frames.extend(p.samples[start:])
        params.extend(seg_params[start:])
    closed = same_subspace(paths[0].start, paths[-1].end)
    return LagrangianPath(space, frames, np.asarray(params), closed=closed)


def refine_path(path: LagrangianPath, factor: int = 2) -> LagrangianPath:
    """Insert chart-interpolated samples inside every segment."""
    if factor < 2:
        return path
    frames: list[LagrangianFrame] = [path.samples[0]]
    params: list[float] = [path.params[0]]
    for k in range(len(path.samples) - 1):
        t0, t1 = path.params[k], path.params[k + 1]
        for j in range(1, factor):
            t = t0 + (t1 - t0) * j / factor
            frames.append(path.frame_at(t))
            params.append(t)
        frames.append(path.samples[k + 1])
        params.append(t1)
    return LagrangianPath(path.space, frames, np.asarray(params),
                          closed=path.closed)


def constant_loop(frame: LagrangianFrame, resolution: int = 8) -> LagrangianPath:
    return LagrangianPath(frame.space, (frame,) * max(resolution, 2),
                          closed=True)


# -- engine 1: winding of the squared determinant ---------------------------

def phase_steps(gamma: LagrangianPath) -> np.ndarray:
    """Principal-branch increments of arg det^2 between adjacent samples."""
    vals = [det_squared_phase(f) for f in gamma.samples]
    z = np.asarray(vals)
    return np.angle(z[1:] * np.conj(z[:-1]))


def winding_index(gamma: LagrangianPath) -> int:
    """Integer winding number of t -> det^2(gamma(t)) around the circle.

    Phase unwrapping over the sample grid; each step must stay below pi/2
    (resolution condition) and the unwrapped total must land within 0.05 of
    an integer multiple of 2 pi.
    """
    if not gamma.closed:
        raise PreconditionError("winding index needs a closed path")
    steps = phase_steps(gamma)
    worst = int(np.argmax(np.abs(steps)))
    if abs(steps[worst]) >= PHASE_STEP_LIMIT:
        raise UndersampledPathError(
            gamma.params[worst], gamma.params[worst + 1], abs(steps[worst])
        )
    total = float(np.sum(steps)) / (2.0 * math.pi)
    nearest = round(total)
    if abs(total - nearest) >= WINDING_RESIDUAL:
        raise InconsistentLoopError(abs(total - nearest))
    return int(nearest)


# -- engine 2: crossing signature jumps -------------------------------------

def _relative_gap(alpha: LagrangianFrame, frame: LagrangianFrame) -> float:
    svals = np.linalg.svd(np.hstack([alpha.columns, frame.columns]),
                          compute_uv=False)
    return float(svals[-1] / svals[0])


def _golden_min(fn, lo: float, hi: float, width: float) -> tuple[float, float]:
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > width:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = fn(d)
    t = 0.5 * (a + b)
    return t, fn(t)


def _crossing_dim_at(gamma: LagrangianPath, alpha: LagrangianFrame,
                     t: float) -> int:
    stacked = np.hstack([alpha.columns, gamma.frame_at(t).columns])
    svals = np.linalg.svd(stacked, compute_uv=False)
    return int(np.sum(svals < CROSSING_DIM_RTOL * svals[0]))


def detect_crossings(gamma: LagrangianPath, alpha: LagrangianFrame,
                     tol_cross: float = DEFAULT_TOL_CROSS) -> list[CrossingEvent]:
    """Locate the parameters where gamma(t) meets alpha nontrivially.

    Scans the smallest singular value of [alpha | gamma(t)] over the grid and
    refines every dip below sqrt(tol_cross) by golden-section search; dips
    whose refined point is still transversal are discarded.
    """
    if gamma.space != alpha.space:
        raise DimensionMismatchError("path and reference frame spaces differ")
    if intersection_dim(gamma.start, alpha) != 0:
        raise PreconditionError("gamma(0) is not transversal to alpha; "
                                "rotate the base point of the loop")
    if intersection_dim(gamma.end, alpha) != 0:
        raise PreconditionError("gamma(1) is not transversal to alpha; "
                                "rotate the base point of the loop")
    ts = gamma.params
    gap = np.array([_relative_gap(alpha, f) for f in gamma.samples])
    thresh = math.sqrt(tol_cross)
    last = len(ts) - 1
    brackets = []
    for k in range(len(ts)):
        if gap[k] >= thresh:
            continue
        if (k == 0 or gap[k] <= gap[k - 1]) and (k == last or gap[k] <= gap[k + 1]):
            brackets.append((ts[max(k - 1, 0)], ts[min(k + 1, last)]))

    def srel(t: float) -> float:
        return _relative_gap(alpha, gamma.frame_at(t))

    found: list[tuple[float, int, float]] = []  # (t_star, dim, grid step)
    for lo, hi in brackets:
        t_star, _ = _golden_min(srel, lo, hi, REFINE_WIDTH)
        dim = _crossing_dim_at(gamma, alpha, t_star)
        if dim == 0:
            continue
        step = hi - lo
        if any(abs(t_star - t) < 1e-8 for t, _, _ in found):
            continue  # same crossing reached from a twin grid minimum
        found.append((t_star, dim, step))

    found.sort()
    for (t1, _, s1), (t2, _, _) in zip(found, found[1:]):
        if t2 - t1 < 0.5 * s1:
            raise ResolutionError(
                f"crossings at t={t1:.8f} and t={t2:.8f} are closer than the "
                "grid step; densify the sample grid"
            )
    for t_star, _, step in found:
        _probe_for_twins(srel, t_star, step, thresh)
    return [CrossingEvent(t, d) for t, d, _ in found]


def _probe_for_twins(srel, t_star: float, step: float, thresh: float) -> None:
    # a second sub-threshold dip hiding inside one grid step means the grid
    # cannot separate the crossings
    lo = max(t_star - step, 0.0)
    hi = min(t_star + step, 1.0)
    pts = np.linspace(lo, hi, 17)
    vals = np.array([srel(p) for p in pts])
    spacing = (hi - lo) / 16.0
    for j in range(1, 16):
        if vals[j] >= thresh:
            continue
        if vals[j] <= vals[j - 1] and vals[j] <= vals[j + 1]:
            if abs(pts[j] - t_star) > 1.5 * spacing:
                raise ResolutionError(
                    f"unresolved second crossing near t={pts[j]:.8f} within one "
                    f"grid step of t={t_star:.8f}; densify the sample grid"
                )


def _frame_at_wrapped(gamma: LagrangianPath, t: float) -> LagrangianFrame:
    if 0.0 <= t <= 1.0:
        return gamma.frame_at(t)
    if not gamma.closed:
        raise InvalidInputError(f"parameter {t} outside the open path domain")
    return gamma.frame_at(t % 1.0)


def _auto_beta_candidates(alpha: LagrangianFrame):
    base = j_frame(alpha)
    yield base
    for theta in AUTO_THETAS:
        yield rotate_frame(base, theta)


def _one_sided_jump(gamma: LagrangianPath, alpha: LagrangianFrame,
                    beta: LagrangianFrame | None, event: CrossingEvent) -> int:
    if beta is not None and intersection_dim(beta, alpha):
        raise TransversalityError("beta", "alpha")
    eps0 = 10.0 * REFINE_WIDTH
    beta_starved = False
    for widen in range(4):  # widen x10 up to 3 times
        eps = eps0 * 10.0 ** widen
        f_minus = _frame_at_wrapped(gamma, event.t_star - eps)
        f_plus = _frame_at_wrapped(gamma, event.t_star + eps)
        if intersection_dim(f_minus, alpha) or intersection_dim(f_plus, alpha):
            continue
        near = gamma.frame_at(event.t_star)
        candidates = [beta] if beta is not None else _auto_beta_candidates(alpha)
        found_candidate = False
        for cand in candidates:
            if (intersection_dim(cand, alpha)
                    or intersection_dim(cand, near)
                    or intersection_dim(cand, f_minus)
                    or intersection_dim(cand, f_plus)):
                continue
            found_candidate = True
            q_minus = graph_form(alpha, cand, f_minus)
            q_plus = graph_form(alpha, cand, f_plus)
            if q_minus.kernel_dim or q_plus.kernel_dim:
                break  # forms still see the crossing: widen epsilon
            return signature(q_plus) - signature(q_minus)
        if not found_candidate:
            beta_starved = True
    if beta_starved and beta is None:
        raise BetaSelectionError(
            f"no admissible auxiliary frame near the crossing at "
            f"t={event.t_star:.8f} after {1 + len(AUTO_THETAS)} tries"
        )
    if beta_starved:
        raise TransversalityError("beta", "gamma",
                                  f"near the crossing at t={event.t_star:.8f}")
    raise PreconditionError(
        f"could not take one-sided signatures near t={event.t_star:.8f}: "
        "the path lingers on the crossing cycle"
    )


def crossing_events(gamma: LagrangianPath, alpha: LagrangianFrame,
                    beta: LagrangianFrame | None = None,
                    tol_cross: float = DEFAULT_TOL_CROSS) -> list[CrossingEvent]:
    """Crossings of gamma with the non-transversality cycle of alpha,
    including signature jumps."""
    events = detect_crossings(gamma, alpha, tol_cross)
    out = []
    for ev in events:
        if ev.crossing_dim > 1:
            raise NonRegularCrossingError(ev.t_star, ev.crossing_dim)
        out.append(replace(ev, jump=_one_sided_jump(gamma, alpha, beta, ev)))
    return out


def crossing_index(gamma: LagrangianPath, alpha: LagrangianFrame,
                   beta: LagrangianFrame | None = None,
                   tol_cross: float = DEFAULT_TOL_CROSS) -> int:
    """Half the sum of signature jumps over all crossings with the cycle of
    alpha; equals the winding index on closed loops with regular crossings.

    ``beta=None`` selects an auxiliary frame per crossing automatically.
    """
    if not gamma.closed:
        raise PreconditionError("crossing index needs a closed path")
    events = crossing_events(gamma, alpha, beta, tol_cross)
    total = sum(ev.jump for ev in events)
    if total % 2:
        raise PreconditionError("signature jumps summed to an odd number; "
                                "crossing data is inconsistent")
    return total // 2


# -- closing a path inside a transversal chart -------------------------------

def close_in_transversal_chart(sigma: LagrangianPath, alpha: LagrangianFrame,
                               arc_resolution: int = 64,
                               schedule=None) -> LagrangianPath:
    """Close sigma by joining sigma(1) back to sigma(0) through subspaces
    transversal to alpha (an arc inside the chart of graphs over J alpha)."""
    if sigma.space != alpha.space:
        raise DimensionMismatchError("path and chart frame spaces differ")
    if intersection_dim(sigma.start, alpha) != 0:
        raise TransversalityError("sigma(0)", "alpha")
    if intersection_dim(sigma.end, alpha) != 0:
        raise TransversalityError("sigma(1)", "alpha")
    base = j_frame(alpha)  # graphs over this frame avoid alpha entirely
    m1 = graph_coords(sigma.end, base)
    m0 = graph_coords(sigma.start, base)
    ss = np.linspace(0.0, 1.0, max(arc_resolution, 2))
    if schedule is not None:
        ss = np.asarray([schedule(s) for s in ss], dtype=float)
        ss[0], ss[-1] = 0.0, 1.0
    frames = [graph_frame(base, (1.0 - s) * m1 + s * m0) for s in ss]
    arc = LagrangianPath(sigma.space, frames)
    return concatenate_paths([sigma, arc])


def bracket_index(sigma: LagrangianPath, alpha: LagrangianFrame) -> int:
    """Winding index of sigma closed up transversally to alpha; independent
    of how the closing arc is drawn inside the chart."""
    for arc_res in (64, 256, 1024, 4096):
        closed = close_in_transversal_chart(sigma, alpha, arc_res)
        try:
            return winding_index(closed)
        except UndersampledPathError as exc:
            # only a too-coarse closing arc is fixable here
            if exc.interval[1] <= 0.5 + 1e-9:
                raise
            last = exc
    raise last


# -- Hormander index ----------------------------------------------------------

def _transversal_complement(frames, attempts=AUTO_THETAS) -> LagrangianFrame:
    base = j_frame(frames[0])
    for cand in [base] + [rotate_frame(base, th) for th in attempts]:
        if all(intersection_dim(cand, f) == 0 for f in frames):
            return cand
    raise BetaSelectionError(
        "no common transversal complement found by rotation retries"
    )


def interpolating_path(a: LagrangianFrame, b: LagrangianFrame,
                       resolution: int = 128) -> LagrangianPath:
    """A sampled path from a to b through the chart of graphs over a common
    transversal complement."""
    delta = _transversal_complement((a, b))
    base = j_frame(delta)  # graphs over base stay transversal to delta
    ma = graph_coords(a, base)
    mb = graph_coords(b, base)
    ss = np.linspace(0.0, 1.0, max(resolution, 2))
    frames = [graph_frame(base, (1.0 - s) * ma + s * mb) for s in ss]
    return LagrangianPath(a.space, frames)


def hormander_index(alpha: LagrangianFrame, alpha_p: LagrangianFrame,
                    beta: LagrangianFrame, beta_p: LagrangianFrame,
                    method: str = "signature") -> int:
    """The integer s(alpha, alpha'; beta, beta') measuring how the closing of
    a path from beta to beta' differs when read against alpha' versus alpha.

    method="signature": half-difference of crossing-form signatures; needs
    alpha transversal to alpha'.  method="path": close an explicit path both
    ways and subtract winding indices; works whenever beta, beta' are
    transversal to both alpha and alpha'.
    """
    for name, frame in (("beta", beta), ("beta'", beta_p)):
        if intersection_dim(frame, alpha):
            raise TransversalityError(name, "alpha")
        if intersection_dim(frame, alpha_p):
            raise TransversalityError(name, "alpha'")
    if method == "signature":
        if intersection_dim(alpha, alpha_p):
            raise MethodDomainError(
                "signature method needs alpha transversal to alpha'; "
                "use method='path'"
            )
        s_prime = signature(graph_form(alpha, beta_p, alpha_p))
        s_base = signature(graph_form(alpha, beta, alpha_p))
        diff = s_prime - s_base
        if diff % 2:
            raise PreconditionError("signature difference came out odd")
        return diff // 2
    if method == "path":
        last_exc = None
        for res in (128, 512, 2048):
            sigma = interpolating_path(beta, beta_p, res)
            try:
                return (bracket_index(sigma, alpha_p)
                        - bracket_index(sigma, alpha))
            except UndersampledPathError as exc:
                last_exc = exc
        raise last_exc
    raise InvalidInputError(f"unknown method {method!r}")


# -- relative index of a loop against a reference loop ------------------------

def relative_index(lam: LagrangianPath, lam0: LagrangianPath,
                   sigma: LagrangianPath) -> int:
    """Winding index of lam * sigma * lam0^-1 * sigma^-1.

    lam and lam0 are loops; sigma joins lam(0) to lam0(0).  The value does
    not depend on the choice of sigma, and for a constant vertical lam0 it
    is the plain winding index of lam.
    """
    if not (lam.closed and lam0.closed):
        raise PreconditionError("relative index needs two closed loops")
    if not same_subspace(sigma.start, lam.start):
        raise ConcatenationError("sigma(0) must span lam(0)")
    if not same_subspace(sigma.end, lam0.start):
        raise ConcatenationError("sigma(1) must span lam0(0)")
    loop = concatenate_paths([lam, sigma, lam0.reverse(), sigma.reverse()])
    return winding_index(loop)
