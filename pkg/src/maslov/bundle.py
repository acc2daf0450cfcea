"""The Z4 side of the story: holonomy i^mu, equivariant section tables,
quadratic phase charts, and the chart-transition cocycle.

All unit-complex quantities are exact: powers of i come from an integer
lookup table and transition factors are integer exponents of exp(i pi/4),
which the parity of signature differences always makes land in {1, i, -1, -i}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateFormError,
    DimensionMismatchError,
    IncompatibleChartsError,
    InternalNumericsError,
    InvalidInputError,
)
from . import symplectic_core as core
from .symplectic_core import (
    LagrangianFrame,
    SymplecticSpace,
    SymQuadForm,
    _null_space,
    graph_form,
    same_subspace,
    signature,
)

I_POWERS = (1 + 0j, 1j, -1 + 0j, -1j)


@dataclass(frozen=True)
class Holonomy:
    """The image i^mu of a Maslov index value in the Z4 representation."""

    mu: int

    @property
    def exponent(self) -> int:
        return self.mu % 4

    @property
    def value(self) -> complex:
        return I_POWERS[self.mu % 4]


def holonomy_value(mu: int) -> complex:
    """i^mu, exact; periodic with period 4."""
    return I_POWERS[int(mu) % 4]


def _i_pow_times(k: int, z: tuple[int, int]) -> tuple[int, int]:
    # multiply the Gaussian integer z by i^k, exactly
    a, b = z
    for _ in range(k % 4):
        a, b = -b, a
    return a, b


def check_equivariance(f, mu_table) -> bool:
    """Whether a table of section values transforms by i^(-mu) under deck
    translation.

    ``f`` maps (point, loop) pairs to Gaussian-integer values (re, im); the
    empty-string loop labels the base copy of a point.  Returns True iff
    every translated entry equals i^(-mu(loop)) times its base entry, in
    exact integer arithmetic.
    """
    for key, val in f.items():
        if (not isinstance(key, tuple) or len(key) != 2
                or not all(isinstance(k, str) for k in key)):
            raise InvalidInputError(f"table key {key!r} is not a (point, loop) pair")
        try:
            ok = len(val) == 2 and all(float(v) == int(v) for v in val)
        except (TypeError, ValueError):
            ok = False
        if not ok:
            raise InvalidInputError(
                f"value {val!r} at {key!r} is not a Gaussian integer"
            )
    for (point, loop), val in f.items():
        if loop == "":
            continue
        base = f.get((point, ""))
        if base is None:
            raise InvalidInputError(f"missing base value for point {point!r}")
        if loop not in mu_table:
            raise InvalidInputError(f"missing index for loop {loop!r}")
        expected = _i_pow_times(-int(mu_table[loop]), (int(base[0]), int(base[1])))
        if (int(val[0]), int(val[1])) != expected:
            return False
    return True


def _symmetric_block(name: str, m, size: int) -> np.ndarray:
    b = np.asarray(m, dtype=float)
    if b.shape != (size, size):
        raise DimensionMismatchError(f"{name} must be {size}x{size}, got {b.shape}")
    if not np.allclose(b, b.T, atol=1e-8 * max(1.0, float(np.max(np.abs(b))))):
        raise InvalidInputError(f"{name} must be symmetric")
    return 0.5 * (b + b.T)


@dataclass(frozen=True, eq=False)
class PhaseChart:
    """A quadratic nondegenerate phase function, via its constant Hessian
    blocks: x-x (n x n), x-theta (n x N) and theta-theta (N x N).

    Nondegeneracy means the theta-derivative block [theta-x | theta-theta]
    has full row rank, which also makes the associated tangent frame below a
    genuine rank-n Lagrangian frame.
    """

    n: int
    big_n: int
    hess_xx: np.ndarray
    hess_xtheta: np.ndarray
    hess_thetatheta: np.ndarray

    def __post_init__(self):
        if self.n < 1 or self.big_n < 1:
            raise InvalidInputError("chart dimensions must be positive")
        xx = _symmetric_block("hess_xx", self.hess_xx, self.n)
        tt = _symmetric_block("hess_thetatheta", self.hess_thetatheta, self.big_n)
        xt = np.asarray(self.hess_xtheta, dtype=float)
        if xt.shape != (self.n, self.big_n):
            raise DimensionMismatchError(
                f"hess_xtheta must be {self.n}x{self.big_n}, got {xt.shape}"
            )
        theta_rows = np.hstack([xt.T, tt])
        svals = np.linalg.svd(theta_rows, compute_uv=False)
        if svals[-1] <= core.TOL_RANK * max(svals[0], 1.0):
            raise InvalidInputError(
                "degenerate phase: the theta-derivative rows are rank deficient"
            )
        for name, arr in (("hess_xx", xx), ("hess_xtheta", xt),
                          ("hess_thetatheta", tt)):
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def theta_signature(self) -> int:
        return signature(SymQuadForm(self.hess_thetatheta))


@dataclass(frozen=True, eq=False)
class TestFunction:
    """A quadratic test function through its Hessian; its differential graph
    supplies the probing Lagrangian."""

    hess: np.ndarray

    def __post_init__(self):
        raw = np.atleast_2d(np.asarray(self.hess, dtype=float))
        h = _symmetric_block("hess", raw, raw.shape[0])
        h = h.copy()
        h.flags.writeable = False
        object.__setattr__(self, "hess", h)

    @property
    def n(self) -> int:
        return self.hess.shape[0]

    def frame(self, space: SymplecticSpace) -> LagrangianFrame:
        return LagrangianFrame.from_symmetric(space, self.hess)


def chart_lagrangian(chart: PhaseChart) -> LagrangianFrame:
    """The tangent Lagrangian the chart describes: vectors
    (X, hess_xx X + hess_xtheta A) constrained by
    hess_thetax X + hess_thetatheta A = 0."""
    constraint = np.hstack([chart.hess_xtheta.T, chart.hess_thetatheta])
    kernel = _null_space(constraint)  # (n + N) x n
    if kernel.shape[1] != chart.n:
        raise InternalNumericsError(
            f"chart kernel has dimension {kernel.shape[1]}, expected {chart.n}"
        )
    kx, ka = kernel[: chart.n], kernel[chart.n:]
    xi = chart.hess_xx @ kx + chart.hess_xtheta @ ka
    return LagrangianFrame(SymplecticSpace(chart.n), np.vstack([kx, xi]))


def q_psi(chart: PhaseChart, psi: TestFunction,
          tol: float | None = None) -> SymQuadForm:
    """The (n+N) x (n+N) symmetric pairing of a chart against a test
    function: [[hess_xx - psi, hess_xtheta], [hess_thetax, hess_thetatheta]].

    Nondegenerate exactly when the test graph is transversal to the chart's
    Lagrangian."""
    if psi.n != chart.n:
        raise DimensionMismatchError(
            f"test function is {psi.n}-dimensional, chart needs {chart.n}"
        )
    top = np.hstack([chart.hess_xx - psi.hess, chart.hess_xtheta])
    bot = np.hstack([chart.hess_xtheta.T, chart.hess_thetatheta])
    block = np.vstack([top, bot])
    if tol is None:
        return SymQuadForm(block)
    return SymQuadForm(block, tol)


def check_signature_relation(chart: PhaseChart,
                             psi: TestFunction) -> tuple[int, int, bool]:
    """Both sides of the chart signature identity:
    sgn Q_psi  versus  sgn Q(lambda, alpha; vertical) + sgn hess_thetatheta.

    Returns (lhs, rhs, equal); raises if Q_psi is degenerate, i.e. the test
    graph touches the chart's Lagrangian."""
    q = q_psi(chart, psi)
    if not q.nondegenerate:
        raise DegenerateFormError(
            "Q_psi is degenerate: the test graph is not transversal to the "
            "chart's Lagrangian"
        )
    space = SymplecticSpace(chart.n)
    lam = chart_lagrangian(chart)
    alpha = psi.frame(space)
    vertical = LagrangianFrame.vertical(space)
    lhs = signature(q)
    rhs = signature(graph_form(lam, alpha, vertical)) + chart.theta_signature
    return lhs, rhs, lhs == rhs


def transition_exponent(chart_a: PhaseChart, chart_b: PhaseChart,
                        psi: TestFunction) -> int:
    """Exponent d (mod 8) of exp(i pi/4) converting section values in
    chart_a to chart_b: d = sgn theta-block(a) - sgn theta-block(b).

    Both charts must describe the same Lagrangian and admit the test
    function; d is then even, so the factor lies in {1, i, -1, -i}."""
    if chart_a.n != chart_b.n:
        raise DimensionMismatchError("charts live over different base dimensions")
    lam_a = chart_lagrangian(chart_a)
    lam_b = chart_lagrangian(chart_b)
    if not same_subspace(lam_a, lam_b):
        raise IncompatibleChartsError(
            "charts do not describe the same tangent Lagrangian"
        )
    for name, chart in (("chart_a", chart_a), ("chart_b", chart_b)):
        if not q_psi(chart, psi).nondegenerate:
            raise DegenerateFormError(
                f"test function is not admissible for {name} (Q_psi degenerate)"
            )
    d = chart_a.theta_signature - chart_b.theta_signature
    if d % 2:
        raise InternalNumericsError(
            "signature difference between compatible charts came out odd"
        )
    return d % 8


def transition_factor(chart_a: PhaseChart, chart_b: PhaseChart,
                      psi: TestFunction) -> complex:
    """exp(i pi/4 (sgn theta-block(a) - sgn theta-block(b))), exact."""
    d = transition_exponent(chart_a, chart_b, psi)
    return I_POWERS[(d // 2) % 4]
