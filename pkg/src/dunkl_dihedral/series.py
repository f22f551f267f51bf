"""Power-series solution of the orbit differential system and the generating
function of the kernel components.

The 2x2 first-order system driven by the rational sums g, g_s has a unique
holomorphic solution vanishing at the origin; its coefficients satisfy a
convolution recursion seeded by (2n/gamma, 0).  The generating function
combines the seed with the solution's components, and the degree-m kernel
component is the m-th Cauchy-product coefficient of the generating function
against 1/(1 - z<x,y>).  When x or y lies on the base mirror axis both the
solution and the generating function collapse to closed product forms.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .dihedral import DihedralGroup, OrbitPairings, PlanePoint, is_sigma_invariant, orbit_pairings
from .errors import DomainError
from .polyalg import ParameterK, pochhammer_table, rising_factorials


@dataclass(frozen=True)
class SeriesData:
    """Truncated series data for one argument pair.

    B[p] are the 2x2 convolution matrices for p = 0..order-1, A[p] the
    2-vector coefficients for p = 0..order (A[0] is the recursion seed, not a
    term of the vanishing-at-zero solution), and phi[p] the generating-
    function coefficients: phi[0] = 2n/gamma, phi[p] = A[p][0] - A[p][1].
    """

    order: int
    B: np.ndarray  # (order, 2, 2) complex
    A: np.ndarray  # (order + 1, 2) complex
    phi: np.ndarray  # (order + 1,) complex


@dataclass(frozen=True)
class RadiusGuard:
    """Safe evaluation radius for the series: rho_default is half the
    guaranteed radius of convergence 1/(delta * a), or infinity when the
    orbit bound vanishes."""

    a_bound: float
    delta: float
    rho_default: float

    def __post_init__(self):
        if self.delta < 1.0:
            raise DomainError("radius-safety constant must be >= 1")


def radius_guard(delta: float, a_bound: float) -> RadiusGuard:
    rho = math.inf if a_bound == 0.0 else 1.0 / (2.0 * delta * a_bound)
    return RadiusGuard(a_bound=a_bound, delta=delta, rho_default=rho)


def default_order(m: int) -> int:
    """Default truncation order when targeting the degree-m component."""
    return max(2 * m, 40)


def b_matrix(P: ParameterK, orbit: OrbitPairings, p: int) -> np.ndarray:
    """Order-p convolution matrix from the (p+1)-th power sums of the orbit
    pairings: (gamma/2n) * [[S+, -S-], [S-, -S+]]."""
    if p < 0:
        raise DomainError("matrix order p must be nonnegative")
    rp = np.sum(orbit.rot_pairings ** (p + 1))
    sp = np.sum(orbit.refl_pairings ** (p + 1))
    s_plus = rp + sp
    s_minus = rp - sp
    pref = P.gamma / (2.0 * P.n)
    return pref * np.array([[s_plus, -s_minus], [s_minus, -s_plus]])


def a_coeffs(P: ParameterK, orbit: OrbitPairings, Pmax: int) -> SeriesData:
    """Series data through order Pmax.

    A[0] = (2n/gamma, 0); for p >= 1,
    A[p] = diag(1/p, 1/(p+2*gamma)) * sum_{i<p} B[p-1-i] A[i].
    The orbit sum rule forces B[0] ~ 0 and hence A[1] ~ 0.
    """
    if Pmax < 0:
        raise DomainError("truncation order must be nonnegative")
    P.require_regular()
    n, g = P.n, P.gamma

    if Pmax >= 1:
        rot_pows = orbit.rot_pairings[None, :] ** np.arange(1, Pmax + 1)[:, None]
        refl_pows = orbit.refl_pairings[None, :] ** np.arange(1, Pmax + 1)[:, None]
        rp = rot_pows.sum(axis=1)
        sp = refl_pows.sum(axis=1)
    else:
        rp = sp = np.zeros(0, dtype=complex)
    pref = g / (2.0 * n)
    B = np.empty((Pmax, 2, 2), dtype=complex)
    for p in range(Pmax):
        s_plus, s_minus = rp[p] + sp[p], rp[p] - sp[p]
        B[p] = pref * np.array([[s_plus, -s_minus], [s_minus, -s_plus]])

    A = np.zeros((Pmax + 1, 2), dtype=complex)
    A[0] = (2.0 * n / g, 0.0)
    for p in range(1, Pmax + 1):
        acc = np.zeros(2, dtype=complex)
        for i in range(p):
            acc += B[p - 1 - i] @ A[i]
        A[p, 0] = acc[0] / p
        A[p, 1] = acc[1] / (p + 2 * g)

    phi = np.empty(Pmax + 1, dtype=complex)
    phi[0] = 2.0 * n / g
    phi[1:] = A[1:, 0] - A[1:, 1]
    return SeriesData(order=Pmax, B=B, A=A, phi=phi)


def g_values(orbit: OrbitPairings, z: complex) -> tuple[complex, complex]:
    """The rational driving sums (g(z), g_s(z)) of the differential system."""
    z = complex(z)
    denom_rot = 1.0 - z * orbit.rot_pairings
    denom_refl = 1.0 - z * orbit.refl_pairings
    if np.min(np.abs(denom_rot)) < 1e-14 or np.min(np.abs(denom_refl)) < 1e-14:
        raise DomainError(f"z = {z} hits a pole of the orbit rational sums")
    rot = np.sum(orbit.rot_pairings / denom_rot)
    refl = np.sum(orbit.refl_pairings / denom_refl)
    return complex(rot + refl), complex(rot - refl)


def eval_q(S: SeriesData, z: complex) -> np.ndarray:
    """The truncated vanishing-at-zero solution Q(z) = sum_{p>=1} A[p] z^p."""
    z = complex(z)
    q = np.zeros(2, dtype=complex)
    for p in range(S.order, 0, -1):
        q = (q + S.A[p]) * z
    return q


def eval_q_prime(S: SeriesData, z: complex) -> np.ndarray:
    z = complex(z)
    q = np.zeros(2, dtype=complex)
    for p in range(S.order, 1, -1):
        q = (q + p * S.A[p]) * z
    if S.order >= 1:
        q = q + S.A[1]
    return q


def eval_phi(S: SeriesData, z: complex) -> complex:
    """Generating-function value by Horner on the phi coefficients."""
    z = complex(z)
    acc = 0.0 + 0.0j
    for p in range(S.order, -1, -1):
        acc = acc * z + S.phi[p]
    return complex(acc)


def residual_check(
    P: ParameterK, orbit: OrbitPairings, S: SeriesData, z: complex
) -> float:
    """Euclidean norm of the differential-system residual of the truncated
    solution at z.  Test instrumentation, not a production path."""
    z = complex(z)
    if z == 0:
        raise DomainError("residual is evaluated away from the origin")
    g_val, gs_val = g_values(orbit, z)
    q = eval_q(S, z)
    qp = eval_q_prime(S, z)
    lam = (P.gamma / (2.0 * P.n)) * np.array(
        [[g_val, -gs_val], [gs_val, -g_val]], dtype=complex
    )
    rhs = np.array([g_val, gs_val], dtype=complex) + lam @ q
    rhs[1] -= (2.0 * P.gamma / z) * q[1]
    return float(np.linalg.norm(qp - rhs))


def em_genseries(
    P: ParameterK, orbit: OrbitPairings, xy_pair: complex, S: SeriesData, m: int
) -> complex:
    """Degree-m component as the m-th Cauchy-product coefficient of
    (gamma/2n) * Phi against the geometric series of <x,y>."""
    if m < 0:
        raise DomainError("component degree m must be nonnegative")
    if m > S.order:
        raise DomainError(
            f"degree {m} exceeds the series truncation order {S.order}",
            code="range-error",
        )
    s = complex(xy_pair)
    acc = 0.0 + 0.0j
    for j in range(m + 1):
        acc = acc * s + S.phi[j]  # Horner over sum_j phi[j] s^(m-j)
    poch = pochhammer_table(P, m).values[m]
    return complex((P.gamma / (2.0 * P.n)) * acc / poch)


def _require_sigma_invariant(orbit: OrbitPairings) -> None:
    if not is_sigma_invariant(orbit):
        raise DomainError(
            "closed product forms require x or y on the base mirror axis "
            "(rotation and reflection pairings must agree as multisets)"
        )


def phi_sigma_invariant(P: ParameterK, orbit: OrbitPairings, z: complex) -> complex:
    """Closed generating function for mirror-axis arguments:
    (2/k) * prod_i (1 - z c_i)^(-k) over the rotation pairings c_i,
    with the principal branch of each power."""
    P.require_regular()
    _require_sigma_invariant(orbit)
    z = complex(z)
    factors = 1.0 - z * orbit.rot_pairings
    if np.any(np.abs(z * orbit.rot_pairings) >= 1.0):
        raise DomainError(
            "closed generating function evaluated outside the unit-pairing disk"
        )
    if np.any((factors.real <= 0) & (np.abs(factors.imag) < 1e-14)):
        raise DomainError("1 - z*c touches the branch cut of the principal power")
    log_sum = np.sum(np.log(factors))
    return complex((2.0 / P.k) * cmath.exp(-P.k * log_sum))


def em_closed_sigma(
    G: DihedralGroup, P: ParameterK, x: PlanePoint, y: PlanePoint, m: int
) -> complex:
    """Closed-form degree-m component for mirror-axis arguments.

    The inner multinomial sum over compositions is computed by convolving the
    n univariate binomial series sum_v (k)_v / v! c_i^v z^v up to order m,
    which produces identical coefficients at polynomial cost.
    """
    if m < 0:
        raise DomainError("component degree m must be nonnegative")
    P.require_regular()
    orbit = orbit_pairings(G, x, y)
    _require_sigma_invariant(orbit)

    inner = np.zeros(m + 1, dtype=complex)
    inner[0] = 1.0
    k_rising = rising_factorials(P.k, m)
    factorials = np.array([math.factorial(v) for v in range(m + 1)], dtype=float)
    for c in orbit.rot_pairings:
        term = (k_rising / factorials) * np.power(c, np.arange(m + 1))
        inner = np.convolve(inner, term)[: m + 1]

    s = orbit.xy
    acc = 0.0 + 0.0j
    for j in range(m + 1):
        acc = acc * s + inner[j]
    poch = pochhammer_table(P, m).values[m]
    return complex(acc / poch)
