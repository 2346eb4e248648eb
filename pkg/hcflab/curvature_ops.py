"""Algebra on curvature-type tensors u[a, b, c, d] = u_{a b̄ c d̄}.

Covers the first order variations F₁, the quadratic terms F₂ and Q₂(∇T), the
torsion-twisted covariant derivative and Laplacian, and the full right-hand side
of the curvature evolution under the Hermitian curvature flow.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from scipy import linalg

from .exceptions import StructuralError
from .geometry import (FrameJets, PointGeometry, check_metric, compute_frame_jets, covariant_derivative,
                       frame_from_jets, inverse_metric, second_ricci, torsion_quadratic)
from .jets import conjugate, contract
from .metrics import MetricField

logger = logging.getLogger(__name__)

F1_SPAN_THRESHOLD = 1e-8


def _max_abs(x) -> float:
    return float(np.max(np.abs(x), initial=0.0))


def check_curvature_type(u: np.ndarray) -> float:
    """max |u_{a b̄ c d̄} - conj(u_{b ā d c̄})|"""
    u = np.asarray(u)
    if u.ndim != 4 or len(set(u.shape)) != 1:
        raise StructuralError("Curvature tensors are n x n x n x n arrays, got shape {}".format(u.shape))
    return _max_abs(u - np.conj(np.einsum('badc->abcd', u)))


def metric_product(g: np.ndarray) -> np.ndarray:
    """Ω′_{a b̄ c d̄} = g_{a b̄} g_{c d̄}"""
    return np.einsum('ab,cd->abcd', g, g)


@dataclass
class FirstOrderCoefficients(object):
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    a: np.ndarray
    b: np.ndarray

    @classmethod
    def zeros(cls, n: int) -> 'FirstOrderCoefficients':
        return cls(*[np.zeros((n, n), dtype=complex) for _ in range(4)],
                   np.zeros(n, dtype=complex), np.zeros(n, dtype=complex))

    def as_vector(self) -> np.ndarray:
        return np.concatenate([np.ravel(x) for x in (self.A, self.B, self.C, self.D, self.a, self.b)])

    @classmethod
    def from_vector(cls, vector: np.ndarray, n: int) -> 'FirstOrderCoefficients':
        blocks = [vector[k * n * n:(k + 1) * n * n].reshape(n, n) for k in range(4)]
        rest = vector[4 * n * n:]
        a = rest[:n] if rest.size >= n else np.zeros(n, dtype=complex)
        b = rest[n:2 * n] if rest.size >= 2 * n else np.zeros(n, dtype=complex)
        return cls(*blocks, a, b)


def f1_apply(u: np.ndarray, c: FirstOrderCoefficients, du: Optional[np.ndarray] = None,
             dbu: Optional[np.ndarray] = None) -> np.ndarray:
    """A^p_a u_{p b̄ c d̄} + B^s̄_b̄ u_{a s̄ c d̄} + C^p_c u_{a b̄ p d̄} + D^s̄_d̄ u_{a b̄ c s̄}
    + a^p ∇_p u + b^s̄ ∇_s̄ u.

    :param du: ∇u with the direction on the leading axis, needed when `a` is nonzero
    :param dbu: ∇̄u, needed when `b` is nonzero
    """
    result = (np.einsum('pa,pbcd->abcd', c.A, u) + np.einsum('sb,ascd->abcd', c.B, u)
              + np.einsum('pc,abpd->abcd', c.C, u) + np.einsum('sd,abcs->abcd', c.D, u))
    if np.any(c.a != 0):
        if du is None:
            raise StructuralError("First order variation with a != 0 needs the derivative ∇u")
        result = result + np.einsum('p,pabcd->abcd', c.a, du)
    if np.any(c.b != 0):
        if dbu is None:
            raise StructuralError("First order variation with b != 0 needs the derivative ∇̄u")
        result = result + np.einsum('s,sabcd->abcd', c.b, dbu)
    return result


def f1_basis(u: np.ndarray, du: Optional[np.ndarray] = None, dbu: Optional[np.ndarray] = None) -> np.ndarray:
    """Matrix whose columns are f1_apply images of the unit coefficient choices,
    ordered as FirstOrderCoefficients.as_vector."""
    n = u.shape[0]
    eye = np.eye(n)
    blocks = [np.einsum('ia,pbcd->piabcd', eye, u), np.einsum('jb,ascd->sjabcd', eye, u),
              np.einsum('kc,abpd->pkabcd', eye, u), np.einsum('ld,abcs->slabcd', eye, u)]
    columns = [block.reshape(n * n, n ** 4) for block in blocks]
    if du is not None:
        columns.append(du.reshape(n, n ** 4))
    if dbu is not None:
        if du is None:
            columns.append(np.zeros((n, n ** 4), dtype=complex))
        columns.append(dbu.reshape(n, n ** 4))
    return np.concatenate(columns, axis=0).T


@dataclass
class F1Projection(object):
    residual: float
    scale: float
    rank: int
    coefficients: FirstOrderCoefficients

    @property
    def relative_residual(self) -> float:
        return self.residual / max(1.0, self.scale)

    def in_span(self, threshold: float = F1_SPAN_THRESHOLD) -> bool:
        return self.relative_residual < threshold


def f1_span_projection(w: np.ndarray, u: np.ndarray, du: Optional[np.ndarray] = None,
                       dbu: Optional[np.ndarray] = None) -> F1Projection:
    """Least squares distance of w from the space of first order variations of u."""
    basis = f1_basis(u, du, dbu)
    target = np.asarray(w, dtype=complex).ravel()
    solution, _, rank, _ = linalg.lstsq(basis, target)
    remainder = target - basis.dot(solution)
    return F1Projection(_max_abs(remainder), _max_abs(target), int(rank),
                        FirstOrderCoefficients.from_vector(solution, u.shape[0]))


def _f2(u, g_inv):
    return (np.einsum('mn,ps,abms,pncd->abcd', g_inv, g_inv, u, u, optimize=True)
            + np.einsum('mn,ps,mbcs,anpd->abcd', g_inv, g_inv, u, u, optimize=True)
            - np.einsum('mn,ps,mbpd,ascn->abcd', g_inv, g_inv, u, u, optimize=True))


def f2_quadratic(u: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Hamilton-type quadratic curvature term F₂(u), polarized slot by slot:
    g^{m n̄} g^{p s̄} (u_{a b̄ m s̄} u_{p n̄ c d̄} + u_{m b̄ c s̄} u_{a n̄ p d̄}
    - u_{m b̄ p d̄} u_{a s̄ c n̄})."""
    check_metric(g)
    return _f2(u, inverse_metric(g))


def q2_grad_torsion(f: PointGeometry) -> np.ndarray:
    """Q₂(∇T)_{a b̄ c d̄} = ½ g^{p s̄} g^{m n̄} ∇_a T_{p m d̄} conj(∇_b T_{s n c̄})"""
    f.require(1, 'q2_grad_torsion')
    return 0.5 * np.einsum('ps,mn,apmd,bsnc->abcd', f.g_inv, f.g_inv, f.nabla_torsion,
                           np.conj(f.nabla_torsion), optimize=True)


def twist(u, torsion_up, torsion_low, g_inv, direction: str, lead: str = ''):
    """Torsion correction of the twisted connection acting on the four curvature
    slots of u; `lead` names extra leading axes of u that are left untwisted."""
    if direction == 'holomorphic':
        return (contract('qma,{0}qbcd->m{0}abcd'.format(lead), torsion_up, u)
                - contract('qr,mqd,{0}abcr->m{0}abcd'.format(lead), g_inv, torsion_low, u))
    if direction == 'antiholomorphic':
        return (contract('rnb,{0}arcd->n{0}abcd'.format(lead), conjugate(torsion_up), u)
                - contract('qr,nrc,{0}abqd->n{0}abcd'.format(lead), g_inv, conjugate(torsion_low), u))
    raise StructuralError("Choose from one of the directions: holomorphic, antiholomorphic")


def twisted_covariant_derivative(u: np.ndarray, f: PointGeometry, direction: str = 'holomorphic',
                                 du: Optional[np.ndarray] = None) -> np.ndarray:
    """∇ᵀ_m u (holomorphic) or ∇ᵀ_n̄ u (antiholomorphic) at the frame point.

    ∇ᵀ_m u_{a b̄ c d̄} = ∇_m u + T^q_{m a} u_{q b̄ c d̄} - g^{q r̄} T_{m q d̄} u_{a b̄ c r̄}
    and its conjugate. Without `du`, u is taken to be the curvature of the frame.
    """
    if du is None:
        f.require(1, 'twisted_covariant_derivative')
        du = f.nabla_omega if direction == 'holomorphic' else f.nabla_bar_omega
    return du + twist(u, f.torsion_up, f.torsion_low, f.g_inv, direction)


def _twisted_laplacian_jets(jets: FrameJets) -> np.ndarray:
    if jets.depth < 2:
        raise StructuralError("Twisted Laplacian needs frame jets of depth 2")
    omega, gamma = jets.omega, jets.gamma

    def twisted(tensor, derivative, direction, lead=''):
        lowered = tensor.truncate(derivative.order)
        return derivative + twist(lowered, jets.torsion_up, jets.torsion_low, jets.g_inv, direction, lead)

    holomorphic = twisted(omega, covariant_derivative(omega, 'ubub', gamma), 'holomorphic')
    antiholomorphic = twisted(omega, covariant_derivative(omega, 'ubub', gamma, conjugate_direction=True),
                              'antiholomorphic')
    mixed = twisted(antiholomorphic, covariant_derivative(antiholomorphic, 'bubub', gamma), 'holomorphic', 'n')
    mixed_bar = twisted(holomorphic, covariant_derivative(holomorphic, 'uubub', gamma, conjugate_direction=True),
                        'antiholomorphic', 'm')
    g_inv = jets.g_inv.value
    return 0.5 * (np.einsum('mn,mnabcd->abcd', g_inv, mixed.value)
                  + np.einsum('mn,nmabcd->abcd', g_inv, mixed_bar.value))


def twisted_laplacian(m: MetricField, x) -> np.ndarray:
    """Δᵀ Ω = ½ g^{m n̄} (∇ᵀ_m ∇ᵀ_n̄ + ∇ᵀ_n̄ ∇ᵀ_m) Ω at x."""
    return _twisted_laplacian_jets(compute_frame_jets(m, x, 2))


def curvature_laplacian(f: PointGeometry) -> np.ndarray:
    """Real Chern Laplacian ½ g^{m n̄} (∇_m ∇_n̄ + ∇_n̄ ∇_m) Ω."""
    f.require(2, 'curvature_laplacian')
    return 0.5 * (np.einsum('mn,mnabcd->abcd', f.g_inv, f.nabla2_omega)
                  + np.einsum('mn,nmabcd->abcd', f.g_inv, f.nabla2_bar_omega))


def torsion_terms(f: PointGeometry) -> List[np.ndarray]:
    """The eight torsion terms by which Δᵀ differs from Δ modulo F₁, each
    contracted with g^{m n̄}."""
    f.require(1, 'torsion_terms')
    h, t, tl, u = f.g_inv, f.torsion_up, f.torsion_low, f.omega
    tb, tlb = np.conj(t), np.conj(tl)
    du, dbu = f.nabla_omega, f.nabla_bar_omega

    def terms(*args):
        return np.einsum(*args, optimize=True)

    return [terms('mn,rnb,marcd->abcd', h, tb, du),
            terms('mn,qma,nqbcd->abcd', h, t, dbu),
            terms('mn,qma,rnb,qrcd->abcd', h, t, tb, u),
            terms('mn,ps,pmd,nabcs->abcd', h, h, tl, dbu),
            terms('mn,ps,snc,mabpd->abcd', h, h, tlb, du),
            terms('mn,ps,pmd,rnb,arcs->abcd', h, h, tl, tb, u),
            terms('mn,ps,snc,qma,qbpd->abcd', h, h, tlb, t, u),
            terms('mn,ps,qr,snc,qmd,abpr->abcd', h, h, h, tlb, tl, u)]


@dataclass
class EvolutionTerms(object):
    """Pieces of dΩ/dt at one point.

    `laplacian` is g^{m n̄} ∇_m ∇_n̄ Ω; `ricci_terms` collects the three S/Q
    contractions with their minus signs; `total` is the sum of all displayed
    terms. `twisted_residual` and `decomposition_residual` are the
    post-projection distances from the F₁ span of Δᵀ Ω - ΔΩ - torsion and of
    total - (Δᵀ Ω + Q₂ + F₂).
    """
    geometry: PointGeometry
    laplacian: np.ndarray
    plain_laplacian: np.ndarray
    twisted_laplacian: np.ndarray
    torsion: np.ndarray
    q2: np.ndarray
    f2: np.ndarray
    ricci_terms: np.ndarray
    total: np.ndarray
    twisted_residual: F1Projection
    decomposition_residual: F1Projection


def evolution_terms(m: MetricField, x) -> EvolutionTerms:
    jets = compute_frame_jets(m, x, 2)
    f = frame_from_jets(jets)
    h, omega = f.g_inv, f.omega
    s = second_ricci(h, omega)
    q = torsion_quadratic(h, f.torsion_low)
    laplacian = np.einsum('mn,mnabcd->abcd', h, f.nabla2_omega)
    torsion = sum(torsion_terms(f))
    q2 = q2_grad_torsion(f)
    f2 = _f2(omega, h)
    ricci_terms = -(np.einsum('ps,pd,abcs->abcd', h, s + q, omega)
                    + np.einsum('ps,pb,ascd->abcd', h, s, omega)
                    + np.einsum('ps,cs,abpd->abcd', h, q, omega))
    total = laplacian + torsion + q2 + f2 + ricci_terms
    plain = curvature_laplacian(f)
    twisted = _twisted_laplacian_jets(jets)
    derivatives = dict(du=f.nabla_omega, dbu=f.nabla_bar_omega)
    twisted_residual = f1_span_projection(twisted - plain - torsion, omega, **derivatives)
    decomposition_residual = f1_span_projection(total - (twisted + q2 + f2), omega, **derivatives)
    logger.debug("F1 residuals at %s: twisted %.3e, decomposition %.3e", x,
                 twisted_residual.residual, decomposition_residual.residual)
    return EvolutionTerms(f, laplacian, plain, twisted, torsion, q2, f2, ricci_terms, total,
                          twisted_residual, decomposition_residual)


def evolution_rhs(m: MetricField, x) -> np.ndarray:
    """dΩ/dt at x under the Hermitian curvature flow, all terms explicit."""
    return evolution_terms(m, x).total
