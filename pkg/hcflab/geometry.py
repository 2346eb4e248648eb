"""Chern-geometric data of a Hermitian metric at a point.

Conventions: g[i, j] = g_{i j̄}; g_inv[k, s] = g^{k s̄}; gamma[k, i, j] = Γ^k_{ij}
= g^{k s̄} ∂_i g_{j s̄} (derivative on the first lower index); torsion_up[k, i, j]
= T^k_{ij}; torsion_low[i, j, l] = T_{i j l̄}; omega[a, b, c, d] = Ω_{a b̄ c d̄}.
Covariant derivative arrays carry the derivative direction on their leading axis.

The tensor formulas below accept plain arrays with arbitrary leading batch axes
as well as jets, so the same code serves single points, lattices and jets.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from .exceptions import DegenerateMetricError, StructuralError
from .jets import ComplexJet, align, conjugate, contract, jet_matrix_inverse, value_of
from .metrics import MetricField

logger = logging.getLogger(__name__)

DEGENERACY_FLOOR = 1e-8
SLOT_LETTERS = 'abcdefgh'


def inverse_metric(g):
    """g^{k s̄} from g_{i j̄}, for arrays (..., n, n) or a jet matrix."""
    if isinstance(g, ComplexJet):
        return jet_matrix_inverse(g).T
    return np.swapaxes(np.linalg.inv(g), -1, -2)


def christoffel(g_inv, dg):
    return contract('...ks,...ijs->...kij', g_inv, dg)


def torsion_from_christoffel(gamma):
    return gamma - contract('...kij->...kji', gamma)


def lowered_torsion(dg):
    """T_{i j l̄} = ∂_i g_{j l̄} - ∂_j g_{i l̄}"""
    return dg - contract('...ijl->...jil', dg)


def curvature(g_inv, dg, dbg, ddg):
    """Ω_{a b̄ c d̄} = -∂_a ∂_b̄ g_{c d̄} + g^{p s̄} ∂_a g_{c s̄} ∂_b̄ g_{p d̄}"""
    quadratic, ddg = align(contract('...ps,...acs,...bpd->...abcd', g_inv, dg, dbg), ddg)
    return quadratic - ddg


def second_ricci(g_inv, omega):
    return contract('...mn,...mnij->...ij', g_inv, omega)


def first_ricci(g_inv, omega):
    return contract('...kl,...ijkl->...ij', g_inv, omega)


def torsion_quadratic(g_inv, torsion_low):
    """Q_{i j̄} = ½ g^{m n̄} g^{p s̄} T_{p m j̄} conj(T_{s n ī})"""
    return 0.5 * contract('...mn,...ps,...pmj,...sni->...ij', g_inv, g_inv, torsion_low, conjugate(torsion_low))


def velocity(g_inv, omega, torsion_low, variant: str = 'hcf'):
    """dg/dt: -S - Q for the Hermitian curvature flow, -Ric¹ for Chern-Ricci."""
    if variant == 'hcf':
        ricci, quadratic = align(second_ricci(g_inv, omega), torsion_quadratic(g_inv, torsion_low))
        return -ricci - quadratic
    if variant == 'chern_ricci':
        return -first_ricci(g_inv, omega)
    raise StructuralError("Choose from one of the variants: hcf, chern_ricci")


def covariant_derivative(tensor: ComplexJet, slots: str, gamma: ComplexJet, conjugate_direction: bool = False
                         ) -> ComplexJet:
    """Chern covariant derivative of a tensor jet, one order lower.

    :param slots: one character per tensor axis, 'u' for an unbarred lower
        index and 'b' for a barred one
    :param conjugate_direction: False for ∇_m (corrects unbarred slots by Γ),
        True for ∇_n̄ (corrects barred slots by conj Γ)
    :return: jet with the derivative direction as new leading axis
    """
    if len(slots) != tensor.ndim:
        raise StructuralError("Slot pattern {} for a tensor of rank {}".format(slots, tensor.ndim))
    result = tensor.gradient(conjugate=conjugate_direction)
    lowered = tensor.truncate(result.order)
    connection = conjugate(gamma) if conjugate_direction else gamma
    corrected = 'b' if conjugate_direction else 'u'
    letters = SLOT_LETTERS[:len(slots)]
    for k, slot in enumerate(slots):
        if slot != corrected:
            continue
        source = letters[:k] + 'q' + letters[k + 1:]
        result = result - contract('qm{},{}->m{}'.format(letters[k], source, letters), connection, lowered)
    return result


@dataclass(frozen=True)
class FrameJets(object):
    """Chern data as jets at one center; `depth` extra orders of curvature derivatives."""
    depth: int
    g: ComplexJet
    g_inv: ComplexJet
    dg: ComplexJet
    dbg: ComplexJet
    gamma: ComplexJet
    torsion_up: ComplexJet
    torsion_low: ComplexJet
    omega: Optional[ComplexJet] = None
    nabla_torsion: Optional[ComplexJet] = None
    nabla_bar_torsion: Optional[ComplexJet] = None
    nabla_omega: Optional[ComplexJet] = None
    nabla_bar_omega: Optional[ComplexJet] = None
    nabla2_omega: Optional[ComplexJet] = None
    nabla2_bar_omega: Optional[ComplexJet] = None

    @property
    def center(self) -> np.ndarray:
        return self.g.center


@dataclass(frozen=True)
class PointGeometry(object):
    """All Chern data at one point. depth -1 holds the connection only.

    nabla2_omega[m, n] = ∇_m ∇_n̄ Ω and nabla2_bar_omega[n, m] = ∇_n̄ ∇_m Ω.
    """
    point: np.ndarray
    depth: int
    g: np.ndarray
    g_inv: np.ndarray
    gamma: np.ndarray
    torsion_up: np.ndarray
    torsion_low: np.ndarray
    omega: Optional[np.ndarray] = None
    nabla_torsion: Optional[np.ndarray] = None
    nabla_bar_torsion: Optional[np.ndarray] = None
    nabla_omega: Optional[np.ndarray] = None
    nabla_bar_omega: Optional[np.ndarray] = None
    nabla2_omega: Optional[np.ndarray] = None
    nabla2_bar_omega: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return self.g.shape[0]

    def require(self, depth: int, operation: str = 'operation'):
        if self.depth < depth:
            raise StructuralError("{} needs frame depth {}, got {}".format(operation, depth, self.depth))


def check_metric(g: np.ndarray, floor: float = DEGENERACY_FLOOR) -> float:
    smallest = float(np.min(np.linalg.eigvalsh(0.5 * (g + np.conj(np.swapaxes(g, -1, -2))))))
    if smallest <= floor:
        raise DegenerateMetricError("Metric minimum eigenvalue {:.3e} below floor {:.1e}".format(smallest, floor),
                                    smallest)
    return smallest


def frame_jets(g: ComplexJet, depth: int = 0, floor: float = DEGENERACY_FLOOR) -> FrameJets:
    """Chern data jets from a metric jet of order at least 2 + depth.

    depth -1 only needs order 1 and stops at the connection.
    """
    if depth not in (-1, 0, 1, 2):
        raise StructuralError("Frame depth must be one of -1, 0, 1, 2, got {}".format(depth))
    if g.order < 2 + depth:
        raise StructuralError("Frame depth {} needs a metric jet of order {}, got {}".format(depth, 2 + depth, g.order))
    check_metric(g.value, floor)
    g = g.truncate(2 + depth)
    g_inv = inverse_metric(g)
    dg = g.gradient()
    dbg = g.gradient(conjugate=True)
    gamma = christoffel(g_inv, dg)
    parts = dict(depth=depth, g=g, g_inv=g_inv, dg=dg, dbg=dbg, gamma=gamma,
                 torsion_up=torsion_from_christoffel(gamma), torsion_low=lowered_torsion(dg))
    if depth >= 0:
        omega = curvature(g_inv, dg, dbg, dbg.gradient())
        parts['omega'] = omega
    if depth >= 1:
        torsion_low = parts['torsion_low']
        parts['nabla_torsion'] = covariant_derivative(torsion_low, 'uub', gamma)
        parts['nabla_bar_torsion'] = covariant_derivative(torsion_low, 'uub', gamma, conjugate_direction=True)
        parts['nabla_omega'] = covariant_derivative(omega, 'ubub', gamma)
        parts['nabla_bar_omega'] = covariant_derivative(omega, 'ubub', gamma, conjugate_direction=True)
    if depth >= 2:
        parts['nabla2_omega'] = covariant_derivative(parts['nabla_bar_omega'], 'bubub', gamma)
        parts['nabla2_bar_omega'] = covariant_derivative(parts['nabla_omega'], 'uubub', gamma,
                                                         conjugate_direction=True)
    return FrameJets(**parts)


def frame_from_jets(jets: FrameJets) -> PointGeometry:
    def value(x):
        return None if x is None else np.array(value_of(x))

    return PointGeometry(point=np.array(jets.center), depth=jets.depth, g=value(jets.g), g_inv=value(jets.g_inv),
                         gamma=value(jets.gamma), torsion_up=value(jets.torsion_up),
                         torsion_low=value(jets.torsion_low), omega=value(jets.omega),
                         nabla_torsion=value(jets.nabla_torsion), nabla_bar_torsion=value(jets.nabla_bar_torsion),
                         nabla_omega=value(jets.nabla_omega), nabla_bar_omega=value(jets.nabla_bar_omega),
                         nabla2_omega=value(jets.nabla2_omega), nabla2_bar_omega=value(jets.nabla2_bar_omega))


def compute_frame_jets(m: MetricField, x, depth: int = 0, floor: float = DEGENERACY_FLOOR) -> FrameJets:
    return frame_jets(m.metric_jet(x, 2 + depth), depth, floor)


def compute_frame(m: MetricField, x, depth: int = 0, floor: float = DEGENERACY_FLOOR) -> PointGeometry:
    """Chern frame of `m` at `x`.

    depth 0 fills g, Γ, T and Ω; depth 1 adds ∇T, ∇̄T, ∇Ω and ∇̄Ω; depth 2 adds
    the mixed second covariant derivatives of Ω.
    """
    if depth not in (0, 1, 2):
        raise StructuralError("Frame depth must be 0, 1 or 2, got {}".format(depth))
    return frame_from_jets(compute_frame_jets(m, x, depth, floor))


def compute_connection(m: MetricField, x, floor: float = DEGENERACY_FLOOR) -> PointGeometry:
    """Metric, Γ and torsion at `x` from a first order jet."""
    return frame_from_jets(frame_jets(m.metric_jet(x, 1), -1, floor))


def _max_abs(x) -> float:
    return float(np.max(np.abs(x), initial=0.0))


def bianchi_residuals(f: PointGeometry) -> Dict[str, float]:
    """Max residuals of the torsion-modified first and second Bianchi identities
    (each with its conjugate form)."""
    f.require(1, 'bianchi_residuals')
    omega, dbt = f.omega, f.nabla_bar_torsion
    first_1 = omega - np.einsum('cbad->abcd', omega) - np.einsum('bcad->abcd', dbt)
    first_2 = omega - np.einsum('adcb->abcd', omega) - np.conj(np.einsum('adbc->abcd', dbt))
    second_1 = (f.nabla_omega - np.einsum('amcde->macde', f.nabla_omega)
                - np.einsum('pam,pbcd->mabcd', f.torsion_up, omega))
    second_2 = (f.nabla_bar_omega - np.einsum('bancd->nabcd', f.nabla_bar_omega)
                - np.einsum('sbn,ascd->nabcd', np.conj(f.torsion_up), omega))
    return {'first_1': _max_abs(first_1), 'first_2': _max_abs(first_2),
            'second_1': _max_abs(second_1), 'second_2': _max_abs(second_2)}


def flow_rhs_pointwise(f: PointGeometry, variant: str = 'hcf') -> np.ndarray:
    """Flow velocity dg/dt at the frame point."""
    f.require(0, 'flow_rhs_pointwise')
    return velocity(f.g_inv, f.omega, f.torsion_low, variant)


def flow_rhs_jet(jets: FrameJets, variant: str = 'hcf') -> ComplexJet:
    """Flow velocity as a jet of order `jets.depth`."""
    if jets.omega is None:
        raise StructuralError("flow_rhs_jet needs curvature jets")
    return velocity(jets.g_inv, jets.omega, jets.torsion_low, variant)


def second_ricci_form(f: PointGeometry) -> np.ndarray:
    f.require(0, 'second_ricci_form')
    return second_ricci(f.g_inv, f.omega)


def chern_ricci_first(f: PointGeometry) -> np.ndarray:
    f.require(0, 'chern_ricci_first')
    return first_ricci(f.g_inv, f.omega)


def torsion_quadratic_form(f: PointGeometry) -> np.ndarray:
    return torsion_quadratic(f.g_inv, f.torsion_low)


def torsion_norm(f: PointGeometry) -> float:
    """|T|_g, computed as sqrt(2 tr_g Q)."""
    trace = np.einsum('ij,ij->', f.g_inv, torsion_quadratic_form(f)).real
    return float(np.sqrt(max(trace, 0.0)))


def curvature_via_christoffel(jets: FrameJets) -> np.ndarray:
    """Ω_{a b̄ c d̄} = -g_{p d̄} ∂_b̄ Γ^p_{ac}; the second path for the curvature."""
    return -np.einsum('pd,bpac->abcd', jets.g.value, jets.gamma.gradient(conjugate=True).value)


def perturbation_derivatives(jets: FrameJets, k: ComplexJet):
    """(∇_a k_{c s̄}, ∇_b̄ ∇_a k_{c d̄}) as jets; k needs order >= 2."""
    nabla_k = covariant_derivative(k.truncate(min(k.order, jets.gamma.order + 1)), 'ub', jets.gamma)
    return nabla_k, covariant_derivative(nabla_k, 'uub', jets.gamma, conjugate_direction=True)


def curvature_velocity(jets: FrameJets, k: ComplexJet) -> np.ndarray:
    """δΩ along g + s k at s = 0:
    g^{p s̄} Ω_{a b̄ c s̄} k_{p d̄} - ∇_b̄ ∇_a k_{c d̄}."""
    if jets.omega is None:
        raise StructuralError("curvature_velocity needs curvature jets")
    _, nabla_bar_nabla_k = perturbation_derivatives(jets, k)
    return (np.einsum('ps,abcs,pd->abcd', jets.g_inv.value, jets.omega.value, k.value)
            - np.einsum('bacd->abcd', nabla_bar_nabla_k.value))


@dataclass
class VariationReport(object):
    eps: float
    errors: Dict[str, float]
    halved_errors: Dict[str, float] = field(default_factory=dict)
    ratios: Dict[str, float] = field(default_factory=dict)

    @property
    def max_error(self) -> float:
        return max(self.errors.values())


def _variation_errors(g: ComplexJet, k: ComplexJet, eps: float, floor: float) -> Dict[str, float]:
    base = frame_jets(g, 0, floor)
    nabla_k, _ = perturbation_derivatives(base, k)
    nabla_k = nabla_k.value
    closed = {'dnabla': nabla_k,
              'dtorsion': nabla_k - np.einsum('cas->acs', nabla_k),
              'domega': curvature_velocity(base, k)}
    plus = frame_jets(g + eps * k, 0, floor)
    minus = frame_jets(g - eps * k, 0, floor)
    g0 = g.value

    def quotient(name):
        return (value_of(getattr(plus, name)) - value_of(getattr(minus, name))) / (2 * eps)

    numeric = {'dnabla': np.einsum('ps,pac->acs', g0, quotient('gamma')),
               'dtorsion': np.einsum('ps,pac->acs', g0, quotient('torsion_up')),
               'domega': quotient('omega')}
    return {key: _max_abs(numeric[key] - closed[key]) / max(1.0, _max_abs(closed[key])) for key in closed}


def variation_check(m: MetricField, k: MetricField, x, eps: float = 1e-4, floor: float = DEGENERACY_FLOOR
                    ) -> VariationReport:
    """Compare the closed-form variations of Γ, T and Ω along a Hermitian
    perturbation k with central difference quotients at ε and ε/2.

    Errors are relative: max|quotient - closed| / max(1, max|closed|).
    """
    g = m.metric_jet(x, 2)
    perturbation = k.metric_jet(x, 2)
    if perturbation.shape != g.shape:
        raise StructuralError("Perturbation of shape {} for a metric of shape {}".format(perturbation.shape, g.shape))
    errors = _variation_errors(g, perturbation, eps, floor)
    halved = _variation_errors(g, perturbation, eps / 2, floor)
    ratios = {key: errors[key] / halved[key] if halved[key] > 0 else float('nan') for key in errors}
    logger.debug("Variation check at %s: errors %s, ratios %s", x, errors, ratios)
    return VariationReport(eps, errors, halved, ratios)
