"""Griffiths positivity of curvature-type tensors and the identities that hold at
zero pairs of non-negative tensors."""
import logging
from dataclasses import dataclass
from itertools import product
from typing import Dict, Optional, Tuple

import numpy as np
from scipy import linalg

from .curvature_ops import check_curvature_type, f2_quadratic
from .exceptions import PreconditionError, StructuralError
from .geometry import PointGeometry, check_metric

logger = logging.getLogger(__name__)

ZERO_TOLERANCE = 1e-9
CURVATURE_TYPE_TOLERANCE = 1e-10
METHODS = ('alternating', 'grid', 'hybrid')


@dataclass(frozen=True)
class GriffithsReport(object):
    min_value: float
    argmin_xi: np.ndarray
    argmin_eta: np.ndarray
    method: str
    restarts: int
    certified_grid_resolution: Optional[int] = None

    def verdict(self, tolerance: float = 1e-8) -> str:
        return griffiths_verdict(self.min_value, tolerance)

    def to_dict(self) -> Dict:
        return {'min_value': self.min_value,
                'argmin_xi': [[z.real, z.imag] for z in self.argmin_xi],
                'argmin_eta': [[z.real, z.imag] for z in self.argmin_eta],
                'method': self.method, 'restarts': self.restarts,
                'certified_grid_resolution': self.certified_grid_resolution}


def griffiths_verdict(min_value: float, tolerance: float = 1e-8) -> str:
    if min_value > tolerance:
        return 'positive'
    if min_value >= -tolerance:
        return 'nonnegative'
    return 'negative'


def orthonormal_frame(g: np.ndarray) -> np.ndarray:
    """Columns e_k with g(e_i, ē_j) = δ_ij, from the Cholesky factor of g."""
    check_metric(g)
    lower = linalg.cholesky(np.asarray(g).T, lower=True)
    return linalg.inv(lower.conj().T)


def to_frame(u: np.ndarray, frame: np.ndarray) -> np.ndarray:
    return np.einsum('abcd,ai,bj,ck,dl->ijkl', u, frame, np.conj(frame), frame, np.conj(frame), optimize=True)


def griffiths_value(u: np.ndarray, xi: np.ndarray, eta: np.ndarray) -> float:
    """u(ξ, ξ̄, η, η̄), real for curvature-type u."""
    return float(np.einsum('abcd,a,b,c,d->', u, xi, np.conj(xi), eta, np.conj(eta)).real)


def _phase_normalized(v: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(v)))
    return v * np.exp(-1j * np.angle(v[k]))


def _smallest_eigenvector(form: np.ndarray) -> Tuple[float, np.ndarray]:
    values, vectors = linalg.eigh(0.5 * (form + form.conj().T))
    return values[0], vectors[:, 0]


def _alternating(u: np.ndarray, start: np.ndarray, iterations: int = 200, tolerance: float = 1e-15):
    eta = start / np.linalg.norm(start)
    value, previous = np.inf, np.inf
    xi = eta
    for _ in range(iterations):
        # fix η: u(ξ, ξ̄, η, η̄) = ξ^H M^T ξ
        value, xi = _smallest_eigenvector(np.einsum('ijkl,k,l->ij', u, eta, np.conj(eta)).T)
        value, eta = _smallest_eigenvector(np.einsum('ijkl,i,j->kl', u, xi, np.conj(xi)).T)
        if previous - value < tolerance * max(1.0, abs(value)):
            break
        previous = value
    return value, xi, eta


def _grid_minimum(u: np.ndarray, resolution: int):
    theta = np.linspace(0.0, 0.5 * np.pi, resolution)
    phi = np.linspace(0.0, 2.0 * np.pi, resolution, endpoint=False)
    tt, pp = np.meshgrid(theta, phi, indexing='ij')
    xis = np.stack([np.cos(tt).ravel(), (np.exp(1j * pp) * np.sin(tt)).ravel()], axis=-1)
    forms = np.einsum('ijkl,gi,gj->glk', u, xis, np.conj(xis), optimize=True)
    a, d, b = forms[:, 0, 0].real, forms[:, 1, 1].real, forms[:, 0, 1]
    smallest = 0.5 * (a + d) - np.sqrt(0.25 * (a - d) ** 2 + np.abs(b) ** 2)
    best = int(np.argmin(smallest))
    _, eta = _smallest_eigenvector(forms[best])
    return float(smallest[best]), xis[best], eta


def min_griffiths(u: np.ndarray, g: np.ndarray, method: str = 'alternating', restarts: int = 32,
                  resolution: int = 64, rng: Optional[np.random.Generator] = None, seed: int = 0
                  ) -> GriffithsReport:
    """Minimum of u(ξ, ξ̄, η, η̄) over g-unit ξ and η.

    'alternating' fixes one vector and takes the smallest eigenvector of the
    Hermitian form in the other, from `restarts` random starts. 'grid' scans the
    sphere product exhaustively (n <= 2). 'hybrid' runs both and polishes the grid
    minimizer. Dimension 1 is solved exactly.
    """
    if method not in METHODS:
        raise StructuralError("Choose from one of the methods: {}".format(', '.join(METHODS)))
    u = np.asarray(u, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(u), initial=0.0)))
    residual = check_curvature_type(u)
    if residual > CURVATURE_TYPE_TOLERANCE * scale:
        raise StructuralError("Tensor is not of curvature type (residual {:.3e})".format(residual))
    n = u.shape[0]
    if g.shape != (n, n):
        raise StructuralError("Metric of shape {} for a tensor of dimension {}".format(g.shape, n))
    if method in ('grid', 'hybrid') and n > 2:
        raise StructuralError("Grid search is only available for n <= 2")
    rng = np.random.default_rng(seed) if rng is None else rng
    frame = orthonormal_frame(g)
    u_frame = to_frame(u, frame)

    resolution_used = None
    if n == 1:
        best = (u_frame[0, 0, 0, 0].real, np.ones(1, dtype=complex), np.ones(1, dtype=complex))
        restarts = 0
    else:
        candidates = []
        if method in ('grid', 'hybrid') and n == 2:
            grid_best = _grid_minimum(u_frame, resolution)
            candidates.append(grid_best)
            resolution_used = resolution
            if method == 'hybrid':
                candidates.append(_alternating(u_frame, grid_best[2]))
        if method in ('alternating', 'hybrid'):
            for _ in range(restarts):
                start = rng.normal(size=n) + 1j * rng.normal(size=n)
                candidates.append(_alternating(u_frame, start))
        else:
            restarts = 0
        best = min(candidates, key=lambda candidate: candidate[0])

    _, w_xi, w_eta = best
    xi = _phase_normalized(frame.dot(w_xi / np.linalg.norm(w_xi)))
    eta = _phase_normalized(frame.dot(w_eta / np.linalg.norm(w_eta)))
    value = griffiths_value(u, xi, eta)
    logger.debug("Griffiths minimum %.6e by %s (%d restarts)", value, method, restarts)
    return GriffithsReport(value, xi, eta, method, restarts, resolution_used)


def is_zero_pair(u: np.ndarray, xi: np.ndarray, eta: np.ndarray, tolerance: float = ZERO_TOLERANCE) -> bool:
    """|u(ξ, ξ̄, η, η̄)| <= tolerance * max|u| * |ξ|^2 |η|^2"""
    bound = tolerance * float(np.max(np.abs(u), initial=0.0)) * np.vdot(xi, xi).real * np.vdot(eta, eta).real
    return abs(griffiths_value(u, xi, eta)) <= bound


def _require_zero_pair(u, xi, eta, tolerance):
    if not is_zero_pair(u, xi, eta, tolerance):
        raise PreconditionError("(ξ, η) is not a zero pair: u(ξ, ξ̄, η, η̄) = {:.3e}"
                                .format(griffiths_value(u, xi, eta)))


def zero_pair_first_variation(u: np.ndarray, du: Optional[np.ndarray], xi: np.ndarray, eta: np.ndarray,
                              dbu: Optional[np.ndarray] = None, tolerance: float = ZERO_TOLERANCE
                              ) -> Dict[str, float]:
    """Residuals of the vanishing statements at a zero pair of a non-negative u:
    u(ξ, ζ̄, η, η̄), u(ζ, ξ̄, η, η̄), u(ξ, ξ̄, η, ζ̄), u(ξ, ξ̄, ζ, η̄) over basis ζ
    and the covariant derivatives of u(ξ, ξ̄, η, η̄) in every direction."""
    _require_zero_pair(u, xi, eta, tolerance)
    xb, eb = np.conj(xi), np.conj(eta)
    first = max(np.max(np.abs(np.einsum('abcd,a,c,d->b', u, xi, eta, eb))),
                np.max(np.abs(np.einsum('abcd,b,c,d->a', u, xb, eta, eb))))
    second = max(np.max(np.abs(np.einsum('abcd,a,b,c->d', u, xi, xb, eta))),
                 np.max(np.abs(np.einsum('abcd,a,b,d->c', u, xi, xb, eb))))
    gradient = 0.0
    for derivative in (du, dbu):
        if derivative is not None:
            values = np.einsum('mabcd,a,b,c,d->m', derivative, xi, xb, eta, eb)
            gradient = max(gradient, float(np.max(np.abs(values))))
    return {'mixed_slot': float(max(first, second)), 'mixed_slot_first': float(first),
            'mixed_slot_second': float(second), 'grad': gradient}


def second_variation(u: np.ndarray, xi: np.ndarray, eta: np.ndarray, nu: np.ndarray, zeta: np.ndarray) -> float:
    """d²/ds² u(ξ + sν, conj, η + sζ, conj) at s = 0, from the exact s² coefficient."""
    slots = ((xi, nu), (np.conj(xi), np.conj(nu)), (eta, zeta), (np.conj(eta), np.conj(zeta)))
    total = 0.0
    for mask in product((0, 1), repeat=4):
        if sum(mask) != 2:
            continue
        vectors = [slots[k][bit] for k, bit in enumerate(mask)]
        total += np.einsum('abcd,a,b,c,d->', u, *vectors)
    return float(2.0 * np.real(total))


def second_variation_form(u: np.ndarray, xi: np.ndarray, eta: np.ndarray) -> np.ndarray:
    """Real symmetric 4n x 4n matrix M with δ²u(ν, ζ) = x^T M x, where
    x = (Re ν, Im ν, Re ζ, Im ζ)."""
    n = u.shape[0]
    basis = np.eye(4 * n)

    def evaluate(x):
        nu = x[:n] + 1j * x[n:2 * n]
        zeta = x[2 * n:3 * n] + 1j * x[3 * n:]
        return second_variation(u, xi, eta, nu, zeta)

    diagonal = np.array([evaluate(basis[i]) for i in range(4 * n)])
    form = np.diag(diagonal)
    for i in range(4 * n):
        for j in range(i + 1, 4 * n):
            form[i, j] = form[j, i] = 0.5 * (evaluate(basis[i] + basis[j]) - diagonal[i] - diagonal[j])
    return form


def second_variation_infimum(u: np.ndarray, xi: np.ndarray, eta: np.ndarray) -> float:
    """inf of δ²u over |ν|^2 + |ζ|^2 <= 1, i.e. min(0, smallest eigenvalue)."""
    return min(0.0, float(linalg.eigvalsh(second_variation_form(u, xi, eta))[0]))


def trace_inequality_check(A: np.ndarray, B: np.ndarray, C: np.ndarray, tolerance: float = 1e-12
                           ) -> Dict[str, object]:
    """For a PSD form A(v, v̄) + 2 Re B(v, w) + C(w, w̄) with Hermitian A and C:
    Σ a_ij conj(c_ij) >= Σ b_ij conj(b_ji)."""
    A, B, C = (np.asarray(x, dtype=complex) for x in (A, B, C))
    block = np.block([[A, B], [B.conj().T, C.T]])
    scale = max(1.0, float(np.max(np.abs(block))))
    if max(np.max(np.abs(A - A.conj().T)), np.max(np.abs(C - C.conj().T))) > tolerance * scale:
        raise PreconditionError("A and C must be Hermitian")
    smallest = float(linalg.eigvalsh(block)[0])
    if smallest < -tolerance * scale:
        raise PreconditionError("Block form is not positive semidefinite (min eigenvalue {:.3e})".format(smallest))
    lhs = float(np.sum(A * np.conj(C)).real)
    rhs = float(np.sum(B * np.conj(B.T)).real)
    return {'lhs': lhs, 'rhs': rhs, 'holds': lhs >= rhs - tolerance}


def random_psd_blocks(n: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(A, B, C) read off a random PSD block M M^H."""
    m = rng.normal(size=(2 * n, 2 * n)) + 1j * rng.normal(size=(2 * n, 2 * n))
    block = m.dot(m.conj().T)
    return block[:n, :n], block[:n, n:], block[n:, n:].T


def _frame_vectors(g, xi, eta, frame):
    frame = orthonormal_frame(g) if frame is None else frame
    inverse = linalg.inv(frame)
    return frame, inverse.dot(xi), inverse.dot(eta)


def _frame_sum_parts(u_frame, w_xi, w_eta):
    xb, eb = np.conj(w_xi), np.conj(w_eta)
    a0 = np.einsum('abij,a,b->ij', u_frame, w_xi, xb)
    c0 = np.einsum('ijcd,c,d->ij', u_frame, w_eta, eb)
    b0 = np.einsum('ibjd,b,d->ij', u_frame, xb, eb)
    first = np.einsum('ij,ji->', a0, c0)
    second = np.einsum('ij,ji->', np.conj(b0), b0)
    return a0, b0, c0, float((first - second).real)


def frame_product_sum(u: np.ndarray, g: np.ndarray, xi: np.ndarray, eta: np.ndarray, frame: Optional[np.ndarray] = None,
                      require_zero: bool = True, tolerance: float = ZERO_TOLERANCE) -> float:
    """Σ_ij u(ξ, ξ̄, e_i, ē_j) u(e_j, ē_i, η, η̄) - u(ξ, ē_i, η, ē_j) u(e_j, ξ̄, e_i, η̄)
    over a g-orthonormal frame."""
    if require_zero:
        _require_zero_pair(u, xi, eta, tolerance)
    frame, w_xi, w_eta = _frame_vectors(g, xi, eta, frame)
    return _frame_sum_parts(to_frame(u, frame), w_xi, w_eta)[3]


def quadratic_inequality_check(u: np.ndarray, g: np.ndarray, xi: np.ndarray, eta: np.ndarray,
                               tolerance: float = 1e-10) -> Dict[str, float]:
    """The frame sum of `frame_product_sum` is bounded below by -K₀ K, with -K₀ the
    infimum of δ²u on the unit ball and K = tr A₀ + tr C₀ + n K₀."""
    frame, w_xi, w_eta = _frame_vectors(g, xi, eta, None)
    u_frame = to_frame(u, frame)
    a0, _, c0, lhs = _frame_sum_parts(u_frame, w_xi, w_eta)
    k0 = -second_variation_infimum(u_frame, w_xi, w_eta)
    k = float(np.trace(a0).real + np.trace(c0).real + u.shape[0] * k0)
    bound = -k0 * k
    scale = max(1.0, abs(lhs), abs(bound))
    return {'lhs': lhs, 'k0': k0, 'k': k, 'bound': bound, 'holds': lhs >= bound - tolerance * scale}


def f2_split(u: np.ndarray, g: np.ndarray, xi: np.ndarray, eta: np.ndarray) -> Dict[str, float]:
    """F₂(u)(ξ, ξ̄, η, η̄) as the frame sum plus Σ |u(ξ, ē_i, e_j, η̄)|^2."""
    frame, w_xi, w_eta = _frame_vectors(g, xi, eta, None)
    u_frame = to_frame(u, frame)
    frame_sum = _frame_sum_parts(u_frame, w_xi, w_eta)[3]
    squares = float(np.sum(np.abs(np.einsum('aijd,a,d->ij', u_frame, w_xi, np.conj(w_eta))) ** 2))
    value = griffiths_value(f2_quadratic(u, g), xi, eta)
    return {'f2': value, 'frame_sum': frame_sum, 'squares': squares, 'residual': abs(value - frame_sum - squares)}


def zero_pair_diagnostics(f: PointGeometry, xi: np.ndarray, eta: np.ndarray) -> Dict[str, float]:
    """Residuals at a zero pair of a flowed non-negative curvature:
    id1 = max |Ω(ξ, ζ̄, ν, η̄)|, id2 = difference of the two frame sums,
    id3 = max |g(∇_ξ T(ζ, ν), η̄)|, over coordinate basis vectors ζ, ν."""
    f.require(1, 'zero_pair_diagnostics')
    omega, eb = f.omega, np.conj(eta)
    id1 = float(np.max(np.abs(np.einsum('abcd,a,d->bc', omega, xi, eb))))
    frame, w_xi, w_eta = _frame_vectors(f.g, xi, eta, None)
    u_frame = to_frame(omega, frame)
    a0, _, c0, _ = _frame_sum_parts(u_frame, w_xi, w_eta)
    lhs = np.einsum('ij,ji->', a0, c0)
    rhs = np.einsum('ibjd,b,d,ajci,a,c->', u_frame, np.conj(w_xi), np.conj(w_eta), u_frame, w_xi, w_eta,
                    optimize=True)
    id2 = float(abs(lhs - rhs))
    id3 = float(np.max(np.abs(np.einsum('a,apml,l->pm', xi, f.nabla_torsion, eb))))
    return {'id1': id1, 'id2': id2, 'id3': id3}
