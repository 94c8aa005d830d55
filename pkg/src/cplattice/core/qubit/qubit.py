"""
Qubit maps in King-Ruskai canonical form.

The analysis matrix is S = 2·S_Φ̂, which has the sparsity pattern

    [[a, 0, τ, σ],
     [0, b, δ, τ],
     [τ̄, δ, c, 0],
     [σ, τ̄, 0, e]]

with (a, b, c, e) = (1+t3+λ3, 1+t3-λ3, 1-t3-λ3, 1-t3+λ3), τ = t1 + i·t2, δ = λ1 - λ2 and σ = λ1 + λ2.
Its Schur parameters then have closed forms: Γ12 = Γ34 = 0, Γ23 = δ/√(bc), Γ13 = τ√b / (√(bc - δ²)·√a),
Γ24 = τ√c / (√(bc - δ²)·√e) and Γ14 = (S̃14 - center) / (D(Γ13)·D(Γ24)) with center = -Γ13·conj(Γ23)·Γ24.
Positivity reduces to eight inequalities: Γkk ≥ 0 and |Γ23|, |Γ13|, |Γ24|, |Γ14| ≤ 1.
"""

from typing import Dict, List, Optional, Tuple

import numpy as np
from opentelemetry import trace

from .models import KingRuskaiForm, QubitClosedFormParams, DegenerateCase
from ..channel.models import ChoiMatrix
from ..lattice.models import CpVerdict, SchurParams, OffEntry, traversal_order
from ..lattice.violation import Violation, ViolationKind
from ..shared.config import DEFAULT_PINV_CUTOFF, DEFAULT_TOLERANCE
from ..shared.models import scaled_tolerance
from ..shared.tracing import resolve_tracer

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


def pauli_basis() -> np.ndarray:
    """Stacked Pauli matrices in the order I, σx, σy, σz."""
    return np.stack([np.eye(2, dtype=np.complex128), SIGMA_X, SIGMA_Y, SIGMA_Z])


def transfer_matrix(form: KingRuskaiForm) -> np.ndarray:
    """Real 4×4 matrix of Φ in the Pauli basis: first column (1, t), diagonal (1, Λ)."""
    t = np.eye(4)
    t[1:, 0] = form.t
    t[1:, 1:] = np.diag(form.lam)
    return t


def choi_from_transfer_matrix(transfer) -> ChoiMatrix:
    """
    Choi matrix of the qubit map with Pauli transfer matrix T, i.e. Φ(σ_ν) = Σ_μ T[μ, ν]·σ_μ.

    Expands every matrix unit in the Pauli basis: Φ(E_kj) = ½·Σ_{μν} T[μ, ν]·Tr(σ_ν E_kj)·σ_μ.
    """
    paulis = pauli_basis()
    # Tr(σ_ν E_kj) = σ_ν[j, k]
    blocks = np.einsum("mv,vjk,mab->kajb", np.asarray(transfer, dtype=np.complex128), paulis, paulis) / 2.0
    return ChoiMatrix(n=2, matrix=blocks.reshape(4, 4))


def choi_forward(form: KingRuskaiForm) -> ChoiMatrix:
    t1, t2, t3 = form.t
    l1, l2, l3 = form.lam
    tau = complex(t1, t2)
    s = np.array(
        [
            [1 + t3 + l3, tau.conjugate(), 0, l1 + l2],
            [tau, 1 - t3 - l3, l1 - l2, 0],
            [0, l1 - l2, 1 + t3 - l3, tau.conjugate()],
            [l1 + l2, 0, tau, 1 - t3 + l3],
        ],
        dtype=np.complex128,
    )
    return ChoiMatrix(n=2, matrix=s / 2.0)


def choi_adjoint(form: KingRuskaiForm) -> ChoiMatrix:
    """
    Choi matrix of the Hilbert-Schmidt adjoint Φ̂.

    Entry (4, 2) is t1 - i·t2; the matrix is Hermitian and equals adjoint_choi(choi_forward(form)).
    """
    t1, t2, t3 = form.t
    l1, l2, l3 = form.lam
    tau = complex(t1, t2)
    s = np.array(
        [
            [1 + t3 + l3, 0, tau, l1 + l2],
            [0, 1 + t3 - l3, l1 - l2, tau],
            [tau.conjugate(), l1 - l2, 1 - t3 - l3, 0],
            [l1 + l2, tau.conjugate(), 0, 1 - t3 + l3],
        ],
        dtype=np.complex128,
    )
    return ChoiMatrix(n=2, matrix=s / 2.0)


def analysis_matrix(form: KingRuskaiForm) -> np.ndarray:
    """2·S_Φ̂, the matrix whose Schur parameters have closed forms."""
    return 2.0 * choi_adjoint(form).matrix


def _place(
    value: complex,
    center: complex,
    radius: float,
    location: Tuple[int, int],
    tol: float,
    violations: List[Violation],
) -> Tuple[Optional[complex], bool]:
    """Locate a normalized entry in its disk the way the lattice test does."""
    residual = value - center
    if radius > tol:
        gamma = complex(residual / radius)
        modulus = abs(gamma)
        if modulus > 1.0 + tol:
            violations.append(
                Violation(kind=ViolationKind.PARAMETER_EXCEEDS_DISK, location=location, magnitude=modulus, value=gamma)
            )
        elif modulus > 1.0:
            gamma = gamma / modulus
        return gamma, True
    if abs(residual) > tol:
        violations.append(
            Violation(kind=ViolationKind.COMPATIBILITY_RESIDUAL, location=location, magnitude=abs(residual))
        )
    return None, False


def _radius(dk2: float, dj2: float) -> float:
    return float(np.sqrt(max(dk2, 0.0)) * np.sqrt(max(dj2, 0.0)))


def _middle_pinv(positive: List[bool], s23: complex, cutoff: float) -> Tuple[float, float, complex]:
    """(P22, P33, P32) of the pseudo-inverse of the normalized block on rows and columns {2, 3}."""
    if not (positive[1] and positive[2]):
        return float(positive[1]), float(positive[2]), 0j
    m = abs(s23)
    if 1.0 - m <= cutoff * (1.0 + m):
        # rank one: eigenvalue 1 + |s23| with eigenvector (1, e^{-iφ})/√2
        phase = s23 / m
        scale = 1.0 / (2.0 * (1.0 + m))
        return scale, scale, phase.conjugate() * scale
    det = 1.0 - m * m
    return 1.0 / det, 1.0 / det, -s23.conjugate() / det


def _evaluate(
    form: KingRuskaiForm, tol: float, cutoff: float
) -> Tuple[QubitClosedFormParams, Dict[Tuple[int, int], Tuple[complex, bool]], List[Violation]]:
    t1, t2, t3 = form.t
    l1, l2, l3 = form.lam
    g = (1 + t3 + l3, 1 + t3 - l3, 1 - t3 - l3, 1 - t3 + l3)
    tau = complex(t1, t2)
    delta = l1 - l2
    sigma = l1 + l2
    threshold = scaled_tolerance(tol, max(abs(x) for x in g))
    violations: List[Violation] = []

    for k, gk in enumerate(g, start=1):
        if gk < -threshold:
            violations.append(Violation(kind=ViolationKind.NEGATIVE_DIAGONAL, location=(k,), magnitude=-gk))
    positive = [gk > threshold for gk in g]
    rows = ((tau, sigma), (delta, tau), (tau, delta), (sigma, tau))
    for k in range(4):
        largest = max(abs(x) for x in rows[k])
        if not positive[k] and largest > threshold:
            violations.append(
                Violation(kind=ViolationKind.NONZERO_ROW_AT_ZERO_DIAGONAL, location=(k + 1,), magnitude=largest)
            )

    def normalized(x: complex, i: int, j: int) -> complex:
        return complex(x / np.sqrt(g[i] * g[j])) if positive[i] and positive[j] else 0j

    p = [float(x) for x in positive]
    s23 = normalized(delta, 1, 2)
    s13 = normalized(tau, 0, 2)
    s24 = normalized(tau, 1, 3)
    s14 = normalized(sigma, 0, 3)
    entries: Dict[Tuple[int, int], Tuple[complex, bool]] = {}

    for k, j in ((1, 2), (3, 4)):
        entries[(k, j)] = (0j, _radius(p[k - 1], p[j - 1]) > tol)
    gamma23, active23 = _place(s23, 0j, _radius(p[1], p[2]), (2, 3), tol, violations)

    dj2 = p[2] - abs(s23) ** 2 * p[1]
    radius13 = _radius(p[0], dj2)
    if dj2 < -tol:
        violations.append(Violation(kind=ViolationKind.COMPATIBILITY_RESIDUAL, location=(1, 3), magnitude=-dj2))
    gamma13, active13 = _place(s13, 0j, radius13, (1, 3), tol, violations)
    dk2 = p[1] - abs(s23) ** 2 * p[2]
    if dk2 < -tol:
        violations.append(Violation(kind=ViolationKind.COMPATIBILITY_RESIDUAL, location=(2, 4), magnitude=-dk2))
    gamma24, active24 = _place(s24, 0j, _radius(dk2, p[3]), (2, 4), tol, violations)

    block_norm = np.sqrt(p[1] + p[2] + 2 * abs(s23) ** 2)
    if positive[1] and positive[2] and 1.0 - abs(s23) < -scaled_tolerance(tol, block_norm):
        violations.append(
            Violation(kind=ViolationKind.COMPATIBILITY_RESIDUAL, location=(1, 4), magnitude=abs(s23) - 1.0)
        )
    p22, p33, p32 = _middle_pinv(positive, s23, cutoff)
    center = s13 * p32 * s24
    dk2 = p[0] - abs(s13) ** 2 * p33
    dj2 = p[3] - abs(s24) ** 2 * p22
    if min(dk2, dj2) < -tol:
        violations.append(
            Violation(kind=ViolationKind.COMPATIBILITY_RESIDUAL, location=(1, 4), magnitude=-min(dk2, dj2))
        )
    radius14 = _radius(dk2, dj2)
    gamma14, active14 = _place(s14, center, radius14, (1, 4), tol, violations)

    entries[(2, 3)] = (gamma23 if active23 else 0j, active23)
    entries[(1, 3)] = (gamma13 if active13 else 0j, active13)
    entries[(2, 4)] = (gamma24 if active24 else 0j, active24)
    entries[(1, 4)] = (gamma14 if active14 else 0j, active14)

    if not all(positive):
        case, index = DegenerateCase.ZERO_DIAGONAL, positive.index(False) + 1
    elif radius13 <= tol:
        case, index = DegenerateCase.GAMMA23_BOUNDARY, None
    elif radius14 <= tol:
        case, index = DegenerateCase.GAMMA13_OR_GAMMA24_BOUNDARY, None
    else:
        case, index = DegenerateCase.NONE, None

    params = QubitClosedFormParams(
        gamma_diag=g,
        gamma_23=gamma23,
        gamma_13=gamma13,
        gamma_24=gamma24,
        gamma_14=gamma14,
        degenerate_case=case,
        degenerate_index=index,
    )
    return params, entries, violations


def closed_form_params(
    form: KingRuskaiForm, tol: float = DEFAULT_TOLERANCE, cutoff: float = DEFAULT_PINV_CUTOFF
) -> QubitClosedFormParams:
    """
    Closed-form Schur parameters of 2·S_Φ̂.

    Entries whose disk collapses (denominator at most tol) are left undefined and the degenerate case is
    recorded; nothing is raised, even for maps that are not completely positive.
    """
    params, _, _ = _evaluate(form, tol, cutoff)
    return params


def eight_inequalities_cp(
    form: KingRuskaiForm,
    tol: float = DEFAULT_TOLERANCE,
    cutoff: float = DEFAULT_PINV_CUTOFF,
    tracer: Optional[trace.Tracer] = None,
) -> CpVerdict:
    """
    Complete-positivity verdict from the eight inequalities.

    Degenerate branches follow the lattice test: when |Γ23| = 1 both Γ13 and Γ24 collapse, which forces
    t1 = t2 = 0, and Γ14 stays free in the closed unit disk; when |Γ13| = 1 or |Γ24| = 1, S14 must sit on
    the disk center, i.e. Γ14 = 0. The reported violation is the one the lattice test would report.
    """
    with resolve_tracer(tracer).start_as_current_span("qubit.eight_inequalities_cp") as span:
        span.set_attribute("t", list(form.t))
        span.set_attribute("lambda", list(form.lam))
        params, entries, violations = _evaluate(form, tol, cutoff)
        span.set_attribute("degenerate_case", params.degenerate_case.value)
        span.set_status(trace.Status(trace.StatusCode.OK))
        if violations:
            span.set_attribute("is_cp", False)
            return CpVerdict(is_cp=False, violation=violations[0])
        span.set_attribute("is_cp", True)
        threshold = scaled_tolerance(tol, max(abs(x) for x in params.gamma_diag))
        diag = tuple(float(x) if x > threshold else 0.0 for x in params.gamma_diag)
        off = tuple(
            OffEntry(k=k, j=j, value=entries[(k, j)][0], active=entries[(k, j)][1]) for k, j in traversal_order(4)
        )
        return CpVerdict(is_cp=True, params=SchurParams(N=4, diag=diag, off=off))


def eight_inequalities_batch(
    t,
    lam,
    tol: float = DEFAULT_TOLERANCE,
    cutoff: float = DEFAULT_PINV_CUTOFF,
) -> np.ndarray:
    """
    Vectorized CP verdicts for m qubit maps given as (m, 3) arrays of t and Λ.

    Rows on a degenerate branch are re-evaluated with eight_inequalities_cp, so every verdict equals
    the scalar one.
    """
    t = np.atleast_2d(np.asarray(t, dtype=np.float64))
    lam = np.atleast_2d(np.asarray(lam, dtype=np.float64))
    if t.shape != lam.shape or t.shape[1:] != (3,):
        raise ValueError(f"t and lambda must both have shape (m, 3), got {t.shape} and {lam.shape}")
    t1, t2, t3 = t.T
    l1, l2, l3 = lam.T
    g = np.stack([1 + t3 + l3, 1 + t3 - l3, 1 - t3 - l3, 1 - t3 + l3], axis=1)
    tau = t1 + 1j * t2
    threshold = tol * np.maximum(1.0, np.max(np.abs(g), axis=1))

    result = np.zeros(t.shape[0], dtype=bool)
    decided = np.any(g < -threshold[:, None], axis=1)
    live = ~decided & np.all(g > threshold[:, None], axis=1)

    with np.errstate(divide="ignore", invalid="ignore"):
        a, b, c, e = (np.where(live, g[:, i], 1.0) for i in range(4))
        s23 = (l1 - l2) / np.sqrt(b * c)
        s13 = tau / np.sqrt(a * c)
        s24 = tau / np.sqrt(b * e)
        s14 = (l1 + l2) / np.sqrt(a * e)
        m23 = np.abs(s23)
        d23sq = 1.0 - m23**2
        gamma13 = s13 / np.sqrt(d23sq)
        gamma24 = s24 / np.sqrt(d23sq)
        d13sq = 1.0 - np.abs(s13) ** 2 / d23sq
        d24sq = 1.0 - np.abs(s24) ** 2 / d23sq
        center = -s13 * np.conj(s23) * s24 / d23sq
        radius14 = np.sqrt(np.maximum(d13sq, 0.0)) * np.sqrt(np.maximum(d24sq, 0.0))
        gamma14 = (s14 - center) / radius14

    def settle(mask: np.ndarray, verdict) -> None:
        nonlocal live, decided
        result[mask] = verdict if np.isscalar(verdict) else verdict[mask]
        decided = decided | mask
        live = live & ~mask

    settle(live & (m23 > 1.0 + tol), False)
    # a collapsed Γ23 disk or a rank-deficient middle block goes through the scalar path
    live = live & (d23sq > tol * tol) & (1.0 - m23 > cutoff * (1.0 + m23))
    settle(live & ((np.abs(gamma13) > 1.0 + tol) | (np.abs(gamma24) > 1.0 + tol)), False)
    settle(live & ((d13sq < -tol) | (d24sq < -tol)), False)
    live = live & (radius14 > tol)
    settle(live, np.abs(gamma14) <= 1.0 + tol)

    for i in np.flatnonzero(~decided):
        form = KingRuskaiForm(t=tuple(t[i]), lam=tuple(lam[i]))
        result[i] = eight_inequalities_cp(form, tol=tol, cutoff=cutoff).is_cp
    return result
