"""
Schur parametrization of positive semi-definite matrices and the lattice complete-positivity test.

A PSD matrix S is normalized to S̃ with unit diagonal (zero rows where S_kk vanishes). Walking the
entries by increasing gap j - k, every S̃_kj lies in a disk fixed by the entries of smaller gap; the
Schur parameter Γ_kj is the position of S̃_kj inside that disk. S is PSD exactly when every Γ_kj is a
contraction and entries with a collapsed disk sit on its center.
"""

from typing import Optional, Tuple

import numpy as np
from opentelemetry import trace

from .exceptions import (
    OutsideUnitDiskException,
    IntermediateBlockNotPSDException,
    UndefinedParameterException,
    CpViolationException,
    NegativeDiagonalException,
    NonzeroRowAtZeroDiagonalException,
    ParameterExceedsDiskException,
    CompatibilityResidualException,
    NonHermitianInputException,
)
from .models import SchurParams, OffEntry, CpVerdict, DiskGeometry, traversal_order, PARAMETER_SLACK
from ..channel.models import ChoiMatrix
from ..linalg.exceptions import NegativeEigenvalueBeyondToleranceException, NotSquareException
from ..linalg.linalg import hermitian_pinv_psd
from ..shared.config import DEFAULT_PINV_CUTOFF, DEFAULT_TOLERANCE
from ..shared.models import as_complex_matrix, is_square
from ..shared.tracing import resolve_tracer, fail_span

RANDOM_PARAMETER_RADIUS = 0.999


def defect(gamma: complex) -> float:
    """
    Scalar defect √(1 - |γ|²).

    Raises:
        OutsideUnitDiskException: If |γ| > 1
    """
    modulus = abs(gamma)
    if modulus > 1.0 + PARAMETER_SLACK:
        raise OutsideUnitDiskException(gamma)
    return float(np.sqrt(max(0.0, 1.0 - modulus * modulus)))


def elementary_rotation(gamma: complex) -> np.ndarray:
    """Unitary [[γ, D], [D, -conj(γ)]] with D = √(1 - |γ|²)."""
    d = defect(gamma)
    return np.array([[gamma, d], [d, -np.conj(gamma)]], dtype=np.complex128)


def _diagonal_scale(s: np.ndarray) -> float:
    return max(1.0, float(np.max(np.abs(np.diag(s)))))


def normalize(s, tol: float = DEFAULT_TOLERANCE) -> Tuple[np.ndarray, np.ndarray]:
    """
    Normalize S to unit diagonal: S̃_kj = S_kj / √(S_kk S_jj).

    Rows and columns whose diagonal is at most tol·scale are zeroed (S̃_kk = 0 too) and their d_k is
    reported as 0. The scale is max(1, max_k |S_kk|).

    Returns:
        Tuple[np.ndarray, np.ndarray]: Exactly Hermitian S̃ and the real diagonal d

    Raises:
        NonHermitianInputException: If S differs from S* by more than tol·scale or has a non-real diagonal
        NegativeDiagonalException: At the first k with S_kk < -tol·scale
        NonzeroRowAtZeroDiagonalException: At the first zero-diagonal row that carries a nonzero entry
    """
    s = as_complex_matrix(s)
    if not is_square(s):
        raise NotSquareException(s.shape)
    size = s.shape[0]
    threshold = tol * _diagonal_scale(s)

    asymmetry = np.abs(s - s.conj().T)
    worst = np.unravel_index(int(np.argmax(asymmetry)), asymmetry.shape)
    if asymmetry[worst] > threshold:
        k, j = sorted((int(worst[0]) + 1, int(worst[1]) + 1))
        raise NonHermitianInputException((k, j), asymmetry[worst])
    diagonal = np.diag(s)
    imaginary = np.abs(diagonal.imag)
    if np.any(imaginary > threshold):
        k = int(np.argmax(imaginary > threshold))
        raise NonHermitianInputException((k + 1, k + 1), imaginary[k])

    d = diagonal.real.copy()
    for k in range(size):
        if d[k] < -threshold:
            raise NegativeDiagonalException((k + 1,), -d[k])
    zero = d <= threshold
    for k in np.flatnonzero(zero):
        row = np.abs(s[k, :]).copy()
        row[k] = 0.0
        if np.max(row) > threshold:
            raise NonzeroRowAtZeroDiagonalException((int(k) + 1,), np.max(row))

    d[zero] = 0.0
    hermitian = np.triu(s, 1)
    hermitian = hermitian + hermitian.conj().T
    root = np.where(zero, 0.0, np.sqrt(np.where(zero, 1.0, d)))
    inverse_root = np.where(zero, 0.0, 1.0 / np.where(zero, 1.0, root))
    normalized = inverse_root[:, None] * hermitian * inverse_root[None, :]
    normalized[np.diag_indices(size)] = np.where(zero, 0.0, 1.0)
    return normalized, d


def disk_geometry(
    normalized: np.ndarray,
    k: int,
    j: int,
    tol: float = DEFAULT_TOLERANCE,
    cutoff: float = DEFAULT_PINV_CUTOFF,
) -> DiskGeometry:
    """
    Disk for the normalized entry (k, j), 1-based, from the entries of smaller gap.

    With M = {k+1, ..., j-1} and P the PSD pseudo-inverse of S̃_MM:
        center = S̃_kM · P · S̃_Mj
        radius = d_k · d_j, d_k² = S̃_kk - S̃_kM · P · S̃_Mk (d_j analogous)

    Squared defects in [-tol, 0] count as 0.

    Raises:
        IntermediateBlockNotPSDException: If S̃_MM or a Schur complement is clearly negative
    """
    center, radius = _disk(as_complex_matrix(normalized), k, j, tol, cutoff)
    return DiskGeometry(center=center, radius=radius)


def _disk(normalized: np.ndarray, k: int, j: int, tol: float, cutoff: float) -> Tuple[complex, float]:
    a, b = k - 1, j - 1
    if b - a <= 1:
        center = 0j
        dk2 = normalized[a, a].real
        dj2 = normalized[b, b].real
    else:
        middle = slice(a + 1, b)
        try:
            pinv = hermitian_pinv_psd(normalized[middle, middle], cutoff=cutoff, tol=tol)
        except NegativeEigenvalueBeyondToleranceException as e:
            raise IntermediateBlockNotPSDException(k, j, e.eigenvalue) from e
        row = normalized[a, middle]
        column = normalized[middle, b]
        center = complex(row @ pinv @ column)
        dk2 = float((normalized[a, a] - row @ pinv @ row.conj()).real)
        dj2 = float((normalized[b, b] - column.conj() @ pinv @ column).real)
    for value in (dk2, dj2):
        if value < -tol:
            raise IntermediateBlockNotPSDException(k, j, value)
    return center, float(np.sqrt(max(dk2, 0.0)) * np.sqrt(max(dj2, 0.0)))


def row_contraction(params: SchurParams, k: int, j: int) -> np.ndarray:
    """[Γ_k,k+1, D(Γ_k,k+1)·Γ_k,k+2, ..., D(Γ_k,k+1)···D(Γ_k,j-1)·Γ_kj]"""
    if not 1 <= k < j <= params.N:
        raise UndefinedParameterException(k, j)
    result = np.zeros(j - k, dtype=np.complex128)
    product = 1.0
    for i, column in enumerate(range(k + 1, j + 1)):
        gamma = params.value(k, column)
        result[i] = product * gamma
        product *= defect(gamma)
    return result


def column_contraction(params: SchurParams, k: int, j: int) -> np.ndarray:
    """[Γ_j-1,j, Γ_j-2,j·D(Γ_j-1,j), ..., Γ_kj·D(Γ_k+1,j)···D(Γ_j-1,j)]"""
    if not 1 <= k < j <= params.N:
        raise UndefinedParameterException(k, j)
    result = np.zeros(j - k, dtype=np.complex128)
    product = 1.0
    for i, row in enumerate(range(j - 1, k - 1, -1)):
        gamma = params.value(row, j)
        result[i] = gamma * product
        product *= defect(gamma)
    return result


def schur_params_from_matrix(
    s,
    tol: float = DEFAULT_TOLERANCE,
    cutoff: float = DEFAULT_PINV_CUTOFF,
    tracer: Optional[trace.Tracer] = None,
) -> SchurParams:
    """
    Extract the Schur parameters of a PSD matrix.

    Entries are visited by increasing gap, then increasing row. An entry whose disk radius exceeds tol is
    active with Γ_kj = (S̃_kj - center) / radius; moduli in (1, 1 + tol] are clamped to the unit circle.
    An entry with a collapsed disk is inactive and must sit on the center within tol.

    Raises:
        CpViolationException: The first violation in traversal order (one of its five subclasses)
    """
    with resolve_tracer(tracer).start_as_current_span("lattice.schur_params_from_matrix") as span:
        try:
            normalized, d = normalize(s, tol)
            size = normalized.shape[0]
            span.set_attribute("N", size)
            span.set_attribute("tolerance", tol)
            entries = []
            for k, j in traversal_order(size):
                try:
                    center, radius = _disk(normalized, k, j, tol, cutoff)
                except IntermediateBlockNotPSDException as e:
                    raise CompatibilityResidualException((k, j), abs(e.value)) from e
                residual = normalized[k - 1, j - 1] - center
                if radius > tol:
                    gamma = complex(residual / radius)
                    modulus = abs(gamma)
                    if modulus > 1.0 + tol:
                        raise ParameterExceedsDiskException((k, j), modulus, gamma)
                    if modulus > 1.0:
                        gamma = gamma / modulus
                    entries.append(OffEntry(k=k, j=j, value=gamma, active=True))
                else:
                    if abs(residual) > tol:
                        raise CompatibilityResidualException((k, j), abs(residual))
                    entries.append(OffEntry(k=k, j=j, value=0j, active=False))
        except CpViolationException as e:
            span.set_attribute("violation_kind", e.violation.kind.value)
            span.set_attribute("violation_location", list(e.violation.location))
            fail_span(span, e)
            raise
        span.set_attribute("number_of_active_parameters", sum(e.active for e in entries))
        span.set_status(trace.Status(trace.StatusCode.OK))
        return SchurParams(N=size, diag=tuple(float(x) for x in d), off=tuple(entries))


def matrix_from_schur_params(
    params: SchurParams,
    tol: float = DEFAULT_TOLERANCE,
    cutoff: float = DEFAULT_PINV_CUTOFF,
    tracer: Optional[trace.Tracer] = None,
) -> np.ndarray:
    """
    Rebuild the PSD matrix of a Schur parameter family.

    S̃ is filled by increasing gap with S̃_kj = center + radius·Γ_kj (inactive entries take the center),
    then S_kj = √Γ_kk · S̃_kj · √Γ_jj.
    """
    with resolve_tracer(tracer).start_as_current_span("lattice.matrix_from_schur_params") as span:
        size = params.N
        span.set_attribute("N", size)
        d = np.array(params.diag, dtype=np.float64)
        positive = d > 0
        normalized = np.diag(np.where(positive, 1.0, 0.0)).astype(np.complex128)
        try:
            for entry in params.off:
                k, j = entry.k, entry.j
                center, radius = _disk(normalized, k, j, tol, cutoff)
                value = center
                if entry.active:
                    value = value + radius * entry.value
                normalized[k - 1, j - 1] = value
                normalized[j - 1, k - 1] = np.conj(value)
        except IntermediateBlockNotPSDException as e:
            fail_span(span, e)
            raise
        root = np.sqrt(d)
        s = root[:, None] * normalized * root[None, :]
        span.set_status(trace.Status(trace.StatusCode.OK))
        return s


def lattice_test(
    s,
    tol: float = DEFAULT_TOLERANCE,
    cutoff: float = DEFAULT_PINV_CUTOFF,
    tracer: Optional[trace.Tracer] = None,
) -> CpVerdict:
    """
    Decide positive semi-definiteness of a square matrix without computing its eigenvalues.

    Never raises on a failing matrix: the first violation is returned in the verdict.
    """
    with resolve_tracer(tracer).start_as_current_span("lattice.lattice_test") as span:
        try:
            params = schur_params_from_matrix(s, tol=tol, cutoff=cutoff, tracer=tracer)
        except CpViolationException as e:
            span.set_attribute("is_cp", False)
            span.set_status(trace.Status(trace.StatusCode.OK))
            return CpVerdict(is_cp=False, violation=e.violation)
        span.set_attribute("is_cp", True)
        span.set_status(trace.Status(trace.StatusCode.OK))
        return CpVerdict(is_cp=True, params=params)


def cp_test(
    choi: ChoiMatrix,
    tol: float = DEFAULT_TOLERANCE,
    cutoff: float = DEFAULT_PINV_CUTOFF,
    tracer: Optional[trace.Tracer] = None,
) -> CpVerdict:
    """Complete-positivity verdict for the map behind a Choi matrix."""
    with resolve_tracer(tracer).start_as_current_span("lattice.cp_test") as span:
        span.set_attribute("n", choi.n)
        verdict = lattice_test(choi.matrix, tol=tol, cutoff=cutoff, tracer=tracer)
        span.set_attribute("is_cp", verdict.is_cp)
        if verdict.violation is not None:
            span.set_attribute("violation_kind", verdict.violation.kind.value)
        span.set_status(trace.Status(trace.StatusCode.OK))
        return verdict


def random_schur_params(size: int, rng: np.random.Generator) -> SchurParams:
    """Diagonal from |z|² of standard complex Gaussians, each Γ_kj uniform on the disk of radius 0.999."""
    z = (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / np.sqrt(2)
    diag = np.abs(z) ** 2
    off = []
    for k, j in traversal_order(size):
        modulus = RANDOM_PARAMETER_RADIUS * np.sqrt(rng.uniform())
        angle = rng.uniform(0.0, 2.0 * np.pi)
        off.append(OffEntry(k=k, j=j, value=complex(modulus * np.exp(1j * angle)), active=True))
    return SchurParams(N=size, diag=tuple(float(x) for x in diag), off=tuple(off))


def random_cp(n: int, seed: int, tracer: Optional[trace.Tracer] = None) -> ChoiMatrix:
    """Deterministic random Choi matrix of a CP map on M_n, sampled through its free Schur parameters."""
    with resolve_tracer(tracer).start_as_current_span("lattice.random_cp") as span:
        span.set_attribute("n", n)
        span.set_attribute("seed", seed)
        if n < 1:
            e = ValueError(f"n must be at least 1, got {n}")
            fail_span(span, e)
            raise e
        params = random_schur_params(n * n, np.random.default_rng(seed))
        s = matrix_from_schur_params(params, tracer=tracer)
        span.set_status(trace.Status(trace.StatusCode.OK))
        return ChoiMatrix(n=n, matrix=s)
