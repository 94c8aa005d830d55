from typing import Optional

import numpy as np
from opentelemetry import trace

from .exceptions import DimensionMismatchException, NotPSDException, NotUnitaryException, InvalidMixtureWeightException
from .models import KrausSet, ChoiMatrix, ChannelSpec, KrausChannelSpec, ChoiChannelSpec
from ..linalg.exceptions import LinalgException
from ..linalg.linalg import eig_hermitian
from ..shared.config import DEFAULT_PINV_CUTOFF, DEFAULT_TOLERANCE
from ..shared.models import as_complex_matrix, frobenius_norm, scaled_tolerance
from ..shared.tracing import resolve_tracer, fail_span
from ..qubit.qubit import choi_forward

UNITARY_TOLERANCE = 1e-10


def _square(x, n: int, what: str = "matrix") -> np.ndarray:
    x = as_complex_matrix(x)
    if x.shape != (n, n):
        raise DimensionMismatchException((n, n), x.shape, what)
    return x


def choi_from_kraus(kraus: KrausSet, tracer: Optional[trace.Tracer] = None) -> ChoiMatrix:
    """
    Choi matrix of Φ(X) = Σ A* X A.

    Each operator contributes the rank-one term v·v* with v[(k-1)n + a] = conj(A[k, a]).

    Returns:
        ChoiMatrix: Always Hermitian PSD
    """
    with resolve_tracer(tracer).start_as_current_span("channel.choi_from_kraus") as span:
        span.set_attribute("n", kraus.n)
        span.set_attribute("number_of_operators", len(kraus.ops))
        vectors = np.stack([op.conj().reshape(-1) for op in kraus.ops], axis=1)
        s = vectors @ vectors.conj().T
        span.set_status(trace.Status(trace.StatusCode.OK))
        return ChoiMatrix(n=kraus.n, matrix=s)


def apply_kraus(kraus: KrausSet, x) -> np.ndarray:
    x = _square(x, kraus.n)
    return sum(op.conj().T @ x @ op for op in kraus.ops)


def apply_channel(choi: ChoiMatrix, x) -> np.ndarray:
    """
    Y[k, j] = Σ_{l,m} Φ(E_lm)[k, j] · X[l, m].

    Raises:
        DimensionMismatchException: If X is not n×n
    """
    x = _square(x, choi.n)
    return np.einsum("lkmj,lm->kj", choi.blocks(), x)


def adjoint_choi(choi: ChoiMatrix) -> ChoiMatrix:
    """
    Choi matrix of the Hilbert-Schmidt adjoint: Φ̂(E_kj)[l, m] = conj(Φ(E_lm)[k, j]).

    Pure index permutation and conjugation, so applying it twice returns the input exactly.
    """
    n = choi.n
    adjoint = np.conj(choi.blocks().transpose(1, 0, 3, 2)).reshape(n * n, n * n)
    return ChoiMatrix(n=n, matrix=adjoint)


def block_traces(choi: ChoiMatrix) -> np.ndarray:
    """Matrix of Tr Φ(E_kj)."""
    return np.einsum("kaja->kj", choi.blocks())


def is_trace_preserving(choi: ChoiMatrix, tol: float = DEFAULT_TOLERANCE) -> bool:
    deviation = block_traces(choi) - np.eye(choi.n)
    return bool(np.max(np.abs(deviation)) <= tol)


def is_unital(choi: ChoiMatrix, tol: float = DEFAULT_TOLERANCE) -> bool:
    image_of_identity = np.einsum("lalb->ab", choi.blocks())
    return bool(np.max(np.abs(image_of_identity - np.eye(choi.n))) <= tol)


def kraus_from_choi(
    choi: ChoiMatrix,
    tol: float = DEFAULT_TOLERANCE,
    cutoff: float = DEFAULT_PINV_CUTOFF,
    tracer: Optional[trace.Tracer] = None,
) -> KrausSet:
    """
    Minimal Kraus set from the spectral decomposition of a PSD Choi matrix.

    An eigenpair (λ, v) gives the operator A[k, a] = conj(√λ · v[(k-1)n + a]); eigenvalues at or
    below cutoff·λ_max are dropped, so the number of operators equals the numerical rank.

    Raises:
        NotPSDException: If the Choi matrix is not Hermitian, or has an eigenvalue below -tol·max(1, ‖S‖_F)
    """
    with resolve_tracer(tracer).start_as_current_span("channel.kraus_from_choi") as span:
        n = choi.n
        span.set_attribute("n", n)
        try:
            decomposition = eig_hermitian(choi.matrix)
        except LinalgException as e:
            error = NotPSDException()
            fail_span(span, error)
            raise error from e
        eigenvalues = decomposition.eigenvalues
        if eigenvalues[-1] < -scaled_tolerance(tol, frobenius_norm(choi.matrix)):
            error = NotPSDException(float(eigenvalues[-1]))
            fail_span(span, error)
            raise error
        rank = decomposition.rank(cutoff)
        span.set_attribute("rank", rank)
        if rank == 0:
            # the zero map still needs one operator
            span.set_status(trace.Status(trace.StatusCode.OK))
            return KrausSet(n=n, ops=[np.zeros((n, n))])
        ops = [
            np.conj(np.sqrt(eigenvalues[i]) * decomposition.eigenvectors[:, i]).reshape(n, n) for i in range(rank)
        ]
        span.set_status(trace.Status(trace.StatusCode.OK))
        return KrausSet(n=n, ops=ops)


def _check_unitary(u: np.ndarray, name: str) -> None:
    deviation = float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))
    if deviation > UNITARY_TOLERANCE:
        raise NotUnitaryException(deviation, name)


def conjugate_channel(choi: ChoiMatrix, u, v, tracer: Optional[trace.Tracer] = None) -> ChoiMatrix:
    """
    Choi matrix of A ↦ U·Φ(V A V*)·U*.

    Raises:
        DimensionMismatchException: If U or V is not n×n
        NotUnitaryException: If U or V is not unitary within 1e-10
    """
    with resolve_tracer(tracer).start_as_current_span("channel.conjugate_channel") as span:
        n = choi.n
        span.set_attribute("n", n)
        try:
            u = _square(u, n, "U")
            v = _square(v, n, "V")
            _check_unitary(u, "U")
            _check_unitary(v, "V")
        except Exception as e:
            fail_span(span, e)
            raise
        # V E_kj V* = Σ_{l,m} V[l,k] conj(V[m,j]) E_lm, then each block is conjugated by U
        conjugated = np.einsum("lk,mj,ac,lcmd,bd->kajb", v, v.conj(), u, choi.blocks(), u.conj(), optimize=True)
        span.set_status(trace.Status(trace.StatusCode.OK))
        return ChoiMatrix(n=n, matrix=conjugated.reshape(n * n, n * n))


def hilbert_schmidt_inner(a, b) -> complex:
    """⟨A, B⟩ = Tr(A B*)."""
    return complex(np.vdot(as_complex_matrix(b), as_complex_matrix(a)))


def mix_channels(first: ChoiMatrix, second: ChoiMatrix, alpha: float) -> ChoiMatrix:
    """Choi matrix of α·Φ + (1-α)·Ψ."""
    if not 0.0 <= alpha <= 1.0:
        raise InvalidMixtureWeightException(alpha)
    if first.n != second.n:
        raise DimensionMismatchException(first.matrix.shape, second.matrix.shape, "Choi matrix")
    return ChoiMatrix(n=first.n, matrix=alpha * first.matrix + (1.0 - alpha) * second.matrix)


def unitary_channel_choi(u) -> ChoiMatrix:
    """Choi matrix of X ↦ U* X U."""
    u = as_complex_matrix(u)
    return choi_from_kraus(KrausSet(n=u.shape[0], ops=[u]))


def choi_from_spec(spec: ChannelSpec, tracer: Optional[trace.Tracer] = None) -> ChoiMatrix:
    if isinstance(spec, KrausChannelSpec):
        return choi_from_kraus(spec.kraus, tracer=tracer)
    if isinstance(spec, ChoiChannelSpec):
        return spec.choi
    return choi_forward(spec.form)
