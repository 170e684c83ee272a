"""Step-by-step evaluation of the trace-norm bound's derivation.

With P the projection on the first N eigenvectors of A0, Q = I − P and
D = A0 − A, the bound is assembled from a triangle split of ‖D‖_1 into four
blocks, the block inequalities for A and A0, and Hölder's inequality on the
three blocks touching P. Each step is exposed as a Check so campaigns can
verify the whole chain, not just its conclusion.
"""
from dataclasses import dataclass
from typing import Literal

from src.bounds.engine import tail_sum, theorem1_bound
from src.errors import DimensionMismatch
from src.linalg.core import Spectrum, as_matrix, projection_from_vectors
from src.linalg.schatten import conjugate_exponent, schatten_norm, validate_open_exponent


@dataclass(frozen=True)
class Check:
    name: str
    lhs: float
    rhs: float
    kind: Literal["le", "eq"]

    @property
    def slack(self) -> float:
        if self.kind == "le":
            return self.rhs - self.lhs
        return -abs(self.lhs - self.rhs)


@dataclass(frozen=True)
class ProofChain:
    N: int
    p: float
    norm_a0: float
    norm_a: float
    error_1: float
    error_p: float
    p_norm_conjugate: float  # ‖P‖_q
    pd: float  # ‖P D‖_1
    qdp: float  # ‖Q D P‖_1
    pdp: float  # ‖P D P‖_1
    qa0q: float  # ‖Q A0 Q‖_1
    qaq: float  # ‖Q A Q‖_1
    pap: float  # ‖P A P‖_1
    pa0p: float  # ‖P A0 P‖_1
    tail: float
    bound: float

    def checks(self) -> list[Check]:
        holder = self.p_norm_conjugate * self.error_p
        return [
            Check("triangle", self.error_1, self.pd + self.qdp + self.qa0q + self.qaq, "le"),
            Check("q_block", self.qaq, self.norm_a - self.pap, "le"),
            Check("p_block", self.pa0p, self.norm_a0 - self.qa0q, "eq"),
            Check("holder_pd", self.pd, holder, "le"),
            Check("holder_qdp", self.qdp, holder, "le"),
            Check("holder_pdp", self.pdp, holder, "le"),
            Check("projection_norm", self.p_norm_conjugate, float(self.N) ** ((self.p - 1.0) / self.p), "eq"),
            Check("tail_identity", self.qa0q, self.tail, "eq"),
            Check("assembled", self.error_1, self.pd + self.qdp + self.pdp + 2.0 * self.qa0q, "le"),
            Check("bound", self.error_1, self.bound, "le"),
        ]


def proof_chain(A0_spectrum: Spectrum, A, p: float, N: int) -> ProofChain:
    p = validate_open_exponent(p)
    A = as_matrix(A)
    if A.shape[0] != A0_spectrum.dim:
        raise DimensionMismatch(f"A0 has dim {A0_spectrum.dim}, A has dim {A.shape[0]}")
    N = min(N, len(A0_spectrum))

    A0 = A0_spectrum.matrix()
    D = A0 - A
    projection = projection_from_vectors(A0_spectrum.leading_vectors(N), dim=A0_spectrum.dim)
    P = projection.matrix
    Q = projection.complement().matrix

    error_p = schatten_norm(D, p)
    tail = tail_sum([float(m) for m in A0_spectrum.moduli], N)
    return ProofChain(
        N=N,
        p=p,
        norm_a0=schatten_norm(A0, 1),
        norm_a=schatten_norm(A, 1),
        error_1=schatten_norm(D, 1),
        error_p=error_p,
        p_norm_conjugate=schatten_norm(P, conjugate_exponent(p)) if N > 0 else 0.0,
        pd=schatten_norm(P @ D, 1),
        qdp=schatten_norm(Q @ D @ P, 1),
        pdp=schatten_norm(P @ D @ P, 1),
        qa0q=schatten_norm(Q @ A0 @ Q, 1),
        qaq=schatten_norm(Q @ A @ Q, 1),
        pap=schatten_norm(P @ A @ P, 1),
        pa0p=schatten_norm(P @ A0 @ P, 1),
        tail=tail,
        bound=theorem1_bound(error_p, p, N, tail).bound,
    )