"""Sparse Hermitian operators over an indexed basis."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

__all__ = ["SymmetricOperator"]


@dataclass(frozen=True)
class SymmetricOperator:
    """A Hermitian sparse matrix with its Hermiticity witness.

    All Hamiltonians in this package are real symmetric; the only complex
    Hermitian instance is the y component of the SU(2) color charge.
    """

    matrix: sp.csr_matrix
    name: str = field(default="operator", compare=False)

    def __post_init__(self):
        m = self.matrix
        if m.shape[0] != m.shape[1]:
            raise ValueError(f"operator must be square, got shape {m.shape}")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def max_asymmetry(self) -> float:
        """Hermiticity witness: max |M - M^dagger| over all entries."""
        d = self.matrix - self.matrix.conjugate().T
        if d.nnz == 0:
            return 0.0
        return float(np.abs(d.data).max())

    def assert_hermitian(self, tol: float = 0.0) -> None:
        asym = self.max_asymmetry()
        if asym > tol:
            raise ValueError(
                f"{self.name}: asymmetry {asym:.3e} exceeds tolerance {tol:.3e}"
            )

    def diagonal(self) -> np.ndarray:
        return self.matrix.diagonal()

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def expectation(self, vec: np.ndarray) -> float:
        """<vec|M|vec>, real part (exact for Hermitian M and any vec)."""
        return float(np.real(np.vdot(vec, self.matrix @ vec)))

    def __add__(self, other: "SymmetricOperator") -> "SymmetricOperator":
        if not isinstance(other, SymmetricOperator):
            return NotImplemented
        return SymmetricOperator(
            (self.matrix + other.matrix).tocsr(),
            name=f"{self.name}+{other.name}",
        )
