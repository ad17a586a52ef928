"""Pilot sequence books for the two allocation schemes.

Pilot sequences are columns of a unitary matrix.  Under the reused scheme
every cell shares one matrix, so a user collides fully (phi = 1) with the
same-index user of every other cell and not at all with the rest.  Under
the different-sets scheme each cell draws an independent Haar unitary and
cross-cell correlations phi = |<psi_a, psi_b>|^2 become random with mean
1/K and variance (K-1) / (K^2 (K+1)) (Beta(1, K-1) law).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

UNITARY_TOL = 1e-10


class PilotScheme(Enum):
    REUSED_SETS = "reused"
    DIFFERENT_SETS = "different"

    @classmethod
    def parse(cls, name: str) -> "PilotScheme":
        for member in cls:
            if member.value == name.lower():
                return member
        raise ValueError(f"unknown pilot scheme {name!r}; use 'reused' or 'different'")


@dataclass(frozen=True, eq=False)
class PilotBook:
    """Per-cell pilot matrices plus the column-to-user assignment."""

    scheme: PilotScheme
    sequence_length: int
    matrices: np.ndarray  # (cell_count, K, K) complex, unitary columns
    assignments: np.ndarray = field(repr=False)  # (cell_count, K) permutations

    @property
    def cell_count(self) -> int:
        return self.matrices.shape[0]

    def pilot(self, cell: int, user: int) -> np.ndarray:
        """Pilot sequence of the user-th admitted user of a cell."""
        return self.matrices[cell][:, self.assignments[cell][user]]


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix.

    The R diagonal phases are divided out, which is what makes the QR
    output Haar rather than merely unitary.
    """
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def generate_pilot_book(
    scheme: PilotScheme,
    sequence_length: int,
    cell_count: int,
    rng: np.random.Generator,
    reused_identity: bool = False,
) -> PilotBook:
    """Draw a pilot book for cell_count cells.

    Reused sets: one shared unitary (Haar by default, identity if
    reused_identity).  Different sets: independent Haar unitaries per cell.
    Users are mapped to columns by an independent uniform permutation per
    cell.
    """
    k = sequence_length
    if k < 1:
        raise ValueError("sequence length must be >= 1")
    if cell_count < 1:
        raise ValueError("cell count must be >= 1")
    if scheme is PilotScheme.REUSED_SETS:
        shared = np.eye(k, dtype=complex) if reused_identity else haar_unitary(k, rng)
        mats = np.broadcast_to(shared, (cell_count, k, k)).copy()
        # one shared assignment: the i-th admitted user of every cell holds
        # the same sequence, which is what makes them mutual contaminators
        assignments = np.broadcast_to(rng.permutation(k), (cell_count, k)).copy()
    else:
        mats = np.stack([haar_unitary(k, rng) for _ in range(cell_count)])
        assignments = np.stack([rng.permutation(k) for _ in range(cell_count)])
    for m in mats:
        err = np.max(np.abs(m.conj().T @ m - np.eye(k)))
        if err > UNITARY_TOL:
            raise RuntimeError(f"pilot matrix failed unitarity check ({err:.2e})")
    return PilotBook(scheme=scheme, sequence_length=k, matrices=mats, assignments=assignments)


def cross_correlation(psi_a: np.ndarray, psi_b: np.ndarray) -> float:
    """phi = |<psi_a, psi_b>|^2 for two unit-norm sequences."""
    psi_a = np.asarray(psi_a)
    psi_b = np.asarray(psi_b)
    if psi_a.shape != psi_b.shape:
        raise ValueError(
            f"pilot dimension mismatch: {psi_a.shape} vs {psi_b.shape}"
        )
    return float(np.abs(np.vdot(psi_a, psi_b)) ** 2)


def phi_mean(sequence_length: int) -> float:
    return 1.0 / sequence_length


def phi_variance(sequence_length: int, exact: bool = False) -> float:
    """Variance of phi between independent Haar pilots.

    exact=False returns 1/K^2, the large-K value used by the analytic
    pipeline; exact=True the Beta(1, K-1) variance (K-1)/(K^2 (K+1)).
    """
    k = sequence_length
    if exact:
        return (k - 1) / (k * k * (k + 1))
    return 1.0 / (k * k)


def dump_pilot_book_csv(book: PilotBook, stream) -> None:
    """Debugging dump: one row per (cell, user) with the assigned column and
    the pilot sequence entries as re/im pairs."""
    k = book.sequence_length
    header = ["cell", "user", "column"]
    for i in range(k):
        header += [f"re{i}", f"im{i}"]
    print(",".join(header), file=stream)
    for cell in range(book.cell_count):
        for user in range(k):
            psi = book.pilot(cell, user)
            row = [str(cell), str(user), str(int(book.assignments[cell][user]))]
            for v in psi:
                row += [f"{v.real:.12g}", f"{v.imag:.12g}"]
            print(",".join(row), file=stream)


def sample_contamination_profile(
    sequence_length: int,
    users: int,
    rng: np.random.Generator,
    trials: int | None = None,
) -> np.ndarray:
    """Cross-correlations of one fixed pilot against `users` pilots of an
    independently drawn Haar book.

    Equal in law to the squared moduli of the first `users` components of
    a Haar-random unit vector in C^K, i.e. the first coordinates of a flat
    Dirichlet vector; sampled that way instead of via a full QR.
    """
    if users > sequence_length:
        raise ValueError("cannot use more pilots than the sequence length")
    n = 1 if trials is None else trials
    g = rng.standard_exponential((n, sequence_length))
    phi = g[:, :users] / g.sum(axis=1, keepdims=True)
    if trials is None:
        return phi[0]
    return phi
