"""Dense state vectors over registers of d-level systems.

A register of ``num_qudits`` qudits of dimension ``d`` is stored as a flat
complex array of length ``d**num_qudits``.  The basis state written in ket
order as ``|l_{N-1}, ..., l_1, l_0>`` (rightmost label varying fastest) sits
at flat index ``l_0 + d*l_1 + ... + d**(N-1)*l_{N-1}``.  Equivalently, "slot"
``s`` is the tensor factor whose label carries place value ``d**s``; slot 0
is the rightmost ket label.

The module provides basis/GHZ state constructors, single-qudit gates (the
d-dimensional Fourier gate and modular-shift permutations), application of
single-qudit unitaries and of sparse domain-restricted local operators,
projective measurement on a subset of slots, and single-slot reduced-density
eigenvalues as an entanglement diagnostic.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Mapping, Sequence

import numpy as np

# Tolerance for algebraic identities (unitarity, normalization, fidelities).
ATOL = 1e-9
# Amplitudes at or below this magnitude are treated as zero support.
SUPPORT_ATOL = 1e-12


class DomainError(ValueError):
    """A domain-restricted operator was applied outside its domain."""


class NonSpecialUnitaryWarning(UserWarning):
    """A strategy matrix is unitary but its determinant is not 1."""


def flat_index(d: int, labels: Sequence[int]) -> int:
    """Flat index of the basis state with the given ket-ordered labels."""
    idx = 0
    for lab in labels:
        if not 0 <= lab < d:
            raise ValueError(f"label {lab} out of range for dimension {d}")
        idx = idx * d + lab
    return idx


def labels_of_index(d: int, num_qudits: int, index: int) -> tuple[int, ...]:
    """Ket-ordered label tuple of the basis state at a flat index."""
    if not 0 <= index < d**num_qudits:
        raise ValueError(f"index {index} out of range")
    labels = []
    for _ in range(num_qudits):
        labels.append(index % d)
        index //= d
    return tuple(reversed(labels))


@dataclass(frozen=True, eq=False)
class StateVector:
    """Immutable complex amplitude vector over a qudit register.

    Named constructors (:func:`make_basis_state`, :func:`ghz_state`) produce
    normalized states and every unitary or isometric operation preserves the
    norm.  The norm is not re-enforced after arbitrary operations because the
    game's mixed switching step is a legitimate non-isometric linear map; use
    :attr:`norm` to inspect it.
    """

    d: int
    num_qudits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValueError("qudit dimension must be >= 1")
        if self.num_qudits < 1:
            raise ValueError("need at least one qudit")
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.d**self.num_qudits,):
            raise ValueError(
                f"expected {self.d ** self.num_qudits} amplitudes, "
                f"got shape {amps.shape}"
            )
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, tol: float = ATOL) -> bool:
        return abs(self.norm**2 - 1.0) <= tol

    def amplitude(self, labels: Sequence[int]) -> complex:
        """Amplitude on the basis state with ket-ordered ``labels``."""
        if len(labels) != self.num_qudits:
            raise ValueError("label tuple length must equal num_qudits")
        return complex(self.amplitudes[flat_index(self.d, labels)])

    def overlap(self, other: "StateVector") -> complex:
        """Inner product <self|other>."""
        self._check_compatible(other)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def tensor(self, other: "StateVector") -> "StateVector":
        """Tensor product with ``self`` as the ket-leftmost factor."""
        if self.d != other.d:
            raise ValueError("dimension mismatch in tensor product")
        return StateVector(
            self.d,
            self.num_qudits + other.num_qudits,
            np.kron(self.amplitudes, other.amplitudes),
        )

    def _check_compatible(self, other: "StateVector") -> None:
        if self.d != other.d or self.num_qudits != other.num_qudits:
            raise ValueError("states live in different spaces")

    def _axis_of_slot(self, slot: int) -> int:
        # Reshaped to (d,)*N the array's axis i holds ket position i,
        # i.e. slot N-1-i.
        return self.num_qudits - 1 - slot


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2 normalized by both norms."""
    ov = abs(a.overlap(b)) ** 2
    return float(ov / (a.norm**2 * b.norm**2))


def make_basis_state(d: int, labels: Sequence[int]) -> StateVector:
    """Computational basis state |labels> (ket order, leftmost first)."""
    amps = np.zeros(d ** len(labels), dtype=complex)
    amps[flat_index(d, labels)] = 1.0
    return StateVector(d, len(labels), amps)


def ghz_state(d: int, parties: int) -> StateVector:
    """Normalized maximally correlated state (1/sqrt(d)) sum_j |j...j>."""
    if d < 2:
        raise ValueError("GHZ state needs dimension >= 2")
    if parties < 2:
        raise ValueError("GHZ state needs at least two parties")
    amps = np.zeros(d**parties, dtype=complex)
    for j in range(d):
        amps[flat_index(d, (j,) * parties)] = 1.0 / math.sqrt(d)
    return StateVector(d, parties, amps)


@dataclass(frozen=True, eq=False)
class Strategy:
    """A player's move: a d x d unitary (row = output label, col = input).

    Unitarity is enforced at construction.  Strategies are nominally special
    unitary, but a global phase never affects any payoff, so a determinant
    away from 1 only triggers :class:`NonSpecialUnitaryWarning`.
    """

    d: int
    entries: np.ndarray

    def __post_init__(self) -> None:
        mat = np.asarray(self.entries, dtype=complex)
        if mat.shape != (self.d, self.d):
            raise ValueError(f"expected a {self.d}x{self.d} matrix")
        if not np.allclose(mat.conj().T @ mat, np.eye(self.d), atol=ATOL):
            raise ValueError("strategy matrix is not unitary")
        det = np.linalg.det(mat)
        if abs(det - 1.0) > ATOL:
            warnings.warn(
                f"strategy determinant {det:.6g} differs from 1 "
                "(harmless: payoffs are global-phase invariant)",
                NonSpecialUnitaryWarning,
                stacklevel=2,
            )
        mat = mat.copy()
        mat.setflags(write=False)
        object.__setattr__(self, "entries", mat)

    def conjugated(self) -> "Strategy":
        """Entrywise complex conjugate (the counter-strategy on GHZ states)."""
        return Strategy(self.d, self.entries.conj())


def qft(d: int) -> Strategy:
    """d-dimensional Fourier gate, entry (j, k) = exp(2*pi*i*j*k/d)/sqrt(d)."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    j = np.arange(d)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonSpecialUnitaryWarning)
        return Strategy(d, np.exp(2j * np.pi * np.outer(j, j) / d) / math.sqrt(d))


def sum_d(d: int, i: int) -> Strategy:
    """Modular shift |j> -> |j + i mod d| as a permutation strategy."""
    if not 0 <= i < d:
        raise ValueError(f"shift {i} out of range for dimension {d}")
    mat = np.zeros((d, d), dtype=complex)
    for j in range(d):
        mat[(j + i) % d, j] = 1.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonSpecialUnitaryWarning)
        return Strategy(d, mat)


def uniform_superposition_strategy(d: int, doors: int) -> Strategy:
    """Unitary sending |0> to the uniform superposition of the first ``doors``
    basis states (a Householder reflection; ``doors = 1`` gives the identity).
    """
    if not 1 <= doors <= d:
        raise ValueError(f"superposition size {doors} out of range 1..{d}")
    target = np.zeros(d)
    target[:doors] = 1.0 / math.sqrt(doors)
    v = target - np.eye(d)[0]
    norm2 = float(v @ v)
    mat = np.eye(d) if norm2 < 1e-30 else np.eye(d) - 2.0 * np.outer(v, v) / norm2
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonSpecialUnitaryWarning)
        return Strategy(d, mat)


def is_special_unitary(matrix: np.ndarray, tol: float = ATOL) -> bool:
    """True iff the matrix is unitary within tol and |det - 1| <= tol."""
    mat = np.asarray(matrix, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError("expected a square matrix")
    if not np.allclose(mat.conj().T @ mat, np.eye(mat.shape[0]), atol=tol):
        return False
    return bool(abs(np.linalg.det(mat) - 1.0) <= tol)


def random_special_unitary(d: int, rng: np.random.Generator) -> Strategy:
    """Haar-like random SU(d): QR of a complex Gaussian, phases fixed."""
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    q = q * (diag / np.abs(diag))
    det = np.linalg.det(q)
    q = q * np.exp(-1j * np.angle(det) / d)
    return Strategy(d, q)


def apply_strategy(state: StateVector, strat: Strategy, slot: int) -> StateVector:
    """Apply a single-qudit unitary to one slot, leaving the rest untouched."""
    if strat.d != state.d:
        raise ValueError("strategy dimension does not match the state")
    if not 0 <= slot < state.num_qudits:
        raise ValueError(f"slot {slot} out of range")
    n = state.num_qudits
    arr = state.amplitudes.reshape((state.d,) * n)
    axis = state._axis_of_slot(slot)
    out = np.moveaxis(
        np.tensordot(strat.entries, arr, axes=(1, axis)), 0, axis
    )
    return StateVector(state.d, n, out.reshape(-1))


@dataclass(frozen=True, eq=False)
class LocalOperator:
    """Sparse linear map declared on an ordered subset of slots.

    ``slots`` lists the touched slots in ket order (most significant first);
    input and output label tuples in ``mapping`` follow the same order.  The
    ``domain`` predicate marks the label tuples on which the map is defined;
    applying the operator to a state with support outside the domain raises
    :class:`DomainError` rather than inventing an extension.
    """

    d: int
    slots: tuple[int, ...]
    mapping: Mapping[tuple[int, ...], tuple[tuple[tuple[int, ...], complex], ...]]
    domain: Callable[[tuple[int, ...]], bool]
    name: str = "local operator"

    def __post_init__(self) -> None:
        if len(set(self.slots)) != len(self.slots):
            raise ValueError("operator slots must be distinct")

    @property
    def arity(self) -> int:
        return len(self.slots)

    @property
    def local_dim(self) -> int:
        return self.d**self.arity

    def _row(self, labels: tuple[int, ...]) -> int:
        return flat_index(self.d, labels)

    @cached_property
    def domain_mask(self) -> np.ndarray:
        mask = np.zeros(self.local_dim, dtype=bool)
        for row in range(self.local_dim):
            mask[row] = bool(self.domain(labels_of_index(self.d, self.arity, row)))
        mask.setflags(write=False)
        return mask

    @cached_property
    def _coo(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        rows_in, rows_out, amps = [], [], []
        for src, outs in self.mapping.items():
            r = self._row(src)
            for dst, amp in outs:
                rows_in.append(r)
                rows_out.append(self._row(dst))
                amps.append(amp)
        return (
            np.asarray(rows_in, dtype=np.intp),
            np.asarray(rows_out, dtype=np.intp),
            np.asarray(amps, dtype=complex),
        )

    @cached_property
    def _matrix(self) -> np.ndarray:
        """Dense local matrix, output row by input column (checks only)."""
        rows_in, rows_out, amps = self._coo
        mat = np.zeros((self.local_dim, self.local_dim), dtype=complex)
        np.add.at(mat, (rows_out, rows_in), amps)
        return mat

    def is_isometry_on_domain(self, tol: float = ATOL) -> bool:
        """Every in-domain basis input maps to a unit-norm output."""
        col_norms = (np.abs(self._matrix) ** 2).sum(axis=0)
        return bool(np.all(np.abs(col_norms[self.domain_mask] - 1.0) <= tol))

    def is_unitary_on_domain(self, tol: float = ATOL) -> bool:
        """Distinct in-domain basis inputs map to orthogonal outputs."""
        dom = np.flatnonzero(self.domain_mask)
        block = self._matrix[:, dom]
        gram = block.conj().T @ block
        return bool(np.allclose(gram, np.eye(len(dom)), atol=tol))


def apply_local_operator(state: StateVector, op: LocalOperator) -> StateVector:
    """Apply a local operator; the state's support must lie in its domain."""
    if op.d != state.d:
        raise ValueError("operator dimension does not match the state")
    n = state.num_qudits
    for s in op.slots:
        if not 0 <= s < n:
            raise ValueError(f"operator slot {s} out of range")
    k = op.arity
    axes = tuple(state._axis_of_slot(s) for s in op.slots)
    arr = state.amplitudes.reshape((state.d,) * n)
    pulled = np.moveaxis(arr, axes, range(k))
    mat = pulled.reshape(op.local_dim, -1)

    support = (np.abs(mat) > SUPPORT_ATOL).any(axis=1)
    bad = support & ~op.domain_mask
    if bad.any():
        raise DomainError(_domain_error_message(state, op, mat, bad))

    out = np.zeros_like(mat)
    rows_in, rows_out, amps = op._coo
    np.add.at(out, rows_out, amps[:, None] * mat[rows_in])
    restored = np.moveaxis(
        out.reshape((state.d,) * k + pulled.shape[k:]), range(k), axes
    )
    return StateVector(state.d, n, restored.reshape(-1))


def _domain_error_message(
    state: StateVector, op: LocalOperator, mat: np.ndarray, bad: np.ndarray
) -> str:
    row = int(np.flatnonzero(bad)[0])
    col = int(np.argmax(np.abs(mat[row])))
    local = labels_of_index(state.d, op.arity, row)
    rest_slots = [
        state.num_qudits - 1 - ax
        for ax in range(state.num_qudits)
        if state.num_qudits - 1 - ax not in op.slots
    ]
    rest = labels_of_index(state.d, len(rest_slots), col) if rest_slots else ()
    by_slot = dict(zip(op.slots, local)) | dict(zip(rest_slots, rest))
    full = tuple(by_slot[s] for s in range(state.num_qudits - 1, -1, -1))
    return (
        f"{op.name}: basis state |{','.join(map(str, full))}> "
        f"(labels {local} on slots {op.slots}) is outside the operator domain"
    )


def measure_slots(
    state: StateVector, slots: Sequence[int], rng: np.random.Generator
) -> tuple[tuple[int, ...], StateVector]:
    """Projectively measure the given slots in the computational basis.

    Returns the sampled outcome labels (aligned with ``slots``) and the
    renormalized post-measurement state.  Outcome probabilities follow the
    marginal distribution of the designated slots.
    """
    if len(slots) == 0:
        raise ValueError("need at least one slot to measure")
    if len(set(slots)) != len(slots):
        raise ValueError("measurement slots must be distinct")
    n = state.num_qudits
    for s in slots:
        if not 0 <= s < n:
            raise ValueError(f"slot {s} out of range")
    k = len(slots)
    axes = tuple(state._axis_of_slot(s) for s in slots)
    arr = state.amplitudes.reshape((state.d,) * n)
    pulled = np.moveaxis(arr, axes, range(k))
    mat = pulled.reshape(state.d**k, -1)

    probs = (np.abs(mat) ** 2).sum(axis=1)
    total = probs.sum()
    if total <= 0:
        raise ValueError("cannot measure a zero state")
    row = int(rng.choice(len(probs), p=probs / total))

    collapsed = np.zeros_like(mat)
    collapsed[row] = mat[row] / math.sqrt(probs[row])
    restored = np.moveaxis(
        collapsed.reshape((state.d,) * k + pulled.shape[k:]), range(k), axes
    )
    outcome = labels_of_index(state.d, k, row)
    return outcome, StateVector(state.d, n, restored.reshape(-1))


def marginal_eigenvalues(state: StateVector, slot: int) -> list[float]:
    """Eigenvalues of the single-slot reduced density matrix, descending.

    The reduced matrix is normalized by the state's squared norm, so the
    eigenvalues always sum to 1.
    """
    if not 0 <= slot < state.num_qudits:
        raise ValueError(f"slot {slot} out of range")
    arr = state.amplitudes.reshape((state.d,) * state.num_qudits)
    mat = np.moveaxis(arr, state._axis_of_slot(slot), 0).reshape(state.d, -1)
    rho = mat @ mat.conj().T
    rho = rho / np.trace(rho).real
    vals = np.linalg.eigvalsh(rho)
    return [float(v) for v in vals[::-1]]
