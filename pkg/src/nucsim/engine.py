"""State-vector engine with assertion-based mid-circuit measurement.

Amplitudes are a dense complex128 array indexed little-endian: qubit 0 is
the least significant bit of the basis index.  Kernels write into a single
reusable scratch buffer and swap it with the live array, so memory stays at
two vectors regardless of circuit depth.

Two execution modes:

``mma``        one pass; every mid-circuit measurement asserts outcome |0>,
               records its probability, projects and renormalizes; the
               trailing measurement block is replaced by sampling the final
               state ``shots`` times.
``rejection``  re-runs the whole circuit per shot with randomly drawn
               mid-circuit outcomes; a shot with any nonzero outcome is
               rejected, accepted shots contribute one sample each.

Randomness comes from numpy's Philox bit generator (a documented 64-bit
counter-based generator with splittable seeding), so identical seeds give
identical reports; sampling inverts cumulative probabilities with a binary
search.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit
from .errors import FilterAssertionError, MmaStructureError, ProjectionError
from .gates import Gate
from .hamiltonian import PauliHamiltonian, apply_pauli_string

EPS_MMA = 1e-12          # assertion fails below this |0> probability
_NORM_ATOL = 1e-9        # accepted state-norm drift
_SWAP_PERM = (0, 2, 1, 3)  # exchanges the two slot roles of a 4x4 matrix


class StateVector:
    """Dense state over n qubits, starting at |0...0>."""

    __slots__ = ("n_qubits", "amps", "_scratch")

    def __init__(self, n_qubits: int):
        if n_qubits < 1:
            raise ValueError("need at least one qubit")
        self.n_qubits = n_qubits
        self.amps = np.zeros(1 << n_qubits, dtype=np.complex128)
        self.amps[0] = 1.0
        self._scratch: np.ndarray | None = None

    @classmethod
    def from_amplitudes(cls, amps: np.ndarray) -> "StateVector":
        arr = np.ascontiguousarray(amps, dtype=np.complex128)
        n = int(arr.shape[0]).bit_length() - 1
        if arr.ndim != 1 or arr.shape[0] != 1 << n or arr.shape[0] < 2:
            raise ValueError("amplitude count must be a power of two")
        norm = np.linalg.norm(arr)
        if abs(norm - 1.0) > _NORM_ATOL:
            raise ValueError(f"state is not normalized (norm {norm:.12g})")
        state = cls(n)
        state.amps = arr
        return state

    def scratch(self) -> np.ndarray:
        if self._scratch is None:
            self._scratch = np.empty_like(self.amps)
        return self._scratch

    def restart(self) -> None:
        """Return to |0...0> in place."""
        self.amps.fill(0)
        self.amps[0] = 1.0

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def copy(self) -> "StateVector":
        out = StateVector(self.n_qubits)
        out.amps = self.amps.copy()
        return out


def _check_qubit(state: StateVector, q: int) -> None:
    if not 0 <= q < state.n_qubits:
        raise ValueError(f"qubit {q} out of range for {state.n_qubits} qubits")


def apply_1q(state: StateVector, u: np.ndarray, q: int) -> StateVector:
    """In-place 1-qubit update; pairs (s, s + 2^q) with s ranging over
    floor(i / 2^q) * 2^(q+1) + (i mod 2^q)."""
    _check_qubit(state, q)
    if u.shape != (2, 2):
        raise ValueError("matrix must be 2x2")
    a, s = state.amps, state.scratch()
    np.einsum("ab,rbt->rat", u, a.reshape(-1, 2, 1 << q), out=s.reshape(-1, 2, 1 << q))
    state.amps, state._scratch = s, a
    return state


def apply_2q(state: StateVector, u: np.ndarray, p: int, q: int) -> StateVector:
    """In-place 2-qubit update on ordered qubits p < q; the matrix is indexed
    by bit(p) + 2*bit(q).  Callers normalize order by conjugating with the
    SWAP permutation when their operands arrive reversed."""
    _check_qubit(state, p)
    _check_qubit(state, q)
    if p == q:
        raise ValueError("qubits must be distinct")
    if p > q:
        raise ValueError("qubits must be ordered p < q")
    if u.shape != (4, 4):
        raise ValueError("matrix must be 4x4")
    a, s = state.amps, state.scratch()
    shape = (-1, 2, 1 << (q - p - 1), 2, 1 << p)
    np.einsum("QPqp,rqmpt->rQmPt", u.reshape(2, 2, 2, 2),
              a.reshape(shape), out=s.reshape(shape))
    state.amps, state._scratch = s, a
    return state


def swap_conjugate(u: np.ndarray) -> np.ndarray:
    """Reindex a 4x4 matrix as if its two qubit slots were exchanged."""
    perm = list(_SWAP_PERM)
    return np.ascontiguousarray(u[np.ix_(perm, perm)])


def apply_dense(state: StateVector, u: np.ndarray, qubits: tuple[int, ...]) -> StateVector:
    """Apply a dense k-qubit matrix on arbitrary distinct qubits (slot 0 of
    the matrix is the first listed qubit)."""
    k = len(qubits)
    if len(set(qubits)) != k:
        raise ValueError(f"duplicate qubit in {qubits}")
    if u.shape != (1 << k, 1 << k):
        raise ValueError(f"matrix must be {1 << k}x{1 << k}")
    if k == 1:
        return apply_1q(state, u, qubits[0])
    if k == 2:
        a, b = qubits
        if a < b:
            return apply_2q(state, u, a, b)
        return apply_2q(state, swap_conjugate(u), b, a)
    for q in qubits:
        _check_qubit(state, q)
    n = state.n_qubits
    psi = state.amps.reshape((2,) * n)
    # tensor axis j holds qubit n-1-j; put slots high-to-low in front so the
    # flattened row index reads sum(slot_j * 2^j)
    src = [n - 1 - qubits[j] for j in range(k - 1, -1, -1)]
    moved = np.moveaxis(psi, src, range(k))
    res = u @ moved.reshape(1 << k, -1)
    state.amps = np.moveaxis(res.reshape(moved.shape), range(k), src).ravel()
    state._scratch = None
    return state


def _branch_probability(amps: np.ndarray, q: int, outcome: int) -> float:
    view = amps.reshape(-1, 2, 1 << q)[:, outcome, :]
    return float(np.real(np.vdot(view, view)))


def _project(amps: np.ndarray, q: int, outcome: int, prob: float) -> None:
    view = amps.reshape(-1, 2, 1 << q)
    view[:, 1 - outcome, :] = 0
    amps *= 1.0 / np.sqrt(prob)


def measure_project(state: StateVector, q: int, outcome: int) -> float:
    """Project onto the given outcome and renormalize; returns the outcome
    probability.  Probability below EPS_MMA cannot be projected onto."""
    _check_qubit(state, q)
    if outcome not in (0, 1):
        raise ValueError("outcome must be 0 or 1")
    p = _branch_probability(state.amps, q, outcome)
    if p < EPS_MMA:
        raise ProjectionError(f"outcome {outcome} on qubit {q} has probability {p:.3e}")
    _project(state.amps, q, outcome, p)
    return p


def assert_measure(state: StateVector, q: int, step: int = -1) -> float:
    """Assert a mid-circuit measurement finds |0>: record P(|0>), project,
    renormalize.  Raises FilterAssertionError below the EPS_MMA threshold."""
    _check_qubit(state, q)
    p0 = _branch_probability(state.amps, q, 0)
    if p0 < EPS_MMA:
        raise FilterAssertionError(step, p0)
    _project(state.amps, q, 0, p0)
    return p0


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if not 0 <= int(seed) < 1 << 64:
        raise ValueError("seed must fit in 64 bits")
    return np.random.Generator(np.random.Philox(int(seed)))


def bitstring(index: int, n_qubits: int) -> str:
    """Basis index as a string whose character position is the qubit index."""
    return format(index, f"0{n_qubits}b")[::-1]


def sample(state: StateVector, shots: int, seed) -> dict[str, int]:
    """Draw shots basis states by cumulative-probability inversion (binary
    search); deterministic for a given seed."""
    if shots < 0:
        raise ValueError("shots must be nonnegative")
    rng = _as_rng(seed)
    if shots == 0:
        return {}
    probs = state.amps.real ** 2 + state.amps.imag ** 2
    cum = np.cumsum(probs)
    draws = rng.random(shots) * cum[-1]
    idx = np.searchsorted(cum, draws, side="right")
    np.clip(idx, 0, len(cum) - 1, out=idx)
    values, counts = np.unique(idx, return_counts=True)
    n = state.n_qubits
    return {bitstring(int(v), n): int(c) for v, c in zip(values, counts)}


def expectation_pauli(state: StateVector, h: PauliHamiltonian) -> float:
    """<psi|H|psi> via one scratch vector reused across terms."""
    if h.n_qubits > state.n_qubits:
        raise ValueError("operator acts on more qubits than the state")
    if not h.is_hermitian():
        raise ValueError("operator is not Hermitian")
    amps, scratch = state.amps, state.scratch()
    acc = 0j
    for letters, coeff in h.sorted_terms():
        np.copyto(scratch, amps)
        apply_pauli_string(scratch, letters)
        acc += coeff * np.vdot(amps, scratch)
    if abs(acc.imag) > 1e-9:
        raise ValueError(f"expectation has imaginary part {acc.imag:.3e}")
    return float(acc.real)


def success_product(probs) -> float:
    """Left-to-right float product of per-assertion probabilities."""
    out = 1.0
    for p in probs:
        out *= p
    return out


@dataclass
class RunReport:
    """Result of one :func:`run` call; serializes to a stable JSON layout."""

    mode: str
    n_qubits: int
    shots: int
    seed: int
    ancilla: int | None
    assert_probs: list[float]
    overall_success: float
    samples: dict[str, int]
    energy: float | None = None
    fusion_stats: dict | None = None
    accepted: int | None = None
    rejected: int | None = None
    step_rejections: list[int] | None = None
    wall_time_s: float = 0.0

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "n_qubits": self.n_qubits,
            "shots": self.shots,
            "seed": self.seed,
            "ancilla": self.ancilla,
            "assert_probs": list(self.assert_probs),
            "overall_success": self.overall_success,
            "accepted": self.accepted,
            "rejected": self.rejected,
            "step_rejections": self.step_rejections,
            "samples": {k: self.samples[k] for k in sorted(self.samples)},
            "energy": self.energy,
            "fusion_stats": self.fusion_stats,
            "wall_time_s": self.wall_time_s,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


# compiled-plan opcodes
_OP_1Q, _OP_2Q, _OP_KQ, _OP_MEASURE, _OP_RESET = range(5)


def _compile(circuit: Circuit, mode: str, ancilla: int | None):
    """Resolve matrices, normalize 2q operand order, classify measurements.

    Returns (plan, n_steps, final_measures).  The trailing run of
    measure/barrier instructions is the sampling point; everything before it
    executes.  In mma mode the layout is validated: mid-circuit measures hit
    the ancilla and pair with a following reset of it, and every reset is
    preceded by such a measure.
    """
    instrs = circuit.instructions
    final_start = len(instrs)
    while final_start > 0 and instrs[final_start - 1].gate in (Gate.MEASURE, Gate.BARRIER):
        final_start -= 1

    if mode == "mma":
        if ancilla is None or not 0 <= ancilla < circuit.n_qubits:
            raise MmaStructureError(f"ancilla index {ancilla} out of range")
        for pos in range(final_start):
            ins = instrs[pos]
            if ins.gate is Gate.MEASURE:
                if ins.qubits[0] != ancilla:
                    raise MmaStructureError(
                        f"mid-circuit measure on qubit {ins.qubits[0]} is not the ancilla")
                nxt = pos + 1
                while nxt < final_start and instrs[nxt].gate is Gate.BARRIER:
                    nxt += 1
                if nxt >= final_start or instrs[nxt].gate is not Gate.RESET \
                        or instrs[nxt].qubits[0] != ancilla:
                    raise MmaStructureError(
                        f"measure at instruction {pos} lacks a following ancilla reset")
            elif ins.gate is Gate.RESET:
                prev = pos - 1
                while prev >= 0 and instrs[prev].gate is Gate.BARRIER:
                    prev -= 1
                if prev < 0 or instrs[prev].gate is not Gate.MEASURE \
                        or instrs[prev].qubits != ins.qubits:
                    raise MmaStructureError(
                        f"reset at instruction {pos} is not paired with an assertion")

    plan = []
    step = 0
    for pos in range(final_start):
        ins = instrs[pos]
        g = ins.gate
        if g is Gate.BARRIER:
            continue
        if g is Gate.MEASURE:
            plan.append((_OP_MEASURE, ins.qubits[0], ins.cbit, step))
            step += 1
        elif g is Gate.RESET:
            plan.append((_OP_RESET, ins.qubits[0]))
        else:
            m = ins.resolved_matrix()
            qs = ins.qubits
            if len(qs) == 1:
                plan.append((_OP_1Q, m, qs[0]))
            elif len(qs) == 2:
                a, b = qs
                if a < b:
                    plan.append((_OP_2Q, m.reshape(2, 2, 2, 2), a, b))
                else:
                    plan.append((_OP_2Q, swap_conjugate(m).reshape(2, 2, 2, 2), b, a))
            else:
                plan.append((_OP_KQ, m, qs))

    final_measures = [(instrs[pos].qubits[0], instrs[pos].cbit)
                      for pos in range(final_start, len(instrs))
                      if instrs[pos].gate is Gate.MEASURE]
    return plan, step, final_measures


def infer_ancilla(circuit: Circuit) -> int | None:
    """The unique target of all mid-circuit measures, or None.

    Trailing measure/barrier instructions are the sampling block and do not
    count.  Returns None when there are no mid-circuit measures or when they
    hit more than one qubit.
    """
    instrs = circuit.instructions
    final_start = len(instrs)
    while final_start > 0 and instrs[final_start - 1].gate in (Gate.MEASURE, Gate.BARRIER):
        final_start -= 1
    targets = {ins.qubits[0] for ins in instrs[:final_start] if ins.gate is Gate.MEASURE}
    if len(targets) == 1:
        return targets.pop()
    return None


def _run_gates_only(state: StateVector, entry) -> None:
    code = entry[0]
    if code == _OP_1Q:
        apply_1q(state, entry[1], entry[2])
    elif code == _OP_2Q:
        a, s = state.amps, state.scratch()
        shape = (-1, 2, 1 << (entry[3] - entry[2] - 1), 2, 1 << entry[2])
        np.einsum("QPqp,rqmpt->rQmPt", entry[1], a.reshape(shape), out=s.reshape(shape))
        state.amps, state._scratch = s, a
    else:
        apply_dense(state, entry[1], entry[2])


def run(circuit: Circuit, mode: str, shots: int, seed: int, ancilla: int | None,
        hamiltonian: PauliHamiltonian | None = None,
        fusion_stats: dict | None = None) -> RunReport:
    """Execute a filter-style circuit and report success statistics.

    ``ancilla`` names the qubit every mid-circuit measurement must assert in
    mma mode; rejection mode ignores it.  ``hamiltonian``, if given, is
    measured on the pre-sampling state and reported as ``energy``.
    """
    if mode not in ("mma", "rejection"):
        raise ValueError(f"unknown mode {mode!r}")
    if shots < 1:
        raise ValueError("shots must be positive")
    rng = _as_rng(seed)
    t0 = time.perf_counter()
    plan, n_steps, _ = _compile(circuit, mode, ancilla)
    state = StateVector(circuit.n_qubits)

    if mode == "mma":
        assert_probs: list[float] = []
        for entry in plan:
            code = entry[0]
            if code == _OP_MEASURE:
                assert_probs.append(assert_measure(state, entry[1], step=entry[3]))
            elif code == _OP_RESET:
                pass  # the paired assertion already left the qubit in |0>
            else:
                _run_gates_only(state, entry)
        energy = expectation_pauli(state, hamiltonian) if hamiltonian is not None else None
        samples = sample(state, shots, rng)
        report = RunReport(
            mode=mode, n_qubits=circuit.n_qubits, shots=shots, seed=seed,
            ancilla=ancilla, assert_probs=assert_probs,
            overall_success=success_product(assert_probs), samples=samples,
            energy=energy, fusion_stats=fusion_stats)
    else:
        counts: dict[str, int] = {}
        step_rejections = [0] * n_steps
        accepted = 0
        kept: np.ndarray | None = None
        for _ in range(shots):
            state.restart()
            ok = True
            for entry in plan:
                code = entry[0]
                if code == _OP_MEASURE:
                    q = entry[1]
                    p0 = _branch_probability(state.amps, q, 0)
                    outcome = 0 if rng.random() < p0 else 1
                    if outcome == 1:
                        # later outcomes cannot change rejection; stop early
                        step_rejections[entry[3]] += 1
                        ok = False
                        break
                    _project(state.amps, q, 0, p0)
                elif code == _OP_RESET:
                    q = entry[1]
                    p0 = _branch_probability(state.amps, q, 0)
                    outcome = 0 if rng.random() < p0 else 1
                    _project(state.amps, q, outcome, p0 if outcome == 0 else 1.0 - p0)
                    if outcome == 1:
                        apply_1q(state, np.array([[0, 1], [1, 0]], dtype=complex), q)
                else:
                    _run_gates_only(state, entry)
            if ok:
                accepted += 1
                for key, cnt in sample(state, 1, rng).items():
                    counts[key] = counts.get(key, 0) + cnt
                if kept is None and hamiltonian is not None:
                    kept = state.amps.copy()
        energy = None
        if kept is not None:
            energy = expectation_pauli(StateVector.from_amplitudes(kept), hamiltonian)
        report = RunReport(
            mode=mode, n_qubits=circuit.n_qubits, shots=shots, seed=seed,
            ancilla=ancilla, assert_probs=[],
            overall_success=accepted / shots, samples=counts, energy=energy,
            fusion_stats=fusion_stats, accepted=accepted,
            rejected=shots - accepted, step_rejections=step_rejections)

    report.wall_time_s = time.perf_counter() - t0
    return report
