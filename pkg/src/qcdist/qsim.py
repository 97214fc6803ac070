"""Dense statevector engine for the (t + n + 2)-qubit counting circuit.

Layout of a basis-state integer (bit 0 is least significant)::

    bit 0            o2  (second oracle qubit)
    bit 1            o1  (first oracle qubit)
    bits 2..n+1      index register, value i = sum_k bit(2+k) 2^k
    bits n+2..n+t+1  t-register, value tau

so ``basis = tau * 2**(n+2) + i * 4 + o1 * 2 + o2``.  The amplitude array is
therefore viewable as a C-ordered tensor of shape ``(2**t, 2**n, 2, 2)`` with
axes (tau, i, o1, o2).  Every helper below addresses qubits through
:class:`Register`; raw bit positions only appear in :func:`positions`.

The private ``_*`` kernels act on "block" arrays of shape ``(B, 2**n, 2, 2)``,
which lets the Grover operator be applied to any batch of t-register blocks.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigurationError, UsageError

MAX_T = 12
MAX_N = 12

_SQRT_HALF = 1.0 / np.sqrt(2.0)


class Register(enum.Enum):
    T = "t"
    INDEX = "index"
    O1 = "o1"
    O2 = "o2"


class Gate(enum.Enum):
    CZ = "cz"
    CNOT = "cnot"


def positions(reg: Register, t: int, n: int) -> tuple[int, ...]:
    """Bit positions (LSB = 0) occupied by ``reg`` in a (t, n) layout."""
    if reg is Register.O2:
        return (0,)
    if reg is Register.O1:
        return (1,)
    if reg is Register.INDEX:
        return tuple(range(2, 2 + n))
    return tuple(range(2 + n, 2 + n + t))


# axis of the (tau, i, o1, o2) tensor that carries each single-qubit register
_ORACLE_AXIS = {Register.O1: 2, Register.O2: 3}


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray
    t: int
    n: int

    def __post_init__(self):
        if self.amplitudes.shape != (2 ** (self.t + self.n + 2),):
            raise ConfigurationError(
                f"expected {2 ** (self.t + self.n + 2)} amplitudes, "
                f"got shape {self.amplitudes.shape}"
            )

    @property
    def num_qubits(self) -> int:
        return self.t + self.n + 2

    @property
    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(2**self.t, 2**self.n, 2, 2)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def _with_tensor(self, tensor: np.ndarray) -> "StateVector":
        return StateVector(np.ascontiguousarray(tensor).reshape(-1), self.t, self.n)


def _check_widths(t: int, n: int) -> None:
    if not (1 <= t <= MAX_T):
        raise ConfigurationError(f"t-register width {t} outside [1, {MAX_T}]")
    if not (1 <= n <= MAX_N):
        raise ConfigurationError(f"index width {n} outside [1, {MAX_N}]")


def init_zero(t: int, n: int) -> StateVector:
    _check_widths(t, n)
    amps = np.zeros(2 ** (t + n + 2), dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(amps, t, n)


def from_amplitudes(amplitudes, t: int, n: int) -> StateVector:
    _check_widths(t, n)
    return StateVector(np.asarray(amplitudes, dtype=np.complex128).copy(), t, n)


# ---------------------------------------------------------------------------
# block kernels, shape (B, 2**n, 2, 2)
# ---------------------------------------------------------------------------


def _walsh_hadamard(arr: np.ndarray, axis: int) -> np.ndarray:
    """Normalized H^{(x)w} along ``axis`` (length 2**w) by radix-2 butterflies."""
    out = np.ascontiguousarray(np.moveaxis(arr, axis, 0), dtype=np.complex128).copy()
    size = out.shape[0]
    rest = out.shape[1:]
    h = 1
    while h < size:
        view = out.reshape(size // (2 * h), 2, h, *rest)
        a = view[:, 0].copy()
        b = view[:, 1]
        view[:, 0] = (a + b) * _SQRT_HALF
        view[:, 1] = (a - b) * _SQRT_HALF
        h *= 2
    return np.moveaxis(out, 0, axis)


def data_mask(bits, n: int) -> np.ndarray:
    """Zero-padded boolean mask of length 2**n for a 0/1 data vector."""
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.ndim != 1:
        raise UsageError("data must be a one-dimensional bit vector")
    if bits.size > 2**n:
        raise UsageError(f"data length {bits.size} exceeds 2**n = {2**n}")
    if bits.size and bits.max() > 1:
        raise UsageError("data must contain only 0/1 values")
    padded = np.zeros(2**n, dtype=bool)
    padded[: bits.size] = bits.astype(bool)
    return padded


def _xor_load(block: np.ndarray, mask: np.ndarray, target: Register) -> np.ndarray:
    """|i>|o> -> |i>|o XOR data_i> on the selected oracle qubit."""
    out = block.copy()
    if target is Register.O1:
        out[:, mask] = block[:, mask][:, :, ::-1, :]
    elif target is Register.O2:
        out[:, mask] = block[:, mask][:, :, :, ::-1]
    else:
        raise UsageError(f"data can only be loaded into O1 or O2, not {target}")
    return out


def _cz(block: np.ndarray) -> np.ndarray:
    out = block.copy()
    out[..., 1, 1] *= -1
    return out


def _cnot(block: np.ndarray, control: Register, target: Register) -> np.ndarray:
    out = block.copy()
    if control is Register.O1:
        out[..., 1, 0], out[..., 1, 1] = block[..., 1, 1], block[..., 1, 0]
    else:
        out[..., 0, 1], out[..., 1, 1] = block[..., 1, 1], block[..., 0, 1]
    return out


def _z(block: np.ndarray, qubit: Register) -> np.ndarray:
    out = block.copy()
    if qubit is Register.O1:
        out[..., 1, :] *= -1
    else:
        out[..., :, 1] *= -1
    return out


def _reflect_about_zero_index(block: np.ndarray) -> np.ndarray:
    """(2|0><0|_n - I) on the index axis."""
    out = -block
    out[:, 0] = block[:, 0]
    return out


def _oracle_qubit(reg: Register) -> Register:
    if reg not in _ORACLE_AXIS:
        raise UsageError(f"{reg} is not a single oracle qubit")
    return reg


def block_hadamard_index(block: np.ndarray) -> np.ndarray:
    return _walsh_hadamard(block, 1)


def block_data_load(block: np.ndarray, mask: np.ndarray, target: Register) -> np.ndarray:
    return _xor_load(block, mask, _oracle_qubit(target))


def block_two_qubit(block: np.ndarray, gate: Gate, q1: Register, q2: Register) -> np.ndarray:
    q1, q2 = _oracle_qubit(q1), _oracle_qubit(q2)
    if q1 is q2:
        raise UsageError("two-qubit gate needs two distinct qubits")
    if gate is Gate.CZ:
        return _cz(block)
    return _cnot(block, q1, q2)


def block_z(block: np.ndarray, qubit: Register) -> np.ndarray:
    return _z(block, _oracle_qubit(qubit))


def block_reflect_zero(block: np.ndarray) -> np.ndarray:
    return _reflect_about_zero_index(block)


# ---------------------------------------------------------------------------
# public state operations (pure: input state -> new state)
# ---------------------------------------------------------------------------


def apply_hadamard_layer(s: StateVector, reg: Register) -> StateVector:
    if reg is Register.T:
        return s._with_tensor(_walsh_hadamard(s.tensor, 0))
    if reg is Register.INDEX:
        return s._with_tensor(_walsh_hadamard(s.tensor, 1))
    raise UsageError("Hadamard layers are applied to the T or INDEX register only")


def apply_data_load(s: StateVector, data, target: Register) -> StateVector:
    """XOR ``data[i]`` into ``target`` on every index branch |i>.

    Indices at or beyond ``len(data)`` load the bit 0.
    """
    return s._with_tensor(block_data_load(s.tensor, data_mask(data, s.n), target))


def apply_two_qubit(s: StateVector, gate: Gate, q1: Register, q2: Register) -> StateVector:
    """CZ(q1, q2) or CNOT(control=q1, target=q2) on the oracle workspace."""
    return s._with_tensor(block_two_qubit(s.tensor, gate, q1, q2))


def apply_z(s: StateVector, qubit: Register) -> StateVector:
    return s._with_tensor(block_z(s.tensor, qubit))


def apply_controlled_powers(
    s: StateVector, step: Callable[[np.ndarray], np.ndarray]
) -> tuple[StateVector, int]:
    """Apply ``step**tau`` to the (n+2)-qubit block of every t-register value tau.

    ``step`` maps a block array of shape (B, 2**n, 2, 2) to one of the same
    shape.  Powers are built bit by bit: the blocks whose tau has bit k set
    receive ``step`` 2**k more times, so the total number of ``step`` calls is
    exactly 2**t - 1 whatever the input state.  Returns the new state and that
    call count.
    """
    tensor = s.tensor.copy()
    taus = np.arange(2**s.t)
    calls = 0
    for k in range(s.t):
        sel = (taus >> k) & 1 == 1
        block = tensor[sel]
        for _ in range(2**k):
            block = step(block)
            calls += 1
        tensor[sel] = block
    return s._with_tensor(tensor), calls


def inverse_qft(s: StateVector) -> StateVector:
    """|tau> -> 2^{-t/2} sum_j exp(-2 pi i j tau / 2^t) |j> on the t-register."""
    return s._with_tensor(np.fft.fft(s.tensor, axis=0, norm="ortho"))


def qft(s: StateVector) -> StateVector:
    return s._with_tensor(np.fft.ifft(s.tensor, axis=0, norm="ortho"))


def register_marginal(s: StateVector, reg: Register) -> np.ndarray:
    probs = np.abs(s.tensor) ** 2
    if reg is Register.T:
        return probs.sum(axis=(1, 2, 3))
    if reg is Register.INDEX:
        return probs.sum(axis=(0, 2, 3))
    axis = _ORACLE_AXIS[reg]
    other = tuple(a for a in range(4) if a != axis)
    return probs.sum(axis=other)


def measure_register(
    s: StateVector, reg: Register, rng: np.random.Generator
) -> tuple[int, StateVector]:
    """Sample the register value and return it with the renormalized collapsed state."""
    probs = register_marginal(s, reg)
    cdf = np.cumsum(probs)
    value = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    value = min(value, probs.size - 1)
    tensor = s.tensor.copy()
    axis = {Register.T: 0, Register.INDEX: 1}.get(reg, _ORACLE_AXIS.get(reg))
    keep = np.zeros(probs.size, dtype=bool)
    keep[value] = True
    shape = [1, 1, 1, 1]
    shape[axis] = probs.size
    tensor = tensor * keep.reshape(shape)
    tensor /= np.sqrt(probs[value])
    return value, s._with_tensor(tensor)


def dump_state(s: StateVector) -> str:
    """Text dump, one ``index real imag`` line per amplitude, preceded by a header."""
    lines = [f"# t={s.t} n={s.n}"]
    for idx, amp in enumerate(s.amplitudes):
        lines.append(f"{idx} {float(amp.real)!r} {float(amp.imag)!r}")
    return "\n".join(lines) + "\n"


def load_state(text: str) -> StateVector:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    header = dict(kv.split("=") for kv in lines[0].lstrip("#").split())
    t, n = int(header["t"]), int(header["n"])
    amps = np.zeros(2 ** (t + n + 2), dtype=np.complex128)
    for ln in lines[1:]:
        idx, re, im = ln.split()
        amps[int(idx)] = complex(float(re), float(im))
    return from_amplitudes(amps, t, n)


def basis_index(tau: int, i: int, o1: int, o2: int, n: int) -> int:
    return (tau << (n + 2)) | (i << 2) | (o1 << 1) | o2
