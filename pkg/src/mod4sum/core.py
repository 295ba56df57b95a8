"""Problem instances, the target function and deterministic relay chains.

Each of ``N`` parties holds a symbol ``x_i`` in ``{0, 1, 2, 3}`` with an even
total. Party ``j`` may send one bit to party ``j + 1`` only; the last party
must decide whether the sum is 0 or 2 modulo 4.

A deterministic chain is a list of lookup tables. The first party's table has
4 entries indexed by ``x_1``. Every inner party ``j`` (``2 <= j <= N - 1``) has
an 8-entry table indexed by ``2 * x_j + m_{j-1}``. Tables are written as bit
strings whose leftmost character is entry 0, and a chain as the tables joined
by ``|``, e.g. ``"0011|01011010"``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterator, Sequence

from .errors import ChainFormatError, PromiseViolation

SYMBOLS = (0, 1, 2, 3)
FIRST_WIDTH = 4
INNER_WIDTH = 8

__all__ = [
    "InputTuple",
    "ProtocolTable",
    "ProtocolChain",
    "parity_ok",
    "mod4_target",
    "enumerate_inputs",
    "run_chain",
    "parse_chain",
    "format_chain",
    "parse_inputs",
    "format_inputs",
]


def _check_symbols(symbols: Sequence[int]) -> None:
    for x in symbols:
        if isinstance(x, bool) or not isinstance(x, int) or not 0 <= x <= 3:
            raise ValueError(f"input symbol must be an integer in [0, 3], got {x!r}")


def parity_ok(symbols: Sequence[int]) -> bool:
    """Return True iff the symbols satisfy the even-sum promise."""
    _check_symbols(symbols)
    return sum(symbols) % 2 == 0


@dataclass(frozen=True)
class InputTuple:
    """A promise-satisfying problem instance ``(x_1, ..., x_N)``."""

    symbols: tuple[int, ...]

    def __post_init__(self) -> None:
        symbols = tuple(self.symbols)
        object.__setattr__(self, "symbols", symbols)
        if len(symbols) < 3:
            raise ValueError(f"need at least 3 parties, got {len(symbols)}")
        if not parity_ok(symbols):
            raise PromiseViolation(f"symbol sum {sum(symbols)} is odd: {symbols}")

    @property
    def n_parties(self) -> int:
        return len(self.symbols)

    def __iter__(self) -> Iterator[int]:
        return iter(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def __getitem__(self, i):
        return self.symbols[i]

    def __str__(self) -> str:
        return format_inputs(self)


def _as_symbols(inputs: InputTuple | Sequence[int]) -> tuple[int, ...]:
    if isinstance(inputs, InputTuple):
        return inputs.symbols
    return InputTuple(tuple(inputs)).symbols


def mod4_target(inputs: InputTuple | Sequence[int]) -> int:
    """Return ``((sum x_i) mod 4) / 2``, i.e. 0 for residue 0 and 1 for residue 2.

    Raises PromiseViolation for odd sums, where the value is undefined.
    """
    symbols = _as_symbols(inputs)
    return (sum(symbols) % 4) // 2


def enumerate_inputs(n_parties: int, fixed_last: int | None = None) -> Iterator[InputTuple]:
    """Yield every promise-satisfying tuple once, in lexicographic order.

    With ``fixed_last`` only tuples whose final symbol equals it are produced.
    """
    if n_parties < 3:
        raise ValueError(f"need at least 3 parties, got {n_parties}")
    if fixed_last is not None:
        _check_symbols([fixed_last])
    lasts = SYMBOLS if fixed_last is None else (fixed_last,)
    for head in product(SYMBOLS, repeat=n_parties - 1):
        parity = sum(head) % 2
        for last in lasts:
            if (last + parity) % 2 == 0:
                yield InputTuple(head + (last,))


@dataclass(frozen=True)
class ProtocolTable:
    """One party's lookup table; entry ``n`` is the bit sent for index ``n``."""

    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        bits = tuple(self.bits)
        object.__setattr__(self, "bits", bits)
        if len(bits) not in (FIRST_WIDTH, INNER_WIDTH):
            raise ChainFormatError(f"table must have 4 or 8 entries, got {len(bits)}")
        if any(b not in (0, 1) for b in bits):
            raise ChainFormatError(f"table entries must be bits, got {bits}")

    @classmethod
    def from_int(cls, value: int, width: int) -> "ProtocolTable":
        """Build a table from its big-endian integer value (entry 0 is the MSB)."""
        if not 0 <= value < 1 << width:
            raise ValueError(f"value {value} does not fit in {width} bits")
        return cls(tuple((value >> (width - 1 - n)) & 1 for n in range(width)))

    @property
    def is_first(self) -> bool:
        return len(self.bits) == FIRST_WIDTH

    @property
    def value(self) -> int:
        out = 0
        for b in self.bits:
            out = (out << 1) | b
        return out

    def ignores_message(self) -> bool:
        """True for an inner table whose output does not depend on the received bit."""
        if self.is_first:
            return False
        return all(self.bits[2 * x] == self.bits[2 * x + 1] for x in SYMBOLS)

    def __str__(self) -> str:
        return "".join(map(str, self.bits))


@dataclass(frozen=True)
class ProtocolChain:
    """The ``N - 1`` tables of a deterministic sequential protocol."""

    tables: tuple[ProtocolTable, ...]

    def __post_init__(self) -> None:
        tables = tuple(self.tables)
        object.__setattr__(self, "tables", tables)
        if len(tables) < 2:
            raise ChainFormatError("a chain needs a first table and at least one inner table")
        if not tables[0].is_first:
            raise ChainFormatError("first table must have 4 entries")
        if any(t.is_first for t in tables[1:]):
            raise ChainFormatError("inner tables must have 8 entries")

    @property
    def n_parties(self) -> int:
        return len(self.tables) + 1

    @classmethod
    def from_ints(cls, values: Sequence[int]) -> "ProtocolChain":
        first, *inner = values
        return cls(
            (ProtocolTable.from_int(first, FIRST_WIDTH),)
            + tuple(ProtocolTable.from_int(v, INNER_WIDTH) for v in inner)
        )

    def as_ints(self) -> tuple[int, ...]:
        return tuple(t.value for t in self.tables)

    def __str__(self) -> str:
        return format_chain(self)


def run_chain(chain: ProtocolChain, inputs: InputTuple | Sequence[int]) -> int:
    """Relay one bit per hop along the chain and return ``m_{N-1}``."""
    symbols = _as_symbols(inputs)
    if len(symbols) != chain.n_parties:
        raise ValueError(
            f"chain is for {chain.n_parties} parties, inputs have {len(symbols)}"
        )
    first, *inner = chain.tables
    m = first.bits[symbols[0]]
    for table, x in zip(inner, symbols[1:-1]):
        m = table.bits[2 * x + m]
    return m


def parse_chain(text: str) -> ProtocolChain:
    segments = text.strip().split("|")
    if len(segments) < 2:
        raise ChainFormatError(f"chain needs at least 2 '|'-separated tables: {text!r}")
    tables = []
    for i, seg in enumerate(segments):
        width = FIRST_WIDTH if i == 0 else INNER_WIDTH
        if len(seg) != width:
            raise ChainFormatError(
                f"table {i + 1} must have {width} characters, got {len(seg)}: {seg!r}"
            )
        if set(seg) - {"0", "1"}:
            raise ChainFormatError(f"table {i + 1} has non-binary characters: {seg!r}")
        tables.append(ProtocolTable(tuple(int(c) for c in seg)))
    return ProtocolChain(tuple(tables))


def format_chain(chain: ProtocolChain) -> str:
    return "|".join(str(t) for t in chain.tables)


def parse_inputs(text: str) -> InputTuple:
    """Parse ``"1,1,2"`` into an InputTuple."""
    try:
        symbols = tuple(int(tok) for tok in text.split(","))
    except ValueError as exc:
        raise ValueError(f"malformed input tuple {text!r}") from exc
    return InputTuple(symbols)


def format_inputs(inputs: InputTuple | Sequence[int]) -> str:
    return ",".join(str(x) for x in inputs)
