"""Reading and writing AIGER 1.9 files (ASCII ``aag`` and binary ``aig``).

Only the subset needed for single-property safety checking is supported:
inputs, latches (with 0/1/undefined reset), outputs, bad-state properties
and and-gates.  Files with invariant constraints, justice or fairness
sections are rejected with :class:`UnsupportedFeature`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

__all__ = [
    "AigCircuit",
    "Latch",
    "ParseError",
    "UnsupportedFeature",
    "parse_aiger",
    "write_aag",
    "write_aig",
]


class ParseError(ValueError):
    def __init__(self, offset: int, message: str):
        super().__init__(f"byte {offset}: {message}")
        self.offset = offset
        self.message = message


class UnsupportedFeature(ParseError):
    pass


@dataclass(frozen=True)
class Latch:
    lit: int
    next: int
    reset: int | None = 0  # None means undefined (uninitialised)


@dataclass
class AigCircuit:
    max_var: int
    inputs: list[int] = field(default_factory=list)
    latches: list[Latch] = field(default_factory=list)
    outputs: list[int] = field(default_factory=list)
    bad: list[int] = field(default_factory=list)
    and_gates: list[tuple[int, int, int]] = field(default_factory=list)
    symbols: dict[str, str] = field(default_factory=dict, compare=False)

    def property_literal(self) -> int | None:
        """First bad literal, else first output, else ``None``."""
        if self.bad:
            return self.bad[0]
        if self.outputs:
            return self.outputs[0]
        return None

    def is_binary_ordered(self) -> bool:
        """Whether variable numbering follows the binary format's layout."""
        i, l = len(self.inputs), len(self.latches)
        if self.max_var != i + l + len(self.and_gates):
            return False
        if any(x != 2 * (k + 1) for k, x in enumerate(self.inputs)):
            return False
        if any(x.lit != 2 * (i + k + 1) for k, x in enumerate(self.latches)):
            return False
        return all(
            g[0] == 2 * (i + l + k + 1) and g[0] > max(g[1], g[2])
            for k, g in enumerate(self.and_gates)
        )


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def error(self, msg: str, offset: int | None = None) -> ParseError:
        return ParseError(self.pos if offset is None else offset, msg)

    def line(self) -> tuple[int, list[str]]:
        start = self.pos
        if start >= len(self.data):
            raise self.error("unexpected end of file")
        end = self.data.find(b"\n", start)
        if end < 0:
            end = len(self.data)
        self.pos = end + 1
        try:
            text = self.data[start:end].decode("ascii")
        except UnicodeDecodeError:
            raise self.error("non-ASCII data", start) from None
        return start, text.split()

    def numbers(self, count: tuple[int, ...]) -> tuple[int, list[int]]:
        start, toks = self.line()
        if len(toks) not in count:
            raise self.error(f"expected {' or '.join(map(str, count))} numbers", start)
        try:
            vals = [int(t) for t in toks]
        except ValueError:
            raise self.error("malformed number", start) from None
        if any(v < 0 for v in vals):
            raise self.error("negative literal", start)
        return start, vals

    def varint(self) -> int:
        x, shift = 0, 0
        while True:
            if self.pos >= len(self.data):
                raise self.error("truncated binary and-gate section")
            b = self.data[self.pos]
            self.pos += 1
            x |= (b & 0x7F) << shift
            if not b & 0x80:
                return x
            shift += 7


def parse_aiger(data: bytes | str) -> AigCircuit:
    if isinstance(data, str):
        data = data.encode("ascii")
    r = _Reader(data)
    start, toks = r.line()
    if not toks or toks[0] not in ("aag", "aig"):
        raise r.error("missing 'aag'/'aig' header", start)
    binary = toks[0] == "aig"
    if not 6 <= len(toks) <= 10:
        raise r.error("header must have 5 to 9 counts", start)
    try:
        counts = [int(t) for t in toks[1:]]
    except ValueError:
        raise r.error("malformed header count", start) from None
    counts += [0] * (9 - len(counts))
    m, ni, nl, no, na, nb, nc, nj, nf = counts
    if nc or nj or nf:
        raise UnsupportedFeature(start, "invariant constraints, justice and fairness are not supported")
    if binary and m != ni + nl + na:
        raise r.error("binary header requires M = I + L + A", start)
    if m < ni + nl + na:
        raise r.error("M smaller than I + L + A", start)

    maxlit = 2 * m + 1
    c = AigCircuit(max_var=m)

    def check(lit: int, off: int) -> int:
        if lit > maxlit:
            raise r.error(f"literal {lit} exceeds maximum {maxlit}", off)
        return lit

    for k in range(ni):
        if binary:
            c.inputs.append(2 * (k + 1))
        else:
            off, (lit,) = r.numbers((1,))
            if lit < 2 or lit & 1:
                raise r.error("input literal must be even and positive", off)
            c.inputs.append(check(lit, off))
    for k in range(nl):
        if binary:
            lit = 2 * (ni + k + 1)
            off, vals = r.numbers((1, 2))
            nxt = vals[0]
            rst = vals[1] if len(vals) == 2 else 0
        else:
            off, vals = r.numbers((2, 3))
            lit, nxt = vals[0], vals[1]
            rst = vals[2] if len(vals) == 3 else 0
            if lit < 2 or lit & 1:
                raise r.error("latch literal must be even and positive", off)
        check(lit, off)
        check(nxt, off)
        if rst == lit:
            reset: int | None = None
        elif rst in (0, 1):
            reset = rst
        else:
            raise r.error(f"invalid latch reset {rst}", off)
        c.latches.append(Latch(lit, nxt, reset))
    for _ in range(no):
        off, (lit,) = r.numbers((1,))
        c.outputs.append(check(lit, off))
    for _ in range(nb):
        off, (lit,) = r.numbers((1,))
        c.bad.append(check(lit, off))
    for k in range(na):
        if binary:
            off = r.pos
            lhs = 2 * (ni + nl + k + 1)
            d0 = r.varint()
            d1 = r.varint()
            rhs0 = lhs - d0
            rhs1 = rhs0 - d1
            if d0 == 0 or rhs1 < 0:
                raise r.error("invalid delta encoding", off)
        else:
            off, (lhs, rhs0, rhs1) = r.numbers((3,))
            if lhs < 2 or lhs & 1:
                raise r.error("and-gate lhs must be even and positive", off)
            check(lhs, off)
            check(rhs0, off)
            check(rhs1, off)
            if not (lhs > rhs0 and lhs > rhs1):
                raise r.error("and-gate lhs must exceed its inputs", off)
        c.and_gates.append((lhs, rhs0, rhs1))

    _parse_symbols(r, c)
    _validate(r, c)
    return c


def _parse_symbols(r: _Reader, c: AigCircuit) -> None:
    while r.pos < len(r.data):
        start = r.pos
        end = r.data.find(b"\n", start)
        if end < 0:
            end = len(r.data)
        line = r.data[start:end]
        r.pos = end + 1
        if line.startswith(b"c") and (len(line) == 1 or line[1:2] in (b"\n", b" ", b"\r")):
            r.pos = len(r.data)
            return
        if not line.strip():
            continue
        try:
            text = line.decode("utf-8")
        except UnicodeDecodeError:
            raise r.error("invalid symbol table entry", start) from None
        head, _, name = text.partition(" ")
        if len(head) < 2 or head[0] not in "ilob" or not head[1:].isdigit():
            if head[:1] in ("c", "j", "f"):
                raise UnsupportedFeature(start, f"symbol for unsupported section '{head}'")
            raise r.error(f"invalid symbol table entry '{text}'", start)
        c.symbols[head] = name


def _validate(r: _Reader, c: AigCircuit) -> None:
    defined: dict[int, str] = {}
    for lit in c.inputs:
        v = lit >> 1
        if v in defined:
            raise r.error(f"variable {v} defined twice")
        defined[v] = "input"
    for latch in c.latches:
        v = latch.lit >> 1
        if v in defined:
            raise r.error(f"variable {v} defined twice")
        defined[v] = "latch"
    for lhs, _, _ in c.and_gates:
        v = lhs >> 1
        if v in defined:
            raise r.error(f"variable {v} defined twice")
        defined[v] = "and"

    def used(lit: int) -> None:
        if lit > 1 and (lit >> 1) not in defined:
            raise r.error(f"literal {lit} is used but never defined")

    for latch in c.latches:
        used(latch.next)
    for lit in c.outputs + c.bad:
        used(lit)
    for _, a, b in c.and_gates:
        used(a)
        used(b)


def write_aag(c: AigCircuit, symbols: bool = True) -> str:
    counts = [c.max_var, len(c.inputs), len(c.latches), len(c.outputs), len(c.and_gates)]
    if c.bad:
        counts.append(len(c.bad))
    lines = ["aag " + " ".join(map(str, counts))]
    lines += [str(x) for x in c.inputs]
    for latch in c.latches:
        if latch.reset == 0:
            lines.append(f"{latch.lit} {latch.next}")
        else:
            rst = latch.lit if latch.reset is None else latch.reset
            lines.append(f"{latch.lit} {latch.next} {rst}")
    lines += [str(x) for x in c.outputs]
    lines += [str(x) for x in c.bad]
    lines += [f"{a} {b} {d}" for a, b, d in c.and_gates]
    if symbols:
        lines += [f"{k} {v}" for k, v in c.symbols.items()]
    return "\n".join(lines) + "\n"


def _varint(x: int) -> bytes:
    out = bytearray()
    while x & ~0x7F:
        out.append((x & 0x7F) | 0x80)
        x >>= 7
    out.append(x)
    return bytes(out)


def write_aig(c: AigCircuit, symbols: bool = True) -> bytes:
    """Binary AIGER; the circuit must already use the binary variable layout."""
    if not c.is_binary_ordered():
        raise ValueError("circuit is not in binary AIGER variable order")
    counts = [c.max_var, len(c.inputs), len(c.latches), len(c.outputs), len(c.and_gates)]
    if c.bad:
        counts.append(len(c.bad))
    out = bytearray(("aig " + " ".join(map(str, counts)) + "\n").encode())
    for latch in c.latches:
        if latch.reset == 0:
            out += f"{latch.next}\n".encode()
        else:
            rst = latch.lit if latch.reset is None else latch.reset
            out += f"{latch.next} {rst}\n".encode()
    for x in c.outputs + c.bad:
        out += f"{x}\n".encode()
    for lhs, a, b in c.and_gates:
        a, b = max(a, b), min(a, b)
        out += _varint(lhs - a) + _varint(a - b)
    if symbols:
        for k, v in c.symbols.items():
            out += f"{k} {v}\n".encode()
    return bytes(out)
