"""GF(2) vectors and matrices packed into Python ints.

Bit ``n-1`` is the leftmost column, so ``0b1010`` reads as the row vector
1 0 1 0. Pivots are taken leftmost-first and null-space bases come out in
increasing free-column order, which makes every result bit-exact.
"""

from __future__ import annotations

from typing import Iterable, List, Sequence


def parse_bits(text: str) -> int:
    return int(text, 2)


def format_bits(value: int, n: int) -> str:
    return format(value, f"0{n}b")


def _check(v: int, n: int) -> None:
    if v < 0 or v >> n:
        raise ValueError(f"vector {v:#x} wider than {n} bits")


def dot(y: int, s: int, n: int | None = None) -> int:
    """Inner product y.s over GF(2)."""
    if n is not None:
        _check(y, n)
        _check(s, n)
    return (y & s).bit_count() & 1


def rref(rows: Iterable[int], n: int) -> tuple[List[int], List[int]]:
    """Reduced row-echelon form. Returns (pivot rows, pivot bit positions)."""
    work = []
    for row in rows:
        _check(row, n)
        work.append(row)
    pivots: List[int] = []
    reduced: List[int] = []
    for bit in range(n - 1, -1, -1):
        mask = 1 << bit
        idx = next((i for i, row in enumerate(work) if row & mask), None)
        if idx is None:
            continue
        pivot = work.pop(idx)
        work = [row ^ pivot if row & mask else row for row in work]
        reduced = [row ^ pivot if row & mask else row for row in reduced]
        reduced.append(pivot)
        pivots.append(bit)
    return reduced, pivots


def rank(rows: Sequence[int], n: int) -> int:
    return len(rref(rows, n)[1])


def nullspace_basis(rows: Sequence[int], n: int) -> List[int]:
    """Basis of {s : row.s = 0 for every row}; empty when only s = 0 qualifies."""
    reduced, pivots = rref(rows, n)
    pivot_set = set(pivots)
    basis = []
    for bit in range(n - 1, -1, -1):
        if bit in pivot_set:
            continue
        vec = 1 << bit
        for row, p in zip(reduced, pivots):
            if row >> bit & 1:
                vec |= 1 << p
        basis.append(vec)
    return basis


def span(basis: Sequence[int]) -> List[int]:
    """All 2^len(basis) combinations, ordered by the binary counter over the basis."""
    out = [0]
    for b in basis:
        out += [v ^ b for v in out]
    return out
