"""Sparse exact linear algebra over the rationals.

Vectors are plain dicts ``{row_key: Fraction}`` with no zero entries.  Row
keys only need to be hashable and totally ordered, so callers can index by
integers or by ``(weight, monomial)`` pairs.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Hashable, Iterable, List, Optional, Tuple

SparseVec = Dict[Hashable, Fraction]


def axpy(target: SparseVec, scale: Fraction, source: SparseVec) -> None:
    """In-place ``target += scale * source``, dropping cancelled entries."""
    if not scale:
        return
    for key, value in source.items():
        new = target.get(key, 0) + scale * value
        if new:
            target[key] = new
        else:
            target.pop(key, None)


@dataclass
class Echelon:
    """Incremental row-echelon basis of a span, with preimage tracking.

    Every inserted vector carries a *label* (typically the index of the
    basis element it is the image of).  Each stored basis vector remembers
    the combination of labels producing it, so membership tests can
    return an explicit preimage.  Pivots are chosen as the smallest key,
    which makes every result independent of dict ordering.
    """

    pivots: List[Hashable] = field(default_factory=list)
    rows: List[SparseVec] = field(default_factory=list)
    combos: List[SparseVec] = field(default_factory=list)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def _reduce(self, vec: SparseVec, combo: Optional[SparseVec]) -> None:
        for pivot, row, rcombo in zip(self.pivots, self.rows, self.combos):
            coeff = vec.get(pivot)
            if coeff:
                axpy(vec, -coeff, row)
                if combo is not None:
                    axpy(combo, -coeff, rcombo)

    def insert(self, vec: SparseVec, label: Hashable = None) -> bool:
        """Add ``vec`` to the span; return True if the rank went up."""
        work = dict(vec)
        combo = {label: Fraction(1)} if label is not None else {}
        self._reduce(work, combo)
        if not work:
            return False
        pivot = min(work)
        inv = 1 / work[pivot]
        work = {k: v * inv for k, v in work.items()}
        combo = {k: v * inv for k, v in combo.items()}
        self.pivots.append(pivot)
        self.rows.append(work)
        self.combos.append(combo)
        return True

    def residual(self, vec: SparseVec) -> Tuple[SparseVec, SparseVec]:
        """Return ``(remainder, combo)`` with ``vec = remainder + image(combo)``.

        The remainder is zero exactly when ``vec`` lies in the span; otherwise
        it is the canonical representative of ``vec`` modulo the span.
        """
        work = dict(vec)
        combo: SparseVec = {}
        self._reduce(work, combo)
        # combo currently holds minus the combination that was subtracted
        return work, {k: -v for k, v in combo.items()}


def rank(columns: Iterable[SparseVec]) -> int:
    ech = Echelon()
    for col in columns:
        ech.insert(col)
    return ech.rank


def kernel(columns: List[SparseVec]) -> List[SparseVec]:
    """Basis of ``{c : sum_j c_j columns[j] = 0}`` as label-indexed vectors."""
    ech = Echelon()
    out: List[SparseVec] = []
    for j, col in enumerate(columns):
        work = dict(col)
        combo: SparseVec = {j: Fraction(1)}
        ech._reduce(work, combo)
        if work:
            ech.insert(col, j)
        else:
            out.append(combo)
    return out


def solve(columns: List[SparseVec], rhs: SparseVec) -> Optional[SparseVec]:
    """Some ``c`` with ``sum_j c_j columns[j] = rhs``, or None."""
    ech = Echelon()
    for j, col in enumerate(columns):
        ech.insert(col, j)
    rem, combo = ech.residual(rhs)
    return None if rem else combo


def apply_columns(columns: List[SparseVec], coeffs: SparseVec) -> SparseVec:
    out: SparseVec = {}
    for j, c in coeffs.items():
        axpy(out, c, columns[j])
    return out


def inverse(matrix: Dict[Tuple[int, int], Fraction], n: int) -> Optional[Dict[Tuple[int, int], Fraction]]:
    """Inverse of an n×n sparse matrix by Gauss-Jordan, or None if singular."""
    rows = [{j: Fraction(v) for (i, j), v in matrix.items() if i == r and v} for r in range(n)]
    inv = [{r: Fraction(1)} for r in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if rows[r].get(col)), None)
        if pivot is None:
            return None
        rows[col], rows[pivot] = rows[pivot], rows[col]
        inv[col], inv[pivot] = inv[pivot], inv[col]
        scale = 1 / rows[col][col]
        rows[col] = {k: v * scale for k, v in rows[col].items()}
        inv[col] = {k: v * scale for k, v in inv[col].items()}
        for r in range(n):
            c = rows[r].get(col) if r != col else None
            if c:
                axpy(rows[r], -c, rows[col])
                axpy(inv[r], -c, inv[col])
    return {(i, j): v for i in range(n) for j, v in inv[i].items() if v}
