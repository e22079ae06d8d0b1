"""
Linear algebra over GF(2).

Vectors and matrices are stored sparsely (sorted supports, column-major) and
converted to dense ``uint8`` arrays for elimination. Elimination always picks the
leftmost available pivot, so kernels, images and solutions are reproducible.
"""

import itertools
import logging
from math import comb
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from . import settings
from .errors import DimensionMismatchError, NoSolutionError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BitVec:
    """A GF(2) vector given by its length and the sorted set of ones"""
    length: int
    support: Tuple[int, ...] = ()

    def __post_init__(self):
        support = tuple(sorted(set(int(i) for i in self.support)))
        if support and (support[0] < 0 or support[-1] >= self.length):
            raise DimensionMismatchError(
                f"support index out of range for length {self.length}: {support}")
        object.__setattr__(self, 'support', support)

    @classmethod
    def zeros(cls, length: int) -> "BitVec":
        return cls(length, ())

    @classmethod
    def from_array(cls, arr) -> "BitVec":
        arr = np.asarray(arr)
        return cls(int(arr.shape[0]), tuple(int(i) for i in np.flatnonzero(arr & 1)))

    @classmethod
    def from_int(cls, length: int, mask: int) -> "BitVec":
        return cls(length, tuple(i for i in range(length) if (mask >> i) & 1))

    def to_array(self) -> np.ndarray:
        arr = np.zeros(self.length, dtype=np.uint8)
        if self.support:
            arr[list(self.support)] = 1
        return arr

    def to_int(self) -> int:
        mask = 0
        for i in self.support:
            mask |= 1 << i
        return mask

    @property
    def weight(self) -> int:
        return len(self.support)

    def __len__(self) -> int:
        return self.length

    def __iter__(self) -> Iterator[int]:
        return iter(self.support)

    def __contains__(self, i) -> bool:
        return i in set(self.support)

    def __bool__(self) -> bool:
        return bool(self.support)

    def _check(self, other: "BitVec"):
        if self.length != other.length:
            raise DimensionMismatchError(f"length {self.length} != {other.length}")

    def __add__(self, other: "BitVec") -> "BitVec":
        self._check(other)
        return BitVec(self.length, tuple(set(self.support) ^ set(other.support)))

    __xor__ = __add__

    def __and__(self, other: "BitVec") -> "BitVec":
        """Element-wise product"""
        self._check(other)
        return BitVec(self.length, tuple(set(self.support) & set(other.support)))

    def dot(self, other: "BitVec") -> int:
        self._check(other)
        return len(set(self.support) & set(other.support)) % 2

    def restrict(self, indices: Sequence[int]) -> "BitVec":
        """Coordinates at ``indices``, renumbered 0..len(indices)-1"""
        supp = set(self.support)
        return BitVec(len(indices), tuple(j for j, i in enumerate(indices) if i in supp))

    def to_json(self) -> List[int]:
        return list(self.support)


class BitMatrix:
    """Column-major sparse GF(2) matrix"""

    __slots__ = ('rows', 'cols', 'columns', '_dense')

    def __init__(self, rows: int, cols: int, columns: Sequence[Iterable[int]]):
        if len(columns) != cols:
            raise DimensionMismatchError(f"expected {cols} columns, got {len(columns)}")
        normalized = []
        for col in columns:
            supp = tuple(sorted(set(int(i) for i in col)))
            if supp and (supp[0] < 0 or supp[-1] >= rows):
                raise DimensionMismatchError(f"row index out of range for {rows} rows: {supp}")
            normalized.append(supp)
        self.rows = int(rows)
        self.cols = int(cols)
        self.columns: Tuple[Tuple[int, ...], ...] = tuple(normalized)
        self._dense = None

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols, [()] * cols)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, n, [(i,) for i in range(n)])

    @classmethod
    def from_dense(cls, arr) -> "BitMatrix":
        arr = np.asarray(arr, dtype=np.uint8) & 1
        if arr.ndim != 2:
            raise DimensionMismatchError("dense matrix must be two-dimensional")
        rows, cols = arr.shape
        return cls(rows, cols, [tuple(np.flatnonzero(arr[:, j])) for j in range(cols)])

    @classmethod
    def from_columns(cls, rows: int, vectors: Sequence[BitVec]) -> "BitMatrix":
        for v in vectors:
            if v.length != rows:
                raise DimensionMismatchError(f"column length {v.length} != {rows}")
        return cls(rows, len(vectors), [v.support for v in vectors])

    @classmethod
    def from_rows(cls, cols: int, vectors: Sequence[BitVec]) -> "BitMatrix":
        return cls.from_columns(cols, vectors).transpose()

    def to_dense(self) -> np.ndarray:
        if self._dense is None:
            dense = np.zeros((self.rows, self.cols), dtype=np.uint8)
            for j, col in enumerate(self.columns):
                if col:
                    dense[list(col), j] = 1
            dense.setflags(write=False)
            self._dense = dense
        return self._dense

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    def column(self, j: int) -> BitVec:
        return BitVec(self.rows, self.columns[j])

    def row(self, i: int) -> BitVec:
        return BitVec(self.cols, tuple(j for j, col in enumerate(self.columns) if i in col))

    def row_supports(self) -> List[Tuple[int, ...]]:
        out: List[List[int]] = [[] for _ in range(self.rows)]
        for j, col in enumerate(self.columns):
            for i in col:
                out[i].append(j)
        return [tuple(r) for r in out]

    @property
    def max_col_weight(self) -> int:
        return max((len(c) for c in self.columns), default=0)

    @property
    def max_row_weight(self) -> int:
        return max((len(r) for r in self.row_supports()), default=0)

    def is_zero(self) -> bool:
        return not any(self.columns)

    def transpose(self) -> "BitMatrix":
        return BitMatrix(self.cols, self.rows, self.row_supports())

    @property
    def T(self) -> "BitMatrix":
        return self.transpose()

    def apply(self, v: BitVec) -> BitVec:
        """Matrix-vector product M·v"""
        if v.length != self.cols:
            raise DimensionMismatchError(f"vector length {v.length} != {self.cols} columns")
        acc = set()
        for j in v.support:
            acc.symmetric_difference_update(self.columns[j])
        return BitVec(self.rows, tuple(acc))

    def __matmul__(self, other):
        if isinstance(other, BitVec):
            return self.apply(other)
        return multiply(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and self.columns == other.columns

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.columns))

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols}, nnz={sum(len(c) for c in self.columns)})"

    def select_columns(self, indices: Sequence[int]) -> "BitMatrix":
        return BitMatrix(self.rows, len(indices), [self.columns[j] for j in indices])

    def select_rows(self, indices: Sequence[int]) -> "BitMatrix":
        position = {i: k for k, i in enumerate(indices)}
        return BitMatrix(len(indices), self.cols,
                         [[position[i] for i in col if i in position] for col in self.columns])

    def to_json(self) -> dict:
        return {'rows': self.rows, 'cols': self.cols, 'columns': [list(c) for c in self.columns]}

    @classmethod
    def from_json(cls, data: dict) -> "BitMatrix":
        try:
            return cls(int(data['rows']), int(data['cols']), data['columns'])
        except KeyError as e:
            raise DimensionMismatchError(f"matrix JSON is missing field {e}") from e


def transpose(m: BitMatrix) -> BitMatrix:
    return m.transpose()


def multiply(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    """GF(2) matrix product"""
    if a.cols != b.rows:
        raise DimensionMismatchError(f"cannot multiply {a.shape} by {b.shape}")
    columns = []
    for col in b.columns:
        acc = set()
        for k in col:
            acc.symmetric_difference_update(a.columns[k])
        columns.append(tuple(acc))
    return BitMatrix(a.rows, b.cols, columns)


def hstack(mats: Sequence[BitMatrix]) -> BitMatrix:
    rows = mats[0].rows
    if any(m.rows != rows for m in mats):
        raise DimensionMismatchError("hstack requires equal row counts")
    columns = [c for m in mats for c in m.columns]
    return BitMatrix(rows, len(columns), columns)


def block_diag(mats: Sequence[BitMatrix]) -> BitMatrix:
    rows = sum(m.rows for m in mats)
    columns = []
    offset = 0
    for m in mats:
        columns.extend(tuple(i + offset for i in c) for c in m.columns)
        offset += m.rows
    return BitMatrix(rows, len(columns), columns)


def rref(dense: np.ndarray) -> Tuple[np.ndarray, List[int]]:
    """Reduced row echelon form with leftmost pivots; returns (matrix, pivot columns)"""
    a = np.array(dense, dtype=np.uint8) & 1
    rows, cols = a.shape
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            a[[r, p]] = a[[p, r]]
        mask = a[:, c].astype(bool)
        mask[r] = False
        a[mask] ^= a[r]
        pivots.append(c)
        r += 1
    return a, pivots


def rank(m: BitMatrix) -> int:
    if m.rows == 0 or m.cols == 0:
        return 0
    return len(rref(m.to_dense())[1])


def solve(m: BitMatrix, x: BitVec) -> BitVec:
    """Return y with M·y = x; raises NoSolutionError when x is outside the image"""
    if x.length != m.rows:
        raise DimensionMismatchError(f"right-hand side length {x.length} != {m.rows} rows")
    aug = np.zeros((m.rows, m.cols + 1), dtype=np.uint8)
    aug[:, :m.cols] = m.to_dense()
    aug[:, m.cols] = x.to_array()
    reduced, pivots = rref(aug)
    if m.cols in pivots:
        raise NoSolutionError("right-hand side is not in the image")
    y = [p for i, p in enumerate(pivots) if reduced[i, m.cols]]
    return BitVec(m.cols, tuple(y))


def kernel_basis(m: BitMatrix) -> List[BitVec]:
    """Basis of ker M, one vector per free column in increasing order"""
    if m.rows == 0:
        return [BitVec(m.cols, (j,)) for j in range(m.cols)]
    reduced, pivots = rref(m.to_dense())
    pivot_set = set(pivots)
    basis = []
    for f in range(m.cols):
        if f in pivot_set:
            continue
        supp = [f] + [p for i, p in enumerate(pivots) if reduced[i, f]]
        basis.append(BitVec(m.cols, tuple(supp)))
    return basis


def image_basis(m: BitMatrix) -> List[BitVec]:
    """Independent columns of M spanning its image (pivot columns)"""
    if m.rows == 0 or m.cols == 0:
        return []
    _, pivots = rref(m.to_dense())
    return [m.column(j) for j in pivots]


def inverse(m: BitMatrix) -> BitMatrix:
    if m.rows != m.cols:
        raise DimensionMismatchError(f"cannot invert a {m.shape} matrix")
    n = m.rows
    aug = np.concatenate([m.to_dense(), np.eye(n, dtype=np.uint8)], axis=1)
    reduced, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise NoSolutionError("matrix is singular")
    return BitMatrix.from_dense(reduced[:, n:])


def annihilator(vectors: Sequence[BitVec], length: int) -> List[BitVec]:
    """Basis of {u : u·v = 0 for every v in vectors}"""
    return kernel_basis(BitMatrix.from_rows(length, list(vectors)))


class XorBasis:
    """Incremental GF(2) basis over python integers, keyed by leading bit"""

    def __init__(self, vectors: Iterable[int] = ()):
        self._rows: Dict[int, int] = {}
        for v in vectors:
            self.add(v)

    def reduce(self, v: int) -> int:
        while v:
            top = v.bit_length() - 1
            row = self._rows.get(top)
            if row is None:
                return v
            v ^= row
        return 0

    def add(self, v: int) -> bool:
        """Add v; returns False when v was already in the span"""
        v = self.reduce(v)
        if not v:
            return False
        self._rows[v.bit_length() - 1] = v
        return True

    def contains(self, v: int) -> bool:
        return self.reduce(v) == 0

    def __len__(self) -> int:
        return len(self._rows)


@dataclass(frozen=True)
class WeightResult:
    """Outcome of a bounded weight search: exact, infinite (nothing to find) or unknown"""
    value: Optional[int]
    status: str
    witness: Optional[BitVec] = None

    EXACT = 'exact'
    INFINITE = 'infinite'
    UNKNOWN = 'unknown'

    @classmethod
    def exact(cls, value: int, witness: Optional[BitVec] = None) -> "WeightResult":
        return cls(value, cls.EXACT, witness)

    @classmethod
    def infinite(cls) -> "WeightResult":
        return cls(None, cls.INFINITE)

    @classmethod
    def unknown(cls, lower_bound: Optional[int] = None) -> "WeightResult":
        return cls(lower_bound, cls.UNKNOWN)

    @property
    def is_exact(self) -> bool:
        return self.status == self.EXACT

    @property
    def is_infinite(self) -> bool:
        return self.status == self.INFINITE

    @property
    def is_unknown(self) -> bool:
        return self.status == self.UNKNOWN

    def to_json(self) -> dict:
        payload = {'status': self.status, 'value': self.value}
        if self.witness is not None:
            payload['witness'] = self.witness.to_json()
        return payload


def popcount(v: int) -> int:
    return bin(v).count("1")


def gray_code_span(generators: Sequence[int]) -> Iterator[int]:
    """Every element of the span of independent generators, one XOR per step (starts at 0)"""
    current = 0
    yield current
    for i in range(1, 1 << len(generators)):
        # bit flipped between Gray codes i-1 and i is the lowest set bit of i
        current ^= generators[(i & -i).bit_length() - 1]
        yield current


def min_weight_search(signatures: Sequence[int], targets: Iterable[int],
                      budget: int) -> Optional[Tuple[int, ...]]:
    """
    Smallest support whose XOR of column signatures hits one of the targets.

    Meet-in-the-middle by increasing weight: combinations of size floor(w/2) are
    tabulated by signature and matched against combinations of size ceil(w/2).
    Among minimum-weight supports the lexicographically least is returned.
    None means nothing was found within the budget.
    """
    targets = set(targets)
    n = len(signatures)
    if 0 in targets:
        return ()
    tables: Dict[int, Dict[int, List[Tuple[int, ...]]]] = {}

    def table(size: int) -> Dict[int, List[Tuple[int, ...]]]:
        if size not in tables:
            entries: Dict[int, List[Tuple[int, ...]]] = {}
            for combo in itertools.combinations(range(n), size):
                sig = 0
                for j in combo:
                    sig ^= signatures[j]
                entries.setdefault(sig, []).append(combo)
            tables[size] = entries
        return tables[size]

    for w in range(1, min(budget, n) + 1):
        low, high = w // 2, w - w // 2
        lookup = table(low)
        found: List[Tuple[int, ...]] = []
        for combo in itertools.combinations(range(n), high):
            sig = 0
            for j in combo:
                sig ^= signatures[j]
            for t in targets:
                for other in lookup.get(sig ^ t, ()):
                    merged = set(combo) | set(other)
                    if len(merged) == w:
                        found.append(tuple(sorted(merged)))
        if found:
            return min(found)
    return None


def coset_min_weight(m: BitMatrix, v: BitVec, budget: Optional[int] = None) -> WeightResult:
    """
    Minimum Hamming weight over the coset v + Im M.

    Small cosets (dimension of Im M at most EXHAUSTIVE_BITS, and cheaper than the
    weight search) are enumerated completely; otherwise a meet-in-the-middle search
    over parity signatures runs up to ``budget`` and reports Unknown past it.
    """
    if v.length != m.rows:
        raise DimensionMismatchError(f"vector length {v.length} != {m.rows} rows")
    if budget is None:
        budget = settings.DISTANCE_BUDGET
    if budget < 0:
        raise ValueError("budget must be non-negative")

    image = [b.to_int() for b in image_basis(m)]
    r = len(image)
    n = m.rows
    search_cost = sum(comb(n, (w + 1) // 2) for w in range(1, min(budget, n) + 1))
    if r <= settings.EXHAUSTIVE_BITS and (1 << r) <= max(search_cost, 1):
        return _coset_exhaustive(v, image)

    # parity checks of Im M: rows of H span the annihilator of the image
    checks = kernel_basis(m.transpose())
    signatures = [0] * n
    for k, h in enumerate(checks):
        for j in h.support:
            signatures[j] |= 1 << k
    target = 0
    for j in v.support:
        target ^= signatures[j]
    support = min_weight_search(signatures, [target], budget)
    if support is None:
        logger.debug(f"coset search exhausted budget {budget} on {n} bits")
        return WeightResult.unknown(budget + 1)
    return WeightResult.exact(len(support), BitVec(n, support))


def _coset_exhaustive(v: BitVec, image: Sequence[int]) -> WeightResult:
    start = v.to_int()
    best_weight = None
    best_support = None
    for delta in gray_code_span(list(image)):
        element = start ^ delta
        w = popcount(element)
        if best_weight is None or w < best_weight:
            best_weight = w
            best_support = _support_of(element)
        elif w == best_weight:
            supp = _support_of(element)
            if supp < best_support:
                best_support = supp
    return WeightResult.exact(best_weight, BitVec(v.length, best_support))


def _support_of(mask: int) -> Tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)
