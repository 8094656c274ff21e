"""Exact scalar fields and the small amount of linear algebra built on them.

Matrices are numpy object arrays holding Python ints or Fractions, so shapes
like (0, k) behave and nothing is ever rounded.  A field is either the
rationals (``Field(0)``) or a prime field ``Field(p)``.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np


class Field:
    def __init__(self, p: int = 0):
        if p and (p < 2 or any(p % d == 0 for d in range(2, int(p ** 0.5) + 1))):
            raise ValueError(f"{p} is not prime")
        self.p = p

    def __repr__(self):
        return "Field(QQ)" if not self.p else f"Field(GF({self.p}))"

    def __eq__(self, other):
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self):
        return hash(("Field", self.p))

    @property
    def name(self) -> str:
        return "q" if not self.p else f"p:{self.p}"

    @classmethod
    def from_name(cls, name: str) -> "Field":
        name = name.strip().lower()
        if name in ("q", "qq", "rational", "rationals"):
            return cls(0)
        if name.startswith("p:"):
            return cls(int(name[2:]))
        raise ValueError(f"unknown field {name!r}; use 'q' or 'p:PRIME'")

    # scalars

    def __call__(self, x):
        if isinstance(x, str):
            x = Fraction(x)
        if self.p:
            if isinstance(x, Fraction):
                return (x.numerator * pow(x.denominator, -1, self.p)) % self.p
            return int(x) % self.p
        x = Fraction(x)
        return x.numerator if x.denominator == 1 else x

    def norm(self, a):
        return a % self.p if self.p else a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.p:
            return pow(int(a), -1, self.p)
        return Fraction(1) / a

    def fmt(self, a) -> str:
        return str(self(a))

    # matrices

    def mat(self, rows, shape=None) -> np.ndarray:
        if shape is None:
            rows = [list(r) for r in rows]
            shape = (len(rows), len(rows[0]) if rows else 0)
        out = np.empty(shape, dtype=object)
        out[...] = 0
        for i, row in enumerate(rows):
            for j, x in enumerate(row):
                out[i, j] = self(x)
        return out

    def zeros(self, m: int, n: int) -> np.ndarray:
        out = np.empty((m, n), dtype=object)
        out[...] = 0
        return out

    def eye(self, n: int) -> np.ndarray:
        out = self.zeros(n, n)
        for i in range(n):
            out[i, i] = 1
        return out

    def reduce(self, a: np.ndarray) -> np.ndarray:
        if self.p and a.size:
            return np.mod(a, self.p)
        return a

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if a.shape[1] != b.shape[0]:
            raise ValueError(f"shape mismatch {a.shape} @ {b.shape}")
        if a.shape[1] == 0 or a.shape[0] == 0 or b.shape[1] == 0:
            return self.zeros(a.shape[0], b.shape[1])
        return self.reduce(a.dot(b))

    def chain(self, *mats) -> np.ndarray:
        """Product of matrices listed left to right."""
        out = mats[0]
        for m in mats[1:]:
            out = self.matmul(out, m)
        return out

    def add(self, a, b):
        return self.reduce(a + b)

    def sub(self, a, b):
        return self.reduce(a - b)

    def neg(self, a):
        return self.reduce(-a)

    def scale(self, c, a):
        return self.reduce(a * c)

    # elimination

    def rref(self, a: np.ndarray):
        """Reduced row echelon form and pivot columns.

        Pivots are taken left to right, first nonzero row wins, so the
        result depends only on the input matrix.
        """
        r = a.copy()
        m, n = r.shape
        pivots = []
        row = 0
        for col in range(n):
            if row == m:
                break
            nz = [i for i in range(row, m) if r[i, col] != 0]
            if not nz:
                continue
            i = nz[0]
            if i != row:
                r[[row, i]] = r[[i, row]]
            r[row] = self.reduce(r[row] * self.inv(r[row, col]))
            for i in range(m):
                if i != row and r[i, col] != 0:
                    r[i] = self.reduce(r[i] - r[i, col] * r[row])
            pivots.append(col)
            row += 1
        return r, pivots

    def rank(self, a: np.ndarray) -> int:
        if a.size == 0:
            return 0
        return len(self.rref(a)[1])

    def nullspace(self, a: np.ndarray) -> np.ndarray:
        """Columns spanning {x : a x = 0}, one per free variable."""
        m, n = a.shape
        r, pivots = self.rref(a)
        free = [j for j in range(n) if j not in set(pivots)]
        out = self.zeros(n, len(free))
        for k, j in enumerate(free):
            out[j, k] = 1
            for i, pc in enumerate(pivots):
                out[pc, k] = self.norm(-r[i, j])
        return out

    def left_nullspace(self, a: np.ndarray) -> np.ndarray:
        """Rows spanning {y : y a = 0}, returned in reduced echelon form."""
        k = self.nullspace(a.T).T
        if k.shape[0] == 0:
            return k
        return self.rref(k)[0]

    def colspace(self, a: np.ndarray) -> np.ndarray:
        """Basis of the column space made of pivot columns of ``a``."""
        if a.shape[1] == 0:
            return self.zeros(a.shape[0], 0)
        _, pivots = self.rref(a)
        return a[:, pivots].copy()

    def inverse(self, a: np.ndarray) -> np.ndarray:
        n = a.shape[0]
        if a.shape != (n, n):
            raise ValueError("not square")
        aug = np.concatenate([a, self.eye(n)], axis=1)
        r, pivots = self.rref(aug)
        if pivots[:n] != list(range(n)) or len(pivots) < n:
            raise ZeroDivisionError("singular matrix")
        return r[:, n:].copy()

    def is_invertible(self, a: np.ndarray) -> bool:
        return a.shape[0] == a.shape[1] and self.rank(a) == a.shape[0]

    def left_inverse(self, k: np.ndarray) -> np.ndarray:
        """Some L with L @ k = I, for k of full column rank."""
        m, c = k.shape
        out = self.zeros(c, m)
        if c == 0:
            return out
        _, rows = self.rref(k.T)
        if len(rows) < c:
            raise ValueError("matrix does not have full column rank")
        out[:, rows] = self.inverse(k[rows, :])
        return out

    def solve(self, a: np.ndarray, b: np.ndarray):
        """Some X with a @ X = b, or None if there is none."""
        m, n = a.shape
        aug = np.concatenate([a, b], axis=1)
        r, pivots = self.rref(aug)
        if any(p >= n for p in pivots):
            return None
        x = self.zeros(n, b.shape[1])
        for i, pc in enumerate(pivots):
            x[pc] = r[i, n:]
        return x

    def in_span(self, a: np.ndarray, v: np.ndarray) -> bool:
        return self.solve(a, v) is not None

    @staticmethod
    def is_zero(a: np.ndarray) -> bool:
        return not a.size or not any(x != 0 for x in a.flat)

    @staticmethod
    def equal(a: np.ndarray, b: np.ndarray) -> bool:
        return a.shape == b.shape and all(x == y for x, y in zip(a.flat, b.flat))


QQ = Field(0)


def block_diag(field: Field, blocks) -> np.ndarray:
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    out = field.zeros(rows, cols)
    i = j = 0
    for b in blocks:
        out[i:i + b.shape[0], j:j + b.shape[1]] = b
        i += b.shape[0]
        j += b.shape[1]
    return out
