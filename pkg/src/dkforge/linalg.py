"""Exact linear algebra over the integers and the rings Z/m.

Matrices are numpy arrays of dtype ``object`` holding Python ints, so every
entry is arbitrary precision.  The ring is passed separately; functions that
care take a ``ring`` keyword defaulting to the integers.

The workhorse is a column echelon form ``M V = H`` with ``V`` unimodular,
tracked together with ``V^{-1}``.  Kernels, solving and left inverses of
saturated lattices all fall out of it.  Smith normal form is implemented
separately because it needs row operations as well.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Ring",
    "ZZ",
    "AbelianGroupInvariants",
    "as_matrix",
    "zeros",
    "identity",
    "block_diag",
    "smith_normal_form",
    "invariant_factors",
    "solve_linear",
    "kernel_basis",
    "kernel_with_retraction",
    "cokernel_invariants",
    "express_in_basis",
    "integer_rank",
    "is_unimodular",
    "unimodular_inverse",
    "matrix_to_json",
    "matrix_from_json",
]


def _is_prime(m: int) -> bool:
    if m < 2:
        return False
    i = 2
    while i * i <= m:
        if m % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class Ring:
    """Coefficient ring: the integers (``modulus == 0``) or Z/m with m >= 2."""

    modulus: int = 0

    def __post_init__(self):
        if self.modulus < 0 or self.modulus == 1:
            raise ValueError(f"invalid modulus {self.modulus}; need 0 (integers) or m >= 2")

    @property
    def is_integers(self) -> bool:
        return self.modulus == 0

    @property
    def is_field(self) -> bool:
        return _is_prime(self.modulus)

    def reduce(self, M):
        if self.modulus:
            return M % self.modulus
        return M

    def __str__(self) -> str:
        return "Z" if self.modulus == 0 else f"Z/{self.modulus}"

    @classmethod
    def parse(cls, text: str) -> "Ring":
        text = text.strip()
        if text == "Z":
            return cls(0)
        if text.startswith("Z/"):
            try:
                m = int(text[2:])
            except ValueError:
                raise ValueError(f"unknown ring {text!r}") from None
            if m >= 2:
                return cls(m)
        raise ValueError(f"unknown ring {text!r}")


ZZ = Ring(0)


@dataclass(frozen=True)
class AbelianGroupInvariants:
    """Free rank plus invariant factors d1 | d2 | ... (each >= 2)."""

    free_rank: int = 0
    torsion: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(int(d) for d in self.torsion))
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        for d in self.torsion:
            if d < 2:
                raise ValueError(f"invariant factor {d} < 2")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError(f"divisibility chain broken: {a} does not divide {b}")

    @classmethod
    def from_diagonal(cls, diagonal, rows: int) -> "AbelianGroupInvariants":
        """Invariants of Z^rows modulo the span of ``diag(diagonal)``."""
        nonzero = [abs(int(d)) for d in diagonal if d != 0]
        return cls(rows - len(nonzero), tuple(d for d in nonzero if d > 1))

    @property
    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def order(self):
        """Group order, or None when infinite."""
        if self.free_rank:
            return None
        out = 1
        for d in self.torsion:
            out *= d
        return out

    def __str__(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": [str(d) for d in self.torsion]}


# ---------------------------------------------------------------------------
# constructors


def zeros(rows: int, cols: int) -> np.ndarray:
    out = np.empty((rows, cols), dtype=object)
    out.fill(0)
    return out


def identity(n: int) -> np.ndarray:
    out = zeros(n, n)
    for i in range(n):
        out[i, i] = 1
    return out


def as_matrix(x, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    """Coerce nested lists / arrays to a 2-d object array of Python ints."""
    if isinstance(x, np.ndarray) and x.dtype == object and x.ndim == 2:
        out = x.copy()
    else:
        arr = np.asarray(x, dtype=object)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1) if arr.size else zeros(0, 0)
        if arr.size == 0 and rows is not None and cols is not None:
            return zeros(rows, cols)
        out = np.empty(arr.shape, dtype=object)
        for idx in np.ndindex(arr.shape):
            out[idx] = int(arr[idx])
    if rows is not None and cols is not None and out.shape != (rows, cols):
        if out.size == 0 and rows * cols == 0:
            return zeros(rows, cols)
        raise ValueError(f"expected shape {(rows, cols)}, got {out.shape}")
    return out


def block_diag(*blocks) -> np.ndarray:
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    out = zeros(rows, cols)
    r = c = 0
    for b in blocks:
        out[r : r + b.shape[0], c : c + b.shape[1]] = b
        r += b.shape[0]
        c += b.shape[1]
    return out


def _check_ring_args(M, ring):
    if not isinstance(ring, Ring):
        raise TypeError("ring must be a Ring")
    M = as_matrix(M)
    return ring.reduce(M)


# ---------------------------------------------------------------------------
# column echelon form


def _modinv(a: int, m: int) -> int:
    return pow(int(a), -1, m)


def _column_echelon(M: np.ndarray, ring: Ring = ZZ):
    """Return ``(H, V, W, pivots)`` with ``M V = H``, ``W = V^{-1}``.

    ``H`` is in column echelon form: the first ``len(pivots)`` columns carry
    pivots at strictly increasing rows, the remaining columns are zero.
    Over a prime field the pivots are 1; over Z they are positive.
    """
    m, n = M.shape
    p = ring.modulus
    field_mode = p != 0
    H = M.copy()
    V = identity(n)
    W = identity(n)
    r = 0
    pivots = []
    for i in range(m):
        if r == n:
            break
        found = False
        while True:
            row = H[i, r:]
            nz = np.flatnonzero(row != 0)
            if nz.size == 0:
                break
            found = True
            # minimal absolute value pivot limits coefficient growth
            k = r + nz[int(np.argmin(np.abs(row[nz]).astype(object)))]
            if k != r:
                H[:, [r, k]] = H[:, [k, r]]
                V[:, [r, k]] = V[:, [k, r]]
                W[[r, k], :] = W[[k, r], :]
            piv = H[i, r]
            if field_mode:
                if piv != 1:
                    u = _modinv(piv, p)
                    H[:, r] = (H[:, r] * u) % p
                    V[:, r] = (V[:, r] * u) % p
                    W[r, :] = (W[r, :] * piv) % p
                q = H[i, r + 1 :].copy()
            else:
                q = H[i, r + 1 :] // piv
            cols = np.flatnonzero(q != 0)
            if cols.size == 0:
                break
            qs = q[cols]
            tgt = cols + r + 1
            H[:, tgt] -= np.outer(H[:, r], qs)
            V[:, tgt] -= np.outer(V[:, r], qs)
            W[r, :] += qs.dot(W[tgt, :])
            if field_mode:
                H %= p
                V %= p
                W %= p
            if not np.any(H[i, r + 1 :] != 0):
                break
        if found:
            if not field_mode and H[i, r] < 0:
                H[:, r] = -H[:, r]
                V[:, r] = -V[:, r]
                W[r, :] = -W[r, :]
            pivots.append(i)
            r += 1
    return H, V, W, pivots


def integer_rank(M, ring: Ring = ZZ) -> int:
    M = _check_ring_args(M, ring)
    if ring.modulus and not ring.is_field:
        raise ValueError("rank is not defined over a composite modulus")
    return len(_column_echelon(M, ring)[3])


# ---------------------------------------------------------------------------
# kernels and solving


def kernel_with_retraction(M, ring: Ring = ZZ):
    """Kernel basis ``K`` (columns) and an integral left inverse ``L`` (``L K = I``).

    Over Z the basis spans the saturated kernel lattice, so ``L`` reads off
    coordinates of any kernel vector.  Defined over Z and prime fields.
    """
    M = _check_ring_args(M, ring)
    if ring.modulus and not ring.is_field:
        raise ValueError("kernel_with_retraction needs Z or a prime field")
    _, V, W, piv = _column_echelon(M, ring)
    r = len(piv)
    return V[:, r:].copy(), W[r:, :].copy()


def kernel_basis(M, ring: Ring = ZZ) -> np.ndarray:
    """Columns spanning ``{x : M x = 0}``.

    Over Z and prime fields this is a basis.  Over a composite modulus the
    kernel need not be free and the columns form a generating set.
    """
    M = _check_ring_args(M, ring)
    if ring.modulus and not ring.is_field:
        m = ring.modulus
        rows, n = M.shape
        lifted = np.concatenate([M, m * identity(rows)], axis=1)
        G = kernel_basis(lifted)[:n, :]
        lattice = np.concatenate([G, m * identity(n)], axis=1)
        H, _, _, piv = _column_echelon(lattice)
        gens = H[:, : len(piv)] % m
        keep = [j for j in range(gens.shape[1]) if np.any(gens[:, j] != 0)]
        return gens[:, keep]
    return kernel_with_retraction(M, ring)[0]


def solve_linear(M, b, ring: Ring = ZZ):
    """Some ``x`` with ``M x = b`` exactly, or ``None`` if there is none.

    ``b`` may be a vector or a matrix of right-hand sides (all must be
    solvable).  Over a composite modulus the system is lifted to Z.
    """
    M = _check_ring_args(M, ring)
    vector = np.ndim(b) == 1
    B = as_matrix(np.asarray(b, dtype=object).reshape(-1, 1) if vector else b)
    B = ring.reduce(B)
    if B.shape[0] != M.shape[0]:
        raise ValueError(f"dimension mismatch: matrix has {M.shape[0]} rows, rhs has {B.shape[0]}")
    m = ring.modulus
    if m and not ring.is_field:
        rows, n = M.shape
        lifted = np.concatenate([M, m * identity(rows)], axis=1)
        x = solve_linear(lifted, B)
        if x is None:
            return None
        x = x[:n] % m
        return x.reshape(-1) if vector else x
    H, V, _, piv = _column_echelon(M, ring)
    res = B.copy()
    y = zeros(M.shape[1], B.shape[1])
    for j, i in enumerate(piv):
        h = H[i, j]
        if m:
            yj = (res[i, :] * _modinv(h, m)) % m
        else:
            if np.any(res[i, :] % h != 0):
                return None
            yj = res[i, :] // h
        y[j, :] = yj
        res -= np.outer(H[:, j], yj)
        if m:
            res %= m
    if np.any(res != 0):
        return None
    x = ring.reduce(V.dot(y))
    return x.reshape(-1) if vector else x


def express_in_basis(K: np.ndarray, L: np.ndarray, Y) -> np.ndarray:
    """Coordinates ``C`` with ``K C = Y`` using the retraction ``L``; raises if ``Y`` leaves span(K)."""
    Y = as_matrix(Y)
    C = L.dot(Y) if L.shape[0] else zeros(0, Y.shape[1])
    if not np.array_equal(K.dot(C) if K.shape[1] else zeros(K.shape[0], Y.shape[1]), Y):
        raise ValueError("vectors do not lie in the span of the basis")
    return C


# ---------------------------------------------------------------------------
# Smith normal form


def _snf_integers(M: np.ndarray, track: bool):
    m, n = M.shape
    D = M.copy()
    U = identity(m) if track else None
    V = identity(n) if track else None
    t = 0
    while t < min(m, n):
        sub = D[t:, t:]
        nz = np.argwhere(sub != 0)
        if nz.size == 0:
            break
        vals = np.abs(sub[nz[:, 0], nz[:, 1]]).astype(object)
        i, j = nz[int(np.argmin(vals))] + t
        if i != t:
            D[[t, i], :] = D[[i, t], :]
            if track:
                U[[t, i], :] = U[[i, t], :]
        if j != t:
            D[:, [t, j]] = D[:, [j, t]]
            if track:
                V[:, [t, j]] = V[:, [j, t]]
        while True:
            p = D[t, t]
            q = D[t + 1 :, t] // p
            rows = np.flatnonzero(q != 0) + t + 1
            if rows.size:
                D[rows, :] -= np.outer(q[rows - t - 1], D[t, :])
                if track:
                    U[rows, :] -= np.outer(q[rows - t - 1], U[t, :])
            q = D[t, t + 1 :] // p
            cols = np.flatnonzero(q != 0) + t + 1
            if cols.size:
                D[:, cols] -= np.outer(D[:, t], q[cols - t - 1])
                if track:
                    V[:, cols] -= np.outer(V[:, t], q[cols - t - 1])
            col_left = np.flatnonzero(D[t + 1 :, t] != 0)
            row_left = np.flatnonzero(D[t, t + 1 :] != 0)
            if col_left.size == 0 and row_left.size == 0:
                rest = D[t + 1 :, t + 1 :]
                bad = np.argwhere(rest % p != 0)
                if bad.size == 0:
                    break
                k = bad[0][0] + t + 1
                D[t, :] += D[k, :]
                if track:
                    U[t, :] += U[k, :]
                continue
            # move a smaller remainder into the pivot slot
            cands = [(abs(D[t + 1 + a, t]), t + 1 + a, t) for a in col_left]
            cands += [(abs(D[t, t + 1 + b]), t, t + 1 + b) for b in row_left]
            _, i, j = min(cands)
            if i != t:
                D[[t, i], :] = D[[i, t], :]
                if track:
                    U[[t, i], :] = U[[i, t], :]
            if j != t:
                D[:, [t, j]] = D[:, [j, t]]
                if track:
                    V[:, [t, j]] = V[:, [j, t]]
        if D[t, t] < 0:
            D[t, :] = -D[t, :]
            if track:
                U[t, :] = -U[t, :]
        t += 1
    return U, D, V


def smith_normal_form(M, ring: Ring = ZZ):
    """Return ``(U, D, V)`` with ``U M V = D`` diagonal, ``d_i | d_{i+1}``.

    Over Z/m the matrix is lifted to Z, reduced there, and the factors are
    reduced mod m; U and V stay invertible because their determinants are +-1.
    """
    M = _check_ring_args(M, ring)
    if ring.modulus and ring.is_field:
        p = ring.modulus
        H, V, _, piv = _column_echelon(M, ring)
        # row-reduce H: pivot rows first, then clear the rest
        m = M.shape[0]
        r = len(piv)
        order = piv + [i for i in range(m) if i not in piv]
        P = zeros(m, m)
        for a, i in enumerate(order):
            P[a, i] = 1
        Hp = P.dot(H) % p
        # Hp[:r, :r] is unit lower triangular; invert it exactly
        T = identity(m)
        lower = Hp[:r, :r]
        inv = _unit_lower_inverse(lower, p)
        T[:r, :r] = inv
        T[r:, :r] = (-Hp[r:, :r].dot(inv)) % p
        U = T.dot(P) % p
        D = U.dot(M).dot(V) % p
        return U, D, V
    U, D, V = _snf_integers(M, track=True)
    return ring.reduce(U), ring.reduce(D), ring.reduce(V)


def _unit_lower_inverse(L: np.ndarray, p: int) -> np.ndarray:
    n = L.shape[0]
    inv = identity(n)
    for j in range(n):
        for i in range(j + 1, n):
            s = sum(L[i, k] * inv[k, j] for k in range(j, i))
            inv[i, j] = (-s) % p
    return inv


def invariant_factors(M) -> list:
    """Nonzero diagonal entries of the Smith form over Z (units included)."""
    _, D, _ = _snf_integers(as_matrix(M), track=False)
    return [D[i, i] for i in range(min(D.shape)) if D[i, i] != 0]


def cokernel_invariants(M, ring: Ring = ZZ) -> AbelianGroupInvariants:
    """Invariants of ``Z^rows / colspan(M)``; defined over Z only."""
    if not ring.is_integers:
        raise ValueError(f"cokernel_invariants is defined over Z only, got {ring}")
    M = as_matrix(M)
    return AbelianGroupInvariants.from_diagonal(invariant_factors(M), M.shape[0])


def is_unimodular(M) -> bool:
    M = as_matrix(M)
    if M.shape[0] != M.shape[1]:
        return False
    if M.shape[0] == 0:
        return True
    d = invariant_factors(M)
    return len(d) == M.shape[0] and all(abs(x) == 1 for x in d)


def unimodular_inverse(M) -> np.ndarray:
    """Exact inverse of a unimodular integer matrix."""
    M = as_matrix(M)
    n = M.shape[0]
    X = solve_linear(M, identity(n))
    if X is None or M.shape[1] != n:
        raise ValueError("matrix is not unimodular")
    return X


# ---------------------------------------------------------------------------
# serialization


def matrix_to_json(M, ring: Ring = ZZ) -> dict:
    M = as_matrix(M)
    entries = [[int(i), int(j), str(M[i, j])] for i, j in zip(*np.nonzero(M != 0))]
    return {"ring": str(ring), "rows": M.shape[0], "cols": M.shape[1], "entries": entries}


def matrix_from_json(doc: dict):
    """Parse the sparse-triplet form; returns ``(matrix, ring)``."""
    try:
        ring = Ring.parse(doc["ring"])
        rows, cols = int(doc["rows"]), int(doc["cols"])
        entries = doc["entries"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed matrix document: {exc}") from None
    if rows < 0 or cols < 0:
        raise ValueError("negative matrix dimension")
    M = zeros(rows, cols)
    for triple in entries:
        i, j, v = triple
        i, j = int(i), int(j)
        if not (0 <= i < rows and 0 <= j < cols):
            raise ValueError(f"entry index ({i}, {j}) out of range for {rows}x{cols}")
        M[i, j] = int(v) if isinstance(v, (int, str)) else _bad(v)
    return ring.reduce(M), ring


def _bad(v):
    raise ValueError(f"matrix entries must be decimal strings or ints, got {v!r}")


def dumps(doc) -> str:
    """Canonical JSON: sorted keys, compact separators."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))

