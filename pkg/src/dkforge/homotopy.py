"""Chain homotopies, quasi-isomorphisms and homotopy equivalences.

Homotopies are found by writing ``d h + h d = g - f`` as one linear system in
the entries of all components ``h_n : X_n -> Y_{n+1}`` and solving it exactly.
Every returned homotopy is re-checked before it leaves this module.

For bounded-below complexes of free modules a quasi-isomorphism is a homotopy
equivalence (an acyclic bounded-below complex of projectives is contractible),
which is what makes homotopy equivalence decidable here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain import (
    ChainComplex,
    ChainMap,
    ComplexError,
    chain_map_constraints,
    compose,
    homology,
    identity_map,
    mapping_cone,
)
from .linalg import as_matrix, identity, matrix_from_json, matrix_to_json, solve_linear, zeros


class GradedHomotopy:
    """Degree +1 family ``components[n] : X_n -> Y_{n+1}``."""

    __slots__ = ("source", "target", "_comps")

    def __init__(self, source: ChainComplex, target: ChainComplex, components=None):
        self.source = source
        self.target = target
        comps = {}
        for n, M in (components or {}).items():
            n = int(n)
            M = as_matrix(M, target.rank(n + 1), source.rank(n))
            if M.shape != (target.rank(n + 1), source.rank(n)):
                raise ComplexError(f"homotopy component in degree {n} has wrong shape", n)
            if M.size and np.any(M != 0):
                comps[n] = source.ring.reduce(M)
        self._comps = comps

    def __getitem__(self, n: int) -> np.ndarray:
        M = self._comps.get(n)
        if M is None:
            return zeros(self.target.rank(n + 1), self.source.rank(n))
        return M

    @property
    def degrees(self) -> range:
        return self.source.degrees

    def is_zero(self) -> bool:
        return not self._comps

    def boundary(self) -> ChainMap:
        """``d h + h d`` as a chain map."""
        X, Y = self.source, self.target
        comps = {}
        for n in range(min(X.min_deg, Y.min_deg), max(X.max_deg, Y.max_deg) + 1):
            comps[n] = Y.d(n + 1).dot(self[n]) + self[n - 1].dot(X.d(n))
        return ChainMap(X, Y, comps, check=False)

    def __neg__(self):
        return GradedHomotopy(self.source, self.target, {n: -M for n, M in self._comps.items()})

    def __add__(self, other: "GradedHomotopy"):
        keys = set(self._comps) | set(other._comps)
        return GradedHomotopy(self.source, self.target, {n: self[n] + other[n] for n in keys})

    def to_json(self) -> dict:
        return {
            "ring": str(self.source.ring),
            "shift": "+1",
            "components": [{"deg": n, "matrix": matrix_to_json(self[n], self.source.ring)}
                           for n in sorted(self._comps)],
        }

    @classmethod
    def from_json(cls, doc: dict, source: ChainComplex, target: ChainComplex) -> "GradedHomotopy":
        if doc.get("shift") != "+1":
            raise ComplexError("homotopy document lacks the +1 shift marker")
        return cls(source, target, {int(e["deg"]): matrix_from_json(e["matrix"])[0] for e in doc["components"]})


def verify_homotopy(h: GradedHomotopy, f: ChainMap, g: ChainMap, degrees=None) -> bool:
    """Check ``d h + h d = g - f`` (optionally only in the given degrees)."""
    dh = h.boundary()
    diff = g - f
    degs = degrees if degrees is not None else diff.degrees
    return all(np.array_equal(f.ring.reduce(dh[n] - diff[n]), zeros(*diff[n].shape)) for n in degs)


def _homotopy_layout(X: ChainComplex, Y: ChainComplex):
    out = []
    off = 0
    for n in X.degrees:
        r, c = Y.rank(n + 1), X.rank(n)
        if r * c:
            out.append((n, off, r, c))
            off += r * c
    return out, off


def _homotopy_system(X: ChainComplex, Y: ChainComplex, degrees):
    """Rows: equations ``(d h + h d)_n`` for ``n`` in ``degrees``; returns (layout, matrix, row offsets)."""
    layout, total = _homotopy_layout(X, Y)
    pos = {n: (off, r, c) for n, off, r, c in layout}
    blocks, offsets = [], {}
    row = 0
    for n in degrees:
        rows = Y.rank(n) * X.rank(n)
        if not rows:
            continue
        R = zeros(rows, total)
        if n in pos:  # d_{n+1} h_n
            off, r, c = pos[n]
            R[:, off:off + r * c] += np.kron(Y.d(n + 1), identity(c))
        if n - 1 in pos:  # h_{n-1} d_n
            off, r, c = pos[n - 1]
            R[:, off:off + r * c] += np.kron(identity(r), X.d(n).T)
        blocks.append(R)
        offsets[n] = row
        row += rows
    M = np.concatenate(blocks, axis=0) if blocks else zeros(0, total)
    return layout, M, offsets


def find_chain_homotopy(f: ChainMap, g: ChainMap, degrees=None):
    """A homotopy ``h`` with ``d h + h d = g - f``, or ``None`` if none exists.

    ``degrees`` restricts the equations to a set of degrees; this is used for
    complexes that are known only up to a truncation degree.
    """
    if not (f.source == g.source and f.target == g.target):
        raise ComplexError("find_chain_homotopy needs parallel maps")
    X, Y = f.source, f.target
    if degrees is None:
        degrees = range(min(X.min_deg, Y.min_deg), max(X.max_deg, Y.max_deg) + 1)
    degrees = [n for n in degrees]
    layout, M, offsets = _homotopy_system(X, Y, degrees)
    rhs = zeros(M.shape[0], 1)[:, 0]
    diff = g - f
    for n, row in offsets.items():
        rhs[row:row + Y.rank(n) * X.rank(n)] = diff[n].reshape(-1)
    x = solve_linear(M, rhs, f.ring) if M.shape[0] else zeros(M.shape[1], 1)[:, 0]
    if x is None:
        return None
    comps = {n: np.asarray(x[off:off + r * c], dtype=object).reshape(r, c) for n, off, r, c in layout}
    h = GradedHomotopy(X, Y, comps)
    if not verify_homotopy(h, f, g, degrees):
        raise ArithmeticError("homotopy solver returned an unverified solution")
    return h


@dataclass(frozen=True)
class QuasiIsoResult:
    holds: bool
    cone_homology: dict

    def __bool__(self):
        return self.holds


def is_quasi_iso(f: ChainMap, degrees=None) -> QuasiIsoResult:
    """Decide whether ``f`` is a quasi-isomorphism via the homology of its cone.

    With ``degrees`` given, only ``H_n(cone)`` for ``n`` in that set is required
    to vanish (cone degree ``n`` covers ``H_n`` and ``H_{n-1}`` of the ends).
    """
    if not f.ring.is_integers:
        raise ComplexError("is_quasi_iso is implemented over Z")
    H = homology(mapping_cone(f))
    table = {n: str(h) for n, h in H.items()}
    if degrees is None:
        ok = all(h.is_zero for h in H.values())
    else:
        ok = all(H[n].is_zero for n in degrees if n in H)
    return QuasiIsoResult(ok, table)


@dataclass(frozen=True)
class HomotopyEquivalence:
    holds: bool
    inverse: ChainMap | None = None
    left_homotopy: GradedHomotopy | None = None   # g f ≃ id
    right_homotopy: GradedHomotopy | None = None  # f g ≃ id
    cone_homology: dict | None = None

    def __bool__(self):
        return self.holds


def _solve_right_inverse(f: ChainMap):
    """Solve for ``g`` and ``h`` with ``g`` a chain map and ``f g + d h + h d = id``."""
    X, Y = f.source, f.target
    # g : Y -> X chain map constraints
    glayout, G = chain_map_constraints(Y, X)
    lo = min(X.min_deg, Y.min_deg)
    hi = max(X.max_deg, Y.max_deg)
    hlayout, H, hoff = _homotopy_system(Y, Y, range(lo, hi + 1))
    ng, nh = G.shape[1], H.shape[1]
    # f g in degree n: vec(f_n g_n) = kron(f_n, I) vec(g_n)
    FG = zeros(H.shape[0], ng)
    gpos = {n: (off, r, c) for n, off, r, c in glayout}
    for n, row in hoff.items():
        if n not in gpos:
            continue
        off, r, c = gpos[n]
        FG[row:row + Y.rank(n) * Y.rank(n), off:off + r * c] = np.kron(f[n], identity(c))
    top = np.concatenate([G, zeros(G.shape[0], nh)], axis=1)
    bot = np.concatenate([FG, H], axis=1)
    M = np.concatenate([top, bot], axis=0)
    rhs = zeros(M.shape[0], 1)[:, 0]
    for n, row in hoff.items():
        rhs[G.shape[0] + row:G.shape[0] + row + Y.rank(n) ** 2] = identity(Y.rank(n)).reshape(-1)
    x = solve_linear(M, rhs, f.ring)
    if x is None:
        return None
    g = ChainMap(Y, X, {n: np.asarray(x[off:off + r * c], dtype=object).reshape(r, c)
                        for n, off, r, c in glayout})
    return g


def is_homotopy_equivalence(f: ChainMap) -> HomotopyEquivalence:
    """Decide homotopy equivalence; on success return a verified inverse and both homotopies.

    Complexes here are bounded by construction, so the bounded-below
    hypothesis always holds.
    """
    q = is_quasi_iso(f)
    if not q:
        return HomotopyEquivalence(False, cone_homology=q.cone_homology)
    g = _solve_right_inverse(f)
    if g is None:
        raise ArithmeticError("quasi-isomorphism of bounded free complexes without a homotopy inverse")
    X, Y = f.source, f.target
    right = find_chain_homotopy(compose(f, g), identity_map(Y))
    left = find_chain_homotopy(compose(g, f), identity_map(X))
    if right is None or left is None:
        raise ArithmeticError("homotopy inverse failed re-verification")
    return HomotopyEquivalence(True, g, left, right, q.cone_homology)
