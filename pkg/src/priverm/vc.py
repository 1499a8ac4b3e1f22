"""Shattering checks, exact VC dimension, growth functions, and loss classes.

The engine works on integer bit columns: for each domain point j, ``col[j]``
has bit i set iff member i labels point j with 1.  A subset is shattered iff
progressively splitting the member set by each column leaves every cell
nonempty.  Exact VC dimension is found by levelwise search over shattered
subsets: every subset of a shattered set is shattered, so level k+1 is built
by extending level-k sets past their maximum point and keeping candidates
whose k-subsets all survived.  A node budget degrades the answer to a
verified lower bound instead of running forever.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, combinations_with_replacement
from typing import Iterable, Optional, Sequence

from .core import (
    DomainMismatchError,
    FiniteDomain,
    Hypothesis,
    HypothesisClass,
    labeled_domain,
    product_domain,
)

DEFAULT_NODE_BUDGET = 10_000_000

MODE_EXACT = "exact"
MODE_LOWER_BOUND = "lower-bound-only"


@dataclass(frozen=True)
class ProjectionTable:
    """Distinct bit patterns a class induces on an ordered point subset."""

    subset: tuple[int, ...]
    patterns: frozenset[tuple[int, ...]]


@dataclass(frozen=True)
class VcReport:
    """Outcome of a VC computation.

    ``exact`` is False when the search stopped at the node budget or ran in
    lower-bound-only mode; ``vc`` is then a verified lower bound.  ``witness``
    is the lexicographically first shattered set of size ``vc``; ``levels[k]``
    counts the shattered k-subsets found (levels[0] is 1 for the empty set).
    """

    vc: int
    exact: bool
    witness: tuple[int, ...]
    levels: tuple[int, ...]
    nodes: int = 0

    def to_json(self) -> dict:
        return {
            "vc": self.vc,
            "exact": self.exact,
            "witness": list(self.witness),
            "levels": list(self.levels),
        }


def _validate_subset(cls: HypothesisClass, subset: Sequence[int]) -> tuple[int, ...]:
    pts = tuple(subset)
    if len(set(pts)) != len(pts):
        raise ValueError(f"subset has duplicate indices: {pts}")
    for p in pts:
        if not 0 <= p < cls.domain.size:
            raise DomainMismatchError(
                f"index {p} outside domain of size {cls.domain.size}"
            )
    return pts


def _columns(cls: HypothesisClass) -> list[int]:
    cols = [0] * cls.domain.size
    for i, h in enumerate(cls.members):
        bit = 1 << i
        for j, b in enumerate(h.bits):
            if b:
                cols[j] |= bit
    return cols


def _splits_fully(cols: Sequence[int], full: int, points: Iterable[int]) -> bool:
    """True iff every column in ``points`` cuts every current cell in two."""
    cells = [full]
    for p in points:
        col = cols[p]
        nxt = []
        for c in cells:
            a = c & col
            if not a:
                return False
            b = c ^ a
            if not b:
                return False
            nxt.append(a)
            nxt.append(b)
        cells = nxt
    return True


def project(cls: HypothesisClass, subset: Sequence[int]) -> ProjectionTable:
    """Table of distinct labelings cls realizes on the given points."""
    pts = _validate_subset(cls, subset)
    patterns = {tuple(h.bits[p] for p in pts) for h in cls.members}
    return ProjectionTable(subset=pts, patterns=frozenset(patterns))


def is_shattered(cls: HypothesisClass, subset: Sequence[int]) -> bool:
    """True iff the class realizes all 2^|subset| labelings on the subset."""
    pts = _validate_subset(cls, subset)
    if len(cls) < (1 << len(pts)):
        return False
    cols = [0] * cls.domain.size
    for i, h in enumerate(cls.members):
        bit = 1 << i
        for p in pts:
            if h.bits[p]:
                cols[p] |= bit
    return _splits_fully(cols, (1 << len(cls)) - 1, pts)


def _lex_first(masks: Iterable[int]) -> tuple[int, ...]:
    def as_tuple(m: int) -> tuple[int, ...]:
        out, i = [], 0
        while m:
            if m & 1:
                out.append(i)
            m >>= 1
            i += 1
        return tuple(out)

    return min(as_tuple(m) for m in masks)


def vc_dimension(
    cls: HypothesisClass,
    mode: str = MODE_EXACT,
    budget: Optional[int] = DEFAULT_NODE_BUDGET,
    witness: Optional[Sequence[int]] = None,
) -> VcReport:
    """VC dimension by levelwise enumeration of shattered subsets.

    In exact mode the search runs until no level-k set extends; hitting the
    node budget returns the last completed level as a lower bound with
    ``exact=False``.  In lower-bound-only mode a supplied ``witness`` is
    verified instead of searching (or the search result is reported as a
    lower bound).
    """
    if mode not in (MODE_EXACT, MODE_LOWER_BOUND):
        raise ValueError(f"unknown mode {mode!r}")
    if len(cls) == 0:
        raise ValueError("class must be nonempty")

    if mode == MODE_LOWER_BOUND and witness is not None:
        pts = tuple(sorted(_validate_subset(cls, witness)))
        if not is_shattered(cls, pts):
            raise ValueError(f"supplied witness {pts} is not shattered")
        return VcReport(vc=len(pts), exact=False, witness=pts, levels=(), nodes=1)

    cols = _columns(cls)
    full = (1 << len(cls)) - 1
    # points whose column is non-constant; only these can join a shattered set
    active = [p for p in range(cls.domain.size) if cols[p] != 0 and cols[p] != full]
    vc_cap = min(len(cls).bit_length() - 1, len(active))

    nodes = cls.domain.size
    levels = [1]
    current = {1 << p for p in active}
    if not current:
        return VcReport(vc=0, exact=True, witness=(), levels=(1,), nodes=nodes)
    levels.append(len(current))
    exact = True

    k = 1
    while k < vc_cap:
        # join level-k sets sharing everything but their maximum point
        groups: dict[int, list[int]] = {}
        for s in current:
            top = s.bit_length() - 1
            groups.setdefault(s ^ (1 << top), []).append(top)
        nxt: set[int] = set()
        stop = False
        for prefix in sorted(groups):
            exts = sorted(groups[prefix])
            pre_elems = [q for q in range(prefix.bit_length()) if prefix >> q & 1]
            for i, p1 in enumerate(exts):
                for p2 in exts[i + 1 :]:
                    cand = prefix | (1 << p1) | (1 << p2)
                    # remaining k-subsets (dropping a prefix point) must be shattered
                    if any((cand ^ (1 << q)) not in current for q in pre_elems):
                        continue
                    nodes += 1
                    if budget is not None and nodes > budget:
                        stop = True
                        break
                    if _splits_fully(cols, full, pre_elems + [p1, p2]):
                        nxt.add(cand)
                if stop:
                    break
            if stop:
                break
        if stop:
            exact = False
            break
        if not nxt:
            break
        current = nxt
        levels.append(len(current))
        k += 1

    if mode == MODE_LOWER_BOUND:
        exact = False
    return VcReport(
        vc=len(levels) - 1,
        exact=exact,
        witness=_lex_first(current),
        levels=tuple(levels),
        nodes=nodes,
    )


def growth_function(cls: HypothesisClass, m: int) -> int:
    """Max number of distinct labelings over any m-point subset.

    Exact by enumeration of all m-subsets; intended for small domains.
    """
    if not 0 <= m <= cls.domain.size:
        raise ValueError(f"m must be in [0, {cls.domain.size}], got {m}")
    if m == 0:
        return 1
    best = 0
    for pts in combinations(range(cls.domain.size), m):
        seen = set()
        for h in cls.members:
            pat = 0
            for j, p in enumerate(pts):
                if h.bits[p]:
                    pat |= 1 << j
            seen.add(pat)
        if len(seen) > best:
            best = len(seen)
            if best == 1 << m:
                return best
    return best


def sauer_bound(d: int, m: int) -> int:
    """Sum of C(m, i) for i = 0..d."""
    if d < 0 or m < 0:
        raise ValueError("d and m must be nonnegative")
    return sum(math.comb(m, i) for i in range(min(d, m) + 1))


def union_class(a: HypothesisClass, b: HypothesisClass) -> HypothesisClass:
    """Deduplicated union of two classes over the same domain."""
    if a.domain != b.domain:
        raise DomainMismatchError(
            f"cannot union classes over {a.domain} and {b.domain}"
        )
    return HypothesisClass.from_hypotheses(a.domain, (*a.members, *b.members))


def k_fold_union(r: HypothesisClass, k: int) -> HypothesisClass:
    """Class of pointwise ORs of all k-multisets of members."""
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    masks = [h.mask for h in r.members]
    ors = set()
    for combo in combinations_with_replacement(masks, k):
        m = 0
        for x in combo:
            m |= x
        ors.add(m)
    return HypothesisClass.from_hypotheses(
        r.domain, (Hypothesis.from_mask(r.domain, m) for m in ors)
    )


# --- derived loss classes ---------------------------------------------------


def _error_mask(h: Hypothesis, n_xstar: int) -> int:
    """Bit at ((x,x*),y) set iff h(x) != y, over the product enumeration."""
    m = 0
    p = 0
    for x in range(h.domain.size):
        hx = h.bits[x]
        for _ in range(n_xstar):
            for y in (0, 1):
                if hx != y:
                    m |= 1 << p
                p += 1
    return m


def _ignore_mask(phi: Hypothesis, n_x: int) -> int:
    """Bit at ((x,x*),y) set iff phi(x*) = 1, over the product enumeration."""
    m = 0
    p = 0
    for _ in range(n_x):
        for xs in range(phi.domain.size):
            v = phi.bits[xs]
            for _ in (0, 1):
                if v:
                    m |= 1 << p
                p += 1
    return m


def build_f_class(H: HypothesisClass, Phi: HypothesisClass) -> HypothesisClass:
    """Class of triple labelings max(h errs, phi flags) over all (h, phi)."""
    if len(H) == 0 or len(Phi) == 0:
        raise ValueError("both classes must be nonempty")
    dom = product_domain(H.domain.size, Phi.domain.size)
    errs = [_error_mask(h, Phi.domain.size) for h in H.members]
    igs = [_ignore_mask(phi, H.domain.size) for phi in Phi.members]
    members = {e | g for e in errs for g in igs}
    return HypothesisClass.from_hypotheses(
        dom, (Hypothesis.from_mask(dom, m) for m in members)
    )


def build_aux_class(H: HypothesisClass, Phi: HypothesisClass) -> HypothesisClass:
    """Class of triple labelings (h errs AND phi does not flag)."""
    if len(H) == 0 or len(Phi) == 0:
        raise ValueError("both classes must be nonempty")
    dom = product_domain(H.domain.size, Phi.domain.size)
    full = (1 << dom.size) - 1
    errs = [_error_mask(h, Phi.domain.size) for h in H.members]
    igs = [full ^ _ignore_mask(phi, H.domain.size) for phi in Phi.members]
    members = {e & g for e in errs for g in igs}
    return HypothesisClass.from_hypotheses(
        dom, (Hypothesis.from_mask(dom, m) for m in members)
    )


def build_loss_class(cls: HypothesisClass, which: str) -> HypothesisClass:
    """Loss class over (point, y) pairs.

    ``nonprivileged`` gives the misclassification indicators (x,y) -> 1[h(x)!=y];
    ``privileged`` gives the flag indicators (x*,y) -> 1[phi(x*)=1].  Both have
    the same VC dimension as the input class.
    """
    if len(cls) == 0:
        raise ValueError("class must be nonempty")
    dom = labeled_domain(cls.domain.size, cls.domain.label)
    out = []
    for h in cls.members:
        if which == "nonprivileged":
            bits = tuple(h.bits[x] ^ y for x in range(cls.domain.size) for y in (0, 1))
        elif which == "privileged":
            bits = tuple(h.bits[x] for x in range(cls.domain.size) for _ in (0, 1))
        else:
            raise ValueError(f"which must be 'nonprivileged' or 'privileged', got {which!r}")
        out.append(Hypothesis(dom, bits))
    return HypothesisClass.from_hypotheses(dom, out)
