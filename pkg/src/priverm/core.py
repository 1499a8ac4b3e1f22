"""Domains, hypotheses, samples, finite distributions, and loss functions.

All domains are finite and indexed densely by 0..size-1.  A hypothesis is a
total binary labeling of one domain, stored as a bit tuple; a hypothesis
class is a deduplicated, canonically ordered set of such labelings.  Losses
are pure functions on {0,1} values, so every quantity downstream (empirical
risk, true error, VC dimension) is computed exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

PROB_TOLERANCE = 1e-12


class DomainMismatchError(ValueError):
    """An index or hypothesis was used against the wrong domain."""


class InvalidDistributionError(ValueError):
    """A probability table failed validation."""


@dataclass(frozen=True)
class FiniteDomain:
    """An indexed finite set of points, 0..size-1."""

    size: int
    label: str = "X"

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ValueError(f"domain size must be >= 1, got {self.size}")


def product_domain(n_x: int, n_xstar: int) -> FiniteDomain:
    """Domain of ((x, x*), y) points, enumerated x-major, x*-minor, y-last."""
    return FiniteDomain(size=n_x * n_xstar * 2, label="X×X*×Y")


def product_index(x: int, xstar: int, y: int, n_xstar: int) -> int:
    """Dense index of ((x, x*), y) in the product domain."""
    return (x * n_xstar + xstar) * 2 + y


def product_legend(n_x: int, n_xstar: int) -> list[str]:
    """Index-to-name map for a product domain, in enumeration order."""
    return [
        f"(x={x},x*={xs},y={y})"
        for x in range(n_x)
        for xs in range(n_xstar)
        for y in range(2)
    ]


def labeled_domain(n: int, label: str = "X") -> FiniteDomain:
    """Domain of (point, y) pairs, enumerated point-major, y-last."""
    return FiniteDomain(size=n * 2, label=f"{label}×Y")


def labeled_index(point: int, y: int) -> int:
    return point * 2 + y


@dataclass(frozen=True)
class Hypothesis:
    """A total binary labeling of a finite domain.

    ``bits[i]`` is the label of point ``i``.  Hypotheses are immutable and
    hashable; the integer ``mask`` view (bit i = label of point i) is cached
    for fast projections.
    """

    domain: FiniteDomain
    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.bits) != self.domain.size:
            raise ValueError(
                f"bit pattern length {len(self.bits)} != domain size {self.domain.size}"
            )
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("bits must all be 0 or 1")

    @cached_property
    def mask(self) -> int:
        """Integer view with bit i set iff point i is labeled 1."""
        m = 0
        for i, b in enumerate(self.bits):
            if b:
                m |= 1 << i
        return m

    def __call__(self, i: int) -> int:
        if not 0 <= i < self.domain.size:
            raise DomainMismatchError(
                f"point {i} outside domain of size {self.domain.size}"
            )
        return self.bits[i]

    def to_bitstring(self) -> str:
        """Point-0-first bit string, e.g. '0110'."""
        return "".join(str(b) for b in self.bits)

    @classmethod
    def from_bitstring(cls, domain: FiniteDomain, s: str) -> "Hypothesis":
        if set(s) - {"0", "1"}:
            raise ValueError(f"bit string may contain only 0/1: {s!r}")
        return cls(domain, tuple(int(c) for c in s))

    @classmethod
    def from_mask(cls, domain: FiniteDomain, mask: int) -> "Hypothesis":
        return cls(domain, tuple((mask >> i) & 1 for i in range(domain.size)))


@dataclass(frozen=True)
class HypothesisClass:
    """A deduplicated finite set of hypotheses over one shared domain.

    Members are kept in canonical order (lexicographic by bit tuple, i.e.
    the order in which the patterns read as point-0-first bit strings), so
    "smallest member index" is well defined for tie-breaking.
    """

    domain: FiniteDomain
    members: tuple[Hypothesis, ...]

    def __post_init__(self) -> None:
        for h in self.members:
            if h.domain != self.domain:
                raise DomainMismatchError("all members must share the class domain")
        seen = {h.bits for h in self.members}
        if len(seen) != len(self.members):
            raise ValueError("members must be deduplicated")
        if list(self.members) != sorted(self.members, key=lambda h: h.bits):
            raise ValueError("members must be in canonical (lexicographic) order")

    @classmethod
    def from_hypotheses(
        cls, domain: FiniteDomain, hypotheses: Iterable[Hypothesis]
    ) -> "HypothesisClass":
        unique = {h.bits: h for h in hypotheses}
        ordered = tuple(unique[b] for b in sorted(unique))
        return cls(domain, ordered)

    @classmethod
    def from_patterns(
        cls, domain: FiniteDomain, patterns: Iterable[Sequence[int]]
    ) -> "HypothesisClass":
        return cls.from_hypotheses(
            domain, (Hypothesis(domain, tuple(p)) for p in patterns)
        )

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, i: int) -> Hypothesis:
        return self.members[i]


@dataclass(frozen=True)
class Triple:
    """One training example: (x index, x* index, label)."""

    x: int
    xstar: int
    y: int

    def __post_init__(self) -> None:
        if self.y not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {self.y}")
        if self.x < 0 or self.xstar < 0:
            raise ValueError("indices must be nonnegative")


@dataclass(frozen=True)
class TripleSample:
    """An ordered sequence of training triples."""

    triples: tuple[Triple, ...]

    @property
    def m(self) -> int:
        return len(self.triples)

    def __len__(self) -> int:
        return len(self.triples)

    def __iter__(self):
        return iter(self.triples)


@dataclass(frozen=True)
class FiniteDistribution:
    """A probability table over (x, x*, y) triples.

    Probabilities must sum to 1 within ``PROB_TOLERANCE`` and support triples
    must be distinct.  Expectations over the support are therefore exact up
    to float summation, with summation order fixed by the support order.
    """

    support: tuple[tuple[Triple, float], ...]

    def __post_init__(self) -> None:
        triples = [t for t, _ in self.support]
        if len(set(triples)) != len(triples):
            raise InvalidDistributionError("duplicate triples in support")
        for t, p in self.support:
            if not 0.0 <= p <= 1.0:
                raise InvalidDistributionError(f"probability {p} outside [0,1] for {t}")
        total = sum(p for _, p in self.support)
        if abs(total - 1.0) > PROB_TOLERANCE:
            raise InvalidDistributionError(
                f"probabilities sum to {total!r}, not 1 within {PROB_TOLERANCE}"
            )

    @cached_property
    def cumulative(self) -> tuple[float, ...]:
        """Running totals over the support, for inverse-CDF sampling."""
        acc, out = 0.0, []
        for _, p in self.support:
            acc += p
            out.append(acc)
        return tuple(out)

    def probability(self, t: Triple) -> float:
        for u, p in self.support:
            if u == t:
                return p
        return 0.0


# --- loss functions -------------------------------------------------------


def _check_binary(*values: int) -> None:
    for v in values:
        if v not in (0, 1):
            raise ValueError(f"expected a binary value, got {v!r}")


def zero_one_loss(yhat: int, y: int) -> int:
    """1 iff the prediction disagrees with the label."""
    _check_binary(yhat, y)
    return int(yhat != y)


def ignoring_loss(z: int, y: int) -> int:
    """1 iff the correcting value flags the example; the label is ignored."""
    _check_binary(z, y)
    return int(z == 1)


def composite_loss(l: int, lstar: int, C: float) -> float:
    """Joint loss (1/C)*lstar + max(l - lstar, 0) for binary loss values."""
    _check_binary(l, lstar)
    if C <= 0:
        raise ValueError(f"C must be positive, got {C}")
    return lstar / C + max(l - lstar, 0)


def f_loss(h: Hypothesis, phi: Hypothesis, t: Triple) -> int:
    """Composite zero-one loss max(error of h, flag of phi) on one triple."""
    return max(zero_one_loss(h(t.x), t.y), ignoring_loss(phi(t.xstar), t.y))


def aux_loss(h: Hypothesis, phi: Hypothesis, t: Triple) -> int:
    """1 iff h errs on the triple and phi does not flag it."""
    return int(h(t.x) != t.y and phi(t.xstar) == 0)


def exact_true_error(h: Hypothesis, dist: FiniteDistribution) -> float:
    """Probability mass of support triples misclassified by h."""
    total = 0.0
    for t, p in dist.support:
        if not 0 <= t.x < h.domain.size:
            raise DomainMismatchError(
                f"support point x={t.x} outside domain of size {h.domain.size}"
            )
        if h.bits[t.x] != t.y:
            total += p
    return total


# --- JSON interchange ------------------------------------------------------
#
# Class files:        {"domain_size": n, "hypotheses": ["0110...", ...]}
# Distribution files: {"support": [{"x": i, "xstar": j, "y": b, "p": v}, ...]}
# Sample files:       {"triples": [{"x": i, "xstar": j, "y": b}, ...]}


def class_to_json(cls: HypothesisClass) -> dict:
    return {
        "domain_size": cls.domain.size,
        "hypotheses": [h.to_bitstring() for h in cls.members],
    }


def class_from_json(obj: dict, label: str = "X") -> HypothesisClass:
    domain = FiniteDomain(size=int(obj["domain_size"]), label=label)
    return HypothesisClass.from_hypotheses(
        domain, (Hypothesis.from_bitstring(domain, s) for s in obj["hypotheses"])
    )


def distribution_to_json(dist: FiniteDistribution) -> dict:
    return {
        "support": [
            {"x": t.x, "xstar": t.xstar, "y": t.y, "p": p} for t, p in dist.support
        ]
    }


def distribution_from_json(obj: dict) -> FiniteDistribution:
    return FiniteDistribution(
        tuple(
            (Triple(int(e["x"]), int(e["xstar"]), int(e["y"])), float(e["p"]))
            for e in obj["support"]
        )
    )


def sample_to_json(s: TripleSample) -> dict:
    return {"triples": [{"x": t.x, "xstar": t.xstar, "y": t.y} for t in s.triples]}


def sample_from_json(obj: dict) -> TripleSample:
    return TripleSample(
        tuple(Triple(int(e["x"]), int(e["xstar"]), int(e["y"])) for e in obj["triples"])
    )


def load_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def dump_json(obj: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(obj, f, indent=2, sort_keys=True)
        f.write("\n")
