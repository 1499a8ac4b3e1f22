"""Shared generators for randomized tests.

Random classes and samples are built here, not in the package: the package
only ships the named constructions.  Everything takes an explicit
random.Random so test runs are reproducible.
"""

import random

from priverm import FiniteDomain, Hypothesis, HypothesisClass, Triple, TripleSample


def rand_class(rng: random.Random, domain_size: int, n_members: int,
               label: str = "X") -> HypothesisClass:
    """Random class of at most n_members distinct labelings."""
    dom = FiniteDomain(domain_size, label)
    patterns = {
        tuple(rng.randint(0, 1) for _ in range(domain_size))
        for _ in range(n_members)
    }
    return HypothesisClass.from_hypotheses(
        dom, (Hypothesis(dom, p) for p in patterns)
    )


def rand_sample(rng: random.Random, n_x: int, n_xstar: int, m: int) -> TripleSample:
    return TripleSample(
        tuple(
            Triple(rng.randrange(n_x), rng.randrange(n_xstar), rng.randint(0, 1))
            for _ in range(m)
        )
    )
