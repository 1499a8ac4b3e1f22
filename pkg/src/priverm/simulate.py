"""Seeded Monte Carlo experiments over finite-support distributions.

Per-trial randomness comes from one master seed: trial t uses a 64-bit
splitmix-style hash of (seed, t), so trials can run on any number of worker
threads and still produce identical records.  True errors are computed
exactly from the probability table, never estimated; the only randomness in
any record is the sample itself.
"""

from __future__ import annotations

import csv
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .bounds import (
    PREMISE_TOLERANCE,
    BoundInputs,
    bound_erm,
    bound_pr,
    sufficient_condition,
)
from .constructions import Theorem5Family
from .core import (
    DomainMismatchError,
    FiniteDistribution,
    HypothesisClass,
    TripleSample,
    class_to_json,
    distribution_to_json,
    dump_json,
    exact_true_error,
)
from .erm import erm_privileged, erm_standard
from .vc import build_aux_class, vc_dimension

TRIALS_CSV_HEADER = (
    "trial,eps_erm,eps_ig,eps_u,true_err_erm,true_err_pr,"
    "b_erm,b_pr,covered_erm,covered_pr"
)

_MASK64 = (1 << 64) - 1


def mix_seed(master: int, trial: int) -> int:
    """Fixed 64-bit mixing of (master seed, trial index) into a trial seed."""
    z = (master + 0x9E3779B97F4A7C15 * (trial + 1)) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def _draw_indices(
    dist: FiniteDistribution, m: int, seed: int
) -> np.ndarray:
    """m support indices drawn by inverse CDF; the one source of randomness."""
    rng = np.random.default_rng(seed)
    cum = np.asarray(dist.cumulative)
    idx = np.searchsorted(cum, rng.random(m), side="right")
    return np.minimum(idx, len(cum) - 1)


def sample(dist: FiniteDistribution, m: int, seed: int) -> TripleSample:
    """m i.i.d. triples, deterministic given the seed."""
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    idx = _draw_indices(dist, m, seed)
    return TripleSample(tuple(dist.support[i][0] for i in idx))


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a comparison run depends on; the unit of reproducibility."""

    distribution: FiniteDistribution
    H: HypothesisClass
    Phi: HypothesisClass
    m: int
    trials: int
    delta: float
    seed: int
    C: float = 1.0
    threads: int = 1
    output_dir: Optional[str] = None

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.m < 0:
            raise ValueError(f"m must be >= 0, got {self.m}")
        if self.threads < 1:
            raise ValueError(f"threads must be >= 1, got {self.threads}")

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "trials": self.trials,
            "delta": self.delta,
            "seed": self.seed,
            "c": self.C,
            "distribution": distribution_to_json(self.distribution),
            "h_class": class_to_json(self.H),
            "phi_class": class_to_json(self.Phi),
        }


@dataclass(frozen=True)
class TrialRecord:
    """One trial's empirical quantities, exact errors, bounds, and flags."""

    trial: int
    eps_erm: float
    eps_ig: float
    eps_u: float
    true_err_erm: float
    true_err_pr: float
    b_erm: float
    b_pr: float
    covered_erm: bool
    covered_pr: bool
    sufficient_holds: Optional[bool]
    pr_leq_erm: bool

    def csv_row(self) -> list:
        return [
            self.trial,
            repr(self.eps_erm),
            repr(self.eps_ig),
            repr(self.eps_u),
            repr(self.true_err_erm),
            repr(self.true_err_pr),
            repr(self.b_erm),
            repr(self.b_pr),
            int(self.covered_erm),
            int(self.covered_pr),
        ]


def _check_compatible(config: ExperimentConfig) -> None:
    for t, _ in config.distribution.support:
        if t.x >= config.H.domain.size:
            raise DomainMismatchError(
                f"support x={t.x} outside H domain of size {config.H.domain.size}"
            )
        if t.xstar >= config.Phi.domain.size:
            raise DomainMismatchError(
                f"support x*={t.xstar} outside Phi domain of size "
                f"{config.Phi.domain.size}"
            )


def run_comparison(
    config: ExperimentConfig,
) -> tuple[list[TrialRecord], dict]:
    """Standard vs privileged minimization across seeded trials.

    The dimensions entering the bounds are computed exactly once from the
    classes themselves.  Each trial draws a sample, runs both solvers,
    evaluates both exact true errors, and checks the two coverage events.
    Trials that raise are recorded as failures, not dropped silently.
    """
    _check_compatible(config)
    d = vc_dimension(config.H).vc
    dstar = vc_dimension(config.Phi).vc
    d_a = vc_dimension(build_aux_class(config.H, config.Phi)).vc

    def one_trial(t: int) -> TrialRecord:
        s = sample(config.distribution, config.m, mix_seed(config.seed, t))
        std = erm_standard(config.H, s)
        pr = erm_privileged(config.H, config.Phi, s, config.C)
        inputs = BoundInputs(
            m=config.m,
            delta=config.delta,
            d=d,
            dstar=dstar,
            d_a=d_a,
            eps_erm=std.empirical_error,
            eps_ig=pr.ignored_weight,
            eps_u=pr.unexplained_error,
        )
        b_e = bound_erm(inputs)
        b_p = bound_pr(inputs)
        te_erm = exact_true_error(std.h, config.distribution)
        te_pr = exact_true_error(pr.h, config.distribution)
        gap = std.empirical_error - (pr.ignored_weight + pr.unexplained_error)
        suff = (
            sufficient_condition(inputs).holds
            if abs(gap) <= PREMISE_TOLERANCE
            else None
        )
        return TrialRecord(
            trial=t,
            eps_erm=std.empirical_error,
            eps_ig=pr.ignored_weight,
            eps_u=pr.unexplained_error,
            true_err_erm=te_erm,
            true_err_pr=te_pr,
            b_erm=b_e,
            b_pr=b_p,
            covered_erm=te_erm <= b_e,
            covered_pr=te_pr <= b_p,
            sufficient_holds=suff,
            pr_leq_erm=b_p <= b_e,
        )

    records: list[TrialRecord] = []
    failures: list[dict] = []
    if config.threads == 1:
        outcomes = []
        for t in range(config.trials):
            try:
                outcomes.append(one_trial(t))
            except Exception as exc:  # recorded, not dropped
                outcomes.append((t, exc))
    else:
        def guarded(t: int):
            try:
                return one_trial(t)
            except Exception as exc:
                return (t, exc)

        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            outcomes = list(pool.map(guarded, range(config.trials)))

    for out in outcomes:
        if isinstance(out, TrialRecord):
            records.append(out)
        else:
            failures.append({"trial": out[0], "error": str(out[1])})

    n = len(records)
    summary = {
        "trials": config.trials,
        "effective_trials": n,
        "failed_trials": failures,
        "m": config.m,
        "delta": config.delta,
        "seed": config.seed,
        "c": config.C,
        "d": d,
        "dstar": dstar,
        "d_a": d_a,
        "coverage_erm": sum(r.covered_erm for r in records) / n if n else 0.0,
        "coverage_pr": sum(r.covered_pr for r in records) / n if n else 0.0,
        "mean_eps_erm": sum(r.eps_erm for r in records) / n if n else 0.0,
        "mean_eps_ig": sum(r.eps_ig for r in records) / n if n else 0.0,
        "mean_eps_u": sum(r.eps_u for r in records) / n if n else 0.0,
        "mean_true_err_erm": sum(r.true_err_erm for r in records) / n if n else 0.0,
        "mean_true_err_pr": sum(r.true_err_pr for r in records) / n if n else 0.0,
        "pr_leq_erm_rate": sum(r.pr_leq_erm for r in records) / n if n else 0.0,
    }
    return records, summary


def run_theorem5_experiment(
    family: Theorem5Family,
    Phi_prime: HypothesisClass,
    m: int,
    trials: int,
    seed: int,
    threads: int = 1,
) -> dict:
    """Deviation of empirical flag-rate minimization under the hard family.

    Each trial draws m points from the family distribution (the same draw
    ``sample`` would produce), picks phi_hat minimizing the empirical flag
    rate over Phi_prime (first member on ties), and records the deviations
    of phi_hat and of phi_star, plus the largest true-minus-empirical gap
    over the whole search class.  The reported frequencies are of the
    events |deviation| > eps.  The family's worst-case sample-size constants
    are far below desk scale, so frequencies here validate the qualitative
    claim only; the summary states that gap.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    eps = family.eps
    dist = family.distribution
    support_points = [t.xstar for t, _ in dist.support]

    # 0/1 matrix: member flags support point, plus exact true rates
    flag = np.array(
        [[phi.bits[p] for p in support_points] for phi in Phi_prime.members],
        dtype=np.float64,
    )
    true_rates = np.array(
        [family.true_flag_rate(phi) for phi in Phi_prime.members]
    )
    star_idx = next(
        (
            i
            for i, phi in enumerate(Phi_prime.members)
            if phi.bits == family.phi_star.bits
        ),
        None,
    )
    if star_idx is None:
        raise ValueError("phi_star is not a member of the supplied subclass")
    p_star = true_rates[star_idx]

    def one_trial(t: int) -> tuple[float, float, float]:
        idx = _draw_indices(dist, m, mix_seed(seed, t))
        counts = np.bincount(idx, minlength=len(support_points))
        emp = flag @ counts / m
        hat = int(np.argmin(emp))
        return (
            float(true_rates[hat] - emp[hat]),
            float(p_star - emp[star_idx]),
            float(np.max(true_rates - emp)),
        )

    if threads == 1:
        devs = [one_trial(t) for t in range(trials)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            devs = list(pool.map(one_trial, range(trials)))

    dev_hat = [a for a, _, _ in devs]
    dev_star = [b for _, b, _ in devs]
    dev_max = [c for _, _, c in devs]

    def freq(events) -> float:
        return sum(events) / trials

    return {
        "m": m,
        "trials": trials,
        "seed": seed,
        "eps": eps,
        "delta": family.delta,
        "alpha": family.alpha,
        "heavy_side": list(family.heavy_side),
        "p_star": float(p_star),
        "mean_dev_star": sum(dev_star) / trials,
        "freq_signed_hat": freq([d > eps for d in dev_hat]),
        "freq_abs_hat": freq([abs(d) > eps for d in dev_hat]),
        "freq_abs_star": freq([abs(d) > eps for d in dev_star]),
        "freq_claim": freq(
            [
                abs(a) > eps or abs(b) > eps
                for a, b in zip(dev_hat, dev_star)
            ]
        ),
        "freq_existential": freq([d > eps for d in dev_max]),
        "note": (
            "worst-case sample-size constants are not reachable at desk "
            "scale; frequencies validate the qualitative claim only"
        ),
    }


def persist_run(
    records: Sequence[TrialRecord], summary: dict, config: ExperimentConfig
) -> str:
    """Write config.json, trials.csv, summary.json, manifest.json.

    Returns the run directory.  Identical configs produce byte-identical
    trials.csv regardless of thread count; nothing written here depends on
    wall-clock time.
    """
    if config.output_dir is None:
        raise ValueError("config.output_dir is required to persist a run")
    out = config.output_dir
    try:
        os.makedirs(out, exist_ok=True)
        dump_json(config.to_json(), os.path.join(out, "config.json"))
        with open(
            os.path.join(out, "trials.csv"), "w", encoding="utf-8", newline=""
        ) as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(TRIALS_CSV_HEADER.split(","))
            for r in sorted(records, key=lambda r: r.trial):
                writer.writerow(r.csv_row())
        dump_json(summary, os.path.join(out, "summary.json"))
        from priverm import __version__

        manifest = {
            "artifact": "priverm",
            "version": __version__,
            "seed": config.seed,
            "files": {
                "config": "config.json",
                "trials": "trials.csv",
                "summary": "summary.json",
            },
        }
        dump_json(manifest, os.path.join(out, "manifest.json"))
    except OSError as exc:
        raise OSError(f"cannot write run directory {out!r}: {exc}") from exc
    return out