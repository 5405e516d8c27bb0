"""Random linear Gaussian models and mixed observational/interventional
samples for benchmarking structure learners.

The generator draws a DAG with independent forward edges on a random vertex
order, weights bounded away from zero, and error variances that are then
rescaled so every variable has unit marginal variance. Interventions replace
a variable by an independent draw concentrated around a nonzero level, so an
intervened variable keeps a comparable scale but carries no signal about its
own mechanism.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from math import comb

import numpy as np

from .graphs import Dag, topological_order
from .interventions import TargetFamily
from .scoring import GaussianModel, InterventionalDataset

RNG_ALGORITHM = "philox"

# substream purposes
_DAG, _MODEL, _TARGETS, _SAMPLE = 0, 1, 2, 3


class InfeasibleTargets(ValueError):
    """Too few distinct targets of the requested size exist."""


def substream(seed: int, *path: int) -> np.random.Generator:
    """Independent counter-based generator for (seed, path). Streams with
    different paths never overlap, so replicates can run in any order or in
    parallel with identical results."""
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(seed, spawn_key=tuple(path)))
    )


@dataclass(frozen=True)
class SimConfig:
    """Scenario description; equal configs with equal seeds reproduce
    bit-identical outputs.

    p: vertex count; s: forward-edge probability; k: number of
    interventional targets besides the observational one; m: intervened
    vertices per target; n: total sample count.
    """

    p: int
    s: float
    k: int
    m: int
    n: int
    level_mean: float = 2.0
    level_sd: float = 0.2
    seed: int = 0


def random_dag(p: int, s: float, rng: np.random.Generator) -> Dag:
    """DAG with each forward edge of a uniformly shuffled vertex order
    present independently with probability s."""
    forward = [
        (i, j)
        for i in range(1, p + 1)
        for j in range(i + 1, p + 1)
        if rng.random() < s
    ]
    relabel = {i + 1: int(v) + 1 for i, v in enumerate(rng.permutation(p))}
    return Dag(p, arrows=[(relabel[a], relabel[b]) for a, b in forward])


def random_model(dag: Dag, rng: np.random.Generator) -> GaussianModel:
    """Weights uniform on +-[0.1, 1], raw variances uniform on [0.5, 1],
    rescaled so the implied covariance has unit diagonal."""
    p = dag.p
    B = np.zeros((p, p))
    for a, b in sorted(dag.arrows):
        weight = rng.uniform(0.1, 1.0) * (1.0 if rng.random() < 0.5 else -1.0)
        B[b - 1, a - 1] = weight
    sigma2 = rng.uniform(0.5, 1.0, size=p)
    inv = np.linalg.inv(np.eye(p) - B)
    scale = np.sqrt(np.diag(inv @ np.diag(sigma2) @ inv.T))
    B = B * scale[np.newaxis, :] / scale[:, np.newaxis]
    sigma2 = sigma2 / scale**2
    return GaussianModel(dag=dag, B=B, sigma2=sigma2)


def random_targets(
    p: int, k: int, m: int, rng: np.random.Generator
) -> TargetFamily:
    """The observational target plus k distinct uniformly drawn targets of
    size m."""
    if k < 0 or m < 0 or (k > 0 and m > p) or (k > 0 and comb(p, m) < k):
        raise InfeasibleTargets(
            f"cannot draw {k} distinct targets of size {m} from {p} vertices"
        )
    targets: list[list[int]] = [[]]
    seen: set[frozenset[int]] = set()
    attempts = 0
    while len(seen) < k:
        attempts += 1
        if attempts > 10_000 * max(k, 1):
            raise InfeasibleTargets(
                f"rejection sampling stalled at {len(seen)}/{k} targets"
            )
        t = frozenset(int(v) + 1 for v in rng.choice(p, size=m, replace=False))
        if t not in seen:
            seen.add(t)
            targets.append(sorted(t))
    return TargetFamily(targets)


def sample(
    model: GaussianModel,
    fam: TargetFamily,
    n: int,
    rng: np.random.Generator,
    level_mean: float = 2.0,
    level_sd: float = 0.2,
) -> InterventionalDataset:
    """n rows allocated round-robin over the family (row i gets member
    i mod len(fam), so group sizes differ by at most one). Each group is
    generated in topological order; intervened coordinates are independent
    draws from N(level_mean, level_sd^2)."""
    if not len(fam):
        raise InfeasibleTargets("family must contain at least one target")
    p = model.dag.p
    order = topological_order(model.dag)
    X = np.zeros((n, p))
    row_targets = [fam[i % len(fam)] for i in range(n)]
    for idx in range(len(fam)):
        rows = np.arange(idx, n, len(fam))
        t = fam[idx]
        for v in order:
            if v in t:
                X[rows, v - 1] = rng.normal(level_mean, level_sd, size=rows.size)
            else:
                mean = X[rows] @ model.B[v - 1]
                noise = rng.normal(
                    0.0, np.sqrt(model.sigma2[v - 1]), size=rows.size
                )
                X[rows, v - 1] = mean + noise
    return InterventionalDataset(X, row_targets)


@dataclass
class SimResult:
    config: SimConfig
    replicate: int
    dag: Dag
    model: GaussianModel
    fam: TargetFamily
    data: InterventionalDataset

    def metadata(self) -> dict:
        out = {
            "p": self.config.p,
            "s": self.config.s,
            "k": self.config.k,
            "m": self.config.m,
            "n": self.config.n,
            "level_mean": self.config.level_mean,
            "level_sd": self.config.level_sd,
            "seed": self.config.seed,
            "replicate": self.replicate,
            "rng": RNG_ALGORITHM,
        }
        return out


def simulate(config: SimConfig, replicate: int = 0) -> SimResult:
    """Draw one scenario instance: DAG, model, targets and samples, each
    from its own substream of (seed, replicate)."""
    c = config
    dag = random_dag(c.p, c.s, substream(c.seed, replicate, _DAG))
    model = random_model(dag, substream(c.seed, replicate, _MODEL))
    fam = random_targets(c.p, c.k, c.m, substream(c.seed, replicate, _TARGETS))
    data = sample(
        model,
        fam,
        c.n,
        substream(c.seed, replicate, _SAMPLE),
        level_mean=c.level_mean,
        level_sd=c.level_sd,
    )
    return SimResult(c, replicate, dag, model, fam, data)
