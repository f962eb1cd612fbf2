"""Synthetic instance generation.

Costs are drawn from a two-component Gaussian mixture (means -2.5 and 0.5,
variances 0.5 and 1.5, equal weights); detected entries are independently
gated to infinity with probability vartheta; misdetection costs come from the
same mixture and are never gated. The requested solution count follows a
Poisson law clamped to at least one. Everything is a pure function of the
seed: per-instance generators are derived with numpy's SeedSequence from
(dataset seed, vartheta index, row count, instance index).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cost_model import CostMatrix, validate_cost_matrix
from .exact import murty_k_best

DEFAULT_K_MEAN = 4.0
DEFAULT_K_MAX = 10
DEFAULT_NU_S_VALUES = tuple(range(1, 16))
DEFAULT_VARTHETA_VALUES = tuple(round(0.1 * s, 1) for s in range(1, 10))

# Detected-block width is uniform on [max(1, nu_s - 1), nu_s + 4].
COLUMN_SLACK_LOW = -1
COLUMN_SLACK_HIGH = 4


@dataclass(frozen=True)
class MixtureSpec:
    """Two-component scalar Gaussian mixture with equal weights."""

    means: tuple[float, float] = (-2.5, 0.5)
    variances: tuple[float, float] = (0.5, 1.5)

    def sample(self, rng: np.random.Generator, shape) -> np.ndarray:
        comp = rng.integers(0, 2, size=shape)
        means = np.asarray(self.means)[comp]
        stds = np.sqrt(np.asarray(self.variances))[comp]
        return rng.normal(means, stds)


@dataclass(frozen=True)
class GenConfig:
    nu_s: int
    vartheta: float
    seed: int
    k_mean: float = DEFAULT_K_MEAN
    mixture: MixtureSpec = field(default_factory=MixtureSpec)

    def __post_init__(self):
        if self.nu_s < 1:
            raise ValueError("nu_s must be >= 1")
        if not 0.0 <= self.vartheta <= 1.0:
            raise ValueError("vartheta must lie in [0, 1]")


def generate_instance(cfg: GenConfig) -> tuple[CostMatrix, int]:
    """One random instance plus its Poisson-drawn requested k (clamped to >= 1)."""
    rng = np.random.default_rng(cfg.seed)
    ns = cfg.nu_s
    lo = max(1, ns + COLUMN_SLACK_LOW)
    hi = ns + COLUMN_SLACK_HIGH
    nz = int(rng.integers(lo, hi + 1))

    detected = cfg.mixture.sample(rng, (ns, nz))
    gated = rng.random((ns, nz)) < cfg.vartheta
    detected[gated] = np.inf
    misdetect = cfg.mixture.sample(rng, ns)
    requested_k = max(1, int(rng.poisson(cfg.k_mean)))

    return validate_cost_matrix(ns, nz, detected, misdetect), requested_k


def instance_seed(dataset_seed: int, vartheta_index: int, nu_s: int, index: int) -> int:
    """Stable 64-bit sub-seed for one instance of one sweep cell."""
    ss = np.random.SeedSequence([dataset_seed, vartheta_index, nu_s, index])
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class DatasetInstance:
    id: str
    path: str
    nu_s: int
    vartheta: float
    requested_k: int


def generate_dataset(
    out_dir,
    seed: int,
    count: int,
    nu_s_values=DEFAULT_NU_S_VALUES,
    vartheta_values=DEFAULT_VARTHETA_VALUES,
    k_max: int = DEFAULT_K_MAX,
    with_labels: bool = True,
):
    """Write instance files plus a manifest for the full parameter sweep.

    Every instance file carries the exact k-best column vectors (up to k_max)
    as training labels unless with_labels is False. Returns the manifest dict
    that was written.
    """
    from . import fileio  # local import: fileio depends on this module's types

    if count < 1:
        raise ValueError("count must be >= 1")

    out_dir = fileio.ensure_dir(out_dir)
    inst_dir = fileio.ensure_dir(out_dir / "instances")

    instances: list[DatasetInstance] = []
    for v_idx, vartheta in enumerate(vartheta_values):
        for nu_s in nu_s_values:
            for i in range(count):
                cfg = GenConfig(
                    nu_s=nu_s,
                    vartheta=vartheta,
                    seed=instance_seed(seed, v_idx, nu_s, i),
                )
                C, requested_k = generate_instance(cfg)
                inst_id = f"vt{int(round(vartheta * 100)):03d}_ns{nu_s:02d}_i{i:04d}"
                labels = None
                if with_labels:
                    labels = [list(a.columns) for a in murty_k_best(C, k_max)]
                rel_path = f"instances/{inst_id}.json"
                fileio.write_instance(out_dir / rel_path, C, labels=labels)
                instances.append(
                    DatasetInstance(
                        id=inst_id,
                        path=rel_path,
                        nu_s=nu_s,
                        vartheta=float(vartheta),
                        requested_k=requested_k,
                    )
                )

    manifest = {
        "seed": int(seed),
        "k_max": int(k_max),
        "count_per_cell": int(count),
        "nu_s_values": [int(v) for v in nu_s_values],
        "vartheta_values": [float(v) for v in vartheta_values],
        "instances": [vars(inst).copy() for inst in instances],
    }
    fileio.write_manifest(out_dir / "manifest.json", manifest)
    return manifest
