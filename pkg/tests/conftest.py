import pytest

from rankassign import validate_cost_matrix
from rankassign.datagen import GenConfig, generate_instance, instance_seed


@pytest.fixture
def tiny():
    """The 2-track, 1-measurement example: full matrix [[1,4,inf],[2,inf,3]]."""
    return validate_cost_matrix(2, 1, [[1.0], [2.0]], [4.0, 3.0])


@pytest.fixture
def single():
    """Smallest valid instance: full matrix [[2, 5]]."""
    return validate_cost_matrix(1, 1, [[2.0]], [5.0])


def random_instance(nu_s, vartheta, seed):
    """One seeded generator instance (cost matrix only)."""
    C, _ = generate_instance(GenConfig(nu_s=nu_s, vartheta=vartheta, seed=seed))
    return C


def seeded_instances(count, nu_s_range=(1, 4), varthetas=(0.0, 0.3, 0.6), base_seed=0):
    """Deterministic stream of small random instances for property tests."""
    out = []
    i = 0
    while len(out) < count:
        nu_s = nu_s_range[0] + i % (nu_s_range[1] - nu_s_range[0] + 1)
        vartheta = varthetas[i % len(varthetas)]
        seed = instance_seed(base_seed, int(vartheta * 10), nu_s, i)
        out.append(random_instance(nu_s, vartheta, seed))
        i += 1
    return out
