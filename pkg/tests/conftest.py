import math

import numpy as np
import pytest

from ecs_teleport.algebra import normalized, superposition


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_state(rng, modes, branches, amp_max=1.2):
    """Normalized random coherent superposition for cross-engine checks."""
    pairs = []
    for _ in range(branches):
        coeff = complex(rng.normal(), rng.normal())
        amps = tuple(
            complex(rng.uniform(0.1, amp_max) * np.exp(1j * rng.uniform(0, 2 * math.pi)))
            for _ in range(modes)
        )
        pairs.append((coeff, amps))
    return normalized(superposition(pairs))
