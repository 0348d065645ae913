import os
import subprocess
import sys

import numpy as np
import pytest

from mlncraft import louvain
from mlncraft._backend import compiled_kernels, python_kernels
from mlncraft.generate import SyntheticSpec, generate_synthetic

needs_compiled = pytest.mark.skipif(compiled_kernels is None, reason="compiled kernels not built")


@needs_compiled
@pytest.mark.parametrize("seed", range(6))
def test_louvain_backends_identical(seed):
    net, _ = generate_synthetic(SyntheticSpec.from_shorthand(f"2x400,deg8,blocks5,seed{seed}"))
    for layer in net.layers:
        for resolution in (0.5, 1.0, 2.0):
            fast = louvain(layer, seed=seed, resolution=resolution, kernels=compiled_kernels)
            slow = louvain(layer, seed=seed, resolution=resolution, kernels=python_kernels)
            assert np.array_equal(fast, slow)


@needs_compiled
def test_lap_backends_identical():
    rng = np.random.default_rng(0)
    for _ in range(200):
        n = int(rng.integers(1, 9))
        w = rng.integers(0, 4, size=(n, n)).astype(float)
        card = (w > 0).astype(float)
        a = compiled_kernels.lap_max_lex(w, card)
        b = python_kernels.lap_max_lex(w, card)
        assert np.array_equal(a[0], b[0])


def test_environment_forces_python_backend():
    env = dict(os.environ, MLNCRAFT_BACKEND="python")
    out = subprocess.run(
        [sys.executable, "-c", "import mlncraft; print(mlncraft.BACKEND)"], capture_output=True, text=True, env=env
    )
    assert out.stdout.strip() == "python"
