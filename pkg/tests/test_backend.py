"""Parity between the compiled kernel extension and the NumPy fallback."""
import numpy as np
import pytest

from casimir_membrane.lifshitz import backend_name
from casimir_membrane.lifshitz._quadrature import COARSE, FINE

cy = pytest.importorskip(
    "casimir_membrane.lifshitz._kernels_cy",
    reason="compiled kernel extension not built in this environment",
)
from casimir_membrane.lifshitz import _kernels_py as py  # noqa: E402


def _example_inputs():
    rng = np.random.default_rng(42)
    n = 12
    u = np.sort(rng.uniform(0.05, 40.0, n))
    s = rng.uniform(0.0, 5e14, n)
    s[0] = 0.0  # metallic zero-frequency row
    inv_eps = rng.uniform(1e-6, 1.0, n)
    return u, s, inv_eps


@pytest.mark.parametrize("grid", [FINE, COARSE], ids=["fine", "coarse"])
@pytest.mark.parametrize("is_ideal", [False, True], ids=["metal", "ideal"])
def test_backends_agree_to_rounding(grid, is_ideal):
    nodes, weights = grid
    u, s, inv_eps = _example_inputs()
    z = 3e-7
    a = py.xi_block_integrals(z, u, s, inv_eps, is_ideal, nodes, weights)
    b = cy.xi_block_integrals(z, u, s, inv_eps, is_ideal, nodes, weights)
    assert a.shape == b.shape == (u.size, 2, 4)
    np.testing.assert_allclose(b, a, rtol=5e-13, atol=0.0)


def test_zero_s_row_te_is_exactly_zero_in_both():
    nodes, weights = FINE
    u, s, inv_eps = _example_inputs()
    for impl in (py, cy):
        out = impl.xi_block_integrals(3e-7, u, s, inv_eps, False, nodes, weights)
        assert np.all(out[0, 0, :] == 0.0)  # bitwise zero TE at s == 0
        assert np.all(out[0, 1, :] != 0.0)


def test_active_backend_is_reported():
    assert backend_name() in ("compiled", "numpy")


def test_numpy_backend_selectable_by_env(tmp_path):
    import subprocess
    import sys

    code = (
        "from casimir_membrane.lifshitz import backend_name;"
        "print(backend_name())"
    )
    out = subprocess.run(
        [sys.executable, "-c", code],
        capture_output=True,
        text=True,
        env={"PATH": "/usr/bin:/bin", "CASIMIR_MEMBRANE_BACKEND": "numpy"},
        check=True,
    )
    assert out.stdout.strip() == "numpy"
