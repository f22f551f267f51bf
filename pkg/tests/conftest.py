import numpy as np
import pytest

from dunkl_dihedral.polyalg import Poly2


def rel_err(a: complex, b: complex) -> float:
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale > 0 else 0.0


def poly_rel_err(p: Poly2, q: Poly2) -> float:
    d = max(p.degree, q.degree)
    pc, qc = p.padded(d), q.padded(d)
    scale = max(np.max(np.abs(pc)), np.max(np.abs(qc)))
    return float(np.max(np.abs(pc - qc)) / scale) if scale > 0 else 0.0


def random_poly(rng: np.random.Generator, degree: int, homogeneous: bool = False) -> Poly2:
    c = rng.standard_normal((degree + 1, degree + 1)) + 1j * rng.standard_normal(
        (degree + 1, degree + 1)
    )
    if homogeneous:
        a, b = np.indices(c.shape)
        c[a + b != degree] = 0.0
    return Poly2(c)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20250809)
