"""Shared seeded builders for the test suite.

Everything random goes through PCG64 with an explicit seed so failures
reproduce exactly.
"""

import numpy as np
import pytest

from framekit import (
    AtomicMeasureSpace,
    NotAFrame,
    OperatorValuedFrame,
    Povm,
    VectorFrame,
    from_vector_frame,
    hermitize,
    is_framed,
)
from framekit.linalg import adjoint, hermitian_eigen


def rng_for(seed):
    return np.random.Generator(np.random.PCG64(seed))


def complex_box(rng, shape):
    """Entries uniform in the unit box, real and imaginary parts alike."""
    return rng.uniform(-1.0, 1.0, shape) + 1j * rng.uniform(-1.0, 1.0, shape)


def random_unit(dim, seed):
    rng = rng_for(seed)
    v = complex_box(rng, dim)
    return v / np.linalg.norm(v)


def random_hermitian(dim, seed):
    g = complex_box(rng_for(seed), (dim, dim))
    return hermitize(g + adjoint(g))


def random_psd(dim, seed):
    g = complex_box(rng_for(seed), (dim, dim))
    return hermitize(adjoint(g) @ g)


def random_vector_frame(dim, atoms, seed):
    """Random spanning family; retries the seed stream until it spans."""
    assert atoms >= dim
    rng = rng_for(seed)
    while True:
        f = VectorFrame(dim_h=dim, vectors=list(complex_box(rng, (atoms, dim))))
        try:
            from_vector_frame(f)
        except NotAFrame:
            continue
        return f


def random_ovf(dim, atoms, seed, weights=None):
    """Operator frame with block heights varying between 1 and dim."""
    rng = rng_for(seed)
    while True:
        blocks = [complex_box(rng, (int(rng.integers(1, dim + 1)), dim)) for _ in range(atoms)]
        w = weights if weights is not None else rng.uniform(0.5, 2.0, atoms)
        space = AtomicMeasureSpace(atoms=[str(i) for i in range(atoms)], weights=w)
        try:
            return OperatorValuedFrame(space=space, dim_h=dim, blocks=blocks)
        except NotAFrame:
            continue


def random_povm(dim, atoms, seed):
    """Random framed POVM, elements G*G scaled so the total has top eigenvalue 1."""
    rng = rng_for(seed)
    while True:
        elements = [hermitize(adjoint(g) @ g) for g in (complex_box(rng, (dim, dim)) for _ in range(atoms))]
        total = hermitize(sum(elements))
        top = float(hermitian_eigen(total).eigenvalues[-1])
        if top <= 0.0:
            continue
        m = Povm(atoms=[str(i) for i in range(atoms)], dim_h=dim,
                 elements=[e / top for e in elements])
        if is_framed(m).framed:
            return m


@pytest.fixture
def rng():
    return rng_for(0)
