import numpy as np
import pytest

import golden
from optiq.fock import enumerate_basis
from optiq.lie import build_image_basis


@pytest.fixture(scope="session")
def basis22():
    """The reference-ordered two-photon, two-mode basis."""
    return enumerate_basis(2, 2, ordering=golden.ORDER_22)


@pytest.fixture(scope="session")
def image22(basis22):
    return build_image_basis(basis22)


@pytest.fixture(scope="session")
def basis22_lex():
    return enumerate_basis(2, 2)


@pytest.fixture(scope="session")
def image22_lex(basis22_lex):
    return build_image_basis(basis22_lex)


@pytest.fixture(scope="session")
def image23():
    return build_image_basis(enumerate_basis(2, 3))


def haar(rng, m):
    """Independent Haar sampler for tests (QR of a Ginibre draw with the
    R-diagonal phase correction), driven by a shared Generator."""
    Z = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R)
    return Q * (d / np.abs(d))
