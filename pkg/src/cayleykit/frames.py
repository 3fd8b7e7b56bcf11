"""Random frames and small orthogonality utilities (float backend)."""

import numpy as np

from .errors import PlaneError
from .exterior import FLOAT, Vector


def haar_frame(n, k, rng):
    """k orthonormal vectors in R^n drawn from the rotation-invariant measure.

    Returns a list of float-backend Vectors (the frame rows).
    """
    if k > n:
        raise PlaneError("cannot fit %d orthonormal vectors in R^%d" % (k, n))
    g = rng.standard_normal((n, k))
    q, r = np.linalg.qr(g)
    # fix the residual sign ambiguity so the draw is measure-correct
    q = q * np.sign(np.where(np.diag(r) == 0, 1.0, np.diag(r)))
    return [Vector(q[:, j].tolist(), FLOAT) for j in range(k)]


def random_unitary(m, rng):
    """Haar-ish random unitary m x m matrix (complex numpy array)."""
    g = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    ph = d / np.abs(np.where(d == 0, 1.0, d))
    return q * ph


def orthonormality_residual(vectors):
    """max |<v_i, v_j> - delta_ij| over a list of Vectors."""
    worst = 0.0
    for i, vi in enumerate(vectors):
        for j, vj in enumerate(vectors):
            g = float(vi.dot(vj))
            target = 1.0 if i == j else 0.0
            worst = max(worst, abs(g - target))
    return worst


def as_matrix(vectors):
    """Stack Vectors into a (k, n) float numpy array of rows."""
    return np.array([[float(c) for c in v.comps] for v in vectors])
