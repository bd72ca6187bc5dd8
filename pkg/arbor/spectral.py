"""
Matrix-free Fiedler vectors of tree Laplacians.
"""

import logging
from typing import Callable, Optional, Union

import numpy as np
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh
from scipy.stats import rankdata

from .exceptions import ConvergenceError, InvalidSizeError
from .models import EigenResult, LabeledTree, ScoreVector
from .rng import RngState, ensure_rng

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-8

# dense solve below this size; ARPACK needs ncv < n
DENSE_LIMIT = 8
MAX_LANCZOS_VECTORS = 96


def _laplacian(tree: LabeledTree) -> Callable[[np.ndarray], np.ndarray]:
    n = tree.n
    degrees = tree.degrees().astype(float)
    heads, tails = tree.heads, tree.tails

    def apply(x: np.ndarray) -> np.ndarray:
        y = degrees * x
        y -= np.bincount(heads, weights=x[tails], minlength=n)
        y -= np.bincount(tails, weights=x[heads], minlength=n)
        return y

    return apply


def laplacian_apply(tree: LabeledTree, x: np.ndarray) -> np.ndarray:
    """
    Multiply a vector by the Laplacian L = D - A of the tree.

    Args:
        tree: Labeled tree
        x: Vector indexed by label - 1

    Returns:
        ``y[u] = deg(u) x[u] - sum of x[v] over neighbors v``

    Raises:
        ValueError: If ``x`` does not have length n
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (tree.n,):
        raise ValueError(f"Vector has shape {x.shape}, expected ({tree.n},)")
    return _laplacian(tree)(x)


def fiedler_vector(
    tree: LabeledTree,
    tol: float = DEFAULT_TOL,
    max_iter: Optional[int] = None,
    rng: Optional[RngState] = None,
) -> EigenResult:
    """
    Eigenpair of the second smallest Laplacian eigenvalue.

    ARPACK's Lanczos iteration runs on L + (s/n) 11^T, which moves the
    constant eigenvector to s >= lambda_max and leaves lambda_2 as the
    smallest eigenvalue. The start vector is random, projected off the
    all-ones vector.

    Args:
        tree: Labeled tree with n >= 2
        tol: Relative tolerance; the returned residual is at most
            tol * max(1, lambda_2)
        max_iter: Iteration cap, default 50 * n
        rng: Random stream for the start vector

    Returns:
        EigenResult with a unit vector orthogonal to the all-ones vector

    Raises:
        InvalidSizeError: If n < 2
        ValueError: If tol <= 0
        ConvergenceError: If the solver does not reach the tolerance
    """
    n = tree.n
    if n < 2:
        raise InvalidSizeError(f"The Fiedler vector needs n >= 2, got {n}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    max_iter = max_iter or 50 * n
    rng = ensure_rng(rng)
    apply = _laplacian(tree)

    if n <= DENSE_LIMIT:
        laplacian = np.column_stack([apply(e) for e in np.eye(n)])
        _, vectors = np.linalg.eigh(laplacian)
        vector = vectors[:, 1]
        iterations = n
    else:
        calls = [0]
        shift = 2.0 * float(tree.degrees().max())

        def matvec(x):
            calls[0] += 1
            x = np.ravel(x)
            return apply(x) + shift * x.mean()

        operator = LinearOperator((n, n), matvec=matvec, dtype=float)
        start = rng.standard_normal(n)
        start -= start.mean()
        try:
            _, vectors = eigsh(
                operator,
                k=1,
                which="SA",
                v0=start,
                tol=tol * 0.1,
                maxiter=max_iter,
                ncv=min(n - 1, MAX_LANCZOS_VECTORS),
            )
        except ArpackNoConvergence as e:
            residual = float("nan")
            if e.eigenvectors is not None and e.eigenvectors.size:
                partial = e.eigenvectors[:, 0]
                residual = float(np.linalg.norm(apply(partial) - e.eigenvalues[0] * partial))
            raise ConvergenceError(
                f"Fiedler vector did not converge after {calls[0]} operator applications "
                f"(residual {residual:.3e})",
                iterations=calls[0],
                residual=residual,
            )
        vector = vectors[:, 0]
        iterations = calls[0]

    vector = vector - vector.mean()
    vector /= np.linalg.norm(vector)
    image = apply(vector)
    lambda2 = float(vector @ image)
    residual = float(np.linalg.norm(image - lambda2 * vector))
    if residual > tol * max(1.0, abs(lambda2)):
        raise ConvergenceError(
            f"Fiedler residual {residual:.3e} exceeds tolerance {tol:.1e}",
            iterations=iterations,
            residual=residual,
        )
    logger.debug("Fiedler vector for n=%d: lambda2=%.6g after %d iterations", n, lambda2, iterations)
    return EigenResult(lambda2, vector, residual, iterations)


def orient(
    vector: np.ndarray,
    degrees: Union[ScoreVector, np.ndarray],
    rng: Optional[RngState] = None,
) -> np.ndarray:
    """
    Resolve the sign ambiguity of an eigenvector for seriation.

    Keeps the sign whose ascending order puts high-degree vertices first,
    i.e. the sign maximizing sum_u (n - rank_asc(u)) deg(u). An exact tie
    draws the sign uniformly.

    Args:
        vector: Eigenvector indexed by label - 1
        degrees: Degree per label
        rng: Random stream for the tie case

    Returns:
        ``vector`` or ``-vector``
    """
    v = np.asarray(vector, dtype=float)
    d = np.asarray(degrees.values if isinstance(degrees, ScoreVector) else degrees, dtype=float)
    n = v.size

    def agreement(w: np.ndarray) -> float:
        return float(np.dot(n - rankdata(w, method="average"), d))

    forward, backward = agreement(v), agreement(-v)
    if forward > backward:
        return v.copy()
    if backward > forward:
        return -v
    return v.copy() if ensure_rng(rng).random() < 0.5 else -v
