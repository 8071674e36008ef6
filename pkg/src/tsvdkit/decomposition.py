"""Tensor SVD in the trailing-mode spectral domain, with rank measures.

The factorization writes a real tensor as ``u * s * transpose(v)`` where ``u``
and ``v`` are orthogonal under the t-product, ``s`` is f-diagonal (every
frontal slice diagonal), and ``*`` is the t-product.  It is obtained from one
matrix SVD per spectral frontal slice; conjugate-partner slices are mirrored
rather than recomputed, which both halves the work and guarantees that the
inverse transform of the factors is exactly real.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import transforms
from .algebra import check_tensor
from .errors import DimensionError, NumericalError


@dataclass(frozen=True)
class TSvdFactors:
    """Factors of a tensor SVD.

    Attributes
    ----------
    u : ndarray, shape (n1, n1, n3, ...)
        Left orthogonal factor.
    s : ndarray, shape (n1, n2, n3, ...)
        f-diagonal middle factor.
    v : ndarray, shape (n2, n2, n3, ...)
        Right orthogonal factor (not transposed).
    s_hat : ndarray, complex, same shape as ``s``
        Spectral middle factor; every frontal slice is diagonal with real,
        nonnegative, nonincreasing entries.  Cached so downstream consumers
        avoid re-transforming.
    """

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray
    s_hat: np.ndarray = field(repr=False)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.s.shape

    def sigmas(self) -> np.ndarray:
        """Spectral singular values as a real ``(min(n1, n2), rho)`` matrix,
        one column per merged spectral slice."""
        merged = transforms.merge_trailing(self.s_hat)
        n0 = min(merged.shape[0], merged.shape[1])
        return merged[np.arange(n0), np.arange(n0), :].real

    def reconstruct(self) -> np.ndarray:
        """Multiply the factors back together (spectral route)."""
        return truncate(self, min(self.dims[0], self.dims[1]))


def _svd_spectral_slices(d_hat_m: np.ndarray, partner: np.ndarray):
    """Slice SVDs over the merged spectral stack, mirroring conjugate pairs.

    Returns merged complex stacks ``(u_hat, s_hat, v_hat)`` plus the
    ``(n0, rho)`` real singular-value matrix.  Self-paired slices are real and
    are factored with a real SVD so the factors stay exactly mirrorable.
    """
    n1, n2, rho = d_hat_m.shape
    n0 = min(n1, n2)
    diag = np.arange(n0)
    u_hat = np.zeros((n1, n1, rho), dtype=np.complex128)
    s_hat = np.zeros((n1, n2, rho), dtype=np.complex128)
    v_hat = np.zeros((n2, n2, rho), dtype=np.complex128)
    sig = np.zeros((n0, rho))
    for j in range(rho):
        p = int(partner[j])
        if p < j:
            continue
        slab = d_hat_m[:, :, j]
        try:
            if not slab.any():
                u, s, vh = np.eye(n1, dtype=np.complex128), np.zeros(n0), np.eye(n2, dtype=np.complex128)
            elif p == j:
                u, s, vh = np.linalg.svd(slab.real)
                u = u.astype(np.complex128)
                vh = vh.astype(np.complex128)
            else:
                u, s, vh = np.linalg.svd(slab)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"SVD failed on spectral slice {j}: {exc}") from exc
        u_hat[:, :, j] = u
        s_hat[diag, diag, j] = s
        v_hat[:, :, j] = vh.conj().T
        sig[:, j] = s
        if p != j:
            u_hat[:, :, p] = u.conj()
            s_hat[diag, diag, p] = s
            v_hat[:, :, p] = vh.T
            sig[:, p] = s
    return u_hat, s_hat, v_hat, sig


def t_svd(m) -> TSvdFactors:
    """Factor a real tensor of order >= 3 into orthogonal-by-f-diagonal form.

    One matrix SVD is computed per spectral frontal slice (all trailing modes
    transformed); a slice whose conjugate partner was already factored reuses
    the conjugated factors.  Zero slices deterministically yield identity
    factors.

    Raises
    ------
    NumericalError
        If a slice SVD fails to converge; the message carries the merged
        slice index.
    """
    m = check_tensor(m, name="t_svd input")
    trailing = m.shape[2:]
    d_hat_m = transforms.merge_trailing(transforms.fft_mode3(m))
    partner = transforms.conjugate_partner_map(trailing)
    u_hat, s_hat, v_hat, _ = _svd_spectral_slices(d_hat_m, partner)
    u = transforms.ifft_mode3(transforms.unmerge_trailing(u_hat, trailing))
    s = transforms.ifft_mode3(transforms.unmerge_trailing(s_hat, trailing))
    v = transforms.ifft_mode3(transforms.unmerge_trailing(v_hat, trailing))
    s_hat_full = transforms.unmerge_trailing(s_hat, trailing)
    for arr in (u, s, v, s_hat_full):
        arr.setflags(write=False)
    return TSvdFactors(u=u, s=s, v=v, s_hat=s_hat_full)


def truncate(factors: TSvdFactors, k: int) -> np.ndarray:
    """Best approximation by a t-product of inner extent ``k``.

    Keeps the leading ``k`` singular tubes:
    ``sum_{i<=k} u(:, i, :) * s(i, i, :) * transpose(v(:, i, :))``.  The
    discarded spectral energy identity
    ``|m - m_k|_F^2 == sum of discarded sigma^2 / rho`` holds to rounding.
    """
    n0 = min(factors.dims[0], factors.dims[1])
    if not 1 <= k <= n0:
        raise DimensionError(f"truncation index {k} outside [1, {n0}]")
    trailing = factors.dims[2:]
    u_hat = transforms.merge_trailing(transforms.fft_mode3(factors.u))[:, :k, :]
    v_hat = transforms.merge_trailing(transforms.fft_mode3(factors.v))[:, :k, :]
    sig = factors.sigmas()[:k, :]
    c_hat = np.einsum("ikj,kj,lkj->ilj", u_hat, sig, v_hat.conj())
    return transforms.ifft_mode3(transforms.unmerge_trailing(c_hat, trailing))


def _spectral_singular_values(m) -> np.ndarray:
    """Singular values of every merged spectral slice, shape ``(n0, rho)``."""
    m = check_tensor(m)
    d_hat_m = transforms.merge_trailing(transforms.fft_mode3(m))
    try:
        sig = np.linalg.svd(np.moveaxis(d_hat_m, 2, 0), compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"singular values failed to converge: {exc}") from exc
    return sig.T


def multi_rank(m, tol: float = 1e-8) -> np.ndarray:
    """Per-spectral-slice numerical ranks.

    An entry counts the singular values of its slice exceeding ``tol`` times
    the largest singular value over *all* slices.  Returns one integer per
    merged spectral slice (``n3`` of them for order 3).
    """
    sig = _spectral_singular_values(m)
    threshold = tol * sig.max(initial=0.0)
    return (sig > threshold).sum(axis=0).astype(np.int64)


def tubal_rank(m, tol: float = 1e-8) -> int:
    """Number of nonzero singular tubes of the middle t-SVD factor.

    A tube counts when its l2 norm exceeds ``tol`` times the largest tube
    norm; the norms come from the spectral singular values via Parseval.
    """
    sig = _spectral_singular_values(m)
    rho = sig.shape[1]
    tube_norms = np.sqrt((sig**2).sum(axis=1) / rho)
    top = tube_norms.max(initial=0.0)
    return int((tube_norms > tol * top).sum())


def tnn(m) -> float:
    """Tensor nuclear norm: the summed singular values of every spectral
    frontal slice, equal to the nuclear norm of the block-diagonal spectral
    matrix."""
    return float(_spectral_singular_values(m).sum())


def ttn(m) -> float:
    """Tensor tubal norm: the summed l2 norms of the singular tubes."""
    sig = _spectral_singular_values(m)
    rho = sig.shape[1]
    return float(np.sqrt((sig**2).sum(axis=1) / rho).sum())
