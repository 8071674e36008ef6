"""Trailing-mode Fourier transforms and sampling operators.

Convention: the forward transform is the unnormalized DFT applied along every
mode from the third onward; the inverse carries the full 1/n factor.  Under
this convention the squared Frobenius norm picks up a factor equal to the
product of the trailing extents (``rho``) in the spectral domain.
"""

from __future__ import annotations

import numpy as np

from .errors import DataError, DimensionError, SpectralSymmetryError

# Relative bound on the imaginary residue tolerated when a spectral tensor is
# brought back to the real domain.
IMAG_RESIDUE_RTOL = 1e-8


def fft_mode3(a: np.ndarray) -> np.ndarray:
    """Forward DFT along every trailing mode (third onward).

    Parameters
    ----------
    a : ndarray
        Real or complex tensor of order >= 3.

    Returns
    -------
    ndarray
        Complex tensor with the same shape as ``a``.
    """
    arr = np.asarray(a)
    if arr.ndim < 3:
        raise DimensionError(f"expected order >= 3, got order {arr.ndim}")
    out = arr.astype(np.complex128, copy=True)
    for axis in range(2, arr.ndim):
        out = np.fft.fft(out, axis=axis)
    return out


def ifft_mode3(a_hat: np.ndarray) -> np.ndarray:
    """Inverse DFT along every trailing mode, returning a real tensor.

    The input must be (numerically) conjugate symmetric, i.e. originate from
    a real tensor.  The imaginary residue left by rounding is verified against
    ``IMAG_RESIDUE_RTOL`` and discarded.

    Raises
    ------
    SpectralSymmetryError
        If the residue exceeds ``IMAG_RESIDUE_RTOL * (1 + max |real part|)``,
        which signals a corrupted spectral tensor.
    """
    arr = np.asarray(a_hat)
    if arr.ndim < 3:
        raise DimensionError(f"expected order >= 3, got order {arr.ndim}")
    out = arr.astype(np.complex128, copy=True)
    for axis in range(2, arr.ndim):
        out = np.fft.ifft(out, axis=axis)
    residue = float(np.abs(out.imag).max()) if out.size else 0.0
    bound = IMAG_RESIDUE_RTOL * (1.0 + (float(np.abs(out.real).max()) if out.size else 0.0))
    if residue > bound:
        raise SpectralSymmetryError(
            f"imaginary residue {residue:.3e} exceeds tolerance {bound:.3e}; "
            "the spectral tensor is not conjugate symmetric"
        )
    return np.ascontiguousarray(out.real)


def merge_trailing(a: np.ndarray) -> np.ndarray:
    """Collapse all trailing modes into one slice axis, third index fastest.

    A tensor of shape ``(n1, n2, n3, ..., nN)`` becomes ``(n1, n2, rho)`` with
    ``rho = n3 * ... * nN``; slice ``m`` holds trailing multi-index
    ``(m % n3, (m // n3) % n4, ...)``.
    """
    return a.reshape(a.shape[0], a.shape[1], -1, order="F")


def unmerge_trailing(merged: np.ndarray, trailing_dims: tuple[int, ...]) -> np.ndarray:
    """Inverse of :func:`merge_trailing` for the given trailing extents."""
    shape = merged.shape[:2] + tuple(trailing_dims)
    return merged.reshape(shape, order="F")


def conjugate_partner_map(trailing_dims: tuple[int, ...]) -> np.ndarray:
    """Map each merged slice index to its conjugate partner.

    For a real tensor, spectral slice ``m`` equals the complex conjugate of
    slice ``partner[m]``; self-paired slices (``partner[m] == m``) carry real
    spectra.
    """
    trailing_dims = tuple(int(n) for n in trailing_dims)
    rho = int(np.prod(trailing_dims)) if trailing_dims else 1
    partner = np.empty(rho, dtype=np.intp)
    for lin in range(rho):
        multi = np.unravel_index(lin, trailing_dims, order="F")
        mirrored = tuple((-m) % n for m, n in zip(multi, trailing_dims))
        partner[lin] = np.ravel_multi_index(mirrored, trailing_dims, order="F")
    return partner


class SamplingOperator:
    """Orthogonal projector onto tensors supported on an observation mask.

    The mask is stored dense as booleans; applying the operator keeps observed
    entries bit-exactly and zeroes the rest, so it is idempotent.
    """

    def __init__(self, mask):
        arr = np.asarray(mask)
        if arr.ndim < 3:
            raise DimensionError(f"mask must have order >= 3, got order {arr.ndim}")
        if arr.dtype != bool:
            values = np.unique(arr)
            if not np.isin(values, (0, 1)).all():
                raise DataError("mask entries must all be 0 or 1")
            arr = arr.astype(bool)
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        self.mask = arr

    @classmethod
    def bernoulli(cls, dims, rate: float, seed: int) -> "SamplingOperator":
        """Seeded independent Bernoulli(``rate``) mask over the given dims."""
        if not 0.0 <= rate <= 1.0:
            raise DataError(f"sampling rate must lie in [0, 1], got {rate}")
        rng = np.random.default_rng(seed)
        return cls(rng.random(tuple(dims)) < rate)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.mask.shape

    def _check_dims(self, x: np.ndarray) -> None:
        if x.shape != self.mask.shape:
            raise DimensionError(
                f"operand shape {x.shape} does not match mask shape {self.mask.shape}"
            )

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Zero every entry outside the mask; observed entries pass through
        unchanged."""
        x = np.asarray(x)
        self._check_dims(x)
        return np.where(self.mask, x, np.zeros((), dtype=x.dtype))

    def apply_spectral(self, x_hat: np.ndarray) -> np.ndarray:
        """The sampling projector conjugated into the spectral domain.

        Computes ``fft(mask * ifft(x_hat))``; the input must therefore be a
        valid (conjugate-symmetric) spectrum, or :class:`SpectralSymmetryError`
        propagates from the inverse transform.
        """
        x_hat = np.asarray(x_hat)
        self._check_dims(x_hat)
        return fft_mode3(self.apply(ifft_mode3(x_hat)))
