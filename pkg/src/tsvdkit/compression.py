"""Truncation-based compression schemes with closed-form storage ratios.

Three schemes over an ``n1 x n2 x n3`` tensor:

* ``svd``: vectorize each frontal slice into a column of an
  ``(n1*n2) x n3`` matrix and keep a rank-``k1`` truncated SVD;
  ratio ``n1*n2*n3 / (k1*(n1*n2 + n3 + 1))``.
* ``tsvd``: keep the ``k2`` largest spectral f-diagonal entries globally
  across slices, zeroing the matching left/right spectral columns;
  ratio ``n1*n2*n3 / (k2*(n1 + n2 + 1))``.
* ``tsvd_tubal``: keep the first ``k3`` singular tubes (tensor-SVD
  truncation); ratio ``n1*n2 / (k3*(n1 + n2 + 1))``.

Every scheme serializes to exactly as many retained scalars as its ratio
denominator counts.  For ``tsvd`` this is achieved with uniform
``(1 + n1 + n2)``-real records: a self-paired spectral entry stores its real
columns directly, a conjugate pair stores real/imaginary column parts across
two records (the pair is kept or dropped together, so reconstructions stay
real), and a budget remainder of one slot stores the best real rank-1 summary
of the leading remaining candidate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import transforms
from .algebra import check_tensor
from .completion import rse_db
from .decomposition import t_svd, truncate
from .errors import DimensionError, InfeasibleError

METHODS = ("svd", "tsvd", "tsvd_tubal")

# Record kinds for the tsvd payload.
SELF, PAIR_RE, PAIR_IM, HALF = 0, 1, 2, 3


@dataclass
class CompressionResult:
    """Outcome of one compression run.

    ``ratio`` is the closed-form value for ``(dims, k)``; ``achieved_ratio``
    is recomputed from the actual retained scalar count (they coincide under
    this package's record layout).  ``payload`` holds the retained factor
    blocks as float64 arrays and ``meta`` the per-record bookkeeping needed to
    decode the ``tsvd`` payload.
    """

    method: str
    k: int
    ratio: float
    achieved_ratio: float
    rse_db: float
    reconstruction: np.ndarray
    payload: list[np.ndarray] = field(repr=False)
    meta: list[tuple[int, int, int]] = field(default_factory=list, repr=False)

    @property
    def stored_scalars(self) -> int:
        return int(sum(block.size for block in self.payload))


def _check_method(method: str) -> str:
    if method not in METHODS:
        raise InfeasibleError(f"unknown method {method!r}; expected one of {METHODS}")
    return method


def k_max(method: str, dims) -> int:
    """Largest admissible retention parameter for the method and dims."""
    n1, n2, n3 = _check_dims3(dims)
    _check_method(method)
    if method == "svd":
        return min(n1 * n2, n3)
    if method == "tsvd":
        return min(n1, n2) * n3
    return min(n1, n2)


def ratio_for(method: str, dims, k: int) -> float:
    """Closed-form compression ratio for the given retention parameter."""
    n1, n2, n3 = _check_dims3(dims)
    _check_k(method, dims, k)
    if method == "svd":
        return n1 * n2 * n3 / (k * (n1 * n2 + n3 + 1))
    if method == "tsvd":
        return n1 * n2 * n3 / (k * (n1 + n2 + 1))
    return n1 * n2 / (k * (n1 + n2 + 1))


def stored_count_for(method: str, dims, k: int) -> int:
    """Retained scalar parameters implied by the ratio formula (unreduced)."""
    n1, n2, n3 = _check_dims3(dims)
    _check_k(method, dims, k)
    if method == "svd":
        return k * (n1 * n2 + n3 + 1)
    if method == "tsvd":
        return k * (n1 + n2 + 1)
    return k * (n1 + n2 + 1) * n3


def k_for_ratio(method: str, dims, target_ratio: float) -> int:
    """Largest retention parameter whose formula ratio meets the target.

    Raises
    ------
    InfeasibleError
        If the target is below 1 or exceeds the ratio at ``k = 1``.
    """
    _check_method(method)
    _check_dims3(dims)
    if target_ratio < 1.0:
        raise InfeasibleError(f"target ratio must be >= 1, got {target_ratio}")
    for k in range(k_max(method, dims), 0, -1):
        if ratio_for(method, dims, k) >= target_ratio:
            return k
    raise InfeasibleError(
        f"target ratio {target_ratio} is unreachable for method {method} on dims {tuple(dims)}; "
        f"the maximum is {ratio_for(method, dims, 1):.4f} at k=1"
    )


def _check_dims3(dims) -> tuple[int, int, int]:
    dims = tuple(int(d) for d in dims)
    if len(dims) != 3:
        raise DimensionError(f"compression supports order-3 tensors only, got dims {dims}")
    if min(dims) < 1:
        raise DimensionError(f"extents must be >= 1, got {dims}")
    return dims


def _check_k(method: str, dims, k: int) -> None:
    top = k_max(method, dims)
    if not 1 <= k <= top:
        raise InfeasibleError(f"k={k} outside [1, {top}] for method {method} on dims {tuple(dims)}")


def compress_svd(m, k1: int) -> CompressionResult:
    """Rank-``k1`` truncated SVD of the slice-vectorized unfolding."""
    m = check_tensor(m, name="compression input")
    n1, n2, n3 = _check_dims3(m.shape)
    _check_k("svd", m.shape, k1)
    unfolding = m.reshape(n1 * n2, n3, order="F")
    u, s, vh = np.linalg.svd(unfolding, full_matrices=False)
    payload = [
        np.ascontiguousarray(u[:, :k1]),
        np.ascontiguousarray(s[:k1]),
        np.ascontiguousarray(vh[:k1, :].T),
    ]
    if k1 == k_max("svd", m.shape):
        recon = m.copy()
    else:
        recon = ((u[:, :k1] * s[:k1]) @ vh[:k1, :]).reshape(n1, n2, n3, order="F")
    return CompressionResult(
        method="svd",
        k=k1,
        ratio=ratio_for("svd", m.shape, k1),
        achieved_ratio=n1 * n2 * n3 / sum(b.size for b in payload),
        rse_db=rse_db(recon, m),
        reconstruction=recon,
        payload=payload,
    )


def _select_tsvd_records(sig: np.ndarray, u_hat: np.ndarray, v_hat: np.ndarray,
                         partner: np.ndarray, k2: int):
    """Pick the ``k2`` largest spectral f-diagonal entries with conjugate
    pairs kept atomically, emitting one uniform record per budget unit.

    Records are ``(kind, slice, diag, scalar, u_part, v_part)`` with
    ``u_part``/``v_part`` real vectors of lengths n1/n2.  A remainder slot is
    filled by whichever captures more energy: the best real rank-1 summary of
    the straddled pair, or the largest remaining self-paired entry.
    """
    n0, rho = sig.shape
    order = sorted(
        ((i, j) for i in range(n0) for j in range(rho)),
        key=lambda ij: (-sig[ij[0], ij[1]], ij[1], ij[0]),
    )
    taken = set()
    records = []
    budget = k2

    def half_record(i, j):
        # Best real rank-1 approximation of the real part of the pair's
        # rank-1 spectral contribution; never increases the error.
        contrib = sig[i, j] * np.outer(u_hat[:, i, j], v_hat[:, i, j].conj())
        uu, ss, vvh = np.linalg.svd(contrib.real)
        return (HALF, j, i, float(ss[0]), uu[:, 0].copy(), vvh[0, :].copy())

    pos = 0
    while budget > 0 and pos < len(order):
        i, j = order[pos]
        pos += 1
        if (i, j) in taken:
            continue
        p = int(partner[j])
        if p == j:
            records.append((SELF, j, i, float(sig[i, j]),
                            u_hat[:, i, j].real.copy(), v_hat[:, i, j].real.copy()))
            taken.add((i, j))
            budget -= 1
            continue
        lo = min(j, p)
        if budget >= 2:
            records.append((PAIR_RE, lo, i, float(sig[i, lo]),
                            u_hat[:, i, lo].real.copy(), v_hat[:, i, lo].real.copy()))
            records.append((PAIR_IM, lo, i, float(sig[i, lo]),
                            u_hat[:, i, lo].imag.copy(), v_hat[:, i, lo].imag.copy()))
            taken.add((i, j))
            taken.add((i, p))
            budget -= 2
            continue
        # One slot left and the next candidate is a pair: compare the pair's
        # real rank-1 summary against the largest remaining self-paired entry.
        half = half_record(i, lo)
        single = None
        for i2, j2 in order[pos:]:
            if (i2, j2) in taken or int(partner[j2]) != j2:
                continue
            single = (SELF, j2, i2, float(sig[i2, j2]),
                      u_hat[:, i2, j2].real.copy(), v_hat[:, i2, j2].real.copy())
            break
        if single is not None and single[3] >= half[3]:
            records.append(single)
            taken.add((single[2], single[1]))
        else:
            records.append(half)
            taken.add((i, j))
        budget -= 1
    return records


def _decode_tsvd_records(records, dims) -> np.ndarray:
    """Rebuild the real reconstruction from uniform spectral records."""
    n1, n2, n3 = dims
    merged = np.zeros((n1, n2, n3), dtype=np.complex128)
    partner = transforms.conjugate_partner_map((n3,))
    pending = {}
    for kind, j, i, scalar, u_part, v_part in records:
        p = int(partner[j])
        if kind == SELF:
            merged[:, :, j] += scalar * np.outer(u_part, v_part)
        elif kind == HALF:
            slab = scalar * np.outer(u_part, v_part)
            merged[:, :, j] += slab
            merged[:, :, p] += slab
        else:
            key = (j, i)
            if key in pending:
                other_kind, other_u, other_v, sigma = pending.pop(key)
                if kind == PAIR_IM:
                    u = other_u + 1j * u_part
                    v = other_v + 1j * v_part
                else:
                    u = u_part + 1j * other_u
                    v = v_part + 1j * other_v
                slab = sigma * np.outer(u, v.conj())
                merged[:, :, j] += slab
                merged[:, :, p] += slab.conj()
            else:
                pending[key] = (kind, u_part, v_part, scalar)
    if pending:
        raise DimensionError("unpaired pair-record in tsvd payload")
    return transforms.ifft_mode3(merged)


def compress_tsvd(m, k2: int) -> CompressionResult:
    """Keep the ``k2`` largest spectral f-diagonal entries globally.

    Ties are broken by (slice index, diagonal index) ascending; conjugate
    partner entries are kept or dropped together so the reconstruction is
    real.
    """
    m = check_tensor(m, name="compression input")
    n1, n2, n3 = _check_dims3(m.shape)
    _check_k("tsvd", m.shape, k2)
    factors = t_svd(m)
    sig = factors.sigmas()
    u_hat = transforms.merge_trailing(transforms.fft_mode3(factors.u))
    v_hat = transforms.merge_trailing(transforms.fft_mode3(factors.v))
    partner = transforms.conjugate_partner_map((n3,))
    records = _select_tsvd_records(sig, u_hat, v_hat, partner, k2)
    payload = [np.concatenate(([scalar], u_part, v_part))
               for _, _, _, scalar, u_part, v_part in records]
    meta = [(kind, j, i) for kind, j, i, _, _, _ in records]
    if k2 == k_max("tsvd", m.shape):
        recon = m.copy()
    else:
        recon = _decode_tsvd_records(records, (n1, n2, n3))
    return CompressionResult(
        method="tsvd",
        k=k2,
        ratio=ratio_for("tsvd", m.shape, k2),
        achieved_ratio=n1 * n2 * n3 / sum(b.size for b in payload),
        rse_db=rse_db(recon, m),
        reconstruction=recon,
        payload=payload,
        meta=meta,
    )


def compress_tsvd_tubal(m, k3: int) -> CompressionResult:
    """Keep the first ``k3`` singular tubes (tensor-SVD truncation)."""
    m = check_tensor(m, name="compression input")
    n1, n2, n3 = _check_dims3(m.shape)
    _check_k("tsvd_tubal", m.shape, k3)
    factors = t_svd(m)
    diag = np.arange(k3)
    payload = [
        np.ascontiguousarray(factors.u[:, :k3, :]),
        np.ascontiguousarray(factors.s[diag, diag, :]),
        np.ascontiguousarray(factors.v[:, :k3, :]),
    ]
    if k3 == k_max("tsvd_tubal", m.shape):
        recon = m.copy()
    else:
        recon = truncate(factors, k3)
    return CompressionResult(
        method="tsvd_tubal",
        k=k3,
        ratio=ratio_for("tsvd_tubal", m.shape, k3),
        achieved_ratio=n1 * n2 * n3 / sum(b.size for b in payload),
        rse_db=rse_db(recon, m),
        reconstruction=recon,
        payload=payload,
        meta=[],
    )


def compress(m, method: str, k: int) -> CompressionResult:
    """Dispatch to the scheme named by ``method``."""
    _check_method(method)
    if method == "svd":
        return compress_svd(m, k)
    if method == "tsvd":
        return compress_tsvd(m, k)
    return compress_tsvd_tubal(m, k)


def decode_payload(method: str, dims, k: int, scalars: np.ndarray,
                   meta: list[tuple[int, int, int]]) -> np.ndarray:
    """Reconstruct a tensor from a serialized scalar block.

    ``scalars`` is the flat float64 array produced by concatenating the
    payload blocks in declared order; ``meta`` is required for ``tsvd``.
    """
    _check_method(method)
    n1, n2, n3 = _check_dims3(dims)
    expected = stored_count_for(method, dims, k)
    if scalars.size != expected:
        raise DimensionError(f"payload holds {scalars.size} scalars, expected {expected}")
    if method == "svd":
        u = scalars[: n1 * n2 * k].reshape(n1 * n2, k, order="F")
        s = scalars[n1 * n2 * k: n1 * n2 * k + k]
        v = scalars[n1 * n2 * k + k:].reshape(n3, k, order="F")
        return ((u * s) @ v.T).reshape(n1, n2, n3, order="F")
    if method == "tsvd":
        if len(meta) != k:
            raise DimensionError(f"tsvd payload carries {len(meta)} records, expected {k}")
        width = 1 + n1 + n2
        records = []
        for unit, (kind, j, i) in enumerate(meta):
            row = scalars[unit * width: (unit + 1) * width]
            records.append((kind, j, i, float(row[0]), row[1: 1 + n1], row[1 + n1:]))
        return _decode_tsvd_records(records, (n1, n2, n3))
    u = scalars[: n1 * k * n3].reshape(n1, k, n3, order="F")
    tubes = scalars[n1 * k * n3: n1 * k * n3 + k * n3].reshape(k, n3, order="F")
    v = scalars[n1 * k * n3 + k * n3:].reshape(n2, k, n3, order="F")
    u_hat = transforms.merge_trailing(transforms.fft_mode3(u))
    v_hat = transforms.merge_trailing(transforms.fft_mode3(v))
    tubes_hat = np.fft.fft(tubes, axis=1)
    c_hat = np.einsum("ikj,kj,lkj->ilj", u_hat, tubes_hat, v_hat.conj())
    return transforms.ifft_mode3(c_hat)
