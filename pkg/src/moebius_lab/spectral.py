"""Welch power spectrum of the mu sequence, on a home-grown radix-2 FFT."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .core_mu import MuTable
from .errors import InvalidArgument

DEFAULT_SEGMENT = 1 << 16
DEFAULT_OVERLAP = 0.5
FLATNESS_THRESHOLD = 2.0

# segments transformed per batch; bounds the complex work buffer
_BATCH_ELEMENTS = 1 << 21


class Window(enum.Enum):
    RECTANGULAR = "rectangular"
    HANN = "hann"


def _is_pow2(n: int) -> bool:
    return n >= 2 and n & (n - 1) == 0


def bit_reverse_permutation(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.intp)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return rev


def _transform(x, sign: float) -> np.ndarray:
    x = np.asarray(x, dtype=np.complex128)
    n = x.shape[-1]
    if not _is_pow2(n):
        raise InvalidArgument(f"length must be a power of two >= 2, got {n}")
    lead = x.shape[:-1]
    x = x[..., bit_reverse_permutation(n)]
    m = 2
    while m <= n:
        half = m // 2
        w = np.exp(sign * 2j * np.pi * np.arange(half) / m)
        x = x.reshape(*lead, n // m, m)
        u = x[..., :half].copy()
        t = x[..., half:] * w
        x[..., :half] = u + t
        x[..., half:] = u - t
        m *= 2
    return x.reshape(*lead, n)


def fft(x) -> np.ndarray:
    """Radix-2 decimation-in-time DFT along the last axis, output in natural order."""
    return _transform(x, -1.0)


def ifft(x) -> np.ndarray:
    x = np.asarray(x)
    return _transform(x, 1.0) / x.shape[-1]


def window_weights(window: Window, n: int) -> np.ndarray:
    if window is Window.RECTANGULAR:
        return np.ones(n)
    if window is Window.HANN:
        # periodic Hann, the usual choice for spectral averaging
        return 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n) / n)
    raise InvalidArgument(f"unknown window {window!r}")


@dataclass(frozen=True)
class PsdEstimate:
    segment_len: int
    overlap: float
    window: Window
    n_segments: int
    freqs: np.ndarray  # cycles per sample, 0 .. 0.5
    power: np.ndarray


def welch_psd(
    data,
    segment_len: int = DEFAULT_SEGMENT,
    overlap: float = DEFAULT_OVERLAP,
    window: Window | str = Window.HANN,
) -> PsdEstimate:
    """Average of mean-removed, windowed periodograms over overlapping segments.

    ``data`` is a MuTable or any 1-d real sequence.  Power is scaled by
    1 / sum(w**2), so white noise of unit variance has mean power 1 in
    every bin of the one-sided spectrum.
    """
    x = data.body() if isinstance(data, MuTable) else np.asarray(data)
    if x.ndim != 1:
        raise InvalidArgument("data must be one-dimensional")
    window = Window(window)
    if not _is_pow2(segment_len):
        raise InvalidArgument(f"segment_len must be a power of two >= 2, got {segment_len}")
    if overlap not in (0, 0.5):
        raise InvalidArgument(f"overlap must be 0 or 0.5, got {overlap}")
    if x.size < segment_len:
        raise InvalidArgument(f"segment_len {segment_len} longer than data ({x.size})")

    step = int(segment_len * (1 - overlap))
    n_segments = (x.size - segment_len) // step + 1
    segments = np.lib.stride_tricks.sliding_window_view(x, segment_len)[::step]
    w = window_weights(window, segment_len)
    nbins = segment_len // 2 + 1

    total = np.zeros(nbins)
    batch = max(1, _BATCH_ELEMENTS // segment_len)
    for start in range(0, n_segments, batch):
        seg = segments[start : start + batch].astype(np.float64)
        seg -= seg.mean(axis=1, keepdims=True)
        spec = fft(seg * w)[:, :nbins]
        # fixed summation order keeps the result bit-reproducible
        total += (spec.real**2 + spec.imag**2).sum(axis=0)

    power = total / (n_segments * np.dot(w, w))
    freqs = np.arange(nbins) / segment_len
    return PsdEstimate(segment_len, float(overlap), window, n_segments, freqs, power)


def peak_ratio(psd: PsdEstimate) -> float:
    """max/mean of the power over the non-DC bins."""
    p = psd.power[1:]
    if p.size == 0:
        raise InvalidArgument("no bins besides DC")
    mean = p.mean()
    if mean <= 0:
        raise InvalidArgument("all-zero spectrum has no peak ratio")
    return float(p.max() / mean)
