"""External smoothing filters applied along the time axis of a sequence.

Both filters are linear convolutions with mirror (reflect-about-edge)
boundary handling and support an arbitrary batch prefix: signals are
(..., T, m) with smoothing along the T axis, so one call can filter a
nominal sequence or a whole perturbation batch.
"""

from __future__ import annotations

import numpy as np

from smppi.config import FilterConfig


def savgol_coefficients(window: int, degree: int) -> np.ndarray:
    """Convolution kernel of the least-squares polynomial smoother.

    Row 0 of the pseudo-inverse of the local Vandermonde design matrix:
    the fitted polynomial's value at the window center as a linear
    combination of the window samples.
    """
    if window < 3 or window % 2 == 0:
        raise ValueError("window must be odd and >= 3")
    if not 0 <= degree < window:
        raise ValueError("degree must satisfy 0 <= degree < window")
    half = window // 2
    positions = np.arange(-half, half + 1, dtype=np.float64)
    design = np.vander(positions, degree + 1, increasing=True)
    return np.linalg.pinv(design)[0]


def _mirror_pad(signal: np.ndarray, left: int, right: int) -> np.ndarray:
    """Reflect about the edge samples along axis -2 (no edge duplication)."""
    t = signal.shape[-2]
    if left >= t or right >= t:
        raise ValueError(f"signal too short to mirror-pad: T={t}, pad=({left}, {right})")
    idx = np.concatenate(
        [np.arange(left, 0, -1), np.arange(t), np.arange(t - 2, t - 2 - right, -1)]
    )
    return signal[..., idx, :]


def _convolve_time(signal: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    window = len(kernel)
    left = (window - 1) // 2
    right = window - 1 - left
    padded = _mirror_pad(signal, left, right)
    t = signal.shape[-2]
    out = np.zeros_like(signal)
    for i in range(window):
        out += kernel[i] * padded[..., i : i + t, :]
    return out


def savitzky_golay(signal: np.ndarray, spec: FilterConfig) -> np.ndarray:
    """Least-squares local polynomial smoothing, output length preserved."""
    signal = np.asarray(signal, dtype=np.float64)
    if signal.shape[-2] < spec.window:
        raise ValueError(f"signal length {signal.shape[-2]} < window {spec.window}")
    return _convolve_time(signal, savgol_coefficients(spec.window, spec.degree))


def moving_average(signal: np.ndarray, window: int) -> np.ndarray:
    """Centered mean with mirror boundaries; window 1 is the identity."""
    if window < 1:
        raise ValueError("window must be >= 1")
    signal = np.asarray(signal, dtype=np.float64)
    if window == 1:
        return signal.copy()
    if signal.shape[-2] < window:
        raise ValueError(f"signal length {signal.shape[-2]} < window {window}")
    return _convolve_time(signal, np.full(window, 1.0 / window))


def apply_filter(signal: np.ndarray, spec: FilterConfig) -> np.ndarray:
    if spec.kind == "savitzky_golay":
        return savitzky_golay(signal, spec)
    return moving_average(signal, spec.window)
