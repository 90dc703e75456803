"""Periodic grids and Fourier-multiplier derivatives.

Grids are uniform with power-of-two sample counts; node j sits at
j * length / n.  Values may be scalar or vector-valued (components on the
last axis); transforms always act on the spatial axes.
"""

from dataclasses import dataclass, field

import numpy as np


def _check_pow2(n):
    if n < 2 or (n & (n - 1)) != 0:
        raise ValueError(f"grid size {n} is not a power of two")


def wavenumbers(n, length):
    return 2.0 * np.pi / length * np.fft.fftfreq(n, d=1.0 / n)


def spectral_derivative(values, order, length=2.0 * np.pi, axis=0):
    """Fourier-multiplier derivative along ``axis``.

    The Nyquist mode of odd-order derivatives is zeroed (its multiplier is
    purely imaginary and has no consistent real-signal interpretation).
    """
    if order not in (1, 2, 3):
        raise ValueError("derivative order must be 1, 2, or 3")
    values = np.asarray(values, dtype=float)
    n = values.shape[axis]
    _check_pow2(n)
    k = wavenumbers(n, length)
    mult = (1j * k) ** order
    if order % 2 == 1:
        mult[n // 2] = 0.0
    shape = [1] * values.ndim
    shape[axis] = n
    fh = np.fft.fft(values, axis=axis) * mult.reshape(shape)
    return np.real(np.fft.ifft(fh, axis=axis))


def spectral_partial_2d(values, order, axis, lengths=(2.0 * np.pi, 2.0 * np.pi)):
    """Partial derivative of a 2-D periodic field along spatial axis 0 or 1."""
    if axis not in (0, 1):
        raise ValueError("axis must be 0 or 1")
    return spectral_derivative(values, order, length=lengths[axis], axis=axis)


def dealias_1d(values, length=None):
    """Zero modes with |k| > n//3 along axis 0 (2/3 rule)."""
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    kidx = np.abs(np.fft.fftfreq(n, d=1.0 / n))
    mask = kidx <= n // 3
    shape = [1] * values.ndim
    shape[0] = n
    fh = np.fft.fft(values, axis=0) * mask.reshape(shape)
    return np.real(np.fft.ifft(fh, axis=0))


def dealias_2d(values):
    """2/3-rule mask on both spatial axes of a 2-D field."""
    values = np.asarray(values, dtype=float)
    n0, n1 = values.shape[0], values.shape[1]
    m0 = np.abs(np.fft.fftfreq(n0, d=1.0 / n0)) <= n0 // 3
    m1 = np.abs(np.fft.fftfreq(n1, d=1.0 / n1)) <= n1 // 3
    fh = np.fft.fft2(values, axes=(0, 1))
    fh *= m0.reshape([n0] + [1] * (values.ndim - 1))
    fh *= m1.reshape([1, n1] + [1] * (values.ndim - 2))
    return np.real(np.fft.ifft2(fh, axes=(0, 1)))


@dataclass
class PeriodicGrid1D:
    """Uniform periodic samples on [0, length)."""

    values: np.ndarray
    length: float = 2.0 * np.pi

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        _check_pow2(self.values.shape[0])

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def nodes(self):
        return np.arange(self.n) * (self.length / self.n)

    def derivative(self, order):
        return PeriodicGrid1D(spectral_derivative(self.values, order, self.length), self.length)

    def integral(self):
        """Exact spectral quadrature (uniform trapezoid on a periodic grid)."""
        return np.sum(self.values, axis=0) * (self.length / self.n)


@dataclass
class PeriodicGrid2D:
    """Uniform periodic samples on [0, Lx) x [0, Ly); axis 0 is x."""

    values: np.ndarray
    lengths: tuple = field(default=(2.0 * np.pi, 2.0 * np.pi))

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        _check_pow2(self.values.shape[0])
        _check_pow2(self.values.shape[1])

    @property
    def shape(self):
        return self.values.shape[:2]

    def nodes(self):
        nx, ny = self.shape
        x = np.arange(nx) * (self.lengths[0] / nx)
        y = np.arange(ny) * (self.lengths[1] / ny)
        return np.meshgrid(x, y, indexing="ij")

    def partial(self, order, axis):
        return PeriodicGrid2D(
            spectral_partial_2d(self.values, order, axis, self.lengths), self.lengths
        )

    def integral(self):
        nx, ny = self.shape
        cell = (self.lengths[0] / nx) * (self.lengths[1] / ny)
        return np.sum(self.values, axis=(0, 1)) * cell
