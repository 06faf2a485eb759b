"""Rabi wave packets on n cyclically coupled chains.

Chains are coupled through a circulant n-number: a chain-space operator
sum_j c_j(h) [e1]^j, where [e1] is the cyclic shift. It is diagonal in
the discrete-Fourier chain modes q with eigenvalue

    omega_q(h) = sum_j exp(2 pi i q j / n) c_j(h),

and with c_j = theta_j -/+ g sqrt(l-1) kappa_j each dressed component of
the field-qubit pair evolves by the pure spectral phase exp(i t omega_q(h)).

Layout of the state arrays (``s`` dressed component, ``q`` chain mode,
``p`` chain, ``h`` wavenumber, ``x`` position)::

    PacketState.spectral        (2, n, H)     Theta^s_q(h, t)
    PacketState.amplitudes      (2, n, n, H)  Phi^s_qp(x, t)
    PacketState.chain_amplitudes (2, n, H)    psi^s_p(x, t)

Dressed component ``s = 0`` carries ``+g sqrt(l-1) kappa``, ``s = 1`` carries
``-g sqrt(l-1) kappa``. The bare excited/ground amplitudes are
``(psi^0 +/- psi^1) / sqrt(2)``; the inversion is measured on those.
Transforms between h and x are unitary DFTs on conjugate centred grids.

Since chain p of mode q carries the phase exp(-2 pi i q p / n), the
generator acting on chain vectors is sum_j c_j [e1]^(-j); for symmetric
couplings (c_j = c_(n-j), as in all shipped profiles) that is the same
operator as sum_j c_j [e1]^j.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from .errors import AliasingError, DomainError, ModelConsistencyError, NormalizationError

Profile = Callable[[np.ndarray, int], np.ndarray]

HERMITICITY_TOL = 1e-9
NORM_TOL = 1e-8


# --- circulant algebra -------------------------------------------------------

def shift_matrix(n: int) -> np.ndarray:
    """The cyclic shift [e1]: ones on the superdiagonal and bottom-left."""
    if n < 1:
        raise DomainError("n must be >= 1")
    return np.roll(np.eye(n), 1, axis=1)


def circulant_modes(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues of [e1] and the mode phase matrix.

    Returns ``(eigenvalues, phases)`` where ``eigenvalues[a] = exp(2 pi i a / n)``
    and ``phases[q, j] = exp(2 pi i q j / n)``. Column ``q`` of ``phases``
    scaled by ``1/sqrt(n)`` is the eigenvector of [e1] for ``eigenvalues[q]``.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    idx = np.arange(n)
    eigenvalues = np.exp(2j * np.pi * idx / n)
    phases = np.exp(2j * np.pi * np.outer(idx, idx) / n)
    return eigenvalues, phases


def circulant_eigenvalues(coefficients: np.ndarray) -> np.ndarray:
    """Eigenvalues of sum_j c_j [e1]^j along axis 0 of ``coefficients``."""
    c = np.asarray(coefficients)
    n = c.shape[0]
    return n * np.fft.ifft(c, axis=0)


# --- profiles ----------------------------------------------------------------

def _empty(h, n):
    return np.zeros((n,) + np.shape(h))


def _add_neighbours(c, value):
    n = c.shape[0]
    if n == 2:
        c[1] += value
    elif n > 2:
        c[1] += value
        c[n - 1] += value


@dataclass(frozen=True)
class CosineDispersion:
    """theta_0(h) = omega0 + 2 hopping cos(h spacing); nearest chains coupled by ``interchain``.

    ``interchain_back`` sets c_(n-1) separately (non-reciprocal coupling);
    unless it equals ``interchain`` the mode dispersion is not real and the
    configuration is rejected by :attr:`TubeConfig.mode_frequencies`.
    """

    omega0: float = 0.0
    hopping: float = 0.5
    interchain: float = 0.0
    spacing: float = 1.0
    interchain_back: float | None = None

    def __call__(self, h, n):
        c = _empty(h, n)
        c[0] = self.omega0 + 2.0 * self.hopping * np.cos(np.asarray(h) * self.spacing)
        if self.interchain_back is None or n < 3:
            _add_neighbours(c, self.interchain)
        else:
            c[1] += self.interchain
            c[n - 1] += self.interchain_back
        return c


@dataclass(frozen=True)
class LinearDispersion:
    velocity: float = 1.0
    omega0: float = 0.0

    def __call__(self, h, n):
        c = _empty(h, n)
        c[0] = self.omega0 + self.velocity * np.asarray(h)
        return c


@dataclass(frozen=True)
class ConstantCoupling:
    kappa: float = 1.0
    interchain: float = 0.0

    def __call__(self, h, n):
        c = _empty(h, n)
        c[0] = self.kappa
        _add_neighbours(c, self.interchain)
        return c


@dataclass(frozen=True)
class CosineCoupling:
    """kappa_0(h) = kappa0 + modulation cos(h spacing); neighbours get ``interchain``."""

    kappa0: float = 1.0
    modulation: float = 0.2
    spacing: float = 1.0
    interchain: float = 0.0

    def __call__(self, h, n):
        c = _empty(h, n)
        c[0] = self.kappa0 + self.modulation * np.cos(np.asarray(h) * self.spacing)
        _add_neighbours(c, self.interchain)
        return c


# --- grids and configuration -------------------------------------------------

def make_h_grid(size: int, extent: float) -> np.ndarray:
    """Centred uniform wavenumber grid with ``size`` (even) points spanning ``extent``."""
    size = int(size)
    if size < 2 or size % 2:
        raise DomainError(f"grid size must be an even integer >= 2, got {size}")
    if not extent > 0:
        raise DomainError("grid extent must be positive")
    dh = extent / size
    return (np.arange(size) - size // 2) * dh


@dataclass(frozen=True, eq=False)
class TubeConfig:
    n: int
    g: float
    l: int
    theta_profile: Profile
    kappa_profile: Profile
    h_grid: np.ndarray = field(repr=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be an integer >= 1, got {self.n!r}")
        if int(self.l) != self.l or self.l < 1:
            raise DomainError(f"l must be an integer >= 1, got {self.l!r}")
        if not math.isfinite(self.g):
            raise DomainError("g must be finite")
        h = np.asarray(self.h_grid, dtype=float)
        if h.ndim != 1 or h.size < 2 or h.size % 2:
            raise DomainError("h grid must be one-dimensional with an even number of points")
        steps = np.diff(h)
        if not np.all(steps > 0) or np.ptp(steps) > 1e-9 * steps[0]:
            raise DomainError("h grid must be uniform and increasing")
        if abs(h[h.size // 2]) > 1e-9 * steps[0]:
            raise DomainError("h grid must be centred: h[size // 2] == 0")
        object.__setattr__(self, "h_grid", h)

    @property
    def size(self) -> int:
        return self.h_grid.size

    @property
    def dh(self) -> float:
        return float(self.h_grid[1] - self.h_grid[0])

    @property
    def x_grid(self) -> np.ndarray:
        dx = 2.0 * np.pi / (self.size * self.dh)
        return (np.arange(self.size) - self.size // 2) * dx

    @property
    def coupling_strength(self) -> float:
        return self.g * math.sqrt(self.l - 1)

    def _profile(self, profile, name):
        values = np.asarray(profile(self.h_grid, self.n))
        try:
            values = np.broadcast_to(values, (self.n, self.size))
        except ValueError:
            raise DomainError(f"{name} must evaluate to shape (n, H) = ({self.n}, {self.size})") from None
        if not np.all(np.isfinite(values)):
            raise DomainError(f"{name} is not finite on the h grid")
        return values

    @cached_property
    def mode_frequencies(self) -> np.ndarray:
        """Real mode dispersion omega^s_q(h), shape (2, n, H); raises if not real."""
        theta = self._profile(self.theta_profile, "theta_profile")
        kappa = self._profile(self.kappa_profile, "kappa_profile")
        split = self.coupling_strength * kappa
        omega = np.stack([circulant_eigenvalues(theta + split),
                          circulant_eigenvalues(theta - split)])
        scale = max(1.0, float(np.max(np.abs(omega))))
        worst = float(np.max(np.abs(omega.imag)))
        if worst > HERMITICITY_TOL * scale:
            raise ModelConsistencyError(
                f"mode dispersion has imaginary part up to {worst:.3e}; profiles must satisfy "
                "c_(n-j) = conj(c_j) for every h")
        return np.ascontiguousarray(omega.real)


def nyquist_frequency_bound(cfg: TubeConfig) -> float:
    """Highest frequency [Hz] present in any per-chain inversion trace.

    Populations mix amplitudes of all modes and both dressed components at
    the same h, so the bound is the widest spread of omega at fixed h.
    """
    omega = cfg.mode_frequencies.reshape(-1, cfg.size)
    spread = omega.max(axis=0) - omega.min(axis=0)
    return float(spread.max()) / (2.0 * np.pi)


# --- transforms --------------------------------------------------------------

def _to_space(spectral: np.ndarray) -> np.ndarray:
    return np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(spectral, axes=-1), axis=-1, norm="ortho"),
                           axes=-1)


def _to_spectral(spatial: np.ndarray) -> np.ndarray:
    return np.fft.fftshift(np.fft.fft(np.fft.ifftshift(spatial, axes=-1), axis=-1, norm="ortho"),
                           axes=-1)


def _chains_to_modes(a):
    return np.fft.ifft(a, axis=-2, norm="ortho")


def _modes_to_chains(a):
    return np.fft.fft(a, axis=-2, norm="ortho")


# --- packet state ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PacketState:
    spectral: np.ndarray
    time: float = 0.0

    @property
    def n(self) -> int:
        return self.spectral.shape[1]

    @cached_property
    def mode_space(self) -> np.ndarray:
        return _to_space(self.spectral)

    @cached_property
    def amplitudes(self) -> np.ndarray:
        """Phi^s_qp(x, t) = exp(-2 pi i q p / n) phi^s_q(x, t), shape (2, n, n, H)."""
        _, phases = circulant_modes(self.n)
        return phases.conj()[None, :, :, None] * self.mode_space[:, :, None, :]

    @cached_property
    def chain_spectral(self) -> np.ndarray:
        return _modes_to_chains(self.spectral)

    @cached_property
    def chain_amplitudes(self) -> np.ndarray:
        return _to_space(self.chain_spectral)

    @property
    def bare_amplitudes(self) -> tuple[np.ndarray, np.ndarray]:
        """(excited, ground) spatial amplitudes per chain, each shape (n, H)."""
        plus, minus = self.chain_amplitudes
        return (plus + minus) / math.sqrt(2.0), (plus - minus) / math.sqrt(2.0)

    def norm(self) -> float:
        return float(np.sum(np.abs(self.spectral) ** 2))

    def amplitude_norm(self) -> float:
        """sum over s, q, p, x of |Phi^s_qp|^2 (equals n times :meth:`norm`)."""
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def relabel_chains(self, shift: int = 1) -> "PacketState":
        """Cyclic relabelling of the chains, chain p -> p + shift (mod n)."""
        chains = np.roll(self.chain_spectral, shift, axis=1)
        return PacketState(_chains_to_modes(chains), self.time)


def _evaluate_envelope(cfg: TubeConfig, envelope, name: str) -> np.ndarray:
    values = envelope(cfg.h_grid) if callable(envelope) else envelope
    values = np.asarray(values, dtype=complex)
    try:
        return np.array(np.broadcast_to(values, (cfg.n, cfg.size)))
    except ValueError:
        raise DomainError(f"{name} must give shape (n, H) = ({cfg.n}, {cfg.size})") from None


def build_initial_packet(cfg: TubeConfig, envelope, ground_envelope=None, *,
                         band_limit_tol: float | None = 1e-8) -> PacketState:
    """Normalized packet with the given per-chain spectral envelopes.

    ``envelope`` (and optionally ``ground_envelope``) map the h grid to a
    complex array of shape (n, H): the excited (ground) level amplitude on
    each chain. Arrays are accepted in place of callables. The envelope must
    be negligible on the outermost grid bins (band-limit guard) unless
    ``band_limit_tol`` is None.
    """
    excited = _evaluate_envelope(cfg, envelope, "envelope")
    ground = (np.zeros_like(excited) if ground_envelope is None
              else _evaluate_envelope(cfg, ground_envelope, "ground_envelope"))
    if not (np.all(np.isfinite(excited)) and np.all(np.isfinite(ground))):
        raise DomainError("envelope is not finite on the h grid")
    total = float(np.sum(np.abs(excited) ** 2) + np.sum(np.abs(ground) ** 2))
    if total == 0.0:
        raise DomainError("envelope has zero norm")
    if band_limit_tol is not None:
        peak = max(np.abs(excited).max(), np.abs(ground).max())
        edge = max(np.abs(excited[:, [0, -1]]).max(), np.abs(ground[:, [0, -1]]).max())
        if edge > band_limit_tol * peak:
            raise AliasingError(
                f"envelope not band-limited: edge/peak = {edge / peak:.3e} > {band_limit_tol:g}; "
                "widen the h grid")
    dressed = np.stack([excited + ground, excited - ground]) / math.sqrt(2.0)
    spectral = _chains_to_modes(dressed) / math.sqrt(total)
    return PacketState(spectral=spectral, time=0.0)


def evolve(state: PacketState, cfg: TubeConfig, t: float) -> PacketState:
    """Advance the packet by the duration ``t`` (pure spectral phase)."""
    if t < 0:
        raise DomainError("evolution time must be non-negative")
    omega = cfg.mode_frequencies
    if omega.shape != state.spectral.shape:
        raise DomainError(f"state shape {state.spectral.shape} does not match config {omega.shape}")
    return PacketState(spectral=state.spectral * np.exp(1j * t * omega), time=state.time + t)


# --- inversion ---------------------------------------------------------------

def _check_normalized(state: PacketState):
    norm = state.norm()
    if abs(norm - 1.0) > NORM_TOL:
        raise NormalizationError(f"state norm is {norm:.12g}, expected 1")


def inversion(state: PacketState) -> np.ndarray:
    """Integral population inversion of every chain, values in [-1, 1].

    A chain that carries no population has an undefined inversion (NaN).
    """
    _check_normalized(state)
    excited, ground = state.bare_amplitudes
    pe = np.sum(np.abs(excited) ** 2, axis=-1)
    pg = np.sum(np.abs(ground) ** 2, axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(pe + pg > 0, (pe - pg) / (pe + pg), np.nan)


def total_inversion(state: PacketState) -> float:
    _check_normalized(state)
    excited, ground = state.bare_amplitudes
    return float(np.sum(np.abs(excited) ** 2) - np.sum(np.abs(ground) ** 2))


@dataclass(frozen=True, eq=False)
class InversionTrace:
    times: np.ndarray
    per_chain: np.ndarray  # (T, n)
    total: np.ndarray  # (T,)


def inversion_trace(state: PacketState, cfg: TubeConfig, durations, *,
                    chunk: int = 32) -> InversionTrace:
    """Inversion after each duration in ``durations`` (measured from ``state``).

    Evaluated in h-space via Parseval, which avoids building the spatial
    packet at every sample.
    """
    _check_normalized(state)
    durations = np.asarray(durations, dtype=float)
    if durations.ndim != 1 or np.any(durations < 0):
        raise DomainError("durations must be a 1-D array of non-negative times")
    omega = cfg.mode_frequencies
    if omega.shape != state.spectral.shape:
        raise DomainError(f"state shape {state.spectral.shape} does not match config {omega.shape}")
    # bins with exactly zero amplitude drop out of every Parseval sum
    active = np.any(state.spectral != 0, axis=(0, 1))
    spectral, omega = state.spectral[..., active], omega[..., active]
    per_chain = np.empty((durations.size, cfg.n))
    total = np.empty(durations.size)
    for start in range(0, durations.size, chunk):
        ts = durations[start:start + chunk]
        theta = spectral[None] * np.exp(1j * ts[:, None, None, None] * omega[None])
        chains = _modes_to_chains(theta)  # (C, 2, n, H)
        plus, minus = chains[:, 0], chains[:, 1]
        cross = 2.0 * np.sum(plus * minus.conj(), axis=-1).real
        pop = np.sum(np.abs(plus) ** 2 + np.abs(minus) ** 2, axis=-1)
        with np.errstate(invalid="ignore", divide="ignore"):
            per_chain[start:start + ts.size] = np.where(pop > 0, cross / pop, np.nan)
        total[start:start + ts.size] = cross.sum(axis=-1) / pop.sum(axis=-1)
    return InversionTrace(times=state.time + durations, per_chain=per_chain, total=total)


# --- spectrum ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Spectrum:
    frequencies: np.ndarray
    magnitude: np.ndarray
    peak_frequencies: np.ndarray
    peak_magnitudes: np.ndarray
    resolution: float

    @property
    def dominant_frequency(self) -> float:
        """Largest non-zero-frequency peak; DC only when nothing else qualifies."""
        ac = self.peak_frequencies > 0
        if np.any(ac):
            return float(self.peak_frequencies[ac][np.argmax(self.peak_magnitudes[ac])])
        if self.peak_frequencies.size:
            return float(self.peak_frequencies[0])
        return math.nan

    @property
    def revival_frequencies(self) -> np.ndarray:
        """Secondary peaks above the dominant Rabi peak."""
        return self.peak_frequencies[self.peak_frequencies > self.dominant_frequency]


def _local_maxima(mag: np.ndarray, threshold: float) -> np.ndarray:
    if mag.size == 1:
        return np.array([0])
    left = np.concatenate([[-np.inf], mag[:-1]])
    right = np.concatenate([mag[1:], [-np.inf]])
    is_peak = (mag > left) & (mag >= right) & (mag >= threshold)
    return np.flatnonzero(is_peak)


def revival_spectrum(history, sample_rate: float, *, max_frequency: float | None = None,
                     min_frequency: float | None = None, threshold: float = 0.05,
                     window: str | None = "hann") -> Spectrum:
    """Magnitude spectrum of a uniformly sampled inversion history.

    ``max_frequency`` [Hz] (see :func:`nyquist_frequency_bound`) enables the
    aliasing check; ``min_frequency`` requires at least two periods of the
    slowest component. Peaks are local maxima above ``threshold`` times the
    spectrum maximum.
    """
    x = np.asarray(history, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise DomainError("history must be a 1-D series with at least two samples")
    if not sample_rate > 0:
        raise DomainError("sample rate must be positive")
    if max_frequency is not None and sample_rate <= 2.0 * max_frequency:
        raise AliasingError(
            f"sample rate {sample_rate:g} Hz does not exceed twice the highest "
            f"frequency {max_frequency:g} Hz")
    duration = x.size / sample_rate
    if min_frequency is not None and duration < 2.0 / min_frequency:
        raise DomainError(f"history spans {duration:g} s, need two periods ({2.0 / min_frequency:g} s)")
    w = np.hanning(x.size) if window == "hann" else np.ones(x.size)
    if window not in ("hann", None):
        raise DomainError(f"unknown window {window!r}")
    mag = np.abs(np.fft.rfft(x * w)) / np.sum(w)
    freqs = np.fft.rfftfreq(x.size, d=1.0 / sample_rate)
    top = float(mag.max())
    idx = _local_maxima(mag, threshold * top) if top > 0 else np.array([], dtype=int)
    return Spectrum(frequencies=freqs, magnitude=mag, peak_frequencies=freqs[idx],
                    peak_magnitudes=mag[idx], resolution=sample_rate / x.size)


def gaussian_envelope(center: float, width: float, chains=(0,), n: int = 1):
    """Envelope callable: Gaussian in h on the listed chains, zero elsewhere."""
    weights = np.zeros(n)
    weights[list(chains)] = 1.0

    def envelope(h):
        profile = np.exp(-0.5 * ((np.asarray(h) - center) / width) ** 2)
        return weights[:, None] * profile[None, :]

    return envelope


def simulate(cfg: TubeConfig, envelope, duration: float, sample_rate: float, **spectrum_kw):
    """Build the packet, sample its inversion over ``duration`` and take the spectrum of the total."""
    state = build_initial_packet(cfg, envelope)
    count = int(round(duration * sample_rate))
    if count < 2:
        raise DomainError("duration * sample_rate must give at least two samples")
    times = np.arange(count) / sample_rate
    trace = inversion_trace(state, cfg, times)
    spectrum = revival_spectrum(trace.total, sample_rate,
                                max_frequency=nyquist_frequency_bound(cfg), **spectrum_kw)
    return trace, spectrum
