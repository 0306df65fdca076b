"""Synchronous uplink multiuser MIMO signal generation.

``r(i) = sum_k A_k h_k(i) b_k(i) + n(i)`` with BPSK symbols, flat
Rayleigh fading and circular complex Gaussian noise.  Each fading element
``h_{k,f}`` is its own sum-of-sinusoids process (random arrival-angle
offset and random phases per oscillator), so elements are mutually
independent while each has the Clarke/Jakes autocorrelation
``J0(2 pi fd Ts tau)`` and unit power.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

NUM_OSCILLATORS = 16
#: Symbols evaluated per vectorized chunk when generating long trajectories.
CHUNK = 256


@dataclass(frozen=True)
class ChannelConfig:
    num_users: int
    num_antennas: int
    noise_variance: float
    normalized_doppler: float = 1e-5
    amplitudes: tuple = None
    seed: int = 0
    fading_power: float = 1.0  # per-element variance of h_{k,f}

    def __post_init__(self):
        if not 1 <= self.num_users <= self.num_antennas:
            raise ValueError(f"need 1 <= K <= M, got K={self.num_users}, M={self.num_antennas}")
        if not self.noise_variance > 0:
            raise ValueError(f"noise_variance must be positive, got {self.noise_variance}")
        if not self.fading_power > 0:
            raise ValueError(f"fading_power must be positive, got {self.fading_power}")
        if not self.normalized_doppler >= 0:
            raise ValueError(f"normalized_doppler must be >= 0, got {self.normalized_doppler}")
        amps = (1.0,) * self.num_users if self.amplitudes is None else tuple(float(a) for a in self.amplitudes)
        if len(amps) != self.num_users or any(not a > 0 for a in amps):
            raise ValueError(f"need {self.num_users} positive amplitudes, got {amps}")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_snr(cls, num_users, num_antennas, snr_db, **kwargs):
        """Noise variance from ``SNR = A_1^2 / sigma^2`` in dB."""
        amps = kwargs.get("amplitudes")
        a1 = 1.0 if amps is None else float(amps[0])
        return cls(num_users, num_antennas, a1 * a1 / 10.0 ** (snr_db / 10.0), **kwargs)

    @property
    def snr_db(self) -> float:
        return 10.0 * math.log10(self.amplitudes[0] ** 2 / self.noise_variance)

    @property
    def noise_std(self) -> float:
        return math.sqrt(self.noise_variance)


@dataclass(frozen=True)
class Oscillators:
    """Per-element sinusoid frequencies (rad/symbol) and phases.

    Arrays have shape ``(K, M, NUM_OSCILLATORS)``.
    """

    freq_re: np.ndarray
    freq_im: np.ndarray
    phase_re: np.ndarray
    phase_im: np.ndarray
    gain: float = 1.0

    @classmethod
    def draw(cls, num_users, num_antennas, normalized_doppler, rng, n=NUM_OSCILLATORS, power=1.0):
        shape = (num_users, num_antennas)
        # Real and imaginary parts are separate real processes, each with its
        # own arrival-angle offset.  Offsets sit in evenly spaced slots so no
        # two processes share a frequency set; shared sets would keep distinct
        # elements correlated over any finite averaging window.
        count = 2 * num_users * num_antennas
        slots = (rng.permutation(count) + rng.uniform()) / count
        theta = (2.0 * math.pi * slots - math.pi).reshape((2,) + shape + (1,))
        idx = np.arange(1, n + 1)
        alpha = (2.0 * math.pi * idx - math.pi + theta) / (4.0 * n)
        freq = 2.0 * math.pi * normalized_doppler * np.cos(alpha)
        phase = rng.uniform(-math.pi, math.pi, size=(2,) + shape + (n,))
        return cls(freq[0], freq[1], phase[0], phase[1], math.sqrt(power))

    def evaluate(self, times) -> np.ndarray:
        """Fading coefficients at the given symbol times, shape ``(T, K, M)``."""
        t = np.asarray(times, dtype=float)[:, None, None, None]
        n = self.freq_re.shape[-1]
        re = np.cos(t * self.freq_re + self.phase_re).sum(axis=-1)
        im = np.cos(t * self.freq_im + self.phase_im).sum(axis=-1)
        return (re + 1j * im) * (self.gain / math.sqrt(n))


@dataclass(frozen=True)
class ChannelState:
    """Fading vectors ``h_k(i)`` (row ``k`` of `fading`) at symbol `index`."""

    index: int
    fading: np.ndarray
    oscillators: Oscillators = field(repr=False)


class SymbolFrame(NamedTuple):
    symbols: np.ndarray  # (K,) entries +-1
    noise: np.ndarray  # (M,)
    received: np.ndarray  # (M,)


class Block(NamedTuple):
    """A run of consecutive symbols; leading axis is time."""

    fading: np.ndarray  # (N, K, M)
    symbols: np.ndarray  # (N, K)
    noise: np.ndarray  # (N, M)
    received: np.ndarray  # (N, M)


class RunStreams(NamedTuple):
    channel: np.random.Generator
    symbols: np.random.Generator
    noise: np.random.Generator

    @classmethod
    def from_seed(cls, *key):
        """Independent generators for each purpose, derived from an integer key."""
        children = np.random.SeedSequence([int(k) for k in key]).spawn(3)
        return cls(*(np.random.default_rng(c) for c in children))


def initial_state(config: ChannelConfig, rng=None) -> ChannelState:
    """Draw oscillators and return the channel at symbol 0."""
    if rng is None:
        rng = RunStreams.from_seed(config.seed).channel
    osc = Oscillators.draw(
        config.num_users, config.num_antennas, config.normalized_doppler, rng, power=config.fading_power
    )
    return ChannelState(0, osc.evaluate([0])[0], osc)


def advance_channel(state: ChannelState, config: ChannelConfig = None) -> ChannelState:
    """Channel at the next symbol.

    The oscillators fixed at :func:`initial_state` carry the Doppler rate,
    so `config` is accepted only for symmetry with :func:`emit_frame`.
    """
    i = state.index + 1
    return ChannelState(i, state.oscillators.evaluate([i])[0], state.oscillators)


def assemble(fading, symbols, amplitudes, noise) -> np.ndarray:
    """``sum_k A_k h_k b_k + n`` over the last user axis, users added in order."""
    fading = np.asarray(fading)
    symbols = np.asarray(symbols)
    r = np.zeros(fading.shape[:-2] + fading.shape[-1:], dtype=np.complex128)
    for k, a in enumerate(amplitudes):
        r = r + (a * symbols[..., k])[..., None] * fading[..., k, :]
    return r + noise


def draw_symbols(rng, shape) -> np.ndarray:
    return np.where(rng.random(shape) < 0.5, -1, 1).astype(np.int8)


def draw_noise(rng, shape, variance) -> np.ndarray:
    std = math.sqrt(variance / 2.0)
    return std * rng.standard_normal(shape) + 1j * (std * rng.standard_normal(shape))


def emit_frame(state: ChannelState, config: ChannelConfig, rng, noise_rng=None) -> SymbolFrame:
    """Draw symbols and noise for one symbol period and form ``r``.

    Symbols come from `rng`, noise from `noise_rng` (defaults to `rng`).
    """
    noise_rng = rng if noise_rng is None else noise_rng
    b = draw_symbols(rng, config.num_users)
    n = draw_noise(noise_rng, config.num_antennas, config.noise_variance)
    return SymbolFrame(b, n, assemble(state.fading, b, config.amplitudes, n))


def fading_trajectory(oscillators: Oscillators, start: int, length: int) -> np.ndarray:
    out = []
    for t0 in range(start, start + length, CHUNK):
        out.append(oscillators.evaluate(np.arange(t0, min(t0 + CHUNK, start + length))))
    return np.concatenate(out, axis=0)


def simulate(config: ChannelConfig, length: int, streams: RunStreams) -> Block:
    """Generate `length` consecutive symbol periods from independent streams."""
    osc = Oscillators.draw(
        config.num_users, config.num_antennas, config.normalized_doppler, streams.channel, power=config.fading_power
    )
    h = fading_trajectory(osc, 0, length)
    b = draw_symbols(streams.symbols, (length, config.num_users))
    n = draw_noise(streams.noise, (length, config.num_antennas), config.noise_variance)
    return Block(h, b, n, assemble(h, b, config.amplitudes, n))
