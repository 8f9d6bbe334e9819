"""Synthetic multi-bin Doppler scenes with known ground-truth spectra.

A scene lists, per range bin, a set of wrapped-Gaussian spectral modes plus
a common white noise floor. Sampling draws each bin from the zero-mean
circular complex Gaussian whose Toeplitz covariance matches the truth PSD.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources

import numpy as np
from scipy.linalg import toeplitz

from .errors import InvalidArgumentError, SynthesisError
from .types import RangeBinDataset, SpectrumSheet

_UINT64_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class SpectralMode:
    center: float   # nu0 in [0, 1)
    width: float    # spectral standard deviation, > 0
    power: float    # integrated power of the mode, > 0

    def __post_init__(self):
        if not 0.0 <= self.center < 1.0:
            raise InvalidArgumentError("mode field 'center' must lie in [0, 1)")
        if not self.width > 0:
            raise InvalidArgumentError("mode field 'width' must be > 0")
        if not self.power > 0:
            raise InvalidArgumentError("mode field 'power' must be > 0")


@dataclass(frozen=True)
class SceneSpec:
    m: int
    n: int
    q: int
    modes: tuple[tuple[SpectralMode, ...], ...]
    noise_floor: float
    seed: int

    def __post_init__(self):
        if self.m < 1:
            raise InvalidArgumentError("scene field 'M' must be >= 1")
        if self.n < 2:
            raise InvalidArgumentError("scene field 'N' must be >= 2")
        if self.q < 2:
            raise InvalidArgumentError("scene field 'Q' must be >= 2")
        if self.noise_floor < 0:
            raise InvalidArgumentError("scene field 'noiseFloor' must be >= 0")
        if len(self.modes) != self.m:
            raise InvalidArgumentError("scene field 'modes' must list one entry per bin")
        for b, bin_modes in enumerate(self.modes):
            if self.noise_floor + sum(md.power for md in bin_modes) <= 0:
                raise InvalidArgumentError(f"bin {b + 1}: total power must be > 0")

    def bin_power(self, b: int) -> float:
        """Total truth power of bin b (0-based)."""
        return self.noise_floor + sum(md.power for md in self.modes[b])

    def to_json(self) -> dict:
        return {
            "M": self.m,
            "N": self.n,
            "Q": self.q,
            "seed": self.seed,
            "noiseFloor": self.noise_floor,
            "modes": [
                [{"center": md.center, "width": md.width, "power": md.power}
                 for md in bin_modes]
                for bin_modes in self.modes
            ],
        }

    @classmethod
    def from_json(cls, obj) -> "SceneSpec":
        if not isinstance(obj, dict):
            raise InvalidArgumentError("scene file must hold a JSON object")
        for key in ("M", "N", "Q", "seed", "noiseFloor", "modes"):
            if key not in obj:
                raise InvalidArgumentError(f"scene field '{key}' is missing")
        for key in ("M", "N", "Q", "seed"):
            if not isinstance(obj[key], int):
                raise InvalidArgumentError(f"scene field '{key}' must be an integer")
        if not isinstance(obj["noiseFloor"], (int, float)):
            raise InvalidArgumentError("scene field 'noiseFloor' must be a number")
        if not isinstance(obj["modes"], list):
            raise InvalidArgumentError("scene field 'modes' must be a list")
        modes = []
        for b, bin_modes in enumerate(obj["modes"]):
            if not isinstance(bin_modes, list):
                raise InvalidArgumentError(f"scene field 'modes[{b}]' must be a list")
            parsed = []
            for md in bin_modes:
                if not isinstance(md, dict) or not {"center", "width", "power"} <= md.keys():
                    raise InvalidArgumentError(
                        f"scene field 'modes[{b}]' entries need center/width/power")
                parsed.append(SpectralMode(float(md["center"]), float(md["width"]),
                                           float(md["power"])))
            modes.append(tuple(parsed))
        return cls(
            m=obj["M"], n=obj["N"], q=obj["Q"], modes=tuple(modes),
            noise_floor=float(obj["noiseFloor"]), seed=obj["seed"],
        )


def canonical_scene_text(spec: SceneSpec) -> str:
    """Whitespace-free, key-sorted JSON used for hashing and the shipped file."""
    return json.dumps(spec.to_json(), sort_keys=True, separators=(",", ":"))


def _wrapped_bump(nu: np.ndarray, center: float, width: float) -> np.ndarray:
    wraps = int(math.ceil(6.0 * width)) + 2
    out = np.zeros_like(nu)
    for j in range(-wraps, wraps + 1):
        z = (nu - center + j) / width
        out += np.exp(-0.5 * z * z)
    return out


def build_truth_sheet(spec: SceneSpec) -> SpectrumSheet:
    """Truth PSD rows; each row's grid mean (= its [0,1) integral) equals the
    bin's specified total power by construction."""
    nu = np.arange(spec.q) / spec.q
    rows = np.full((spec.m, spec.q), float(spec.noise_floor))
    for b, bin_modes in enumerate(spec.modes):
        for md in bin_modes:
            bump = _wrapped_bump(nu, md.center, md.width)
            mean = bump.mean()
            if mean <= 0:
                raise InvalidArgumentError(
                    f"bin {b + 1}: mode at {md.center} is too narrow for the Q={spec.q} grid")
            rows[b] += bump * (md.power / mean)
    return SpectrumSheet(rows)


def _bin_rng(seed: int, b: int) -> np.random.Generator:
    # Counter-based generator keyed by (seed, bin): bins get independent,
    # platform-stable substreams and may be sampled in any order.
    key = np.array([seed & _UINT64_MASK, b], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_scene(spec: SceneSpec) -> RangeBinDataset:
    """Draw the dataset: bin b ~ CN(0, Toeplitz(acov_b)) with acov the inverse
    DFT of the truth PSD row. The truth sheet is attached to the dataset."""
    truth = build_truth_sheet(spec)
    acov = np.fft.ifft(truth.values, axis=1)[:, : spec.n]
    bins = np.empty((spec.m, spec.n), dtype=complex)
    for b in range(spec.m):
        first = acov[b].copy()
        first[0] = first[0].real
        cov = toeplitz(first, np.conj(first))
        cov = 0.5 * (cov + cov.conj().T)
        try:
            chol = np.linalg.cholesky(cov)
        except np.linalg.LinAlgError:
            jitter = 1e-10 * float(np.real(np.trace(cov))) / spec.n
            try:
                chol = np.linalg.cholesky(cov + jitter * np.eye(spec.n))
            except np.linalg.LinAlgError as exc:
                raise SynthesisError(
                    f"bin {b + 1}: covariance not positive definite after jitter") from exc
        z = _bin_rng(spec.seed, b).standard_normal((2, spec.n))
        bins[b] = chol @ ((z[0] + 1j * z[1]) / math.sqrt(2.0))
    return RangeBinDataset(bins, truth=truth)


def _taper(b: int, start: int, stop: int, ramp: int) -> float:
    """Power profile over 1-based bins [start, stop]: flat top, sin^2 ramps."""
    if not start <= b <= stop:
        return 0.0
    val = 1.0
    d_in = b - start + 1
    d_out = stop - b + 1
    if d_in <= ramp:
        val *= math.sin(0.5 * math.pi * d_in / (ramp + 1)) ** 2
    if d_out <= ramp:
        val *= math.sin(0.5 * math.pi * d_out / (ramp + 1)) ** 2
    return val


def fig1_like_scene(seed: int = 314159) -> SceneSpec:
    """Default 110-bin demo scene: narrow zero-centered ground clutter
    (bins 15-57), broad drifting rain (35-75), bimodal sea echo (56-95).

    Only the qualitative structure is prescribed; the numeric parameters are
    this repo's versioned choice (see data/fig1_like.json). Powers are in
    arbitrary linear units at radar-like magnitudes (peak clutter 1e16, 23 dB
    over the white floor) rather than normalized to one.
    """
    m, n, q = 110, 8, 1024
    scale = 1e16
    modes: list[tuple[SpectralMode, ...]] = []
    for b in range(1, m + 1):
        bin_modes: list[SpectralMode] = []
        g = _taper(b, 15, 57, 3)
        if g > 0:
            bin_modes.append(SpectralMode(center=0.0, width=0.016, power=scale * g))
        r = _taper(b, 35, 75, 6)
        if r > 0:
            u = (b - 35) / 40.0
            bin_modes.append(SpectralMode(
                center=0.18 + 0.10 * u, width=0.045 + 0.025 * u, power=0.6 * scale * r))
        s = _taper(b, 56, 95, 6)
        if s > 0:
            u = (b - 56) / 39.0
            bin_modes.append(SpectralMode(
                center=0.60 + 0.04 * u, width=0.020, power=0.40 * scale * s))
            bin_modes.append(SpectralMode(
                center=0.74 + 0.03 * u, width=0.024, power=0.28 * scale * s))
        modes.append(tuple(bin_modes))
    return SceneSpec(m=m, n=n, q=q, modes=tuple(modes),
                     noise_floor=0.05 * scale, seed=seed)


def default_scene() -> SceneSpec:
    """The committed Fig1-like scene shipped with the package."""
    text = resources.files("specreg.data").joinpath("fig1_like.json").read_text()
    return SceneSpec.from_json(json.loads(text))


def load_scene(path) -> SceneSpec:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidArgumentError(f"scene file is not valid JSON: {exc}") from exc
    return SceneSpec.from_json(obj)
