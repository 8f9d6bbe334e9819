import dataclasses
import json

import numpy as np
import pytest
from scipy.linalg import toeplitz

from specreg import (
    InvalidArgumentError,
    SceneSpec,
    SpectralMode,
    SynthesisError,
    build_truth_sheet,
    default_scene,
    fig1_like_scene,
    sample_scene,
)
from specreg.scene import canonical_scene_text


def small_scene(modes, noise_floor=0.0, m=None, n=4, q=256, seed=7):
    m = m if m is not None else len(modes)
    return SceneSpec(m=m, n=n, q=q, modes=tuple(tuple(b) for b in modes),
                     noise_floor=noise_floor, seed=seed)


class TestTruthSheet:
    def test_single_mode_integrates_to_power(self):
        spec = small_scene([[SpectralMode(0.3, 0.02, 1.0)]])
        sheet = build_truth_sheet(spec)
        assert sheet.values[0].mean() == pytest.approx(1.0, rel=1e-9)

    def test_noise_floor_only_is_constant(self):
        spec = small_scene([[]], noise_floor=1.0)
        sheet = build_truth_sheet(spec)
        assert np.allclose(sheet.values[0], 1.0)

    def test_all_rows_integrate_to_bin_power(self, fig_scene):
        sheet = build_truth_sheet(fig_scene)
        for b in range(fig_scene.m):
            assert sheet.values[b].mean() == pytest.approx(
                fig_scene.bin_power(b), rel=1e-9)

    def test_default_scene_structure(self, fig_scene):
        assert fig_scene.m == 110 and fig_scene.n == 8 and fig_scene.q == 1024
        ground = {b + 1 for b in range(fig_scene.m)
                  if any(md.center == 0.0 for md in fig_scene.modes[b])}
        assert ground == set(range(15, 58))
        rain = {b + 1 for b in range(fig_scene.m)
                if any(0.1 < md.center < 0.35 for md in fig_scene.modes[b])}
        assert rain == set(range(35, 76))
        sea = {b + 1 for b in range(fig_scene.m)
               if sum(md.center > 0.5 for md in fig_scene.modes[b]) == 2}
        assert sea == set(range(56, 96))

    def test_too_narrow_mode_rejected(self):
        spec = small_scene([[SpectralMode(0.31243, 1e-9, 1.0)]], q=64)
        with pytest.raises(InvalidArgumentError):
            build_truth_sheet(spec)


class TestSampling:
    def test_fixed_seed_reproducible(self, fig_scene):
        a = sample_scene(fig_scene)
        b = sample_scene(fig_scene)
        assert np.array_equal(a.bins, b.bins)

    def test_different_seed_differs(self, fig_scene):
        other = dataclasses.replace(fig_scene, seed=fig_scene.seed + 1)
        assert not np.array_equal(sample_scene(fig_scene).bins, sample_scene(other).bins)

    def test_truth_attached(self, fig_dataset, fig_scene):
        assert fig_dataset.truth is not None
        assert fig_dataset.truth.values.shape == (fig_scene.m, fig_scene.q)

    def test_covariances_hermitian_toeplitz_psd(self, fig_scene):
        sheet = build_truth_sheet(fig_scene)
        acov = np.fft.ifft(sheet.values, axis=1)[:, : fig_scene.n]
        for b in range(0, fig_scene.m, 11):
            first = acov[b].copy()
            first[0] = first[0].real
            cov = toeplitz(first, np.conj(first))
            assert np.allclose(cov, cov.conj().T, rtol=0, atol=1e-12 * abs(cov[0, 0]))
            eigs = np.linalg.eigvalsh(cov)
            assert eigs.min() >= -1e-10 * np.real(np.trace(cov))

    def test_power_conservation_monte_carlo(self):
        # 10^4 independent white bins of unit power: lag-0 sample autocovariance
        spec = small_scene([[] for _ in range(10_000)], noise_floor=1.0, n=8, q=64)
        data = sample_scene(spec)
        lag0 = float(np.mean(np.abs(data.bins) ** 2))
        assert 0.97 <= lag0 <= 1.03

    def test_narrow_mode_peak_location_monte_carlo(self):
        # averaged periodogram over 10^4 draws peaks within 1/Q of the center
        q = 1024
        draws = 10_000
        spec = small_scene([[SpectralMode(0.25, 0.005, 1.0)] for _ in range(draws)],
                           noise_floor=0.0, n=8, q=q)
        data = sample_scene(spec)
        accum = np.zeros(q)
        for lo in range(0, draws, 2000):
            chunk = data.bins[lo:lo + 2000]
            accum += np.sum(np.abs(np.fft.fft(chunk, n=q, axis=1)) ** 2, axis=0)
        peak = np.argmax(accum) / q
        assert abs(peak - 0.25) <= 1.0 / q

    def test_synthesis_failure_reports_bin(self, monkeypatch):
        def always_fail(_):
            raise np.linalg.LinAlgError("not positive definite")

        monkeypatch.setattr(np.linalg, "cholesky", always_fail)
        spec = small_scene([[], []], noise_floor=1.0)
        with pytest.raises(SynthesisError, match="bin 1"):
            sample_scene(spec)


class TestSceneSpecJson:
    def test_round_trip(self, fig_scene):
        again = SceneSpec.from_json(json.loads(canonical_scene_text(fig_scene)))
        assert again == fig_scene

    def test_committed_file_matches_generator(self, fig_scene):
        assert fig_scene == fig1_like_scene()
        assert default_scene() == fig1_like_scene()

    @pytest.mark.parametrize("mutate, field", [
        (lambda o: o.pop("noiseFloor"), "noiseFloor"),
        (lambda o: o.update(noiseFloor=-1.0), "noiseFloor"),
        (lambda o: o.update(M="ten"), "M"),
        (lambda o: o.update(modes=3), "modes"),
        (lambda o: o["modes"][0].append({"center": 2.0, "width": 0.1, "power": 1.0}),
         "center"),
    ])
    def test_validation_names_offending_field(self, mutate, field):
        obj = json.loads(canonical_scene_text(small_scene([[SpectralMode(0.1, 0.05, 1.0)]])))
        mutate(obj)
        with pytest.raises(InvalidArgumentError, match=field):
            SceneSpec.from_json(obj)
