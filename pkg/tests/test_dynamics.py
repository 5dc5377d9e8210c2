import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from nhscatter import (
    ALPHA,
    BETA,
    AsymmetricDimer,
    BoundaryContaminationError,
    DensityMatrix,
    DimerParams,
    Interferometer,
    LatticeSpec,
    OnSitePotential,
    Propagator,
    StateVector,
    WavePacketSpec,
    antisym_two_packets,
    build_hamiltonian,
    density_profile_series,
    evolve_density,
    evolve_state,
    gaussian_packet,
    mixed_state_uniform,
    profile,
    seed_state,
    site_order,
    site_to_index,
    split_probability,
    transit_metrics,
    write_frames_csv,
    write_metrics_txt,
)

UNIFORM = AsymmetricDimer(1.0, 1.0)


class TestWavePacketSpec:
    def test_half_width_round_trip(self):
        spec = WavePacketSpec(site=-60, k0=math.pi / 2, lam=0.15)
        again = WavePacketSpec.from_half_width(-60, math.pi / 2, spec.half_width)
        assert again.lam == pytest.approx(0.15, rel=1e-12)

    def test_half_width_value(self):
        # lam = 0.15 puts the probability half-width near 11 sites
        assert WavePacketSpec(0, 0.0, 0.15).half_width == pytest.approx(11.1, abs=0.1)

    def test_rejects_bad_width(self):
        with pytest.raises(ValueError):
            WavePacketSpec(0, 0.0, 0.0)


class TestGaussianPacket:
    lat = LatticeSpec(400, 400)

    def test_unit_norm(self):
        psi = gaussian_packet(self.lat, WavePacketSpec(-60, math.pi / 2, 0.15), UNIFORM)
        assert psi.norm() == pytest.approx(1.0, abs=1e-12)

    def test_mean_position(self):
        psi = gaussian_packet(self.lat, WavePacketSpec(-60, math.pi / 2, 0.15), UNIFORM)
        sites = np.array([s if isinstance(s, int) else 0 for s in site_order(UNIFORM, self.lat)])
        mean = float((sites * psi.probabilities()).sum())
        assert abs(mean + 60.0) < 0.5

    def test_mean_momentum_by_fourier(self):
        psi = gaussian_packet(self.lat, WavePacketSpec(-60, math.pi / 2, 0.15), UNIFORM)
        power = np.abs(np.fft.fft(psi.amplitudes)) ** 2
        ks = 2 * math.pi * np.fft.fftfreq(psi.amplitudes.size)
        mean_k = float((ks * power).sum() / power.sum())
        assert abs(mean_k - math.pi / 2) < 2 * math.pi / self.lat.left_len

    def test_zero_momentum_packet_is_real(self):
        psi = gaussian_packet(self.lat, WavePacketSpec(-60, 0.0, 0.15), UNIFORM)
        peak = psi.amplitudes[np.argmax(np.abs(psi.amplitudes))]
        aligned = psi.amplitudes * (abs(peak) / peak)
        assert np.max(np.abs(aligned.imag)) < 1e-12
        assert aligned.real.min() >= 0.0

    def test_zero_on_center_sites(self):
        center = AsymmetricDimer(0.5, 2.0)
        psi = gaussian_packet(self.lat, WavePacketSpec(-60, 1.0, 0.15), center)
        assert psi.site_amplitude(ALPHA) == 0
        assert psi.site_amplitude(BETA) == 0

    def test_clipped_tail_rejected(self):
        with pytest.raises(ValueError):
            gaussian_packet(LatticeSpec(50, 50), WavePacketSpec(-40, 1.0, 0.15), UNIFORM)


class TestSeedState:
    def test_plus_components(self):
        lat = LatticeSpec(5, 5)
        psi = seed_state(lat, DimerParams(-2.0, 0.5), +1)
        assert psi.site_amplitude(ALPHA) == 1.0
        assert psi.site_amplitude(BETA) == 0.5j
        assert np.count_nonzero(psi.amplitudes) == 2

    def test_minus_components(self):
        lat = LatticeSpec(5, 5)
        psi = seed_state(lat, DimerParams(-2.0, 0.5), -1)
        assert psi.site_amplitude(BETA) == -0.5j

    def test_zero_nu_is_bare_alpha(self):
        lat = LatticeSpec(5, 5)
        psi = seed_state(lat, DimerParams(1.0, 0.0), +1)
        assert psi.site_amplitude(ALPHA) == 1.0
        assert np.count_nonzero(psi.amplitudes) == 1

    def test_not_normalized(self):
        lat = LatticeSpec(5, 5)
        psi = seed_state(lat, DimerParams(-2.0, 0.5), -1)
        assert psi.norm() ** 2 == pytest.approx(1.25)

    def test_bad_sign(self):
        with pytest.raises(ValueError):
            seed_state(LatticeSpec(5, 5), DimerParams(1, 1), 0)


class TestAntisymTwoPackets:
    lat = LatticeSpec(400, 400)
    center = AsymmetricDimer(-2.0, 0.5)

    def test_partial_norms(self):
        psi = antisym_two_packets(self.lat, 60, math.pi / 2, 0.15, 0.5, self.center)
        ham = build_hamiltonian(self.center, self.lat)
        left, mid, right = split_probability(psi.probabilities(), ham.center_span)
        assert left == pytest.approx(1.0, abs=1e-12)
        assert right == pytest.approx(0.25, abs=1e-12)
        assert mid == 0.0

    def test_mirror_symmetry_of_magnitudes(self):
        psi = antisym_two_packets(self.lat, 60, math.pi / 2, 0.15, 0.5, self.center)
        mags = np.abs(psi.amplitudes)
        for j in range(1, 200):
            left = mags[site_to_index(self.lat, -j, self.center)]
            right = mags[site_to_index(self.lat, j, self.center)]
            assert right == pytest.approx(0.5 * left, abs=1e-12)

    def test_zero_weight_is_single_packet(self):
        psi = antisym_two_packets(self.lat, 60, math.pi / 2, 0.15, 0.0, self.center)
        single = gaussian_packet(self.lat, WavePacketSpec(-60, math.pi / 2, 0.15), self.center)
        assert np.array_equal(psi.amplitudes, single.amplitudes)

    def test_center_overlap_warns(self):
        small = LatticeSpec(60, 60)
        with pytest.warns(UserWarning):
            antisym_two_packets(small, 10, math.pi / 2, 0.15, 0.5, self.center)


class TestEvolveState:
    def test_time_zero_exact(self):
        lat = LatticeSpec(20, 20)
        ham = build_hamiltonian(UNIFORM, lat)
        psi0 = gaussian_packet(lat, WavePacketSpec(-10, 1.0, 0.6), UNIFORM)
        out = evolve_state(ham, psi0, [0.0])[0]
        assert np.array_equal(out.amplitudes, psi0.amplitudes)

    def test_hermitian_norm_conserved_to_t100(self):
        lat = LatticeSpec(150, 150)
        ham = build_hamiltonian(UNIFORM, lat)
        psi0 = gaussian_packet(lat, WavePacketSpec(-70, math.pi / 2, 0.15), UNIFORM)
        states = evolve_state(ham, psi0, np.arange(10.0, 101.0, 10.0))
        for s in states:
            assert abs(s.norm() - 1.0) < 1e-9

    def test_semigroup(self):
        lat = LatticeSpec(25, 25)
        ham = build_hamiltonian(AsymmetricDimer(-2.0, 0.5), lat)
        psi0 = seed_state(lat, DimerParams(-2.0, 0.5), +1)
        two_step = evolve_state(ham, evolve_state(ham, psi0, [30.0])[0], [17.0])[0]
        one_shot = evolve_state(ham, psi0, [47.0])[0]
        assert np.max(np.abs(two_step.amplitudes - one_shot.amplitudes)) < 1e-9

    def test_agrees_with_ode_oracle(self):
        lat = LatticeSpec(25, 25)
        ham = build_hamiltonian(AsymmetricDimer(-2.0, 0.5), lat)
        psi0 = seed_state(lat, DimerParams(-2.0, 0.5), +1)
        ours = evolve_state(ham, psi0, [50.0])[0]
        ref = oracles.ode_evolve(ham, psi0.amplitudes, 50.0)
        assert np.max(np.abs(ours.amplitudes - ref)) < 1e-8

    def test_eig_method_agrees(self):
        lat = LatticeSpec(25, 25)
        ham = build_hamiltonian(AsymmetricDimer(0.7, 1.9), lat)
        psi0 = gaussian_packet(lat, WavePacketSpec(-12, 1.2, 0.5), AsymmetricDimer(0.7, 1.9))
        a = evolve_state(ham, psi0, [5.0, 11.0])
        b = evolve_state(ham, psi0, [5.0, 11.0], method="eig")
        for x, y in zip(a, b):
            assert np.max(np.abs(x.amplitudes - y.amplitudes)) < 1e-9

    def test_dimension_mismatch(self):
        ham = build_hamiltonian(UNIFORM, LatticeSpec(5, 5))
        psi = gaussian_packet(LatticeSpec(6, 6), WavePacketSpec(-3, 1.0, 3.0), UNIFORM)
        with pytest.raises(ValueError):
            evolve_state(ham, psi, [1.0])

    def test_bad_times(self):
        lat = LatticeSpec(5, 5)
        ham = build_hamiltonian(UNIFORM, lat)
        psi = gaussian_packet(lat, WavePacketSpec(-3, 1.0, 3.0), UNIFORM)
        with pytest.raises(ValueError):
            evolve_state(ham, psi, [-1.0])
        with pytest.raises(ValueError):
            evolve_state(ham, psi, [2.0, 1.0])
        with pytest.raises(ValueError):
            evolve_state(ham, psi, [])

    def test_unknown_method(self):
        lat = LatticeSpec(5, 5)
        ham = build_hamiltonian(UNIFORM, lat)
        psi = gaussian_packet(lat, WavePacketSpec(-3, 1.0, 3.0), UNIFORM)
        with pytest.raises(ValueError):
            evolve_state(ham, psi, [1.0], method="magic")


class TestEvolveDensity:
    def test_pure_state_consistency(self):
        lat = LatticeSpec(20, 20)
        center = AsymmetricDimer(-2.0, 0.5)
        ham = build_hamiltonian(center, lat)
        psi0 = seed_state(lat, DimerParams(-2.0, 0.5), +1)
        rho0 = DensityMatrix(
            np.outer(psi0.amplitudes, psi0.amplitudes.conj()), center, lat
        )
        times = [3.0, 7.0]
        rhos = evolve_density(ham, rho0, times)
        psis = evolve_state(ham, psi0, times)
        for rho, psi in zip(rhos, psis):
            assert np.max(np.abs(np.diagonal(rho.entries).real - psi.probabilities())) < 1e-9

    def test_hermitian_trace_constant(self):
        lat = LatticeSpec(15, 15)
        ham = build_hamiltonian(UNIFORM, lat)
        rho0 = mixed_state_uniform(lat, UNIFORM, 10)
        for rho in evolve_density(ham, rho0, [5.0, 20.0, 60.0]):
            assert rho.trace() == pytest.approx(1.0, abs=1e-9)

    def test_stays_hermitian_psd_and_purity_bounded(self):
        lat = LatticeSpec(15, 15)
        center = AsymmetricDimer(2.0, 0.5)
        ham = build_hamiltonian(center, lat)
        rho0 = mixed_state_uniform(lat, center, 8)
        assert rho0.trace() == pytest.approx(1.0, abs=1e-12)
        evolved = evolve_density(ham, rho0, [12.0])[0]
        assert evolved.min_eigenvalue() > -1e-10
        assert evolved.purity() <= 1.0 + 1e-10

    def test_profile_series_matches_evolve_density(self):
        lat = LatticeSpec(15, 15)
        center = AsymmetricDimer(2.0, 0.5)
        ham = build_hamiltonian(center, lat)
        rho0 = mixed_state_uniform(lat, center, 8)
        times = [2.0, 9.0]
        frames = density_profile_series(ham, rho0, times)
        rhos = evolve_density(ham, rho0, times)
        for frame, rho in zip(frames, rhos):
            assert np.max(np.abs(frame.p - np.diagonal(rho.entries).real)) < 1e-12

    def test_incoherent_sum_oracle_agreement(self):
        n0 = 6
        lat = LatticeSpec(n0, 60, hard_wall_n0=n0)
        center = AsymmetricDimer(10.0, 0.1)
        ham = build_hamiltonian(center, lat)
        rho0 = mixed_state_uniform(lat, center, n0)
        times = [10.0, 40.0]
        ours = [f.total for f in density_profile_series(ham, rho0, times)]
        ref = oracles.incoherent_sum_probability(ham, lat, center, n0, times)
        assert np.max(np.abs(np.array(ours) - ref)) < 1e-9

    def test_rejects_non_hermitian_input(self):
        lat = LatticeSpec(3, 3)
        bad = np.zeros((8, 8), dtype=complex)
        bad[0, 1] = 1.0
        with pytest.raises(ValueError):
            DensityMatrix(bad, AsymmetricDimer(1, 1), lat)


class TestProfile:
    def test_unit_packet(self):
        lat = LatticeSpec(30, 30)
        psi = gaussian_packet(lat, WavePacketSpec(-15, 1.0, 0.4), UNIFORM)
        frame = profile(psi, 0.0)
        assert frame.total == pytest.approx(1.0, abs=1e-12)
        assert frame.t == 0.0
        assert frame.p.min() >= 0.0

    def test_seed_total(self):
        lat = LatticeSpec(5, 5)
        psi = seed_state(lat, DimerParams(-2.0, 0.5), -1)
        assert profile(psi, 0.0).total == pytest.approx(1.25)

    def test_density_profile(self):
        lat = LatticeSpec(5, 5)
        rho = mixed_state_uniform(lat, UNIFORM, 4)
        frame = profile(rho, 1.0)
        assert frame.total == pytest.approx(1.0)

    def test_rejects_other_types(self):
        with pytest.raises(TypeError):
            profile(np.zeros(4), 0.0)


class TestTransitMetrics:
    def _frames(self, center, lat, k0=math.pi / 2, t_max=40.0):
        ham = build_hamiltonian(center, lat)
        psi0 = gaussian_packet(lat, WavePacketSpec(-40, k0, 0.15), center)
        times = np.arange(0.0, t_max + 1.0, 1.0)
        return ham, Propagator(ham).frames(psi0, times)

    def test_uniform_chain_self_comparison(self):
        lat = LatticeSpec(160, 160)
        ham, frames = self._frames(UNIFORM, lat)
        m = transit_metrics(frames, ham.center_span)
        assert abs(m.gain - 1.0) < 1e-3
        assert m.distortion < 1e-3
        assert m.reflected < 1e-6

    def test_resonant_amplifier(self):
        lat = LatticeSpec(160, 160)
        center = Interferometer(-1.25, 0.75, math.pi / 4)
        ham, frames = self._frames(center, lat)
        _, ref = self._frames(UNIFORM, lat)
        m = transit_metrics(frames, ham.center_span, reference_frames=ref)
        assert m.gain == pytest.approx(4.0, rel=1e-6)
        assert m.distortion < 1e-10
        assert m.scale == pytest.approx(4.0, rel=1e-6)
        assert m.shift == 0

    def test_boundary_contamination_detected(self):
        lat = LatticeSpec(100, 100)
        ham = build_hamiltonian(UNIFORM, lat)
        psi0 = gaussian_packet(lat, WavePacketSpec(-60, math.pi / 2, 0.15), UNIFORM)
        times = np.arange(0.0, 81.0, 1.0)
        frames = Propagator(ham).frames(psi0, times)
        with pytest.raises(BoundaryContaminationError):
            transit_metrics(frames, ham.center_span)

    def test_mismatched_reference_rejected(self):
        lat = LatticeSpec(160, 160)
        ham, frames = self._frames(UNIFORM, lat)
        with pytest.raises(ValueError):
            transit_metrics(frames, ham.center_span, reference_frames=frames[:-1])


class TestFrameExport:
    def test_frames_csv(self, tmp_path):
        lat = LatticeSpec(3, 3)
        center = AsymmetricDimer(1.0, 1.0)
        psi = seed_state(lat, DimerParams(1.0, 1.0), +1)
        frames = [profile(psi, 0.0)]
        path = tmp_path / "frames.csv"
        write_frames_csv(path, frames, lat, center)
        lines = path.read_text().splitlines()
        assert lines[0] == "t,j,p"
        assert lines[1].startswith("0.0,-3,")
        assert any(line.startswith("0.0,alpha,") for line in lines)

    def test_metrics_txt(self, tmp_path):
        path = tmp_path / "metrics.txt"
        write_metrics_txt(path, {"gain": 4.0, "note": "ok"})
        text = path.read_text()
        assert "gain = 4.0" in text
        assert "note = 'ok'" in text
