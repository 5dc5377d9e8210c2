"""Named, reproducible experiment scenarios with INI configs and CSV outputs.

Each run writes one output directory containing a config snapshot, the data
files of the scenario, and a manifest (JSON) listing every built-in assertion
with its measured value and threshold. Identical configs produce bit-identical
CSVs: floats are written via repr and nothing time-dependent enters the data
files.
"""

import dataclasses
import json
import math
import time
import types
import typing
from configparser import ConfigParser
from dataclasses import dataclass, field
from io import StringIO
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import (
    Propagator,
    WavePacketSpec,
    antisym_two_packets,
    check_boundaries,
    density_profile_series,
    gaussian_packet,
    mixed_state_uniform,
    seed_state,
    split_probability,
    transit_metrics,
    write_frames_csv,
    write_metrics_txt,
)
from .lattice import (
    DIMER_REDUCTION_PHI,
    AsymmetricDimer,
    CenterSpec,
    DimerParams,
    Interferometer,
    LatticeSpec,
    OnSitePotential,
    build_hamiltonian,
    dimer_from_interferometer,
    site_order,
)
from .scattering import (
    LEFT,
    RIGHT,
    amplification_coefficient,
    dimer_amplitudes,
    onsite_amplitudes,
    scattering_residual,
    singular_wavefunction,
    sweep_rows,
    write_sweep_csv,
)
from .transforms import (
    alpha_beta_change,
    alpha_beta_rotation,
    biorthogonal_scale,
    parity_decompose,
    spectrum_distance,
)

SCENARIOS = ("sweep", "amplify", "flux-deviation", "singularity", "absorb", "verify")


class ConfigError(ValueError):
    """Scenario configuration is invalid or physically inconsistent."""


@dataclass
class CenterConfig:
    kind: str = "interferometer"  # onsite | interferometer | dimer
    delta: float = -1.25
    gamma: float = 0.75
    phi: float = DIMER_REDUCTION_PHI
    v: complex = 0j
    mu: float = 0.5
    nu: float = 2.0

    def to_center(self) -> CenterSpec:
        if self.kind == "onsite":
            return OnSitePotential(self.v)
        if self.kind == "interferometer":
            return Interferometer(self.delta, self.gamma, self.phi)
        if self.kind == "dimer":
            return AsymmetricDimer(self.mu, self.nu)
        raise ConfigError(f"unknown center kind {self.kind!r}")

    def dimer_params(self) -> DimerParams:
        """Effective dimer parameters; rejects centers with no reduction."""
        if self.kind == "dimer":
            return DimerParams(self.mu, self.nu)
        if self.kind == "interferometer":
            if abs(self.phi - DIMER_REDUCTION_PHI) > 1e-12:
                raise ConfigError(
                    "interferometer reduces to a dimer only at flux pi/4; "
                    f"got phi={self.phi!r}"
                )
            return dimer_from_interferometer(self.delta, self.gamma)
        raise ConfigError(f"center kind {self.kind!r} has no dimer parameters")


@dataclass
class LatticeConfig:
    left_len: int = 400
    right_len: int = 400
    hard_wall_n0: int | None = None

    def to_lattice(self) -> LatticeSpec:
        try:
            return LatticeSpec(self.left_len, self.right_len, self.hard_wall_n0)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None


@dataclass
class PacketConfig:
    site: int = -60
    k0: float = math.pi / 2
    lam: float = 0.15
    pair_site: int = 60  # +-offset of the counter-propagating pair


@dataclass
class TimeConfig:
    t_max: float = 70.0
    dt: float = 1.0

    def times(self) -> np.ndarray:
        if self.dt <= 0 or self.t_max < self.dt:
            raise ConfigError("need dt > 0 and t_max >= dt")
        n = int(round(self.t_max / self.dt))
        return np.arange(0, n + 1, dtype=float) * self.dt


@dataclass
class SweepConfig:
    samples: int = 63  # interior grid i*pi/(samples+1); odd count includes pi/2


@dataclass
class FluxConfig:
    deviations: tuple[int, ...] = (0, 5, 10)  # multiples of pi/100
    k0_values: tuple[float, ...] = (math.pi / 3, math.pi / 2.5, math.pi / 2)


@dataclass
class SingularityConfig:
    fit_start: float = 20.0
    fit_end: float = 70.0
    emission_fit_start: float = 45.0  # single-packet case: after the transit


@dataclass
class AbsorbConfig:
    nu_values: tuple[float, ...] = (0.5, 0.4, 0.1)
    n0: int = 20
    t_max: float = 200.0
    dt: float = 2.0
    drop_time: float = 50.0


@dataclass
class Tolerances:
    resonance: float = 1e-9
    singularity: float = 1e-9
    gain_rtol: float = 0.05
    reflect: float = 1e-3
    distortion: float = 1e-2
    boundary: float = 1e-6
    linear_r2: float = 0.99
    emission_ratio_rtol: float = 0.02
    pair_residual: float = 0.02
    seed_decay_fraction: float = 0.4
    absorb_final: float = 0.05
    absorb_drop: float = 0.5
    unitarity: float = 1e-12
    rotation: float = 1e-14
    hermiticity: float = 1e-12
    spectrum: float = 1e-10
    commutator: float = 1e-12
    residual: float = 1e-12


@dataclass
class ScenarioConfig:
    scenario: str = "verify"
    out_dir: str = "runs/verify"
    seed: int = 0  # reserved; only the verify battery draws random parameters
    center: CenterConfig = field(default_factory=CenterConfig)
    lattice: LatticeConfig = field(default_factory=LatticeConfig)
    packet: PacketConfig = field(default_factory=PacketConfig)
    time: TimeConfig = field(default_factory=TimeConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    flux: FluxConfig = field(default_factory=FluxConfig)
    singularity: SingularityConfig = field(default_factory=SingularityConfig)
    absorb: AbsorbConfig = field(default_factory=AbsorbConfig)
    tol: Tolerances = field(default_factory=Tolerances)


def default_config(scenario: str) -> ScenarioConfig:
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}; choose from {SCENARIOS}")
    cfg = ScenarioConfig(scenario=scenario, out_dir=f"runs/{scenario}")
    if scenario == "singularity":
        cfg.center = CenterConfig(kind="interferometer", delta=0.75, gamma=1.25)
    elif scenario == "absorb":
        cfg.lattice = LatticeConfig(left_len=20, right_len=400, hard_wall_n0=20)
    elif scenario == "sweep":
        cfg.center = CenterConfig(kind="dimer", mu=0.5, nu=2.0)
    return cfg


# --- config text format -----------------------------------------------------

_SCALARS = ("scenario", "out_dir", "seed")


def _format_value(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, tuple):
        return ", ".join(_format_value(v) for v in value)
    if isinstance(value, float):
        return repr(float(value))  # exact round-trip; also flattens numpy scalars
    if isinstance(value, complex):
        return repr(complex(value))
    if isinstance(value, (np.floating, np.integer)):
        return repr(value.item())
    return str(value)


def _parse_value(text: str, ftype):
    text = text.strip()
    origin = typing.get_origin(ftype)
    if isinstance(ftype, types.UnionType):
        args = typing.get_args(ftype)
        if type(None) in args:
            if text.lower() in ("none", ""):
                return None
            inner = next(a for a in args if a is not type(None))
            return _parse_value(text, inner)
        raise ConfigError(f"unsupported union type {ftype}")
    if origin is tuple:
        inner = typing.get_args(ftype)[0]
        if not text:
            return ()
        return tuple(_parse_value(tok, inner) for tok in text.split(","))
    if ftype is int:
        return int(text)
    if ftype is float:
        return float(text)
    if ftype is complex:
        return complex(text.replace(" ", ""))
    if ftype is str:
        return text
    if ftype is bool:
        if text.lower() in ("true", "1", "yes"):
            return True
        if text.lower() in ("false", "0", "no"):
            return False
        raise ConfigError(f"bad boolean {text!r}")
    raise ConfigError(f"unsupported config field type {ftype}")


def _section_dataclasses() -> dict:
    return {
        f.name: f.type
        for f in dataclasses.fields(ScenarioConfig)
        if dataclasses.is_dataclass(f.type)
    }


def to_ini(config: ScenarioConfig) -> str:
    parser = ConfigParser(interpolation=None)
    parser.add_section("scenario")
    for name in _SCALARS:
        parser.set("scenario", name, _format_value(getattr(config, name)))
    for section, cls in _section_dataclasses().items():
        parser.add_section(section)
        value = getattr(config, section)
        for f in dataclasses.fields(cls):
            parser.set(section, f.name, _format_value(getattr(value, f.name)))
    buf = StringIO()
    parser.write(buf)
    return buf.getvalue()


def from_ini(text: str, base: ScenarioConfig | None = None) -> ScenarioConfig:
    parser = ConfigParser(interpolation=None)
    parser.read_string(text)
    if base is None:
        name = parser.get("scenario", "scenario", fallback="verify")
        base = default_config(name)
    config = _copy_config(base)
    sections = _section_dataclasses()
    for section in parser.sections():
        if section == "scenario":
            for key, raw in parser.items(section):
                if key not in _SCALARS:
                    raise ConfigError(f"unknown key scenario.{key}")
                ftype = {"scenario": str, "out_dir": str, "seed": int}[key]
                setattr(config, key, _parse_value(raw, ftype))
            continue
        if section not in sections:
            raise ConfigError(f"unknown config section [{section}]")
        cls = sections[section]
        target = getattr(config, section)
        field_types = {f.name: f.type for f in dataclasses.fields(cls)}
        for key, raw in parser.items(section):
            if key not in field_types:
                raise ConfigError(f"unknown key {section}.{key}")
            setattr(target, key, _parse_value(raw, field_types[key]))
    return config


def _copy_config(config: ScenarioConfig) -> ScenarioConfig:
    clone = ScenarioConfig(
        scenario=config.scenario, out_dir=config.out_dir, seed=config.seed
    )
    for section, cls in _section_dataclasses().items():
        setattr(clone, section, dataclasses.replace(getattr(config, section)))
    return clone


def load_config(path, base: ScenarioConfig | None = None) -> ScenarioConfig:
    return from_ini(Path(path).read_text(), base=base)


def apply_overrides(config: ScenarioConfig, assignments) -> ScenarioConfig:
    """Apply "section.key=value" (or "key=value" for scenario scalars)."""
    config = _copy_config(config)
    sections = _section_dataclasses()
    for item in assignments:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not key=value")
        key, raw = item.split("=", 1)
        key = key.strip()
        if "." not in key:
            if key not in _SCALARS:
                raise ConfigError(f"unknown top-level key {key!r}")
            ftype = {"scenario": str, "out_dir": str, "seed": int}[key]
            setattr(config, key, _parse_value(raw, ftype))
            continue
        section, name = key.split(".", 1)
        if section not in sections:
            raise ConfigError(f"unknown config section {section!r}")
        cls = sections[section]
        field_types = {f.name: f.type for f in dataclasses.fields(cls)}
        if name not in field_types:
            raise ConfigError(f"unknown key {section}.{name}")
        setattr(getattr(config, section), name, _parse_value(raw, field_types[name]))
    return config


# --- manifests ---------------------------------------------------------------


@dataclass
class AssertionResult:
    name: str
    passed: bool
    measured: str
    threshold: str
    detail: str = ""


@dataclass
class RunManifest:
    scenario: str
    code_version: str
    duration_s: float
    config_text: str
    outputs: list
    assertions: list

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.assertions)

    def to_json(self) -> str:
        payload = {
            "scenario": self.scenario,
            "code_version": self.code_version,
            "duration_s": self.duration_s,
            "passed": self.passed,
            "outputs": list(self.outputs),
            "assertions": [dataclasses.asdict(a) for a in self.assertions],
            "config": self.config_text,
        }
        return json.dumps(payload, indent=2)


def _check(name, passed, measured, threshold, detail="") -> AssertionResult:
    return AssertionResult(
        name=name,
        passed=bool(passed),
        measured=_format_value(measured) if not isinstance(measured, str) else measured,
        threshold=threshold,
        detail=detail,
    )


def _le(name, measured, bound, detail="") -> AssertionResult:
    return _check(name, measured <= bound, measured, f"<= {bound!r}", detail)


# --- scenario runners --------------------------------------------------------


def run_scenario(config: ScenarioConfig) -> RunManifest:
    """Execute one scenario, writing outputs and exactly one manifest."""
    if config.scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {config.scenario!r}")
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    runner = _RUNNERS[config.scenario]
    started = time.perf_counter()
    outputs, assertions = runner(config, out_dir)
    duration = time.perf_counter() - started

    config_text = to_ini(config)
    (out_dir / "config.ini").write_text(config_text)
    manifest = RunManifest(
        scenario=config.scenario,
        code_version=__version__,
        duration_s=duration,
        config_text=config_text,
        outputs=sorted(outputs + ["config.ini", "manifest.json"]),
        assertions=assertions,
    )
    (out_dir / "manifest.json").write_text(manifest.to_json())
    return manifest


def _is_hermitian_center(center: CenterSpec) -> bool:
    probe = build_hamiltonian(center, LatticeSpec(2, 2)).matrix
    return bool(np.max(np.abs(probe - probe.conj().T)) < 1e-14)


def _run_sweep(config: ScenarioConfig, out_dir: Path):
    center = config.center.to_center()
    n = config.sweep.samples
    if n < 1:
        raise ConfigError("sweep.samples must be positive")
    ks = [i * math.pi / (n + 1) for i in range(1, n + 1)]
    try:
        left_rows = sweep_rows(center, ks, LEFT)
        right_rows = sweep_rows(center, ks, RIGHT)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    write_sweep_csv(out_dir / "sweep_left.csv", left_rows)
    write_sweep_csv(out_dir / "sweep_right.csv", right_rows)
    outputs = ["sweep_left.csv", "sweep_right.csv"]

    assertions = []
    flagged = [row for rows in (left_rows, right_rows) for row in rows if row.diverges]
    finite_ok = all(
        row.diverges or (np.isfinite(row.T) and np.isfinite(row.R))
        for rows in (left_rows, right_rows)
        for row in rows
    )
    assertions.append(
        _check(
            "amplitudes_finite_or_flagged",
            finite_ok,
            f"{len(flagged)} flagged rows",
            "all rows finite unless divergence-flagged",
        )
    )
    if _is_hermitian_center(center):
        worst = max(abs(row.T + row.R - 1.0) for row in left_rows + right_rows)
        assertions.append(_le("hermitian_unitarity", worst, config.tol.unitarity))
    try:
        params = config.center.dimer_params()
    except ConfigError:
        params = None
    if params is not None and params.is_resonant(config.tol.resonance):
        worst = max(abs(row.r) for row in left_rows + right_rows)
        assertions.append(_le("resonant_reflectionless", worst, 1e-14))
    if params is not None and params.is_singular(config.tol.singularity):
        at_half = [row for row in left_rows if abs(row.k - math.pi / 2) < 1e-12]
        ok = bool(at_half) and all(row.diverges for row in at_half)
        assertions.append(
            _check(
                "singular_momentum_flagged",
                ok,
                f"{len(at_half)} rows at pi/2",
                "k=pi/2 rows carry the divergence flag",
            )
        )
    return outputs, assertions


def _resonant_params(config: ScenarioConfig) -> DimerParams:
    params = config.center.dimer_params()
    if not params.is_resonant(config.tol.resonance):
        raise ConfigError(
            f"scenario requires the resonance mu*nu = 1; got mu*nu = {params.product!r}"
        )
    return params


def _packet_or_error(lattice, spec, center):
    try:
        return gaussian_packet(lattice, spec, center)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _evolve_packet(config, center, k0):
    """Send the configured packet through `center`; returns (H, frames)."""
    lattice = config.lattice.to_lattice()
    times = config.time.times()
    spec = WavePacketSpec(site=config.packet.site, k0=k0, lam=config.packet.lam)
    ham = build_hamiltonian(center, lattice)
    frames = Propagator(ham).frames(_packet_or_error(lattice, spec, center), times)
    return ham, frames


def _reference_frames(config, k0):
    """Same packet propagated on the uniform chain (unit symmetric dimer)."""
    _, frames = _evolve_packet(config, AsymmetricDimer(1.0, 1.0), k0)
    return frames


def _run_amplify(config: ScenarioConfig, out_dir: Path):
    params = _resonant_params(config)
    if not (0.0 < config.packet.k0 < math.pi):
        raise ConfigError("packet.k0 must lie in (0, pi)")
    center = config.center.to_center()
    ham, frames = _evolve_packet(config, center, config.packet.k0)
    ref_frames = _reference_frames(config, config.packet.k0)
    metrics = transit_metrics(
        frames, ham.center_span, reference_frames=ref_frames, ends_tol=config.tol.boundary
    )
    lattice = config.lattice.to_lattice()
    write_frames_csv(out_dir / "frames.csv", frames, lattice, ham.center)
    write_frames_csv(
        out_dir / "frames_reference.csv", ref_frames, lattice, AsymmetricDimer(1.0, 1.0)
    )
    expected = params.nu**2
    record = dict(metrics.as_dict(), expected_gain=expected)
    write_metrics_txt(out_dir / "metrics.txt", record)

    assertions = [
        _le(
            "gain_matches_nu_squared",
            abs(metrics.gain - expected) / expected,
            config.tol.gain_rtol,
            detail=f"gain={metrics.gain!r} expected={expected!r}",
        ),
        _le("reflection_negligible", metrics.reflected, config.tol.reflect),
        _le("distortion_free", metrics.distortion, config.tol.distortion),
    ]
    return ["frames.csv", "frames_reference.csv", "metrics.txt"], assertions


def _run_flux_deviation(config: ScenarioConfig, out_dir: Path):
    params = _resonant_params(config)
    if config.center.kind != "interferometer":
        raise ConfigError("flux-deviation requires an interferometer center")
    if any(d < 0 for d in config.flux.deviations) or 0 not in config.flux.deviations:
        raise ConfigError("flux deviations must include 0 and be non-negative")
    step = math.pi / 100
    table = {}
    for k0 in config.flux.k0_values:
        if not (0.0 < k0 < math.pi):
            raise ConfigError("flux.k0_values must lie in (0, pi)")
        ref_frames = _reference_frames(config, k0)
        for dev in sorted(set(config.flux.deviations)):
            center = Interferometer(
                config.center.delta, config.center.gamma, DIMER_REDUCTION_PHI + dev * step
            )
            ham, frames = _evolve_packet(config, center, k0)
            metrics = transit_metrics(
                frames,
                ham.center_span,
                reference_frames=ref_frames,
                ends_tol=config.tol.boundary,
            )
            table[(k0, dev)] = metrics

    with open(out_dir / "distortion.csv", "w") as fh:
        fh.write("k0,deviation,gain,distortion\n")
        for (k0, dev), m in sorted(table.items()):
            fh.write(f"{k0!r},{dev},{m.gain!r},{m.distortion!r}\n")

    assertions = []
    devs = sorted(set(config.flux.deviations))
    for k0 in config.flux.k0_values:
        base = table[(k0, 0)].distortion
        others = [table[(k0, d)].distortion for d in devs if d != 0]
        assertions.append(
            _check(
                f"distortion_minimized_at_zero[k0={k0:.6g}]",
                all(base < d for d in others),
                base,
                "below all nonzero-deviation distortions",
                detail=f"nonzero: {[float(f'{d:.6g}') for d in others]}",
            )
        )
    k_half = [k for k in config.flux.k0_values if abs(k - math.pi / 2) < 1e-12]
    if k_half:
        for dev in devs:
            if dev == 0:
                continue
            half = table[(k_half[0], dev)].distortion
            rest = [
                table[(k0, dev)].distortion
                for k0 in config.flux.k0_values
                if k0 not in k_half
            ]
            assertions.append(
                _check(
                    f"half_pi_least_distorted[dev={dev}]",
                    all(half < d for d in rest),
                    half,
                    "below all other k0 at this deviation",
                    detail=f"others: {[float(f'{d:.6g}') for d in rest]}",
                )
            )
    return ["distortion.csv"], assertions


def _linear_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    """Least-squares line fit; returns (slope, intercept, r_squared)."""
    design = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    pred = design @ coef
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return float(coef[0]), float(coef[1]), r2


def _singular_params(config: ScenarioConfig) -> DimerParams:
    params = config.center.dimer_params()
    if not params.is_singular(config.tol.singularity):
        raise ConfigError(
            f"scenario requires the singularity mu*nu = -1; got mu*nu = {params.product!r}"
        )
    return params


def _run_singularity(config: ScenarioConfig, out_dir: Path):
    params = _singular_params(config)
    lattice = config.lattice.to_lattice()
    center = AsymmetricDimer(params.mu, params.nu)
    ham = build_hamiltonian(center, lattice)
    prop = Propagator(ham)
    times = config.time.times()
    span = ham.center_span
    nu_mag = abs(params.nu)

    cases = {
        "seed_plus": seed_state(lattice, params, +1),
        "seed_minus": seed_state(lattice, params, -1),
        "packet": _packet_or_error(
            lattice,
            WavePacketSpec(config.packet.site, config.packet.k0, config.packet.lam),
            center,
        ),
        "pair": antisym_two_packets(
            lattice,
            config.packet.pair_site,
            config.packet.k0,
            config.packet.lam,
            params.nu,
            center,
        ),
    }

    outputs = []
    assertions = []
    series_path = out_dir / "series.csv"
    metrics = {}
    with open(series_path, "w") as series_fh:
        series_fh.write("case,t,P_left,P_center,P_right,P_total\n")
        for name, psi0 in cases.items():
            frames = prop.frames(psi0, times)
            check_boundaries(frames, config.tol.boundary)
            fname = f"frames_{name}.csv"
            write_frames_csv(out_dir / fname, frames, lattice, center)
            outputs.append(fname)
            left = np.array([split_probability(f.p, span)[0] for f in frames])
            mid = np.array([split_probability(f.p, span)[1] for f in frames])
            right = np.array([split_probability(f.p, span)[2] for f in frames])
            total = left + mid + right
            for t, l, c, r, p in zip(times, left, mid, right, total):
                series_fh.write(
                    f"{name},{float(t)!r},{float(l)!r},{float(c)!r},"
                    f"{float(r)!r},{float(p)!r}\n"
                )

            window = (times >= config.singularity.fit_start) & (
                times <= config.singularity.fit_end
            )
            late = (times >= config.singularity.emission_fit_start) & (
                times <= config.singularity.fit_end
            )
            if name == "seed_plus":
                slope_p, _, r2_p = _linear_fit(times[window], total[window])
                slope_l, _, _ = _linear_fit(times[window], left[window])
                slope_r, _, _ = _linear_fit(times[window], right[window])
                ratio = math.sqrt(max(slope_r, 0.0) / slope_l)
                metrics.update(
                    seed_plus_growth_slope=slope_p,
                    seed_plus_growth_r2=r2_p,
                    seed_plus_emission_ratio=ratio,
                )
                assertions.append(
                    _check(
                        "seed_plus_linear_growth",
                        r2_p > config.tol.linear_r2,
                        r2_p,
                        f"> {config.tol.linear_r2!r}",
                    )
                )
                assertions.append(
                    _le(
                        "seed_plus_emission_ratio",
                        abs(ratio - nu_mag) / nu_mag,
                        config.tol.emission_ratio_rtol,
                        detail=f"ratio={ratio!r} nu={nu_mag!r}",
                    )
                )
            elif name == "seed_minus":
                p0 = total[0]
                metrics.update(seed_minus_peak=float(total.max()), seed_minus_final=total[-1])
                assertions.append(
                    _le("seed_minus_bounded", float(total.max()), p0 * (1 + 1e-9))
                )
                assertions.append(
                    _le(
                        "seed_minus_decays",
                        total[-1],
                        config.tol.seed_decay_fraction * p0,
                        detail=f"P(0)={p0!r}",
                    )
                )
                t_idx = int(np.searchsorted(times, config.singularity.fit_start))
                assertions.append(
                    _le(
                        "seed_minus_no_regrowth",
                        total[-1],
                        total[t_idx] + 1e-9,
                        detail=f"P({times[t_idx]})={total[t_idx]!r}",
                    )
                )
            elif name == "packet":
                slope_l, _, r2_l = _linear_fit(times[late], left[late])
                slope_r, _, r2_r = _linear_fit(times[late], right[late])
                metrics.update(
                    packet_reflected_slope=slope_l,
                    packet_reflected_r2=r2_l,
                    packet_transmitted_slope=slope_r,
                    packet_transmitted_r2=r2_r,
                )
                assertions.append(
                    _check(
                        "packet_reflected_linear_growth",
                        r2_l > config.tol.linear_r2 and slope_l > 0,
                        r2_l,
                        f"> {config.tol.linear_r2!r} with positive slope",
                    )
                )
                assertions.append(
                    _check(
                        "packet_transmitted_linear_growth",
                        r2_r > config.tol.linear_r2 and slope_r > 0,
                        r2_r,
                        f"> {config.tol.linear_r2!r} with positive slope",
                    )
                )
            elif name == "pair":
                residue = total[-1] / total[0]
                metrics.update(pair_initial=total[0], pair_final=total[-1])
                assertions.append(
                    _le(
                        "pair_fully_absorbed",
                        residue,
                        config.tol.pair_residual,
                        detail=f"P(0)={total[0]!r} P(end)={total[-1]!r}",
                    )
                )
    write_metrics_txt(out_dir / "metrics.txt", metrics)
    outputs += ["series.csv", "metrics.txt"]
    return outputs, assertions


def _run_absorb(config: ScenarioConfig, out_dir: Path):
    ab = config.absorb
    if ab.n0 < 1:
        raise ConfigError("absorb.n0 must be positive")
    if any(nu <= 0 for nu in ab.nu_values) or len(ab.nu_values) < 2:
        raise ConfigError("absorb.nu_values must be at least two positive values")
    lattice = config.lattice.to_lattice()
    if lattice.hard_wall_n0 != ab.n0:
        raise ConfigError(
            f"absorb requires lattice.hard_wall_n0 == absorb.n0 (= {ab.n0})"
        )
    times = TimeConfig(t_max=ab.t_max, dt=ab.dt).times()

    totals = {}
    with open(out_dir / "ptotal.csv", "w") as fh:
        fh.write("nu,t,P\n")
        for nu in ab.nu_values:
            center = AsymmetricDimer(1.0 / nu, nu)
            ham = build_hamiltonian(center, lattice)
            rho0 = mixed_state_uniform(lattice, center, ab.n0)
            frames = density_profile_series(ham, rho0, times)
            p = np.array([f.total for f in frames])
            totals[nu] = p
            for t, value in zip(times, p):
                fh.write(f"{nu!r},{float(t)!r},{float(value)!r}\n")

    assertions = []
    drop_idx = int(np.searchsorted(times, ab.drop_time))
    for nu in ab.nu_values:
        assertions.append(
            _le(
                f"rapid_drop[nu={nu!r}]",
                totals[nu][drop_idx] / totals[nu][0],
                config.tol.absorb_drop,
                detail=f"P({times[drop_idx]}) / P(0)",
            )
        )
    by_inv = sorted(ab.nu_values, key=lambda nu: 1.0 / nu)
    finals = [totals[nu][-1] for nu in by_inv]
    assertions.append(
        _check(
            "final_probability_decreasing_in_inverse_nu",
            all(a > b for a, b in zip(finals, finals[1:])),
            ", ".join(f"{nu!r}: {totals[nu][-1]:.5f}" for nu in by_inv),
            "strictly decreasing P(t_max) as 1/nu grows",
        )
    )
    smallest = min(ab.nu_values)
    assertions.append(
        _le(
            f"near_perfect_absorption[nu={smallest!r}]",
            totals[smallest][-1],
            config.tol.absorb_final,
        )
    )

    # closed Hermitian control: nothing decays without the non-Hermitian center
    control_center = AsymmetricDimer(1.0, 1.0)
    control_ham = build_hamiltonian(control_center, lattice)
    control_rho = mixed_state_uniform(lattice, control_center, ab.n0)
    control_times = TimeConfig(t_max=ab.t_max, dt=max(ab.dt, 10.0)).times()
    control_frames = density_profile_series(control_ham, control_rho, control_times)
    control_dev = max(abs(f.total - 1.0) for f in control_frames)
    assertions.append(_le("hermitian_control_conserves", control_dev, 1e-9))

    metrics = {f"final_P[nu={nu!r}]": totals[nu][-1] for nu in ab.nu_values}
    metrics["hermitian_control_max_dev"] = control_dev
    write_metrics_txt(out_dir / "metrics.txt", metrics)
    return ["ptotal.csv", "metrics.txt"], assertions


def _run_verify(config: ScenarioConfig, out_dir: Path):
    tol = config.tol
    rng = np.random.default_rng(config.seed)
    assertions = []

    # rotation: interferometer -> dimer equality and unitarity
    pairs = [(-1.25, 0.75), (0.75, 1.25), (0.4, -0.9)]
    worst_eq, worst_unitary = 0.0, 0.0
    lattice = LatticeSpec(10, 10)
    for delta, gamma in pairs:
        ham = build_hamiltonian(Interferometer(delta, gamma, DIMER_REDUCTION_PHI), lattice)
        change = alpha_beta_change(ham)
        worst_unitary = max(
            worst_unitary,
            float(np.max(np.abs(change.matrix.conj().T @ change.matrix - np.eye(ham.dim)))),
        )
        rotated = alpha_beta_rotation(ham)
        p = dimer_from_interferometer(delta, gamma)
        target = build_hamiltonian(AsymmetricDimer(p.mu, p.nu), lattice)
        worst_eq = max(worst_eq, float(np.max(np.abs(rotated.matrix - target.matrix))))
    assertions.append(_le("rotation_matches_dimer", worst_eq, tol.rotation))
    assertions.append(_le("rotation_unitary", worst_unitary, 1e-14))

    # biorthogonal scaling: hermiticity for mu*nu > 0, spectrum always
    worst_herm = 0.0
    worst_spec = 0.0
    for mu, nu in [(0.5, 2.0), (1.5, 0.4), (-1.2, -0.5), (-2.0, 0.5), (0.8, -1.1)]:
        ham = build_hamiltonian(AsymmetricDimer(mu, nu), LatticeSpec(40, 40))
        scaled = biorthogonal_scale(ham)
        if mu * nu > 0:
            worst_herm = max(
                worst_herm,
                float(np.linalg.norm(scaled.matrix - scaled.matrix.conj().T)),
            )
        worst_spec = max(
            worst_spec,
            spectrum_distance(
                np.linalg.eigvals(ham.matrix), np.linalg.eigvals(scaled.matrix)
            ),
        )
    assertions.append(_le("scaling_hermitian_when_product_positive", worst_herm, tol.hermiticity))
    assertions.append(_le("scaling_preserves_spectrum", worst_spec, tol.spectrum))

    # full chain: rotation then scaling at delta^2 - gamma^2 = 1 is Hermitian
    ham = build_hamiltonian(Interferometer(-1.25, 0.75, DIMER_REDUCTION_PHI), LatticeSpec(40, 40))
    chain = biorthogonal_scale(alpha_beta_rotation(ham))
    assertions.append(
        _le(
            "resonant_chain_hermitian",
            float(np.linalg.norm(chain.matrix - chain.matrix.conj().T)),
            tol.hermiticity,
        )
    )

    # parity split at the singularity
    ham = build_hamiltonian(AsymmetricDimer(-2.0, 0.5), LatticeSpec(100, 100))
    scaled = biorthogonal_scale(ham)
    blocks = parity_decompose(scaled)
    ends = sorted(blocks.end_potentials, key=lambda z: z.imag)
    end_dev = max(abs(ends[0] + 1j), abs(ends[1] - 1j))
    assertions.append(_le("parity_end_potentials_are_plus_minus_i", end_dev, 1e-9))
    assertions.append(_le("parity_cross_coupling", blocks.cross_coupling, tol.commutator))
    hp, hm = blocks.embedded()
    assertions.append(
        _le("parity_blocks_commute", float(np.linalg.norm(hp @ hm - hm @ hp)), tol.commutator)
    )
    union = np.concatenate(
        [np.linalg.eigvals(blocks.h_plus), np.linalg.eigvals(blocks.h_minus)]
    )
    assertions.append(
        _le(
            "parity_blocks_reproduce_spectrum",
            spectrum_distance(np.linalg.eigvals(scaled.matrix), union),
            tol.spectrum,
        )
    )

    # scattering-state residuals for random parameters
    lattice = LatticeSpec(100, 100)
    worst_res = 0.0
    count = 0
    while count < 20:
        mu, nu = rng.uniform(-2.5, 2.5, size=2)
        k = rng.uniform(0.2, math.pi - 0.2)
        if abs(mu * nu + 1.0) < 0.05:
            continue
        inc = LEFT if count % 2 == 0 else RIGHT
        worst_res = max(worst_res, scattering_residual(AsymmetricDimer(mu, nu), lattice, k, inc))
        count += 1
    count = 0
    while count < 10:
        v = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        k = rng.uniform(0.2, math.pi - 0.2)
        if abs(2j * math.sin(k) - v) < 0.05:
            continue
        worst_res = max(worst_res, scattering_residual(OnSitePotential(v), lattice, k))
        count += 1
    assertions.append(_le("scattering_state_residual", worst_res, tol.residual))

    # resonance: reflectionless for mu*nu = 1
    worst_r = 0.0
    for mu in (0.5, 2.0, -1.25, 3.0):
        params = DimerParams(mu, 1.0 / mu)
        for k in np.linspace(0.2, math.pi - 0.2, 9):
            worst_r = max(worst_r, abs(dimer_amplitudes(params, float(k)).r))
    assertions.append(_le("resonance_reflectionless", worst_r, 1e-14))

    # amplification coefficient is k-independent
    values = [
        amplification_coefficient(DimerParams(0.5, 2.0), float(k))
        for k in np.linspace(0.2, math.pi - 0.2, 9)
    ]
    assertions.append(
        _le("amplification_k_independent", max(values) - min(values), 1e-12,
            detail=f"A={values[0]!r}")
    )

    # Hermitian unitarity battery
    worst_u = 0.0
    ks = np.linspace(0.1, math.pi - 0.1, 13)
    for delta in (-1.0, -0.3, 0.7, 2.0):
        params = dimer_from_interferometer(delta, 0.0)
        for k in ks:
            a = dimer_amplitudes(params, float(k))
            worst_u = max(worst_u, abs(a.T + a.R - 1.0))
    for v in (-1.5, 0.4, 2.0):
        for k in ks:
            a = onsite_amplitudes(v, float(k))
            worst_u = max(worst_u, abs(a.T + a.R - 1.0))
    assertions.append(_le("hermitian_unitarity", worst_u, tol.unitarity))

    # real-potential sign symmetry; imaginary-potential asymmetry
    worst_sym = 0.0
    for v in (0.3, 1.0, 2.5):
        for k in ks:
            worst_sym = max(
                worst_sym,
                abs(onsite_amplitudes(v, float(k)).T - onsite_amplitudes(-v, float(k)).T),
            )
    assertions.append(_le("real_potential_sign_symmetric", worst_sym, 1e-14))
    asym = abs(
        onsite_amplitudes(1j, math.pi / 2).T - onsite_amplitudes(-1j, math.pi / 2).T
    )
    assertions.append(
        _check("imaginary_potential_asymmetric", asym > 1e-6, asym, "> 1e-06")
    )

    # left/right transmission ratio nu/mu off resonance
    worst_ratio = 0.0
    for mu, nu in [(0.7, 1.9), (-1.4, 0.6), (2.2, 0.9)]:
        for k in (0.5, 1.1, 2.0):
            tl = dimer_amplitudes(DimerParams(mu, nu), k, LEFT).t
            tr = dimer_amplitudes(DimerParams(mu, nu), k, RIGHT).t
            worst_ratio = max(worst_ratio, abs(tl / tr - nu / mu))
    assertions.append(_le("left_right_transmission_ratio", worst_ratio, 1e-12))

    # analytic fixed points of the imaginary potential
    diverging = onsite_amplitudes(2j, math.pi / 2)
    quarter = onsite_amplitudes(-2j, math.pi / 2)
    assertions.append(
        _check(
            "gain_potential_diverges",
            diverging.diverges and diverging.T == math.inf,
            f"diverges={diverging.diverges}",
            "divergence flag at k=pi/2 for v=2i",
        )
    )
    assertions.append(_le("loss_potential_quarter", abs(quarter.T - 0.25), 1e-15))

    # singular eigenstate solves the eigenproblem exactly at E = 0
    params = DimerParams(-2.0, 0.5)
    lattice = LatticeSpec(50, 50)
    ham = build_hamiltonian(AsymmetricDimer(params.mu, params.nu), lattice)
    worst_swf = 0.0
    for sign in (+1, -1):
        psi = np.array(
            [singular_wavefunction(params, sign, s) for s in site_order(ham.center, lattice)]
        )
        worst_swf = max(worst_swf, float(np.max(np.abs((ham.matrix @ psi)[1:-1]))))
    assertions.append(_le("singular_state_residual", worst_swf, tol.residual))

    with open(out_dir / "assertions.txt", "w") as fh:
        for a in assertions:
            status = "pass" if a.passed else "FAIL"
            fh.write(f"{a.name} = {status} (measured {a.measured}, wants {a.threshold})\n")
    return ["assertions.txt"], assertions


_RUNNERS = {
    "sweep": _run_sweep,
    "amplify": _run_amplify,
    "flux-deviation": _run_flux_deviation,
    "singularity": _run_singularity,
    "absorb": _run_absorb,
    "verify": _run_verify,
}


def _scenario_entry(name: str):
    def entry(config: ScenarioConfig) -> RunManifest:
        config = _copy_config(config)
        config.scenario = name
        return run_scenario(config)

    entry.__name__ = f"run_{name.replace('-', '_')}"
    entry.__doc__ = f"Run the {name!r} scenario with this config (scenario field overridden)."
    return entry


run_sweep = _scenario_entry("sweep")
run_amplify = _scenario_entry("amplify")
run_flux_deviation = _scenario_entry("flux-deviation")
run_singularity = _scenario_entry("singularity")
run_absorb = _scenario_entry("absorb")
run_verify = _scenario_entry("verify")
