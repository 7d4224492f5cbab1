"""End-to-end experiment runners: flat key-value configs in, CSV files out.

Every CSV starts with a ``schema_version`` column so downstream consumers can
verify compatibility; a ``metadata.json`` sidecar per run echoes the config,
the package version and timing. CSV bytes are a pure function of the config.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sparse

from . import __version__
from .errors import ConfigError
from .operator import SymmetricOperator
from . import fragmentation as frag
from . import spectral
from . import su2
from . import u1

SCHEMA_SPECTRUM = "u1-spectrum-v1"
SCHEMA_COUNTERS = "counters-v1"
SCHEMA_ENTROPY = "entropy-v1"
SCHEMA_QUENCH = "quench-v1"
SCHEMA_SECTORS = "sectors-v1"
SCHEMA_SW = "sw-scaling-v1"

# refuse dense eigensolves whose working set would exceed this
MEMORY_CAP_BYTES = 8 * 1024**3

DEFAULT_T_MAX = 50.0
DEFAULT_TIME_POINTS = 200


def parse_config_file(path) -> dict:
    """Flat ``key = value`` file; '#' comments and blank lines allowed."""
    raw = {}
    text = Path(path).read_text()
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = stripped.split("=", 1)
        key = key.strip()
        if key in raw:
            raise ConfigError(f"{path}:{lineno}: duplicate key '{key}'")
        raw[key] = value.strip()
    return raw


_REQUIRED = object()


class _Config:
    """Tracks which keys a runner consumed; leftovers are errors."""

    def __init__(self, raw: dict):
        self.raw = dict(raw)
        self.used = set()

    def take(self, key, conv, default=_REQUIRED):
        self.used.add(key)
        if key not in self.raw:
            if default is _REQUIRED:
                raise ConfigError(f"missing required config key '{key}'")
            return default
        try:
            return conv(self.raw[key])
        except ConfigError:
            raise
        except Exception as exc:
            raise ConfigError(f"bad value for '{key}': {self.raw[key]!r} ({exc})")

    def finish(self):
        unknown = set(self.raw) - self.used
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")


def _int_tuple(text: str) -> tuple:
    return tuple(int(t) for t in text.replace(" ", "").split(",") if t)


def _float_tuple(text: str) -> tuple:
    return tuple(float(t) for t in text.replace(" ", "").split(",") if t)


def _positive(value, key):
    if value <= 0:
        raise ConfigError(f"'{key}' must be positive, got {value}")
    return value


def _check_dense_budget(dim: int, what: str):
    # matrix + eigenvectors + LAPACK workspace, all float64
    estimate = 3 * 8 * dim * dim
    if estimate > MEMORY_CAP_BYTES:
        raise ConfigError(
            f"{what} needs a dense {dim}x{dim} eigensolve, about "
            f"{estimate / 1024**3:.1f} GiB; cap is "
            f"{MEMORY_CAP_BYTES / 1024**3:.1f} GiB"
        )


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _write_csv(path: Path, schema: str, header, rows):
    lines = [",".join(["schema_version"] + list(header))]
    for row in rows:
        lines.append(",".join([schema] + [_fmt(x) for x in row]))
    path.write_text("\n".join(lines) + "\n")


def _write_metadata(out_dir: Path, command: str, raw_cfg: dict, extra: dict,
                    elapsed: float):
    meta = {
        "command": command,
        "config": raw_cfg,
        "package_version": __version__,
        "timing_seconds": round(elapsed, 3),
    }
    meta.update(extra)
    (out_dir / "metadata.json").write_text(json.dumps(meta, indent=2) + "\n")


def _time_grid(cfg: _Config):
    t_max = _positive(cfg.take("t_max", float, DEFAULT_T_MAX), "t_max")
    points = cfg.take("time_points", int, DEFAULT_TIME_POINTS)
    if points < 2:
        raise ConfigError(f"'time_points' must be >= 2, got {points}")
    return np.linspace(0.0, t_max, points)


def _dense_series(spec, psi0, times, op: SymmetricOperator) -> np.ndarray:
    states = spectral.evolve(spec, psi0, times)
    ov = states @ op.toarray()
    return np.real(np.einsum("ti,ti->t", ov, states.conj()))


@dataclass
class U1SpectrumResult:
    files: tuple
    energies: np.ndarray = field(repr=False)
    entropies: np.ndarray = field(repr=False)
    overlap_sq: np.ndarray = field(repr=False)
    in_window: np.ndarray = field(repr=False)
    counter_stats: dict = field(repr=False)
    window: tuple = ()


def run_u1_spectrum(raw_cfg: dict, out_dir) -> U1SpectrumResult:
    """Per-k=0-eigenstate energies, entropies, counter statistics, overlaps."""
    t0 = time.time()
    cfg = _Config(raw_cfg)
    model = cfg.take("model", str)
    if model != "u1-ladder":
        raise ConfigError(f"u1-spectrum requires model=u1-ladder, got {model}")
    length = cfg.take("L", int)
    lam = cfg.take("truncation", int)
    g = _positive(cfg.take("g", float), "g")
    reference = cfg.take("initial_state", _int_tuple)
    p_values = cfg.take("p_values", _int_tuple, tuple(range(-lam, lam + 1)))
    psym_values = cfg.take("psym_values", _int_tuple, tuple(range(0, lam + 1)))
    d_values = cfg.take("d_values", _int_tuple, tuple(range(0, 2 * lam + 1)))
    cut = cfg.take("entropy_cut", int, length // 2)
    cfg.take("out_dir", str, None)
    cfg.finish()

    # Burnside lower bound on the sector dimension, before materializing
    _check_dense_budget((2 * lam + 1) ** length // length + 1, "u1-spectrum")
    space = u1.build_u1_space(length, lam)
    ham = u1.build_u1_hamiltonian(space, g)
    sector = u1.build_momentum_zero(space)
    spec = spectral.diagonalize(u1.project_operator(ham, sector))
    clusters = spectral.degenerate_clusters(spec.energies)
    cluster_size = np.bincount(clusters)[clusters]

    psi0 = space.basis_vector(reference)
    e0 = ham.expectation(psi0)
    de = np.sqrt(float(psi0 @ (ham.matrix @ (ham.matrix @ psi0))) - e0 * e0)
    in_window = np.abs(spec.energies - e0) <= de

    ref_row = sector.embedding[space.index(reference), :].toarray().ravel()
    overlap_sq = (ref_row @ spec.vectors) ** 2

    embedded = sector.embedding @ spec.vectors
    entropies = np.array([
        spectral.half_chain_entropy(embedded[:, k], space, cut)
        for k in range(spec.dim)
    ])

    counter_stats = {}
    counter_rows = []
    for kind, builder, svals in (
        ("P", u1.counter_P, p_values),
        ("Psym", u1.counter_P_symmetric, psym_values),
        ("D", u1.counter_D, d_values),
    ):
        for s in svals:
            op = u1.project_operator(builder(space, s), sector, check=False)
            mean, var = spectral.observable_stats(spec, op)
            counter_stats[(kind, s)] = (mean, var)
            counter_rows.extend(
                (k, spec.energies[k], kind, s, mean[k], var[k])
                for k in range(spec.dim)
            )

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    spectrum_path = out_dir / "spectrum.csv"
    _write_csv(
        spectrum_path,
        SCHEMA_SPECTRUM,
        ["state_index", "energy", "overlap_sq", "in_micro_window", "cluster_size"],
        (
            (k, spec.energies[k], overlap_sq[k], bool(in_window[k]), int(cluster_size[k]))
            for k in range(spec.dim)
        ),
    )
    counters_path = out_dir / "counters.csv"
    _write_csv(
        counters_path,
        SCHEMA_COUNTERS,
        ["state_index", "energy", "operator", "s", "mean", "variance"],
        counter_rows,
    )
    entropy_path = out_dir / "entropy.csv"
    _write_csv(
        entropy_path,
        SCHEMA_ENTROPY,
        ["state_index", "energy", "entropy", "overlap_sq", "in_micro_window"],
        (
            (k, spec.energies[k], entropies[k], overlap_sq[k], bool(in_window[k]))
            for k in range(spec.dim)
        ),
    )
    _write_metadata(
        out_dir, "u1-spectrum", raw_cfg,
        {
            "sector_dimension": spec.dim,
            "window_center": e0,
            "window_half_width": de,
            "window_members": int(in_window.sum()),
        },
        time.time() - t0,
    )
    return U1SpectrumResult(
        files=(spectrum_path, counters_path, entropy_path),
        energies=spec.energies,
        entropies=entropies,
        overlap_sq=overlap_sq,
        in_window=in_window,
        counter_stats=counter_stats,
        window=(e0, de),
    )


@dataclass
class QuenchResult:
    files: tuple
    record: spectral.QuenchRecord = field(repr=False)
    window_members: int = 0


def _quench_u1(cfg: _Config) -> tuple:
    length = cfg.take("L", int)
    lam = cfg.take("truncation", int)
    g = _positive(cfg.take("g", float), "g")
    initial = cfg.take("initial_state", _int_tuple)
    observable = cfg.take("observable", str, "electric-total")
    _check_dense_budget((2 * lam + 1) ** length, "u1 quench")
    space = u1.build_u1_space(length, lam)
    ham = u1.build_u1_hamiltonian(space, g)
    if observable == "electric-total":
        obs = u1.electric_energy_total(space)
    elif observable == "electric-upper":
        obs = u1.electric_energy_upper(space)
    else:
        raise ConfigError(
            f"unknown observable '{observable}' "
            "(expected electric-total or electric-upper)"
        )
    psi0 = space.basis_vector(initial)
    label = "|" + ",".join(str(n) for n in initial) + ">"
    return ham, obs, psi0, label, observable, True


def _quench_su2(cfg: _Config) -> tuple:
    sites = cfg.take("N", int)
    g = _positive(cfg.take("g", float), "g")
    m = cfg.take("m", float)
    descriptor = cfg.take("initial_state", _int_tuple)
    if len(descriptor) != 2:
        raise ConfigError(
            f"su2-matter initial_state must be 'x,D', got {descriptor}"
        )
    x, pairs = descriptor
    observable = cfg.take("observable", str, "electric")
    if observable != "electric":
        raise ConfigError(
            f"unknown observable '{observable}' for su2-matter (expected electric)"
        )
    space = su2.build_su2_space(sites, occupancy=sites)
    ham_full = su2.build_su2_hamiltonian(space, g, m)
    obs_full = su2.electric_energy(space, g)
    psi_full = su2.build_phi_state(space, x, pairs)
    # quench states are global color singlets: compare inside that sector
    iso = su2.color_singlet_projector(space)
    _check_dense_budget(iso.shape[1], "su2 quench")
    ham = SymmetricOperator(
        _dense_to_csr(iso.T @ ham_full.toarray() @ iso), name=ham_full.name
    )
    obs = SymmetricOperator(
        _dense_to_csr(iso.T @ obs_full.toarray() @ iso), name=obs_full.name
    )
    psi0 = iso.T @ psi_full
    lost = 1.0 - float(psi0 @ psi0)
    if abs(lost) > 1e-10:
        raise ConfigError(
            f"initial state is not a color singlet (weight defect {lost:.3e})"
        )
    label = f"|phi(x={x},D={pairs})>"
    return ham, obs, psi0, label, observable, False


def _dense_to_csr(mat: np.ndarray):
    return sparse.csr_matrix(0.5 * (mat + mat.T))


def run_quench(raw_cfg: dict, out_dir) -> QuenchResult:
    """Quench vs microcanonical time series for one initial state."""
    t0 = time.time()
    cfg = _Config(raw_cfg)
    model = cfg.take("model", str)
    times = _time_grid(cfg)
    cfg.take("out_dir", str, None)
    if model == "u1-ladder":
        ham, obs, psi0, label, obs_name, diag_fast = _quench_u1(cfg)
    elif model == "su2-matter":
        ham, obs, psi0, label, obs_name, diag_fast = _quench_su2(cfg)
    else:
        raise ConfigError(f"unknown model '{model}'")
    cfg.finish()

    spec = spectral.diagonalize(ham, validate=False)
    e0 = ham.expectation(psi0)
    de = np.sqrt(max(float(psi0 @ (ham.matrix @ (ham.matrix @ psi0))) - e0 * e0, 0.0))
    if de == 0.0:
        raise ConfigError(f"initial state {label} is an eigenstate; empty window")
    psi_mc = spectral.microcanonical_state(spec, e0, de)
    members = spectral.window_member_count(spec, e0, de)
    if diag_fast:
        diag = obs.diagonal()
        series_q = spectral.observable_series(spec, psi0, times, diag)
        series_m = spectral.observable_series(spec, psi_mc, times, diag)
    else:
        series_q = _dense_series(spec, psi0, times, obs)
        series_m = _dense_series(spec, psi_mc, times, obs)
    record = spectral.QuenchRecord(
        times=times,
        obs_quench=series_q,
        obs_micro=series_m,
        observable=obs_name,
        quench_label=label,
        micro_label=f"microcanonical(E={e0:.6g}, dE={de:.6g})",
    )

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    quench_path = out_dir / "quench.csv"
    _write_csv(
        quench_path,
        SCHEMA_QUENCH,
        ["t", "obs_quench", "obs_micro"],
        zip(times, series_q, series_m),
    )
    _write_metadata(
        out_dir, "quench", raw_cfg,
        {
            "observable": obs_name,
            "quench_label": label,
            "window_center": e0,
            "window_half_width": de,
            "window_members": members,
        },
        time.time() - t0,
    )
    return QuenchResult(files=(quench_path,), record=record, window_members=members)


@dataclass
class SectorsResult:
    files: tuple
    table: frag.SectorScaling


def run_fragmentation(raw_cfg: dict, out_dir) -> SectorsResult:
    """Krylov sector counts of the cutoff Hamiltonian over a length family."""
    t0 = time.time()
    cfg = _Config(raw_cfg)
    model = cfg.take("model", str)
    if model != "u1-ladder":
        raise ConfigError(f"sectors requires model=u1-ladder, got {model}")
    lam = cfg.take("truncation", int)
    cutoff = _positive(cfg.take("cutoff", float), "cutoff")
    lengths = cfg.take("L_values", _int_tuple)
    g = _positive(cfg.take("g", float, 1.0), "g")
    cfg.take("out_dir", str, None)
    cfg.finish()
    if not lengths:
        raise ConfigError("'L_values' must list at least one length")

    table = frag.sector_scaling(lam, cutoff, lengths, g)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "sectors.csv"
    rows = [
        ("sectors", L, cutoff, count, largest, dim, "")
        for (L, dim, count, largest) in table.rows
    ]
    rows.append(("fit", "", cutoff, "", "", "", table.growth_rate))
    _write_csv(
        path,
        SCHEMA_SECTORS,
        ["record", "L", "cutoff", "sector_count", "largest_sector", "dimension",
         "growth_rate"],
        rows,
    )
    _write_metadata(out_dir, "sectors", raw_cfg, {}, time.time() - t0)
    return SectorsResult(files=(path,), table=table)


@dataclass
class SwCheckResult:
    files: tuple
    cutoff_rows: tuple
    decay_power: float
    g_rows: tuple
    g_power: float


def run_sw_check(raw_cfg: dict, out_dir) -> SwCheckResult:
    """Frozen-channel second-order correction norms and fitted powers."""
    t0 = time.time()
    cfg = _Config(raw_cfg)
    model = cfg.take("model", str)
    if model != "u1-ladder":
        raise ConfigError(f"sw-check requires model=u1-ladder, got {model}")
    length = cfg.take("L", int)
    lam = cfg.take("truncation", int)
    g = _positive(cfg.take("g", float), "g")
    cutoffs = cfg.take("cutoff_values", _float_tuple)
    g_values = cfg.take("g_values", _float_tuple, ())
    cutoff_ref = cfg.take("cutoff_ref", float, cutoffs[0] if cutoffs else None)
    cfg.take("out_dir", str, None)
    cfg.finish()
    if not cutoffs:
        raise ConfigError("'cutoff_values' must list at least one cutoff")

    cutoff_rows, decay_power = frag.sw_error_scaling_u1(length, lam, g, cutoffs)
    if g_values:
        g_rows, g_power = frag.sw_coupling_scaling_u1(
            length, lam, g_values, cutoff_ref
        )
    else:
        g_rows, g_power = (), float("nan")

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "sw_scaling.csv"
    rows = [("cutoff-scan", g, c, norm, "") for c, norm in cutoff_rows]
    rows.extend(("g-scan", gv, cutoff_ref, norm, "") for gv, norm in g_rows)
    rows.append(("fit-cutoff", g, "", "", decay_power))
    if g_values:
        rows.append(("fit-g", "", cutoff_ref, "", g_power))
    _write_csv(
        path,
        SCHEMA_SW,
        ["record", "g", "cutoff", "correction_norm", "fitted_power"],
        rows,
    )
    _write_metadata(out_dir, "sw-check", raw_cfg, {}, time.time() - t0)
    return SwCheckResult(
        files=(path,),
        cutoff_rows=cutoff_rows,
        decay_power=decay_power,
        g_rows=g_rows,
        g_power=g_power,
    )
