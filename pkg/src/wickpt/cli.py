"""Command-line entry point: ``wickpt <subcommand> [options]``.

Every run writes its artifacts (CSV for series, JSON for reports) into ``--out``
together with ``manifest.json``, which lists each file with its SHA-256.
Options can also come from a ``key = value`` file given with ``--config``;
flags on the command line win.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import metadata
from pathlib import Path

import numpy as np

from . import dimer as dm
from . import dynamics as dyn
from . import roundtrip as rt
from . import spectra as sp
from . import weaknl as wn
from .io import sha256, write_csv, write_json, write_matrix_csv
from .lattice import QuarticDoubleWell, SquireWell, assemble_hamiltonian, default_grid, load_mirror_csv

log = logging.getLogger("wickpt")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
SUBCOMMANDS = ("spectrum", "threshold", "evolve", "dimer", "weaknl", "units", "figure")
FIGURES = ("fig2a", "fig2cde", "fig3b", "fig3c")
MODELS = ("squire", "doublewell", "mirror-file")
MODEL_KEYS = {"squire": {"u"}, "doublewell": {"beta", "x0"}, "mirror-file": {"mirror_file"}}
MAX_HEATMAP_COLS = 500

NUMERICAL_ERRORS = (
    sp.EigenSolverError,
    sp.NoTransitionError,
    sp.BelowThresholdError,
    dyn.NonFiniteFieldError,
    dyn.InsufficientCyclesError,
    dm.DivergenceError,
    wn.SelfOrthogonalModeError,
    np.linalg.LinAlgError,
    FloatingPointError,
    ZeroDivisionError,
)


class ConfigError(ValueError):
    pass


def _float_pair(text: str) -> tuple[float, float]:
    parts = [p for p in str(text).replace(":", ",").split(",") if p.strip()]
    if len(parts) != 2:
        raise ValueError("expected two numbers 'lo,hi'")
    return float(parts[0]), float(parts[1])


def _positive_int(text) -> int:
    v = int(text)
    if v < 1:
        raise ValueError("must be >= 1")
    return v


# key -> (converter, help). Keys use underscores; flags use dashes.
KEYS: dict[str, tuple] = {
    "model": (str, "potential family: squire, doublewell or mirror-file"),
    "u": (float, "Squire half-width"),
    "beta": (float, "double-well quartic coefficient"),
    "x0": (float, "double-well minimum position"),
    "mirror_file": (str, "CSV of x, R[, delta] mirror samples"),
    "gamma": (float, "tilt parameter"),
    "gamma_range": (_float_pair, "gamma interval 'lo,hi'"),
    "n_gamma": (_positive_int, "number of gamma samples in a sweep"),
    "tol_gamma": (float, "bisection tolerance on gamma"),
    "g0": (float, "pump (linear gain)"),
    "dt": (float, "time step"),
    "t_end": (float, "integration time"),
    "seed": (int, "noise seed"),
    "noise_amp": (float, "initial noise amplitude"),
    "n": (_positive_int, "grid points"),
    "k": (_positive_int, "number of eigenvalues"),
    "kappa": (float, "dimer coupling"),
    "q": (float, "dimer single-well loss"),
    "rho": (float, "dimer saturation"),
    "eta": (float, "dimer net gain (overrides g0 - q)"),
    "sigma": (float, "dimer detuning"),
    "sweep": (str, "parameter to sweep (dimer: sigma)"),
    "sigma_range": (_float_pair, "sigma interval 'lo,hi'"),
    "n_sigma": (_positive_int, "number of sigma samples"),
    "preset": (str, "physical preset (hene)"),
    "out": (str, "output directory"),
    "jobs": (_positive_int, "concurrent runs"),
}


@dataclass
class ExperimentConfig:
    subcommand: str
    figure: str | None = None
    params: dict = field(default_factory=dict)

    def get(self, key, default=None):
        return self.params.get(key, default)

    @property
    def out(self) -> Path:
        return Path(self.params.get("out", "wickpt-out"))


# --- parsing ----------------------------------------------------------------


def read_config_file(path: str | Path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _convert(params: dict, source: str) -> dict:
    out = {}
    for key, value in params.items():
        if key not in KEYS:
            raise ConfigError(f"unknown key '{key}' in {source}")
        conv = KEYS[key][0]
        try:
            out[key] = conv(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for '{key}' in {source}: {value!r} ({exc})") from exc
    return out


def _model_of(params: dict, source: str) -> str | None:
    named = params.get("model")
    if named is not None and named not in MODELS:
        raise ConfigError(f"unknown model '{named}' in {source}; choose from {', '.join(MODELS)}")
    implied = {m for m, keys in MODEL_KEYS.items() if keys & params.keys()}
    if named is not None:
        others = implied - {named}
        if others:
            raise ConfigError(f"conflicting model flags in {source}: model={named} with {sorted(others)[0]} parameters")
        return named
    if len(implied) > 1:
        raise ConfigError(f"conflicting model flags in {source}: {sorted(implied)}")
    return next(iter(implied), None)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wickpt", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, argument_default=argparse.SUPPRESS)
        if name == "figure":
            p.add_argument("figure", choices=FIGURES)
        p.add_argument("--config", help="key = value defaults file")
        for key, (_, help_) in KEYS.items():
            p.add_argument("--" + key.replace("_", "-"), dest=key, help=help_)
    return parser


def parse_config(argv: list[str] | None = None, env: dict | None = None) -> ExperimentConfig:
    """Merge the optional config file with command-line flags (flags win) and validate."""
    env = os.environ if env is None else env
    ns = vars(_build_parser().parse_args(argv))
    ns.pop("verbose", None)
    subcommand = ns.pop("subcommand")
    figure = ns.pop("figure", None)
    cfg_path = ns.pop("config", None)

    flags = _convert(ns, "command line")
    file_vals = _convert(read_config_file(cfg_path), str(cfg_path)) if cfg_path else {}
    flag_model = _model_of(flags, "command line")
    file_model = _model_of(file_vals, str(cfg_path))
    if flag_model and file_model and flag_model != file_model:
        # flags choose the model; the file's parameters for another model do not apply
        file_vals = {k: v for k, v in file_vals.items() if k not in MODEL_KEYS[file_model] and k != "model"}
    params = {**file_vals, **flags}
    model = flag_model or file_model
    if model:
        params["model"] = model
    if "jobs" not in params and env.get("WICKPT_JOBS"):
        params.update(_convert({"jobs": env["WICKPT_JOBS"]}, "WICKPT_JOBS"))
    cfg = ExperimentConfig(subcommand, figure, params)
    validate(cfg)
    return cfg


def validate(cfg: ExperimentConfig) -> None:
    p = cfg.params
    if "gamma_range" in p:
        lo, hi = p["gamma_range"]
        if not lo < hi:
            raise ConfigError(f"gamma_range: lo={lo} must be < hi={hi}")
    if "sigma_range" in p:
        lo, hi = p["sigma_range"]
        if not lo < hi:
            raise ConfigError(f"sigma_range: lo={lo} must be < hi={hi}")
    for key in ("dt", "t_end", "noise_amp", "u", "beta", "rho", "kappa", "tol_gamma"):
        if key in p and not p[key] > 0:
            raise ConfigError(f"{key} must be positive, got {p[key]}")
    for key in ("gamma", "g0", "x0", "q", "eta", "sigma"):
        if key in p and not math.isfinite(p[key]):
            raise ConfigError(f"{key} must be finite")
    if "n" in p and p["n"] < 3:
        raise ConfigError("n must be at least 3")
    if p.get("model") == "mirror-file" and "mirror_file" not in p:
        raise ConfigError("model mirror-file needs key 'mirror_file'")
    if cfg.subcommand == "dimer" and "sweep" in p and p["sweep"] != "sigma":
        raise ConfigError(f"sweep: only 'sigma' is supported, got {p['sweep']!r}")
    if cfg.subcommand == "units" and p.get("preset", "hene") != "hene":
        raise ConfigError(f"preset: unknown preset {p['preset']!r}")
    if cfg.subcommand == "weaknl" and p.get("model", "squire") != "squire":
        raise ConfigError("weaknl: only the squire model is supported")
    # build the physics objects now so parameter errors surface before any compute
    if cfg.subcommand in ("spectrum", "threshold", "evolve", "weaknl"):
        try:
            _family(cfg)
        except (OSError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc


# --- helpers ----------------------------------------------------------------


def _family(cfg: ExperimentConfig, gamma: float = 0.0):
    """(spec, grid) for the configured model."""
    p = cfg.params
    model = p.get("model", "squire")
    if model == "squire":
        spec = SquireWell(p.get("u", 6.0), gamma)
        return spec, default_grid(spec, p.get("n"))
    if model == "doublewell":
        spec = QuarticDoubleWell(p.get("beta", 7e-6), p.get("x0", 10.0), gamma)
        return spec, default_grid(spec, p.get("n"))
    grid, mirror = load_mirror_csv(p["mirror_file"])
    if "n" in p and p["n"] != grid.n:
        raise ValueError(f"n={p['n']} disagrees with the {grid.n} samples of {p['mirror_file']}")
    return sp.with_gamma(mirror, gamma), grid


def _default_gamma_range(cfg) -> tuple[float, float]:
    return (0.0, 0.002) if cfg.get("model") == "doublewell" else (0.0, 0.1)


def _jobs(cfg) -> int:
    return int(cfg.get("jobs", 1))


class _Outputs:
    """Tracks emitted files so a failed run can remove them."""

    def __init__(self, root: Path):
        self.root = root
        self.files: list[Path] = []

    def add(self, path: Path) -> Path:
        self.files.append(Path(path))
        return Path(path)

    def cleanup(self) -> None:
        for f in self.files:
            try:
                f.unlink()
            except FileNotFoundError:
                pass
        for d in sorted({f.parent for f in self.files}, key=lambda d: len(d.parts), reverse=True):
            if d != self.root and d.is_dir() and not any(d.iterdir()):
                d.rmdir()

    def manifest_entries(self) -> list[dict]:
        return [{"path": f.relative_to(self.root).as_posix(), "sha256": sha256(f)} for f in self.files]


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def _emission_dict(c: dyn.EmissionClass) -> dict:
    return {"class": type(c).__name__, **c.__dict__}


def _heatmap(outs: _Outputs, path: Path, snaps: dyn.Snapshots, grid) -> None:
    stride = max(1, math.ceil(grid.n / MAX_HEATMAP_COLS))
    outs.add(write_matrix_csv(path, "t", snaps.times, grid.x[::stride], snaps.intensity[:, ::stride]))


# --- subcommands ------------------------------------------------------------


def run_spectrum(cfg, outs: _Outputs) -> dict:
    spec, grid = _family(cfg)
    k = cfg.get("k", 6)
    if "gamma" in cfg.params and "gamma_range" not in cfg.params:
        gammas = np.array([cfg.get("gamma")])
    else:
        lo, hi = cfg.get("gamma_range", _default_gamma_range(cfg))
        gammas = np.linspace(lo, hi, cfg.get("n_gamma", 51))
    table = sp.spectrum_vs_gamma(spec, grid, cfg.get("g0", 0.0), gammas, k, jobs=_jobs(cfg))
    outs.add(table.to_csv(outs.root / "spectrum.csv"))
    return {"n_gamma": int(gammas.size), "k": k, "E_at_first_gamma": table.sorted_values[0]}


def run_threshold(cfg, outs: _Outputs) -> dict:
    spec, grid = _family(cfg)
    lo, hi = cfg.get("gamma_range", _default_gamma_range(cfg))
    tol = cfg.get("tol_gamma", 1e-3 * (hi - lo))
    res = sp.scan_threshold(spec, grid, cfg.get("g0", 0.0), (lo, hi), tol_gamma=tol, k=cfg.get("k", 6))
    report = {
        "gamma_pt": res.gamma_pt,
        "bracket": res.bracket,
        "pair_index": res.pair_index,
        "max_imag_at_hi": res.max_imag_at_hi,
        "history": [{"gamma": g, "max_abs_imag": m} for g, m in res.history],
    }
    outs.add(write_json(outs.root / "threshold.json", report))
    return {"gamma_pt": res.gamma_pt, "bracket": res.bracket}


def _evolve_one(spec, grid, g0, dt, t_end, seed, noise_amp, outdir: Path, outs: _Outputs, stride=None):
    cfg = dyn.RunConfig(spec, grid, g0, dt, t_end, noise_amp, seed, record_stride=stride)
    trace, _, snaps = dyn.evolve(cfg)
    c = dyn.classify_emission(trace)
    outs.add(write_csv(outdir / "power.csv", ["t", "P"], [trace.times, trace.power]))
    _heatmap(outs, outdir / "intensity.csv", snaps, grid)
    outs.add(write_json(outdir / "emission.json", {"gamma": spec.gamma, "g0": g0, **_emission_dict(c)}))
    return trace, c


def run_evolve(cfg, outs: _Outputs) -> dict:
    spec, grid = _family(cfg, cfg.get("gamma", 0.0))
    _, c = _evolve_one(
        spec, grid, cfg.get("g0", 0.25), cfg.get("dt", 0.05), cfg.get("t_end", 600.0),
        cfg.get("seed", 0), cfg.get("noise_amp", 1e-3), outs.root, outs,
    )
    return _emission_dict(c)


def _dimer_params(cfg, sigma=None) -> dm.DimerParams:
    kappa = cfg.get("kappa", dm.FIG3_KAPPA)
    rho = cfg.get("rho", dm.FIG3_RHO)
    q = cfg.get("q", dm.FIG3_Q)
    eta = cfg.get("eta", cfg.get("g0", 0.05) - q)
    return dm.DimerParams(eta, kappa, cfg.get("sigma", 0.0) if sigma is None else sigma, rho, cfg.get("g0"), q)


def _dimer_state0(seed: int) -> dm.DimerState:
    z = np.random.default_rng(seed).uniform(-1e-2, 1e-2, 4)
    return dm.DimerState(complex(z[0], z[1]), complex(z[2], z[3]))


def run_dimer(cfg, outs: _Outputs) -> dict:
    dt, t_end = cfg.get("dt", 0.1), cfg.get("t_end", 20000.0)
    state0 = _dimer_state0(cfg.get("seed", 0))
    try:
        base = _dimer_params(cfg)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if cfg.get("sweep") == "sigma":
        lo, hi = cfg.get("sigma_range", (0.5 * base.kappa, 1.5 * base.kappa))
        sigmas = np.linspace(lo, hi, cfg.get("n_sigma", 21))
        chunks = np.array_split(sigmas, min(_jobs(cfg), sigmas.size))

        def one(chunk):
            return dm.sweep_sigma(base.kappa, base.eta, base.rho, chunk, dt, t_end, state0)

        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            rows = [r for part in pool.map(one, chunks) for r in part]
        cols = ["sigma", "sigma_over_kappa", "drifting", "measured_period", "predicted_period"]
        outs.add(write_csv(outs.root / "sweep.csv", cols, [[float(r[c]) for r in rows] for c in cols]))
        drifting = np.array([r["drifting"] for r in rows])
        boundary = None
        if drifting.any() and not drifting.all():
            first = int(np.argmax(drifting))
            if first > 0:
                boundary = 0.5 * (sigmas[first - 1] + sigmas[first])
        return {"kappa": base.kappa, "lock_drift_boundary": boundary, "sigma_step": float(sigmas[1] - sigmas[0]) if sigmas.size > 1 else None}

    traj = dm.evolve_dimer(state0, base, dt, t_end, record_stride=max(1, int(round(t_end / dt)) // 4000))
    outs.add(
        write_csv(
            outs.root / "trajectory.csv",
            ["t", "re_a1", "im_a1", "re_a2", "im_a2", "phi", "P"],
            [traj.times, traj.a1.real, traj.a1.imag, traj.a2.real, traj.a2.imag, traj.phi, traj.power],
        )
    )
    head = {"sigma": base.sigma, "kappa": base.kappa, "eta": base.eta}
    try:
        rep = dm.lock_report(base, traj)
    except dm.RegimeError as exc:  # locked but below threshold
        head.update(regime="BelowThreshold", note=str(exc))
    else:
        if isinstance(rep.regime, dm.Locked):
            head.update(regime="Locked", phi_star=rep.regime.phi_star, r_star2=rep.regime.r_star2)
        else:
            head.update(regime="Drift", predicted_period=rep.regime.period)
        head.update(measured_period=rep.measured_period, measured_r2_mean=rep.measured_r2_mean)
    outs.add(write_json(outs.root / "lock.json", head))
    return head


def run_weaknl(cfg, outs: _Outputs) -> dict:
    spec, grid = _family(cfg, cfg.get("gamma", 0.07))
    pair = sp.mode_pair_at(assemble_hamiltonian(spec, grid, 0.0))
    report = wn.analyze(pair, cfg.get("g0", 0.25))
    report["gamma"] = spec.gamma
    outs.add(write_json(outs.root / "weaknl.json", report))
    two = report["cycles"][2]
    return {"alpha_over_beta": report["alpha_R_over_beta_R"], "two_mode_stable": two["stable"], "omega": pair.omega}


HEADLINE_GAMMAS = {"squire_gamma_pt": 0.056, "dimer_gamma_pt": 0.00065, "fig2e_gamma": 0.07}


def run_units(cfg, outs: _Outputs) -> dict:
    rep = rt.units_report(rt.HENE, HEADLINE_GAMMAS, u=cfg.get("u", 6.0))
    outs.add(write_json(outs.root / "units.json", rep))
    return {
        "L_um": rep["L_m"] * 1e6,
        "T_R_ns": rep["T_R_s"] * 1e9,
        "alpha_pt_squire_mrad": rep["tilt"]["squire_gamma_pt"]["alpha_rad"] * 1e3,
        "alpha_pt_dimer_urad": rep["tilt"]["dimer_gamma_pt"]["alpha_rad"] * 1e6,
        "aperture_2a_um": rep["aperture_2a_m"] * 1e6,
    }


# --- figures ----------------------------------------------------------------


def fig2a(cfg, outs: _Outputs) -> dict:
    spec = SquireWell(cfg.get("u", 6.0))
    grid = default_grid(spec, cfg.get("n"))
    gammas = np.linspace(0.0, 0.1, cfg.get("n_gamma", 51))
    table = sp.spectrum_vs_gamma(spec, grid, 0.0, gammas, cfg.get("k", 6), jobs=_jobs(cfg))
    outs.add(table.to_csv(outs.root / "fig2a_spectrum.csv"))
    return {"n_gamma": int(gammas.size)}


def fig2cde(cfg, outs: _Outputs) -> dict:
    spec0 = SquireWell(cfg.get("u", 6.0))
    grid = default_grid(spec0, cfg.get("n"))
    g0, dt, t_end = cfg.get("g0", 0.25), cfg.get("dt", 0.05), cfg.get("t_end", 600.0)

    def one(gamma):
        sub = outs.root / f"gamma_{gamma:g}"
        _, c = _evolve_one(sp.with_gamma(spec0, gamma), grid, g0, dt, t_end, cfg.get("seed", 0),
                           cfg.get("noise_amp", 1e-3), sub, outs)
        return gamma, _emission_dict(c)

    with ThreadPoolExecutor(max_workers=_jobs(cfg)) as pool:
        results = list(pool.map(one, (0.0, 0.04, 0.07)))
    return {f"gamma_{g:g}": r for g, r in results}


def fig3b(cfg, outs: _Outputs) -> dict:
    spec = QuarticDoubleWell(cfg.get("beta", 7e-6), cfg.get("x0", 10.0))
    grid = default_grid(spec, cfg.get("n"))
    gammas = np.linspace(0.0, 0.001, cfg.get("n_gamma", 41))
    table = sp.spectrum_vs_gamma(spec, grid, 0.0, gammas, cfg.get("k", 4), jobs=_jobs(cfg))
    gpt = sp.scan_threshold(spec, grid, 0.0, (0.0, 0.002), tol_gamma=2e-6, k=2).gamma_pt
    red = dm.extract_reduced_params(gammas, table.sorted_values, gamma_max=0.8 * gpt)
    lv = red.levels(gammas)
    extra = {"re_red1": lv[:, 0].real, "re_red2": lv[:, 1].real, "im_red1": lv[:, 0].imag, "im_red2": lv[:, 1].imag}
    outs.add(table.to_csv(outs.root / "fig3b_spectrum.csv", extra=extra))
    head = {"kappa": red.kappa, "q": red.q, "sigma_slope": red.sigma_slope, "gamma_pt": gpt, "gamma_pt_reduced": red.gamma_pt}
    outs.add(write_json(outs.root / "fig3b_reduced.json", head))
    return head


FIG3C_GAMMAS = (0.0, 0.0005, 0.0007)


def fig3c(cfg, outs: _Outputs) -> dict:
    spec0 = QuarticDoubleWell(cfg.get("beta", 7e-6), cfg.get("x0", 10.0))
    grid = default_grid(spec0, cfg.get("n"))
    g0 = cfg.get("g0", 0.05)
    dt, t_end = cfg.get("dt", 0.2), cfg.get("t_end", 20000.0)
    sample_every = t_end / 4000
    pde_stride = max(1, int(round(sample_every / dt)))
    ode_dt = min(0.1, dt)
    ode_stride = max(1, int(round(pde_stride * dt / ode_dt)))
    slope = dm.FIG3_SIGMA_SLOPE

    def one(gamma):
        sub = outs.root / f"gamma_{gamma:g}"
        trace, c_pde = _evolve_one(sp.with_gamma(spec0, gamma), grid, g0, dt, t_end, cfg.get("seed", 0),
                                   cfg.get("noise_amp", 1e-3), sub, outs, stride=pde_stride)
        p = dm.DimerParams.from_gain(g0, cfg.get("q", dm.FIG3_Q), cfg.get("kappa", dm.FIG3_KAPPA),
                                     slope * gamma, cfg.get("rho", dm.FIG3_RHO))
        traj = dm.evolve_dimer(_dimer_state0(cfg.get("seed", 0)), p, ode_dt, t_end, record_stride=ode_stride)
        c_ode = dyn.classify_emission(dyn.PowerTrace(traj.times, traj.power))
        m = min(trace.times.size, traj.times.size)
        outs.add(write_csv(sub / "paired_power.csv", ["t", "P_pde", "P_dimer"],
                           [trace.times[:m], trace.power[:m], traj.power[:m]]))
        return gamma, {"pde": _emission_dict(c_pde), "dimer": _emission_dict(c_ode), "sigma": p.sigma}

    with ThreadPoolExecutor(max_workers=_jobs(cfg)) as pool:
        results = list(pool.map(one, FIG3C_GAMMAS))
    return {f"gamma_{g:g}": r for g, r in results}


FIGURE_RUNNERS = {"fig2a": fig2a, "fig2cde": fig2cde, "fig3b": fig3b, "fig3c": fig3c}
RUNNERS = {
    "spectrum": run_spectrum,
    "threshold": run_threshold,
    "evolve": run_evolve,
    "dimer": run_dimer,
    "weaknl": run_weaknl,
    "units": run_units,
}


def run(cfg: ExperimentConfig) -> dict:
    """Execute ``cfg`` and write the manifest; returns the manifest dict."""
    root = cfg.out
    root.mkdir(parents=True, exist_ok=True)
    outs = _Outputs(root)
    runner = FIGURE_RUNNERS[cfg.figure] if cfg.subcommand == "figure" else RUNNERS[cfg.subcommand]
    t0 = time.perf_counter()
    try:
        headline = runner(cfg, outs)
    except BaseException:
        outs.cleanup()
        raise
    manifest = {
        "config": {"subcommand": cfg.subcommand, "figure": cfg.figure, **cfg.params},
        "code_version": _version(),
        "wall_time_s": time.perf_counter() - t0,
        "files": outs.manifest_entries(),
        "headline": headline,
    }
    write_json(root / "manifest.json", manifest)
    return manifest


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    logging.basicConfig(level=logging.INFO if "-v" in argv or "--verbose" in argv else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = parse_config(argv)
        manifest = run(cfg)
    except ConfigError as exc:
        print(f"wickpt: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NUMERICAL_ERRORS as exc:
        print(f"wickpt: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    print(f"wrote {len(manifest['files'])} files to {cfg.out} ({manifest['wall_time_s']:.1f} s)")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
