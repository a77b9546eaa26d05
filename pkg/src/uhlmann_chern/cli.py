"""Command line front end.

A single JSON config file drives every run.  The config is validated
against the bundled JSON schema (unknown keys are rejected), then the
requested command executes:

* ``sweep``  -- temperature sweep of a thermal Chern integral; writes
  ``sweep.csv`` and ``summary.json``.
* ``map``    -- curvature maps over a 2D grid at one temperature; writes
  ``curvature.csv`` and ``berry.csv``.
* ``chern``  -- a single pure-state invariant (lattice field strength in
  2D, wedge integral in 4D); writes ``chern.json``.
* ``verify`` -- self-check table of the package invariants.

Exit codes: 0 success, 1 verification failure, 2 config error,
3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import math
import subprocess
import sys
import time
import warnings
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__, chern, geometry, linalg, models
from .errors import ConfigError, UhlmannChernError

# Fraction of the smallest coordinate scale used as the finite-difference
# step when the verify command cross-checks the trace routes.  Smaller
# than the library default because the check tolerance is tighter than
# the default step's truncation error near sharp curvature features.
VERIFY_FD_STEP_FRACTION = 2e-5

_SAMPLE_SEED = 20260818


def _load_schema() -> dict:
    text = resources.files(__package__).joinpath("config_schema.json").read_text()
    return json.loads(text)


def _schema_errors(config: object) -> list[str]:
    validator = jsonschema.Draft202012Validator(_load_schema())
    out = []
    for err in sorted(validator.iter_errors(config), key=lambda e: list(map(str, e.absolute_path))):
        path = "/".join(str(part) for part in err.absolute_path) or "<root>"
        out.append(f"{path}: {err.message}")
    return out


def _build_model(cfg: dict):
    block = cfg["model"]
    cls = models.MODEL_VARIANTS[block["variant"]]
    try:
        return cls(**block["parameters"])
    except TypeError as exc:
        raise ConfigError(f"model.parameters: {exc}") from None


def _build_grid(model, cfg: dict) -> chern.GridSpec:
    block = cfg["grid"]
    resolution = tuple(block["resolution"])
    if len(resolution) != model.manifold.dim:
        raise ConfigError(
            f"grid.resolution: expected {model.manifold.dim} entries for "
            f"{cfg['model']['variant']}, got {len(resolution)}"
        )
    return chern.GridSpec(model.manifold, resolution, offset=block.get("offset", True))


def _degeneracy_tol(cfg: dict) -> float:
    return cfg.get("tolerances", {}).get("degeneracy", linalg.DEGENERACY_TOL)


def _fd_step_fraction(cfg: dict) -> float:
    return cfg.get("tolerances", {}).get("fd_step", VERIFY_FD_STEP_FRACTION)


def _format(value: float) -> str:
    return f"{float(value):.17g}"


def _write_csv(path: Path, header: str, rows) -> None:
    # Manual writer: fixed LF endings and 17 significant digits so that
    # reruns of the same config are byte-identical.
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(_format(v) for v in row) + "\n")


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _version_string() -> str:
    try:
        proc = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            cwd=Path(__file__).resolve().parent,
            capture_output=True,
            text=True,
            timeout=5,
        )
        if proc.returncode == 0 and proc.stdout.strip():
            return proc.stdout.strip()
    except OSError:
        pass
    return f"v{__version__}"


def _beta_from_temperature(t_over_r0: float, r0: float) -> float:
    if t_over_r0 == 0.0:
        return models.BETA_INF
    return 1.0 / (t_over_r0 * r0)


# ---------------------------------------------------------------------------
# sweep


def cmd_sweep(cfg: dict, out_dir: Path, workers: int) -> int:
    model = _build_model(cfg)
    grid = _build_grid(model, cfg)
    run = cfg["run"]
    dim = model.manifold.dim
    order = run.get("order", 1 if dim == 2 else 2)
    if (order == 1) != (dim == 2):
        raise ConfigError(f"run.order: order {order} needs a {'2' if order == 1 else '4'}D model")
    temperatures = run.get("temperatures")
    if temperatures is None:
        raise ConfigError("run.temperatures: required for sweep")

    tol = _degeneracy_tol(cfg)
    start = time.perf_counter()
    try:
        result = chern.temperature_sweep(
            model, temperatures, grid=grid, order=order, workers=workers, degeneracy_tol=tol
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    wall = time.perf_counter() - start

    rows = [
        (t, v, d["imag_residual"], d["route_disagreement"])
        for t, v, d in zip(result.temperatures, result.values, result.diagnostics)
    ]
    _write_csv(out_dir / "sweep.csv", "T_over_R0,n_U,imag_residual,route_disagreement", rows)
    _write_json(
        out_dir / "summary.json",
        {
            "command": "sweep",
            "model": models.model_id(model),
            "model_variant": cfg["model"]["variant"],
            "grid_resolution": list(grid.resolution),
            "grid_offset": grid.offset,
            "r0": model.r0,
            "order": order,
            "workers": workers,
            "temperatures": [float(t) for t in temperatures],
            "tolerances": {"degeneracy": tol},
            "max_imag_residual": max(d["imag_residual"] for d in result.diagnostics),
            "max_trace_residual": max(d["max_trace_residual"] for d in result.diagnostics),
            "max_route_disagreement": max(d["route_disagreement"] for d in result.diagnostics),
            "wall_time_s": wall,
            "version": _version_string(),
        },
    )
    for t, v, *_ in rows:
        print(f"T/R0={_format(t)}  n_U={_format(v)}")
    return 0


# ---------------------------------------------------------------------------
# map


def cmd_map(cfg: dict, out_dir: Path, workers: int) -> int:
    model = _build_model(cfg)
    grid = _build_grid(model, cfg)
    if model.manifold.dim != 2:
        raise ConfigError("run.type: map needs a 2D model")
    temperatures = cfg["run"].get("temperatures")
    if not temperatures or len(temperatures) != 1:
        raise ConfigError("run.temperatures: map takes exactly one value")
    t_over_r0 = float(temperatures[0])
    if t_over_r0 < 0:
        raise ConfigError("run.temperatures: must be nonnegative")
    beta = _beta_from_temperature(t_over_r0, model.r0)
    tol = _degeneracy_tol(cfg)

    trace_rows = []
    berry_rows = []
    for start, stop in grid.chunk_ranges():
        pts = grid.points_range(start, stop)
        trace = geometry.thermal_trace_grid(model, pts, beta, degeneracy_tol=tol)[0]
        f, _ = geometry.ground_block_curvature_grid(model, pts, degeneracy_tol=tol)
        berry = np.trace(f[0], axis1=-2, axis2=-1)
        for i in range(pts.shape[0]):
            trace_rows.append((pts[i, 0], pts[i, 1], trace[i].imag))
            berry_rows.append((pts[i, 0], pts[i, 1], berry[i].imag))

    _write_csv(out_dir / "curvature.csv", "kx,ky,Im_Tr_rhoFU", trace_rows)
    _write_csv(out_dir / "berry.csv", "kx,ky,Im_F_B", berry_rows)
    print(f"map: {len(trace_rows)} points, T/R0={_format(t_over_r0)}")
    return 0


# ---------------------------------------------------------------------------
# chern


def cmd_chern(cfg: dict, out_dir: Path, workers: int) -> int:
    model = _build_model(cfg)
    grid = _build_grid(model, cfg)
    run = cfg["run"]
    dim = model.manifold.dim
    if dim == 2:
        value = chern.pure_chern_fhs(model, run.get("band", 0), grid)
        kind = "first"
    else:
        result = chern.second_chern_pure(model, grid, workers=workers)
        value = float(result)
        kind = "second"
    _write_json(
        out_dir / "chern.json",
        {
            "command": "chern",
            "kind": kind,
            "model": models.model_id(model),
            "grid_resolution": list(grid.resolution),
            "value": value,
            "version": _version_string(),
        },
    )
    print(f"chern ({kind}): {_format(value)}")
    return 0


# ---------------------------------------------------------------------------
# verify


def _sample_points(model, rng, count):
    man = model.manifold
    if man.kind == "sphere":
        theta = rng.uniform(0.35, math.pi - 0.35, count)
        phi = rng.uniform(0.0, 2.0 * math.pi, count)
        return np.column_stack([theta, phi])
    low = np.asarray(man.origin, dtype=float)
    span = np.asarray(man.cell, dtype=float)
    return low + span * rng.uniform(0.05, 0.95, (count, man.dim))


def _verify_models(rng):
    sphere = models.TwoLevelSphere()
    haldane = models.Haldane(t1=1.0, t2=0.4, phi=1.1, M=0.3)
    fourband = models.FourBandGamma(m=1.5)
    coherent = models.CoherentOscillator(fock_dim=24)
    return sphere, haldane, fourband, coherent


def _check_gamma(cfg, rng):
    residual = models.gamma_anticommutation_residual()
    return residual <= 1e-12, f"residual={residual:.3g}"


def _check_grouping(cfg, rng):
    tol = _degeneracy_tol(cfg)
    model = models.FourBandGamma(m=1.5)
    sizes = set()
    for p in _sample_points(model, rng, 6):
        dec = linalg.hermitian_eig(model.hamiltonian(p), degeneracy_tol=tol)
        sizes.update(len(g) for g in dec.groups)
    return sizes == {2}, f"cluster sizes={sorted(sizes)} at degeneracy_tol={tol:g}"


def _check_coefficient_bounds(cfg, rng):
    worst = 0.0
    ok = True
    for _ in range(40):
        lam = rng.dirichlet(np.ones(6))[None, :]
        c = geometry._mixing_batch(lam)[0]
        ok &= bool(np.all(c >= -1e-15) and np.all(c <= 1.0 + 1e-15))
        ok &= bool(np.allclose(c, c.T, atol=1e-15))
        ok &= bool(np.allclose(np.diag(c), 0.0, atol=1e-15))
        worst = max(worst, float(np.max(np.abs(c - c.T))))
    return ok, f"max asymmetry={worst:.3g}"


def _check_connection_traceless(cfg, rng):
    tol = _degeneracy_tol(cfg)
    worst = 0.0
    for model in _verify_models(rng):
        for p in _sample_points(model, rng, 3):
            for beta in (0.7, 2.0):
                state = models.thermal_state(model, p, beta, degeneracy_tol=tol)
                grads = geometry._gradient_stack(model, p[None, :])[:, 0]
                field = geometry.uhlmann_connection_spectral(state, grads)
                for mu in range(model.manifold.dim):
                    a = field.component(mu)
                    worst = max(worst, abs(np.trace(a)))
    return worst <= 1e-10, f"max |tr A|={worst:.3g}"


def _check_curvature_traceless(cfg, rng):
    tol = _degeneracy_tol(cfg)
    worst = 0.0
    for model in _verify_models(rng)[:2]:
        p = _sample_points(model, rng, 1)[0]
        f = geometry.uhlmann_curvature(model, p, 1.2 / model.r0, degeneracy_tol=tol)
        scale = max(np.max(np.abs(f.matrices)), 1e-30)
        worst = max(worst, float(np.max(np.abs(f.trace_components()))) / scale)
    return worst <= 1e-8, f"max |tr F|/max|F|={worst:.3g}"


def _check_connection_routes(cfg, rng):
    tol = _degeneracy_tol(cfg)
    worst = 0.0
    sphere, haldane, _, coherent = _verify_models(rng)
    for model in (sphere, haldane, coherent):
        p = _sample_points(model, rng, 1)[0]
        # Finite differencing of sqrt(rho) cannot resolve thermal weights
        # below its noise floor (~1e-12); keep the truncated oscillator's
        # smallest weight above that by bounding beta * fock_dim.
        beta = 0.8 if model is coherent else 1.5 / model.r0
        state = models.thermal_state(model, p, beta, degeneracy_tol=tol)
        grads = geometry._gradient_stack(model, p[None, :])[:, 0]
        spectral = geometry.uhlmann_connection_spectral(state, grads)
        fd = geometry.uhlmann_connection_sqrt_fd(model, p, beta, degeneracy_tol=tol)
        worst = max(worst, float(np.max(np.abs(spectral.components - fd.components))))
    return worst <= 1e-6, f"max route gap={worst:.3g}"


def _check_trace_routes(cfg, rng):
    tol = _degeneracy_tol(cfg)
    fraction = _fd_step_fraction(cfg)
    worst = 0.0
    sphere, haldane, _, _ = _verify_models(rng)
    for model in (sphere, haldane):
        p = _sample_points(model, rng, 1)[0]
        beta = 1.5 / model.r0
        h = fraction * min(model.manifold.scales())
        state = models.thermal_state(model, p, beta, degeneracy_tol=tol)
        grads = geometry._gradient_stack(model, p[None, :])[:, 0]
        direct = geometry.thermal_trace_spectral(state, grads)[0]
        f = geometry.uhlmann_curvature(model, p, beta, h=h, degeneracy_tol=tol)
        via_field = geometry.weighted_trace(state, f)[0]
        worst = max(worst, abs(direct - via_field))
    return worst <= 1e-5, f"max route gap={worst:.3g}"


def _check_degeneracy_null(cfg, rng):
    tol = _degeneracy_tol(cfg)
    model = models.FourBandGamma(m=1.5)
    worst = 0.0
    for p in _sample_points(model, rng, 4):
        state = models.thermal_state(model, p, 2.0, degeneracy_tol=tol)
        grads = geometry._gradient_stack(model, p[None, :])[:, 0]
        field = geometry.uhlmann_connection_spectral(state, grads)
        v = state.spectrum.eigenvectors
        for mu in range(4):
            tilde = v.conj().T @ field.component(mu) @ v
            for group in state.spectrum.groups:
                idx = np.asarray(group)
                worst = max(worst, float(np.max(np.abs(tilde[np.ix_(idx, idx)]))))
    return worst <= 1e-13, f"max in-cluster |A|={worst:.3g}"


def _check_zero_t_abelian(cfg, rng):
    tol = _degeneracy_tol(cfg)
    worst = 0.0
    sphere, haldane, _, _ = _verify_models(rng)
    for model in (sphere, haldane):
        for p in _sample_points(model, rng, 4):
            state = models.thermal_state(model, p, models.BETA_INF, degeneracy_tol=tol)
            grads = geometry._gradient_stack(model, p[None, :])[:, 0]
            trace = geometry.thermal_trace_spectral(state, grads)[0]
            berry = geometry.berry_curvature(model, p, degeneracy_tol=tol).scalar(0, 1)
            worst = max(worst, abs(trace - berry))
    return worst <= 1e-9, f"max gap={worst:.3g}"


def _check_zero_t_nonabelian(cfg, rng):
    tol = _degeneracy_tol(cfg)
    model = models.FourBandGamma(m=1.5)
    worst = 0.0
    for p in _sample_points(model, rng, 3):
        wz = geometry.wz_curvature(model, p, (0, 1), degeneracy_tol=tol)
        proj = geometry.projector_limit_curvature(model, p, degeneracy_tol=tol)
        worst = max(worst, float(np.max(np.abs(wz.matrices - proj.matrices))))
    return worst <= 1e-10, f"max gap={worst:.3g}"


def _check_high_temperature(cfg, rng):
    tol = _degeneracy_tol(cfg)
    worst = 0.0
    for model in _verify_models(rng):
        p = _sample_points(model, rng, 1)[0]
        state = models.thermal_state(model, p, 0.0, degeneracy_tol=tol)
        grads = geometry._gradient_stack(model, p[None, :])[:, 0]
        field = geometry.uhlmann_connection_spectral(state, grads)
        worst = max(worst, float(np.max(np.abs(field.components))))
        worst = max(worst, float(np.max(np.abs(geometry.thermal_trace_spectral(state, grads)))))
    return worst <= 1e-12, f"max magnitude={worst:.3g}"


def _check_quantization(cfg, rng):
    model = models.Haldane(t1=1.0, t2=0.5, phi=math.pi / 2, M=0.0)
    grid = chern.default_grid(model, 100)
    n_u = chern.first_thermal_uc(model, models.BETA_INF, grid=grid)
    lattice = chern.pure_chern_fhs(model, 0, grid)
    ok = abs(float(n_u) - 1.0) <= 5e-3 and lattice == 1
    return ok, f"n_U={float(n_u):.6f}, lattice invariant={lattice}"


_VERIFY_CHECKS = [
    ("models", "gamma anticommutation", _check_gamma),
    ("linalg", "degeneracy grouping", _check_grouping),
    ("geometry", "coefficient bounds", _check_coefficient_bounds),
    ("geometry", "connection tracelessness", _check_connection_traceless),
    ("geometry", "curvature tracelessness", _check_curvature_traceless),
    ("geometry", "connection route equivalence", _check_connection_routes),
    ("geometry", "trace route equivalence", _check_trace_routes),
    ("geometry", "degeneracy null", _check_degeneracy_null),
    ("geometry", "zero-temperature correspondence (abelian)", _check_zero_t_abelian),
    ("geometry", "zero-temperature correspondence (non-abelian)", _check_zero_t_nonabelian),
    ("geometry", "high-temperature vanishing", _check_high_temperature),
    ("chern", "quantization at zero temperature", _check_quantization),
]


def cmd_verify(cfg: dict, out_dir: Path, workers: int) -> int:
    rng = np.random.default_rng(_SAMPLE_SEED)
    failures = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for module, name, check in _VERIFY_CHECKS:
            try:
                ok, detail = check(cfg, rng)
            except UhlmannChernError as exc:
                ok, detail = False, f"raised {type(exc).__name__}: {exc}"
            status = "PASS" if ok else "FAIL"
            print(f"{status}  {module}.{name}  ({detail})")
            if not ok:
                failures.append(f"{module}.{name}")
    if failures:
        print("verify failure: " + ", ".join(failures), file=sys.stderr)
        return 1
    print(f"verify: {len(_VERIFY_CHECKS)} checks passed")
    return 0


# ---------------------------------------------------------------------------
# entry point


_COMMANDS = {
    "sweep": cmd_sweep,
    "map": cmd_map,
    "chern": cmd_chern,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="uhlmann-chern",
        description="Thermal Chern integrals from a JSON run configuration.",
    )
    parser.add_argument("--config", required=True, help="path to the JSON config file")
    parser.add_argument("--workers", type=int, default=None, help="override config workers")
    parser.add_argument("--out", default=None, help="override config output_dir")
    args = parser.parse_args(argv)

    try:
        raw = Path(args.config).read_text()
    except OSError as exc:
        print(f"config error: cannot read {args.config}: {exc}", file=sys.stderr)
        return 2
    try:
        cfg = json.loads(raw)
    except json.JSONDecodeError as exc:
        print(f"config error: invalid JSON: {exc}", file=sys.stderr)
        return 2

    errors = _schema_errors(cfg)
    if errors:
        for line in errors:
            print(f"config error: {line}", file=sys.stderr)
        return 2

    workers = args.workers if args.workers is not None else cfg.get("workers", 1)
    if workers < 1:
        print("config error: workers: must be at least 1", file=sys.stderr)
        return 2
    out_dir = Path(args.out) if args.out is not None else Path(cfg.get("output_dir", "."))
    out_dir.mkdir(parents=True, exist_ok=True)

    command = _COMMANDS[cfg["run"]["type"]]
    try:
        return command(cfg, out_dir, workers)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except UhlmannChernError as exc:
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


def run() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
