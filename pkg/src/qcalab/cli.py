"""Command-line front end: ``qcalab {verify,dispersion,evolve,maxwell,units}``.

Settings come from flags and, optionally, a ``key = value`` config file
(``--config``); flags win. Exit status is 0 on success, 1 when a
verification fails, 2 on configuration errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import _io
from .errors import CapExceededError, ConfigError, QCAError, WrapAroundError
from .kspace import (
    BrillouinZone,
    dispersion,
    dispersion_table,
    isotropy_check,
    translation_covariance_check,
    unitarity_report,
)
from .lattice import PacketSpec, make_packet, track, write_trajectory, save_field
from .maxwell import (
    conjugation_rotation_check,
    deviation_scan,
    maxwell_residual,
    write_deviation_csv,
)
from .models import (
    DiracParams,
    WeylVariant,
    dirac_isotropy_group,
    dirac_rule,
    dispersion_closed_form,
    planck_scale,
    planck_units,
    target_dirac_hamiltonian,
    target_weyl_hamiltonian,
    weyl_isotropy_group,
    weyl_rule,
)

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

MODELS = ("weyl1d", "weyl2d", "weyl2dA", "weyl2dB", "weyl3d+", "weyl3d-",
          "weyl3d+A", "weyl3d+B", "weyl3d-A", "weyl3d-B", "dirac")

# dest -> (type, default); shared by flags and config keys
SETTINGS = {
    "model": (str, "weyl3d+"),
    "base": (str, None),
    "mass": (float, 0.0),
    "theta": (float, 0.0),
    "shape": (str, None),
    "k0": (str, None),
    "width": (float, None),
    "branch": (str, "+"),
    "steps": (int, None),
    "tol": (float, 1e-12),
    "seed": (int, 0),
    "samples": (int, None),
    "grid": (int, None),
    "out": (str, None),
    "perturb": (float, 0.0),
    "plot": (bool, False),
    "target": (str, "none"),
    "snapshot": (str, None),
    "nk": (str, "2,4,6"),
    "excitations": (str, "0,1,2"),
    "fock_cap": (int, 12),
    "a": (float, None),
    "tau": (float, None),
    "M": (float, None),
    "c": (float, None),
    "hbar": (float, None),
    "planck": (bool, False),
}


class Config(dict):
    def __getattr__(self, key):
        try:
            return self[key]
        except KeyError:
            raise AttributeError(key) from None


def parse_config_file(path) -> dict:
    """``key = value`` lines; ``#`` starts a comment; keys may use ``-``."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config file: {e}") from None
    for no, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{no}: expected 'key = value'")
        key, val = (x.strip() for x in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in SETTINGS:
            raise ConfigError(f"{path}:{no}: unknown key {key!r}")
        out[key] = val
    return out


def _coerce(key, raw):
    typ, _ = SETTINGS[key]
    if raw is None or not isinstance(raw, str):
        return raw
    if typ is bool:
        low = raw.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{key}: expected a boolean, got {raw!r}")
    try:
        return typ(raw)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw!r} as {typ.__name__}") from None


def resolve(args: argparse.Namespace) -> Config:
    file_vals = parse_config_file(args.config) if getattr(args, "config", None) else {}
    cfg = Config()
    for key, (_, default) in SETTINGS.items():
        val = getattr(args, key, None)
        if val is None or (val is False and key in file_vals):
            val = file_vals.get(key, default)
        cfg[key] = _coerce(key, val)
    return cfg


def _floats(text, what):
    try:
        return [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"{what}: expected comma-separated numbers, got {text!r}") from None


def _ints(text, what):
    try:
        return [int(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"{what}: expected comma-separated integers, got {text!r}") from None


def parse_variant(name: str, theta: float = 0.0) -> WeylVariant:
    try:
        if name == "weyl1d":
            return WeylVariant(1)
        if name in ("weyl2d", "weyl2dA", "weyl2dB"):
            return WeylVariant(2, "+", "B" if name.endswith("B") else "A", theta)
        if name.startswith("weyl3d") and len(name) in (7, 8):
            return WeylVariant(3, name[6], name[7] if len(name) == 8 else "A")
    except ValueError as e:
        raise ConfigError(str(e)) from None
    raise ConfigError(f"unknown model {name!r}; choose from {', '.join(MODELS)}")


def build_model(cfg: Config):
    """Return ``(rule, variant, mass, target_fn, isotropy_group)``."""
    name = cfg.model
    theta = cfg.theta
    if name == "dirac":
        variant = parse_variant(cfg.base or "weyl3d+", theta)
        try:
            p = DiracParams(cfg.mass, variant)
        except ValueError as e:
            raise ConfigError(str(e)) from None
        rule = dirac_rule(p)
        d = variant.dim
        return rule, variant, p.mass, (lambda k: target_dirac_hamiltonian(d, k, p.mass)), dirac_isotropy_group(p)
    if cfg.mass:
        raise ConfigError("mass is only meaningful for the dirac model")
    variant = parse_variant(name, theta)
    rule = weyl_rule(variant)
    return rule, variant, 0.0, (lambda k: target_weyl_hamiltonian(variant.dim, k, variant)), weyl_isotropy_group(variant)


def _emit(cfg, payload, default_name=None):
    text = _io.json_text(payload)
    if cfg.out:
        _io.atomic_write_text(cfg.out, text)
    else:
        sys.stdout.write(text)


# --- subcommands -----------------------------------------------------------------

def cmd_verify(cfg: Config) -> int:
    rule, variant, mass, _, group = build_model(cfg)
    if cfg.perturb:
        rule = rule.scaled(rule.labels[0], 1.0 + cfg.perturb)
    tol = cfg.tol
    rng = np.random.default_rng(cfg.seed)
    unit = unitarity_report(rule, tol)
    iso = isotropy_check(rule, group, tol)
    torus = 5 if rule.dim < 3 else 4
    trans = translation_covariance_check(rule, torus, samples=4, rng=rng, tol=tol)
    ks = BrillouinZone(rule.lattice).sample(cfg.samples or 1000, rng)
    try:
        num = dispersion(rule, ks, tol=max(tol, 1e-10))
        ana = dispersion_closed_form(variant, ks, mass)
        disp_res = float(np.abs(num[:, -1] - ana).max() if rule.s == 2 else
                         max(np.abs(num[:, -1] - ana).max(), np.abs(num[:, 0] + ana).max()))
        disp_ok = disp_res <= max(tol, 1e-10)
    except QCAError as e:
        disp_res, disp_ok = str(e), False
    ok = unit.passed and iso.passed and trans and disp_ok
    _emit(cfg, {
        "command": "verify",
        "model": rule.name,
        "unitarity": unit.to_dict(),
        "isotropy": iso.to_dict(),
        "translation_covariance": {"pass": bool(trans), "torus": torus},
        "dispersion": {"max_residual": disp_res, "pass": bool(disp_ok), "samples": len(ks)},
        "perturb": cfg.perturb,
        "pass": bool(ok),
    })
    return EXIT_OK if ok else EXIT_FAIL


def cmd_dispersion(cfg: Config) -> int:
    rule, *_ = build_model(cfg)
    n = cfg.grid if cfg.grid is not None else 101
    if n < 1:
        raise ConfigError("grid size must be positive")
    ks = BrillouinZone(rule.lattice).grid(n)
    header, rows = dispersion_table(rule, ks)
    out = cfg.out or "dispersion.csv"
    _io.write_csv(out, header, rows)
    if cfg.plot:
        _io.write_plot_script(out, 1, list(range(rule.dim + 1, rule.dim + rule.s + 1)),
                              f"dispersion {rule.name}")
    print(f"wrote {len(rows)} rows to {out}")
    return EXIT_OK


def _packet_defaults(rule):
    if rule.dim == 1:
        return (256,), (0.5,), 0.05
    if rule.dim == 2:
        return (96, 96), (0.5, 0.0), 0.05
    return (48, 48, 48), (0.6, 0.0, 0.0), 0.08


def cmd_evolve(cfg: Config) -> int:
    rule, variant, _, target, _ = build_model(cfg)
    shape0, k00, w0 = _packet_defaults(rule)
    shape = tuple(_ints(cfg.shape, "shape")) if cfg.shape else shape0
    if len(shape) == 1 and rule.dim > 1:
        shape = shape * rule.dim
    k0 = tuple(_floats(cfg.k0, "k0")) if cfg.k0 else k00
    steps = cfg.steps if cfg.steps is not None else 50
    if len(shape) != rule.dim or len(k0) != rule.dim:
        raise ConfigError(f"shape and k0 need {rule.dim} components")
    if steps < 0:
        raise ConfigError("steps must be non-negative")
    if cfg.target not in ("none", "continuum"):
        raise ConfigError("target must be 'none' or 'continuum'")
    try:
        spec = PacketSpec(k0, cfg.width or w0, branch=cfg.branch)
        field = make_packet(rule, shape, spec)
    except ValueError as e:
        raise ConfigError(str(e)) from None
    tgt = target if cfg.target == "continuum" else None
    traj = track(rule, field, steps, target=tgt, k_center=k0, raise_on_wrap=False)
    header, rows = traj.table()
    header.append("wrapped")
    for i, r in enumerate(rows):
        r.append(int(traj.wrapped_at is not None and i == len(rows) - 1))
    out = cfg.out or "trajectory.csv"
    _io.write_csv(out, header, rows)
    if cfg.plot:
        _io.write_plot_script(out, 1, list(range(2, rule.dim + 2)), f"centroid {rule.name}")
    if cfg.snapshot:
        from .lattice import evolve_spectral

        save_field(cfg.snapshot, evolve_spectral(rule, field, int(traj.times[-1])))
    vel = traj.velocity if len(traj.times) > 1 else np.zeros(rule.dim)
    print(f"velocity {' '.join(f'{x:.6f}' for x in vel)}")
    if traj.wrapped_at is not None:
        print(f"wrap-around detected at step {traj.wrapped_at}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_maxwell(cfg: Config) -> int:
    variant = parse_variant(cfg.model if cfg.model != "dirac" else (cfg.base or "weyl3d+"), cfg.theta)
    if variant.dim != 3:
        raise ConfigError("the photon construction needs a d=3 Weyl model")
    rng = np.random.default_rng(cfg.seed)
    n = cfg.samples or 100
    sizes = _ints(cfg.nk, "nk")
    exc = _ints(cfg.excitations, "excitations")
    if any(2 * s > cfg.fock_cap for s in sizes):
        raise ConfigError(f"N_k up to {max(sizes)} needs {2 * max(sizes)} modes, cap is {cfg.fock_cap}")
    samples = []
    worst = {"rotation": 0.0, "transversality": 0.0, "curl": 0.0, "curl_fd": 0.0}
    for _ in range(n):
        k = rng.uniform(-1.5, 1.5, 3)
        t = int(rng.integers(0, 11))
        rot = conjugation_rotation_check(variant, k, range(t + 1))
        rep = maxwell_residual(variant, k, [0.0, 0.5 * t, float(t)], rng=rng)
        worst["rotation"] = max(worst["rotation"], rot.deviation)
        for key in ("transversality", "curl", "curl_fd"):
            worst[key] = max(worst[key], getattr(rep, key))
        samples.append({**rep.to_dict(), "t": t, "rotation": rot.deviation})
    trend = []
    for mag in (1e-3, 1e-2, 1e-1):
        d = rng.normal(size=3)
        d /= np.linalg.norm(d)
        trend.append({"|k|": mag, "speed_mismatch": maxwell_residual(variant, mag * d, [0.0]).speed_mismatch})
    try:
        rows = deviation_scan(sizes, exc, cap=cfg.fock_cap, rng=rng)
    except CapExceededError as e:
        raise ConfigError(str(e)) from None
    outdir = Path(cfg.out or ".")
    write_deviation_csv(outdir / "deviation.csv", rows)
    ok = (worst["rotation"] <= 1e-12 and worst["transversality"] <= 1e-12
          and worst["curl"] <= 1e-10)
    _io.write_json(outdir / "maxwell_report.json", {
        "command": "maxwell",
        "model": variant.label,
        "samples": samples,
        "worst": worst,
        "small_k_trend": trend,
        "deviation": [{"N_k": a, "M": b, "deviation": c} for a, b, c in rows],
        "pass": bool(ok),
    })
    if cfg.plot:
        _io.write_plot_script(outdir / "deviation.csv", 1, [3], "commutator deviation")
    print(f"wrote {outdir / 'maxwell_report.json'} and {outdir / 'deviation.csv'}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_units(cfg: Config) -> int:
    try:
        if cfg.planck:
            u = planck_scale()
        else:
            u = planck_units(a=cfg.a, tau=cfg.tau, M=cfg.M, c=cfg.c, hbar=cfg.hbar)
    except ValueError as e:
        raise ConfigError(str(e)) from None
    _emit(cfg, {"command": "units", "a": u.a, "tau": u.tau, "M": u.M, "c": u.c, "hbar": u.hbar})
    return EXIT_OK


COMMANDS = {
    "verify": cmd_verify,
    "dispersion": cmd_dispersion,
    "evolve": cmd_evolve,
    "maxwell": cmd_maxwell,
    "units": cmd_units,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qcalab", description="Quantum cellular automata toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value settings file (flags override)")
    common.add_argument("--model", help=f"one of {', '.join(MODELS)}")
    common.add_argument("--base", help="Weyl model under a dirac rule (default weyl3d+)")
    common.add_argument("--mass", type=float, help="Dirac mass in [0, 1]")
    common.add_argument("--theta", type=float, help="d=2 rotation angle")
    common.add_argument("--seed", type=int, help="random seed")
    common.add_argument("--tol", type=float, help="verification tolerance")
    common.add_argument("--samples", type=int, help="random sample count")
    common.add_argument("--out", help="output path (directory for maxwell)")
    common.add_argument("--plot", action="store_true", default=None, help="also write a gnuplot script")

    sub.add_parser("verify", parents=[common], help="check unitarity, isotropy, homogeneity, dispersion") \
        .add_argument("--perturb", type=float, help="scale one transition matrix by 1+x")
    d = sub.add_parser("dispersion", parents=[common], help="export ω over the Brillouin zone")
    d.add_argument("--grid", type=int, help="points per axis")
    e = sub.add_parser("evolve", parents=[common], help="track a wave packet")
    e.add_argument("--shape", help="lattice sizes, e.g. 64,64,64")
    e.add_argument("--k0", help="packet centre, e.g. 0.6,0,0")
    e.add_argument("--width", type=float, help="k-space width σ")
    e.add_argument("--branch", choices=["+", "-"])
    e.add_argument("--steps", type=int)
    e.add_argument("--target", choices=["none", "continuum"], help="also evolve the continuum Hamiltonian")
    e.add_argument("--snapshot", help="write the final field to this file")
    m = sub.add_parser("maxwell", parents=[common], help="rotation/Maxwell sweep and commutator scan")
    m.add_argument("--nk", help="comma-separated modes per species, e.g. 2,4,6")
    m.add_argument("--excitations", help="comma-separated M values")
    m.add_argument("--fock-cap", dest="fock_cap", type=int, help="maximum total fermionic modes")
    u = sub.add_parser("units", parents=[common], help="complete a unit system")
    for flag in ("a", "tau", "M", "c", "hbar"):
        u.add_argument(f"--{flag}", type=float)
    u.add_argument("--planck", action="store_true", default=None, help="Planck mass with SI c, ħ")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args)
        return COMMANDS[args.command](cfg)
    except ConfigError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
