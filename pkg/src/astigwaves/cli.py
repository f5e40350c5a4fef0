"""Command-line interface: validate / field / verify / design.

Field slices are exported as CSV (one file per time and slice, columns
coord1, coord2, log10_abs, phase, numbers in %.17g) next to a YAML metadata
sidecar that echoes the full configuration, so a run can be reproduced from
its own output.  Exit codes: 0 all passed, 1 validation failure, 2 oracle
failure, 3 I/O or parse error.
"""

from __future__ import annotations

import argparse
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .errors import AccuracyError, ConfigError, ParameterError
from . import asymptotics as asym
from . import solutions as sol
from . import spectral
from . import verify as ver
from .config import RunConfig, config_from_dict, dump_config, load_config
from .gamma import gamma_matrix, spectral_norm, validate_gamma0
from .lcfield import SpacetimePoint

_G = "%.17g"


def _fmt(x) -> str:
    return _G % x


# ---------------------------------------------------------------------------
# validate

def cmd_validate(cfg: RunConfig, quiet: bool = False) -> int:
    rows = []
    hard_fail = False

    rep = validate_gamma0(cfg.curve.gamma0)
    rows.append(("gamma0_symmetric_pd", rep.ok,
                 f"defect={rep.symmetry_defect:.2e} "
                 f"im_eigs={np.array2string(rep.im_eigenvalues, precision=3)}"))
    hard_fail |= not rep.ok
    if not cfg.curve.localization_ok:
        rows.append(("localization_inequality", False, "general-astigmatic "
                     "localization inequality violated (warning)"))

    try:
        params = cfg.params()
        rows.append(("parameters_constructible", True, cfg.family))
    except ParameterError as exc:
        rows.append(("parameters_constructible", False, str(exc)))
        hard_fail = True
        params = None

    if params is not None and cfg.family == "kgf_packet":
        ch = asym.characteristics_of(params)
        rows.append(("forward_propagation", ch.v_gr > 0,
                     f"v_gr={ch.v_gr:.6g} (gamma < tau required)"))
        hard_fail |= not ch.v_gr > 0
        for cond in asym.validity_conditions(params, margin=cfg.margin):
            rows.append((f"cond:{cond.name}", cond.satisfied,
                         f"lhs={cond.lhs:.4g} rhs={cond.rhs:.4g} "
                         f"margin={cond.margin:g}"))

    if not quiet:
        width = max(len(r[0]) for r in rows)
        for name, ok, info in rows:
            print(f"{'PASS' if ok else 'FAIL':4s}  {name:<{width}s}  {info}")
    return 1 if hard_fail else 0


# ---------------------------------------------------------------------------
# field export

def _field_fn(cfg: RunConfig):
    params = cfg.params()
    if cfg.family in ("wave_beam",):
        return params, lambda pts: sol.phi_beam(pts, params)
    if cfg.family == "kgf_beam":
        return params, lambda pts: sol.u_beam(pts, params)
    if cfg.family == "wave_packet":
        return params, lambda pts: sol.phi_packet(pts, params)
    return params, lambda pts: sol.u_packet(pts, params)


def _packet_widths(params, t):
    ch = asym.characteristics_of(params)
    scale = np.sqrt(params.gamma * params.tau)
    regime = asym.regime_classify(t, params)
    zeta = asym.choose_zeta(t, params.curve)
    g = gamma_matrix(params.curve, np.asarray(zeta, dtype=float))
    sig = {}
    if regime is asym.Regime.LARGE:
        sig["z"] = asym.delta_v(params) * max(abs(t), scale)
        rad = max(abs(ch.v_gr * t), scale)
        ang = asym.delta_theta(params, asym.perp_major_axis(
            -np.linalg.inv(params.curve.gamma0).imag))
        sig["x"] = sig["y"] = max(ang * rad, 1e-12)
    else:
        sig["z"] = asym.delta_parallel(params) * scale
        for j, name in enumerate(("x", "y")[:params.curve.dim]):
            e = np.zeros(params.curve.dim)
            e[j] = 1.0
            sig[name] = asym.delta_perp(params, e, zeta=zeta) * scale
    return ch, sig


def _beam_widths(params, t):
    beta0 = 2.0 * t
    g = gamma_matrix(params.curve, np.asarray(beta0, dtype=float))
    sig = {"z": max(1.0 / params.eta, abs(t) * 0.1 + 1.0 / params.eta)}
    for j, name in enumerate(("x", "y")[:params.curve.dim]):
        e = np.zeros(params.curve.dim)
        e[j] = 1.0
        quad = float(e @ g.imag @ e)
        sig[name] = 1.0 / np.sqrt(params.eta * quad)
    return None, sig


def _slice_axes(cfg: RunConfig, slice_spec: str, t, params, sig, v_gr):
    """Axis names, grids and the point builder for one slice."""
    n = cfg.grid_n
    hw = cfg.half_widths
    d = cfg.d

    def rng_for(axis, center):
        if axis in cfg.ranges:
            lo, hi = cfg.ranges[axis]
            return np.linspace(lo, hi, n)
        return np.linspace(center - hw * sig[axis], center + hw * sig[axis], n)

    spec = slice_spec.replace(" ", "")
    zc = (v_gr * t) if v_gr is not None else -t
    if spec == "z=vgr*t" or spec.startswith("z="):
        if spec != "z=vgr*t":
            zc = float(spec[2:])
        if d < 2:
            raise ConfigError("transverse slice needs d >= 2")
        a1 = rng_for("x", 0.0)
        a2 = rng_for("y", 0.0)
        xx, yy = np.meshgrid(a1, a2, indexing="ij")
        r = np.zeros(xx.shape + (d,))
        r[..., 0] = xx
        r[..., 1] = yy
        pts = SpacetimePoint(np.full(xx.shape, t), np.full(xx.shape, zc), r)
        return ("x", "y"), (a1, a2), pts
    if spec.startswith("x=") or (spec.startswith("y=") and d >= 2):
        axis = spec[0]
        val = float(spec[2:])
        other = "y" if axis == "x" else "x"
        if d < 2 and other == "y":
            raise ConfigError("slice needs d >= 2")
        a1 = rng_for(other, 0.0)
        a2 = rng_for("z", zc)
        oo, zz = np.meshgrid(a1, a2, indexing="ij")
        r = np.zeros(oo.shape + (d,))
        r[..., 0 if other == "x" else 1] = oo
        r[..., 0 if axis == "x" else 1] = val
        pts = SpacetimePoint(np.full(oo.shape, t), zz, r)
        return (other, "z"), (a1, a2), pts
    raise ConfigError(f"unknown slice spec {slice_spec!r}")


def _evaluate(field, pts: SpacetimePoint, threads: int):
    if threads <= 1:
        lf = field(pts)
        return np.asarray(lf.log_abs), np.asarray(lf.phase)
    rows = np.asarray(pts.t).shape[0]
    chunks = np.array_split(np.arange(rows), min(threads * 4, rows))
    la = np.empty(np.asarray(pts.t).shape)
    ph = np.empty_like(la)

    def work(idx):
        sub = SpacetimePoint(np.asarray(pts.t)[idx], np.asarray(pts.z)[idx],
                             np.asarray(pts.r_perp)[idx])
        lf = field(sub)
        return idx, np.asarray(lf.log_abs), np.asarray(lf.phase)

    with ThreadPoolExecutor(max_workers=threads) as pool:
        for idx, a, p in pool.map(work, chunks):
            la[idx] = a
            ph[idx] = p
    return la, ph


def cmd_field(cfg: RunConfig, out_dir: Path, quiet: bool = False) -> int:
    t_start = time.time()
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"error: cannot create output dir: {exc}", file=sys.stderr)
        return 3
    params, field = _field_fn(cfg)
    is_packet = cfg.family.endswith("packet") and cfg.family == "kgf_packet"
    if cfg.family == "kgf_packet":
        ch, _ = _packet_widths(params, cfg.times[0])
        v_gr = ch.v_gr
    else:
        ch, v_gr = None, None

    files = []
    for t in cfg.times:
        if cfg.family == "kgf_packet":
            ch, sig = _packet_widths(params, t)
            v_gr = ch.v_gr
        elif cfg.family == "wave_packet":
            scale = min(params.gamma, 1.0 / params.kappa)
            sig = {"z": scale, "x": scale, "y": scale}
            v_gr = 1.0
        else:
            _, sig = _beam_widths(params, t)
            v_gr = None
        # normalization reference
        if cfg.normalize == "center":
            zc = (v_gr * t) if v_gr is not None else -t
            ref_pt = SpacetimePoint(t, zc, np.zeros(cfg.d))
            ref = float(np.asarray(field(ref_pt).log_abs))
        elif cfg.normalize == "origin":
            ref = float(np.asarray(field(SpacetimePoint(0.0, 0.0, np.zeros(cfg.d))).log_abs))
        else:
            ref = 0.0
        for spec in cfg.slices:
            names, (a1, a2), pts = _slice_axes(cfg, spec, t, params, sig, v_gr)
            la, ph = _evaluate(field, pts, cfg.threads)
            log10_abs = (la - ref) / np.log(10.0)
            tag = spec.replace("*", "").replace("=", "")
            fname = out_dir / f"field_t{_num_tag(t)}_{tag}.csv"
            with open(fname, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(f"{names[0]},{names[1]},log10_abs,phase\n")
                for i in range(a1.size):
                    for j in range(a2.size):
                        fh.write(f"{_fmt(a1[i])},{_fmt(a2[j])},"
                                 f"{_fmt(log10_abs[i, j])},{_fmt(ph[i, j])}\n")
            files.append(fname.name)
            if not quiet:
                print(f"wrote {fname}")

    meta = {
        "version": __version__,
        "config": cfg.to_dict(),
        "files": files,
        "timing_seconds": round(time.time() - t_start, 3),
    }
    if cfg.family == "kgf_packet":
        ch = asym.characteristics_of(params)
        e_small = asym.perp_major_axis(params.curve.gamma0.imag)
        meta["derived"] = {
            "p": ch.p, "Omega": ch.Omega, "K": ch.K, "v_gr": ch.v_gr,
            "delta_parallel": asym.delta_parallel(params),
            "delta_perp_major": asym.delta_perp(params, e_small, zeta=0.0),
            "delta_v": asym.delta_v(params),
            "delta_theta": asym.delta_theta(params, asym.perp_major_axis(
                -np.linalg.inv(params.curve.gamma0).imag)),
        }
    with open(out_dir / "metadata.yaml", "w", encoding="utf-8") as fh:
        yaml.safe_dump(meta, fh, sort_keys=True)
    return 0


def _num_tag(t: float) -> str:
    text = f"{t:g}"
    return text.replace("-", "m").replace("+", "").replace(".", "p")


# ---------------------------------------------------------------------------
# verification suite

def _check(name, value, tol, results, invert=False):
    ok = bool(value <= tol) if not invert else bool(value > tol)
    results.append({"name": name, "passed": ok, "value": float(value),
                    "tolerance": float(tol)})
    print(f"{'PASS' if ok else 'FAIL':4s}  {name:<38s} value={value:.3e} "
          f"tol={tol:.1e}")
    return ok


def cmd_verify(cfg: RunConfig, out_dir: Path | None = None,
               inject_bug: bool = False) -> int:
    rng = np.random.default_rng(cfg.seed)
    params, field = _field_fn(cfg)
    m_eq = params.m if cfg.family.startswith("kgf") else 0.0
    results = []
    ok = True

    if inject_bug:
        base_field = field
        bug_amp = 0.05 * abs(complex(cfg.c_b))

        def field(pts, _base=base_field):
            lf = _base(pts)
            # c_b-scaled corruption: breaks the PDE but not the export path
            return type(lf)(np.asarray(lf.log_abs) + bug_amp *
                            np.tanh(np.asarray(pts.z)), lf.phase)

    if cfg.family == "kgf_packet":
        scale = sol.characteristic_length(params)
        ch = asym.characteristics_of(params)
        sigz = asym.delta_parallel(params) * np.sqrt(params.gamma * params.tau)
    else:
        scale = sol.characteristic_length(params)
        sigz = 1.0
    h = cfg.h if cfg.h is not None else max(1e-6, 1e-4 * scale)

    # 1. PDE residual scan near the origin / packet center
    n = 9
    if cfg.family == "kgf_packet":
        z0 = 0.0
        ext = 1.5 * sigz
    else:
        z0, ext = 0.0, 2.0 * scale
    pts = ver.grid_points(0.1 * scale, (z0 - ext, z0 + ext), (-ext, ext), n,
                          cfg.d, y_range=(-ext, ext) if cfg.d >= 2 else None)
    scan = ver.residual_scan(field, pts, h=h, m=m_eq)
    ok &= _check("pde_residual_scan_max", scan.max_residual, 1e-6, results)

    # 2. convergence order at a random interior point
    pt = SpacetimePoint(0.05 * scale, rng.uniform(-0.5, 0.5) * sigz,
                        rng.uniform(-0.3, 0.3, cfg.d) * scale)
    co = ver.convergence_order(field, pt, m_eq, 1e-2 * scale)
    order = co.order if co.order is not None else 2.0
    ok &= _check("fd_convergence_order_dev", abs(order - 2.0), 0.3, results)

    # 3. eikonal residuals
    if cfg.family == "wave_beam":
        kinds = ["we_theta"]
    elif cfg.family == "wave_packet":
        kinds = ["we_theta", "we_s"]
    elif cfg.family == "kgf_beam":
        kinds = ["kgf_Sb"]
    else:
        kinds = ["kgf_Sp"]
    for kind in kinds:
        res = sol.eikonal_residual(kind, pt, params)
        ok &= _check(f"eikonal_residual_{kind}", res, 1e-7, results)

    # 4. transport relations for the curve
    r1, r2 = sol.transport_residual(pt, cfg.curve)
    ok &= _check("transport_residual_1", r1, 1e-7, results)
    ok &= _check("transport_residual_2", r2, 1e-7, results)

    # 5. superposition identity (packets)
    if cfg.family.endswith("packet"):
        target = "u_p" if cfg.family == "kgf_packet" else "phi_p"
        worst = 0.0
        for _ in range(3):
            ptr = SpacetimePoint(rng.uniform(-1, 1) * scale,
                                 rng.uniform(-1, 1) * scale,
                                 rng.uniform(-1, 1, cfg.d) * scale)
            v_or = spectral.superposition_oracle(target, params, ptr)
            v_cf = field(ptr).value
            worst = max(worst, abs(v_or - v_cf) / abs(v_cf))
        ok &= _check("superposition_identity", worst, 1e-8, results)

    # 6. zeta transform identity (KGF beam)
    if cfg.family == "kgf_beam":
        worst = 0.0
        for _ in range(3):
            ptr = SpacetimePoint(rng.uniform(-1, 1), rng.uniform(-1, 1),
                                 rng.uniform(-1, 1, cfg.d))
            v_or = spectral.zeta_ft_oracle(params, ptr)
            v_cf = field(ptr).value
            worst = max(worst, abs(v_or - v_cf) / abs(v_cf))
        ok &= _check("zeta_transform_identity", worst, 1e-8, results)

    # 7. inverse Fourier transform (packets, feasibility gated)
    if cfg.family.endswith("packet") and cfg.d <= 2:
        fam = "u_p" if cfg.family == "kgf_packet" else "phi_p"
        p_eff = spectral._oscillation_feasible(params)
        if p_eff > cfg.oracle_p_max:
            print(f"SKIP  inverse_ft_identity                 infeasible at "
                  f"this p ({p_eff:.3g} > {cfg.oracle_p_max:g})")
            results.append({"name": "inverse_ft_identity", "passed": True,
                            "value": None, "skipped":
                            f"infeasible at this p ({p_eff:.3g})"})
        else:
            pt0 = SpacetimePoint(0.0, 0.0, np.zeros(cfg.d))
            const = spectral.inverse_ft_oracle(fam, params, pt0) / field(pt0).value
            worst = 0.0
            for _ in range(2):
                ptr = SpacetimePoint(rng.uniform(-1, 1), rng.uniform(-1, 1),
                                     rng.uniform(-1, 1, cfg.d))
                v_or = spectral.inverse_ft_oracle(fam, params, ptr)
                v_cf = field(ptr).value * const
                worst = max(worst, abs(v_or - v_cf) / abs(v_cf))
            ok &= _check("inverse_ft_identity", worst, 1e-3, results)

    # 8. envelope cross-identities (KGF packet)
    if cfg.family == "kgf_packet" and ch.p >= 10:
        import warnings as _w
        ptc = SpacetimePoint(0.0, 0.3 * sigz, np.zeros(cfg.d))
        sd = spectral.saddle_point_small_t(params, ptc)
        with _w.catch_warnings():
            _w.simplefilter("ignore")
            env, _ = asym.envelope_small_time(ptc, params, zeta=0.0)
        rel = abs(np.exp((sd.log_abs - env.log_abs)
                         + 1j * (sd.phase - env.phase)) - 1.0)
        ok &= _check("saddle_vs_envelope_identity", rel, 1e-10, results)
        dv2 = asym.delta_v(params) ** 2
        dev = abs(dv2 - ch.p * asym.delta_parallel(params) ** 4) / dv2
        ok &= _check("width_relation_radial", dev, 1e-12, results)

    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / "verify_report.yaml", "w", encoding="utf-8") as fh:
            yaml.safe_dump({"version": __version__, "passed": bool(ok),
                            "checks": results}, fh, sort_keys=True)
    return 0 if ok else 2


# ---------------------------------------------------------------------------
# design

def cmd_design(m, Omega, Delta_par, Delta_perp, mu, out: Path | None,
               quiet: bool = False) -> int:
    params = asym.design_parameters(m, Omega, Delta_par, Delta_perp, mu=mu)
    ch = asym.characteristics_of(params)
    eps = 1.0 / params.curve.gamma0[0, 0].imag
    lines = {
        "gamma": params.gamma, "tau": params.tau, "kappa": params.kappa,
        "eps_m": params.eps_m, "m": params.m, "mu": params.mu,
        "stigmatic_eps": eps, "p": ch.p, "Omega": ch.Omega, "K": ch.K,
        "v_gr": ch.v_gr,
    }
    if not quiet:
        for key, val in lines.items():
            print(f"{key:14s} = {val:.12g}")
    if out is not None:
        cfg = config_from_dict({
            "family": "kgf_packet", "d": 2, "m": m, "mu": mu,
            "gamma": params.gamma, "kappa": params.kappa, "eps_m": params.eps_m,
            "gamma0": {"stigmatic_eps": eps},
        })
        dump_config(cfg, out)
        if not quiet:
            print(f"wrote {out}")
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="astigwaves",
        description="Localized beam and packet solutions of the wave and "
                    "Klein-Gordon-Fock equations: evaluation and verification")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, type=Path)
    common.add_argument("--out", type=Path, default=Path("out"))
    common.add_argument("--margin", type=float, default=None,
                        help="override the 'much less than' margin")
    common.add_argument("--h", type=float, default=None,
                        help="override the finite-difference step")
    common.add_argument("--threads", type=int, default=None)
    common.add_argument("--seed", type=int, default=None,
                        help="seed for random verification points")

    sub.add_parser("validate", parents=[common])
    sub.add_parser("field", parents=[common])
    vp = sub.add_parser("verify", parents=[common])
    vp.add_argument("--inject-bug", action="store_true",
                    help="corrupt the field (negative control)")

    dp = sub.add_parser("design")
    dp.add_argument("--m", type=float, required=True)
    dp.add_argument("--Omega", type=float, required=True)
    dp.add_argument("--Delta-par", type=float, required=True)
    dp.add_argument("--Delta-perp", type=float, required=True)
    dp.add_argument("--mu", type=float, default=0.5)
    dp.add_argument("--out", type=Path, default=None)
    return ap


def _load(args) -> RunConfig:
    cfg = load_config(args.config)
    if args.margin is not None:
        cfg.margin = args.margin
    if args.h is not None:
        cfg.h = args.h
    if args.threads is not None:
        cfg.threads = args.threads
    if args.seed is not None:
        cfg.seed = args.seed
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "design":
            return cmd_design(args.m, args.Omega, args.Delta_par,
                              args.Delta_perp, args.mu, args.out)
        cfg = _load(args)
        if args.command == "validate":
            return cmd_validate(cfg)
        if args.command == "field":
            code = cmd_validate(cfg, quiet=True)
            if code != 0:
                print("error: configuration failed validation", file=sys.stderr)
                return 1
            return cmd_field(cfg, args.out)
        if args.command == "verify":
            code = cmd_validate(cfg, quiet=True)
            if code != 0:
                print("error: configuration failed validation", file=sys.stderr)
                return 1
            return cmd_verify(cfg, args.out, inject_bug=args.inject_bug)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 3
    except (ParameterError, AccuracyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
