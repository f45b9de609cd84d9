"""Command-line pipeline around the library.

Every subcommand is a thin wrapper over one library operation, reading and
writing the PVT/.flo/PNG formats so stages compose through the filesystem:

    simulate -> mosaic -> init/demosaic -> denoise -> eval
                       -> degrade/pair
    flow -> warp/masks -> loss ; viz renders previews

Option precedence is explicit flags, then a --config JSON file, then built-in
defaults (worker counts additionally consult PVT_NUM_THREADS). The resolved
settings are echoed as JSON next to the outputs so a run can be reproduced
bit for bit; reruns overwrite outputs deterministically.

Exit codes: 0 on success, 2 for usage errors (argparse), 1 for processing
errors (bad formats, domain violations, missing files).
"""

from __future__ import annotations

import argparse
import glob
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import io as pio
from .demosaic import demosaic_full, initialize_lr
from .denoise import GuidedFilterConfig, gaussian_denoise_stokes, guided_denoise_stokes
from .dynamics import (CHARBONNIER_EPS, LAMBDA_FLOW, LAMBDA_POLAR, MASK_DECAY_TAU,
                       charbonnier, gate_masks, loss_smooth, loss_total, loss_var,
                       variation_mask)
from .errors import DomainError, FormatError
from .flow import (FlowField, backward_warp, curl, divergence, estimate_flow_hs,
                   residual_importance, softmax_splat)
from .metrics import evaluate_reconstruction
from .mosaic import (DegradationConfig, MosaicFrame, apply_forward, bicubic_resize,
                     bicubic_resize_to, get_layout, layout_from_text,
                     make_training_pair, reorganize_proxy_gt)
from .scenes import get_scene_preset, render_frame, scene_spec_from_dict, scene_spec_to_dict
from .stokes import (PolarFrame, params_from_stokes, hsv_visualize, polar_params,
                     render_directions, stokes_from_directions)


def _load_config(path):
    if not path:
        return {}
    try:
        with open(path) as f:
            cfg = json.load(f)
    except json.JSONDecodeError as e:
        raise FormatError(f"config {path}: invalid JSON ({e})") from None
    if not isinstance(cfg, dict):
        raise FormatError(f"config {path}: top level must be an object")
    return cfg


def _resolve(args, config, key, default):
    """Flag > config file > default."""
    val = getattr(args, key.replace("-", "_"), None)
    if val is not None:
        return val
    return config.get(key, default)


def _workers(args, config):
    w = _resolve(args, config, "workers", None)
    if w is None:
        w = os.environ.get("PVT_NUM_THREADS")
    return max(1, int(w)) if w is not None else 1


def _outdir(path):
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _echo_config(target: Path, command: str, settings: dict):
    payload = {"command": command}
    payload.update({k: settings[k] for k in sorted(settings)})
    dest = target / "config.json" if target.is_dir() else Path(str(target) + ".config.json")
    with open(dest, "w") as f:
        json.dump(payload, f, indent=2, sort_keys=False)
        f.write("\n")


def _layout_arg(args, config):
    name = _resolve(args, config, "layout", "imx250myr")
    if os.path.isfile(name):
        with open(name) as f:
            return layout_from_text(f.read(), name=Path(name).stem)
    return get_layout(name)


def _inputs(values, default_pattern):
    if len(values) == 1 and os.path.isdir(values[0]):
        hits = sorted(glob.glob(os.path.join(values[0], default_pattern)))
        if not hits:
            raise FormatError(f"no files matching {default_pattern!r} in {values[0]}")
        return hits
    return list(values)


def _suffix(path, known_prefixes=("dirs", "mosaic", "params", "gt", "in", "lr",
                                  "full", "deg", "stokes")):
    stem = Path(path).stem
    for p in known_prefixes:
        if stem.startswith(p + "_"):
            return stem[len(p) + 1:]
    return stem


def _pool_map(fn, items, workers):
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# subcommands


def cmd_simulate(args):
    config = _load_config(args.config)
    spec_json = _resolve(args, config, "spec-json", None)
    preset = _resolve(args, config, "preset", None if spec_json else "turntable")
    if preset and spec_json:
        raise DomainError("give either --preset or --spec-json, not both")
    if spec_json:
        with open(spec_json) as f:
            spec = scene_spec_from_dict(json.load(f))
    else:
        spec = get_scene_preset(preset)
    layout = _layout_arg(args, config)
    workers = _workers(args, config)
    out = _outdir(args.out)
    bundles = _pool_map(lambda t: render_frame(spec, t, layout),
                        list(range(spec.n_frames)), workers)
    for t, b in enumerate(bundles):
        pio.write_params(out / f"params_{t:03d}.pvt", b.params_gt)
        pio.write_polar_frame(out / f"dirs_{t:03d}.pvt", b.directions_gt)
        pio.write_mosaic(out / f"mosaic_{t:03d}.pvt", b.mosaic)
        if b.flow_to_next is not None:
            pio.write_flo(out / f"flow_{t:03d}.flo", b.flow_to_next)
    with open(out / "manifest.json", "w") as f:
        json.dump({"scene": scene_spec_to_dict(spec), "layout": layout.name,
                   "n_frames": spec.n_frames}, f, indent=2)
        f.write("\n")
    _echo_config(out, "simulate", {"preset": preset, "spec-json": spec_json,
                                   "layout": layout.name, "workers": workers})
    print(f"simulate: wrote {spec.n_frames} frames to {out}")
    return 0


def cmd_mosaic(args):
    config = _load_config(args.config)
    layout = _layout_arg(args, config)
    sigma = float(_resolve(args, config, "sigma", 0.0))
    seed = _resolve(args, config, "seed", None)
    out = _outdir(args.out)
    cfg = DegradationConfig(m=1, noise_sigma=sigma,
                            rng_seed=None if seed is None else int(seed)) if sigma > 0 else None
    files = _inputs(args.dirs, "dirs_*.pvt")
    for path in files:
        frame = pio.read_polar_frame(path)
        pio.write_mosaic(out / f"mosaic_{_suffix(path)}.pvt",
                         apply_forward(frame, layout, cfg))
    _echo_config(out, "mosaic", {"layout": layout.name, "sigma": sigma,
                                 "seed": seed, "inputs": len(files)})
    print(f"mosaic: wrote {len(files)} mosaics to {out}")
    return 0


def cmd_init(args):
    config = _load_config(args.config)
    layout = _layout_arg(args, config)
    out = _outdir(args.out)
    files = _inputs(args.mosaic, "mosaic_*.pvt")
    for path in files:
        mosaic = pio.read_mosaic(path, layout)
        pio.write_polar_frame(out / f"lr_{_suffix(path)}.pvt", initialize_lr(mosaic))
    _echo_config(out, "init", {"layout": layout.name, "inputs": len(files)})
    print(f"init: wrote {len(files)} half-resolution stacks to {out}")
    return 0


def cmd_demosaic(args):
    config = _load_config(args.config)
    layout = _layout_arg(args, config)
    green_mode = _resolve(args, config, "green-mode", "union")
    out = _outdir(args.out)
    files = _inputs(args.mosaic, "mosaic_*.pvt")
    for path in files:
        mosaic = pio.read_mosaic(path, layout)
        pio.write_polar_frame(out / f"full_{_suffix(path)}.pvt",
                              demosaic_full(mosaic, green_mode=green_mode))
    _echo_config(out, "demosaic", {"layout": layout.name, "green-mode": green_mode,
                                   "inputs": len(files)})
    print(f"demosaic: wrote {len(files)} full-resolution stacks to {out}")
    return 0


def cmd_degrade(args):
    config = _load_config(args.config)
    layout = _layout_arg(args, config)
    m = int(_resolve(args, config, "m", 1))
    sigma = float(_resolve(args, config, "sigma", 0.0))
    seed = _resolve(args, config, "seed", None)
    cfg = DegradationConfig(m=m, noise_sigma=sigma,
                            rng_seed=None if seed is None else int(seed))
    out = _outdir(args.out)
    files = _inputs(args.dirs, "dirs_*.pvt")
    for path in files:
        frame = pio.read_polar_frame(path)
        x = frame.data if m == 1 else bicubic_resize(frame.data, 1.0 / m)
        pio.write_mosaic(out / f"deg_{_suffix(path)}.pvt",
                         apply_forward(PolarFrame(x), layout, cfg))
    _echo_config(out, "degrade", {"layout": layout.name, "m": m, "sigma": sigma,
                                  "seed": seed, "inputs": len(files)})
    print(f"degrade: wrote {len(files)} degraded mosaics to {out}")
    return 0


def cmd_pair(args):
    config = _load_config(args.config)
    layout = _layout_arg(args, config)
    m = int(_resolve(args, config, "m", 1))
    sigma = float(_resolve(args, config, "sigma", 0.0))
    seed = _resolve(args, config, "seed", None)
    cfg = DegradationConfig(m=m, noise_sigma=sigma,
                            rng_seed=None if seed is None else int(seed))
    out = _outdir(args.out)
    files = _inputs(args.mosaic, "mosaic_*.pvt")
    for path in files:
        mosaic = pio.read_mosaic(path, layout)
        gt, mosaic_in = make_training_pair(reorganize_proxy_gt(mosaic), cfg, layout)
        tag = _suffix(path)
        pio.write_polar_frame(out / f"gt_{tag}.pvt", gt)
        pio.write_mosaic(out / f"in_{tag}.pvt", mosaic_in)
    _echo_config(out, "pair", {"layout": layout.name, "m": m, "sigma": sigma,
                               "seed": seed, "inputs": len(files)})
    print(f"pair: wrote {len(files)} training pairs to {out}")
    return 0


def _read_stokes_like(path):
    header = pio.read_pvt_header(path)
    if header.tag == pio.TAG_STOKES:
        return pio.read_stokes(path)
    if header.tag == pio.TAG_DIRECTIONS or header.n_dirs == 4:
        return stokes_from_directions(pio.read_polar_frame(path))
    raise FormatError(f"{path}: need a direction or Stokes container, got tag "
                      f"{header.tag!r}")


def cmd_denoise(args):
    config = _load_config(args.config)
    method = _resolve(args, config, "method", "guided")
    out = _outdir(args.out)
    files = _inputs(args.inputs, "dirs_*.pvt")
    settings = {"method": method, "inputs": len(files)}
    if method == "gaussian":
        sigma = float(_resolve(args, config, "sigma", 1.5))
        run = lambda s: gaussian_denoise_stokes(s, sigma)
        settings["sigma"] = sigma
    elif method == "guided":
        gf = GuidedFilterConfig(radius=int(_resolve(args, config, "radius", 8)),
                                eps=float(_resolve(args, config, "eps", 1e-3)))
        per_channel = bool(_resolve(args, config, "per-channel", False))
        run = lambda s: guided_denoise_stokes(s, gf, per_channel=per_channel)
        settings.update(radius=gf.radius, eps=gf.eps, per_channel=per_channel)
    else:
        raise DomainError(f"unknown denoise method {method!r}")
    for path in files:
        stokes = run(_read_stokes_like(path))
        tag = _suffix(path)
        pio.write_stokes(out / f"stokes_{tag}.pvt", stokes)
        pio.write_params(out / f"params_{tag}.pvt", params_from_stokes(stokes))
    _echo_config(out, "denoise", settings)
    print(f"denoise[{method}]: wrote {len(files)} denoised frames to {out}")
    return 0


def _intensity_of(path):
    header = pio.read_pvt_header(path)
    if header.tag == pio.TAG_PARAMS:
        return pio.read_params(path).i.mean(axis=0)
    return polar_params(pio.read_polar_frame(path)).i.mean(axis=0)


def cmd_flow(args):
    config = _load_config(args.config)
    alpha = float(_resolve(args, config, "alpha", 0.1))
    iters = int(_resolve(args, config, "iters", 120))
    i0 = _intensity_of(args.frames[0])
    i1 = _intensity_of(args.frames[1])
    field = estimate_flow_hs(i0, i1, alpha=alpha, iters=iters)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    pio.write_flo(out, field)
    _echo_config(out, "flow", {"alpha": alpha, "iters": iters,
                               "frames": [str(f) for f in args.frames]})
    print(f"flow: wrote {out} (mean |u| {np.abs(field.u).mean():.3f}, "
          f"mean |v| {np.abs(field.v).mean():.3f})")
    return 0


def cmd_warp(args):
    config = _load_config(args.config)
    mode = _resolve(args, config, "mode", "backward")
    importance = _resolve(args, config, "importance", "uniform")
    workers = _workers(args, config)
    arr, tag = pio.read_pvt(args.image)
    flow = pio.read_flo(args.flow)
    d, c, h, w = arr.shape
    planes = arr.reshape(d * c, h, w).astype(np.float64)
    if mode == "backward":
        warped = backward_warp(planes, flow)
    elif mode == "splat":
        if importance == "uniform":
            z = "uniform"
        elif importance == "residual":
            if not args.target:
                raise DomainError("--importance residual needs --target FRAME")
            z = residual_importance(_intensity_of(args.image),
                                    _intensity_of(args.target), flow)
        else:
            raise DomainError(
                f"importance must be uniform or residual, got {importance!r}")
        warped, coverage = softmax_splat(planes, flow, z=z, workers=workers)
        if args.coverage:
            pio.write_png16(args.coverage, coverage)
    else:
        raise DomainError(f"warp mode must be backward or splat, got {mode!r}")
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    pio.write_pvt(out, warped.reshape(d, c, h, w), tag)
    _echo_config(out, "warp", {"mode": mode, "workers": workers,
                               "importance": importance})
    print(f"warp[{mode}]: wrote {out}")
    return 0


def cmd_masks(args):
    config = _load_config(args.config)
    tau = float(_resolve(args, config, "tau", MASK_DECAY_TAU))
    warp_mode = _resolve(args, config, "warp-mode", "backward")
    prev = pio.read_params(args.prev)
    curr = pio.read_params(args.curr)
    flow = pio.read_flo(args.flow)
    out = _outdir(args.out)
    chi_i = variation_mask(prev.i, curr.i, flow, "intensity", warp_mode=warp_mode)
    chi_p = variation_mask(prev.p, curr.p, flow, "dolp", warp_mode=warp_mode)
    chi_phi = variation_mask(prev.phi, curr.phi, flow, "aop", warp_mode=warp_mode)
    masks = gate_masks(chi_i, chi_p, chi_phi, tau=tau)
    stack = np.stack([masks.chi_i, masks.chi_p, masks.chi_phi,
                      masks.chi_dolp, masks.chi_aop])[:, None]
    pio.write_pvt(out / "masks.pvt", stack, tag="masks")
    for name, m in (("chi_i", masks.chi_i), ("chi_p", masks.chi_p),
                    ("chi_phi", masks.chi_phi), ("chi_dolp", masks.chi_dolp),
                    ("chi_aop", masks.chi_aop)):
        pio.write_png16(out / f"{name}.png", m, scale=1.0)
    _echo_config(out, "masks", {"tau": tau, "warp-mode": warp_mode})
    print(f"masks: wrote 5 variation maps to {out}")
    return 0


def cmd_loss(args):
    config = _load_config(args.config)
    tau = float(_resolve(args, config, "tau", MASK_DECAY_TAU))
    eps = float(_resolve(args, config, "eps", CHARBONNIER_EPS))
    lambda1 = float(_resolve(args, config, "lambda1", LAMBDA_FLOW))
    lambda2 = float(_resolve(args, config, "lambda2", LAMBDA_POLAR))
    warp_mode = _resolve(args, config, "warp-mode", "backward")
    pred = pio.read_polar_frame(args.pred)
    gt = pio.read_polar_frame(args.gt)
    gt_prev = pio.read_polar_frame(args.gt_prev)
    flow = pio.read_flo(args.flow)
    pp = polar_params(pred)
    gp = polar_params(gt)
    prevp = polar_params(gt_prev)
    chi_i = variation_mask(prevp.i, gp.i, flow, "intensity", eps, warp_mode)
    chi_p = variation_mask(prevp.p, gp.p, flow, "dolp", eps, warp_mode)
    chi_phi = variation_mask(prevp.phi, gp.phi, flow, "aop", eps, warp_mode)
    masks = gate_masks(chi_i, chi_p, chi_phi, tau=tau)
    l_int = charbonnier(pred.data, gt.data, eps)
    l_flow = 0.0
    if args.pred_flow and args.gt_flow:
        pf = pio.read_flo(args.pred_flow)
        gf = pio.read_flo(args.gt_flow)
        l_flow = charbonnier(np.stack([pf.u, pf.v]), np.stack([gf.u, gf.v]), eps)
    l_var = loss_var(pp.p, gp.p, pp.phi, gp.phi, masks, eps)
    p_warp = backward_warp(prevp.p, flow)
    phi_warp = backward_warp(prevp.phi, flow)
    l_sm = loss_smooth(pp.p, pp.phi, p_warp, phi_warp, chi_p, chi_phi, tau, eps)
    report = loss_total(l_int, l_flow, l_var, l_sm, lambda1, lambda2)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w") as f:
        json.dump(report.as_dict(), f, indent=2)
        f.write("\n")
    _echo_config(out, "loss", {"tau": tau, "eps": eps, "lambda1": lambda1,
                               "lambda2": lambda2, "warp-mode": warp_mode})
    print(json.dumps(report.as_dict(), indent=2))
    return 0


def cmd_eval(args):
    config = _load_config(args.config)
    tag = _resolve(args, config, "tag", "")
    workers = _workers(args, config)
    preds = _inputs(args.pred, "*.pvt")
    gts = _inputs(args.gt, "dirs_*.pvt")
    if len(preds) != len(gts):
        raise DomainError(f"{len(preds)} prediction files vs {len(gts)} ground truth")
    def one(pair):
        p, g = pair
        pred = pio.read_polar_frame(p)
        gt = pio.read_polar_frame(g)
        resized = pred.shape != gt.shape
        if resized:
            # half/quarter-resolution predictions are scored after bicubic
            # upsampling to the reference grid and the report says so
            pred = PolarFrame(bicubic_resize_to(pred.data, gt.shape[-2:]))
        rep = evaluate_reconstruction(pred, gt, method_tag=tag)
        entry = {"pred": Path(p).name, "gt": Path(g).name, **rep.as_dict()}
        if resized:
            entry["upsampled_to"] = list(gt.shape[-2:])
        return entry
    frames = _pool_map(one, list(zip(preds, gts)), workers)
    numeric = ("psnr_i", "psnr_p", "ssim_i", "ssim_p", "mae_aop_deg")
    mean = {k: float(np.mean([fr[k] for fr in frames])) for k in numeric}
    payload = {"method": tag, "frames": frames, "mean": mean}
    print(f"{'frame':<18}" + "".join(f"{k:>13}" for k in numeric))
    for fr in frames:
        print(f"{fr['pred']:<18}" + "".join(f"{fr[k]:>13.4f}" for k in numeric))
    print(f"{'mean':<18}" + "".join(f"{mean[k]:>13.4f}" for k in numeric))
    if args.out:
        out = _outdir(args.out)
        with open(out / "report.json", "w") as f:
            json.dump(payload, f, indent=2)
            f.write("\n")
        _echo_config(out, "eval", {"tag": tag, "inputs": len(preds),
                                   "workers": workers})
    return 0


def cmd_viz(args):
    config = _load_config(args.config)
    gamma = float(_resolve(args, config, "gamma", 1.0))
    out = _outdir(args.out)
    wrote = []
    if args.params:
        params = pio.read_params(args.params)
        pio.write_png8(out / "hsv.png", hsv_visualize(params), gamma=gamma)
        wrote.append("hsv.png")
    if args.flow:
        field = pio.read_flo(args.flow)
        for name, m in (("divergence", divergence(field)), ("curl", curl(field))):
            pio.write_pvt(out / f"{name}.pvt", m[None, None].astype(np.float64),
                          tag=name[:16])
            span = float(np.abs(m).max()) or 1.0
            rgb = np.stack([np.clip(m, 0, None) / span,
                            np.zeros_like(m),
                            np.clip(-m, 0, None) / span], axis=-1)
            pio.write_png8(out / f"{name}.png", rgb, gamma=gamma)
            wrote.extend([f"{name}.pvt", f"{name}.png"])
    if not wrote:
        raise DomainError("viz needs --params and/or --flow")
    _echo_config(out, "viz", {"gamma": gamma,
                              "params": args.params, "flow": args.flow})
    print(f"viz: wrote {', '.join(wrote)} to {out}")
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    # exact flag names only: prefix abbreviations break silently when new
    # flags are added, and they let typos pass
    parser = argparse.ArgumentParser(
        prog="pvt",
        description="Color-polarization video toolkit: simulation, mosaicking, "
                    "reconstruction, flow and evaluation.",
        allow_abbrev=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_, allow_abbrev=False)
        p.set_defaults(func=fn)
        p.add_argument("--config", help="JSON file with defaults for this command")
        return p

    p = add("simulate", cmd_simulate, "render an analytic scene to frame files")
    p.add_argument("--preset", choices=["turntable", "translating-patches",
                                        "static-noise"],
                   help="built-in scene (default: turntable)")
    p.add_argument("--spec-json", dest="spec_json", help="custom scene spec JSON")
    p.add_argument("--layout", help="sensor grid name or layout text file")
    p.add_argument("--workers", type=int,
                   help="parallel frame workers, count (default: PVT_NUM_THREADS or 1)")
    p.add_argument("--out", required=True, help="output directory")

    p = add("mosaic", cmd_mosaic, "apply the sensor sampling operator")
    p.add_argument("--dirs", nargs="+", required=True,
                   help="direction stacks (.pvt) or a directory of dirs_*.pvt")
    p.add_argument("--layout", help="sensor grid name or layout text file")
    p.add_argument("--sigma", type=float,
                   help="Gaussian noise level, fraction of full scale (default: 0)")
    p.add_argument("--seed", type=int, help="noise RNG seed, integer")
    p.add_argument("--out", required=True, help="output directory")

    p = add("init", cmd_init, "half-resolution stride-2 initialization")
    p.add_argument("--mosaic", nargs="+", required=True,
                   help="raw mosaics (.pvt) or a directory of mosaic_*.pvt")
    p.add_argument("--layout", help="sensor grid name or layout text file")
    p.add_argument("--out", required=True, help="output directory")

    p = add("demosaic", cmd_demosaic, "full-resolution bicubic reconstruction")
    p.add_argument("--mosaic", nargs="+", required=True,
                   help="raw mosaics (.pvt) or a directory of mosaic_*.pvt")
    p.add_argument("--layout", help="sensor grid name or layout text file")
    p.add_argument("--green-mode", dest="green_mode", choices=["union", "average"],
                   help="green lattice strategy (default: union)")
    p.add_argument("--out", required=True, help="output directory")

    p = add("degrade", cmd_degrade, "downsample + mosaic + noise")
    p.add_argument("--dirs", nargs="+", required=True,
                   help="direction stacks (.pvt) or a directory of dirs_*.pvt")
    p.add_argument("--layout", help="sensor grid name or layout text file")
    p.add_argument("--m", type=int,
                   help="downsampling factor, integer (default: 1 = none)")
    p.add_argument("--sigma", type=float,
                   help="Gaussian noise level, fraction of full scale (default: 0)")
    p.add_argument("--seed", type=int, help="noise RNG seed, integer")
    p.add_argument("--out", required=True, help="output directory")

    p = add("pair", cmd_pair, "training pairs: proxy ground truth + degraded input")
    p.add_argument("--mosaic", nargs="+", required=True,
                   help="raw mosaics (.pvt) or a directory of mosaic_*.pvt")
    p.add_argument("--layout", help="sensor grid name or layout text file")
    p.add_argument("--m", type=int,
                   help="downsampling factor, integer (default: 1 = none)")
    p.add_argument("--sigma", type=float,
                   help="Gaussian noise level, fraction of full scale (default: 0)")
    p.add_argument("--seed", type=int, help="noise RNG seed, integer")
    p.add_argument("--out", required=True, help="output directory")

    p = add("denoise", cmd_denoise, "Stokes-domain denoising (S1/S2 only)")
    p.add_argument("--inputs", nargs="+", required=True,
                   help="direction or Stokes containers, or a directory")
    p.add_argument("--method", choices=["gaussian", "guided"],
                   help="smoother (default: guided)")
    p.add_argument("--sigma", type=float,
                   help="gaussian: kernel sigma, pixels (default: 1.5)")
    p.add_argument("--radius", type=int,
                   help="guided: box radius, pixels (default: 8)")
    p.add_argument("--eps", type=float,
                   help="guided: regularization, squared intensity units "
                        "(default: 1e-3)")
    p.add_argument("--per-channel", dest="per_channel", action="store_true",
                   default=None, help="guided: per-channel intensity guides")
    p.add_argument("--out", required=True, help="output directory")

    p = add("flow", cmd_flow, "Horn-Schunck flow between two frames")
    p.add_argument("--frames", nargs=2, required=True,
                   help="two .pvt files (params or directions)")
    p.add_argument("--alpha", type=float,
                   help="smoothness weight, dimensionless (default: 0.1)")
    p.add_argument("--iters", type=int,
                   help="iterations per pyramid level, count (default: 120)")
    p.add_argument("--out", required=True, help="output .flo path")

    p = add("warp", cmd_warp, "warp a PVT stack by a .flo field")
    p.add_argument("--image", required=True, help="source .pvt stack")
    p.add_argument("--flow", required=True, help="displacement field .flo, pixels")
    p.add_argument("--mode", choices=["backward", "splat"],
                   help="sampling direction (default: backward)")
    p.add_argument("--importance", choices=["uniform", "residual"],
                   help="splat collision weighting (residual needs --target)")
    p.add_argument("--target",
                   help="destination params/dirs .pvt for residual importance")
    p.add_argument("--coverage", help="optional PNG16 path for splat coverage")
    p.add_argument("--workers", type=int,
                   help="splat row-band workers, count (default: PVT_NUM_THREADS or 1)")
    p.add_argument("--out", required=True, help="output .pvt path")

    p = add("masks", cmd_masks, "temporal variation masks from aligned params")
    p.add_argument("--prev", required=True, help="params .pvt at t-1")
    p.add_argument("--curr", required=True, help="params .pvt at t")
    p.add_argument("--flow", required=True,
                   help=".flo aligning prev onto curr (reverse flow for backward mode)")
    p.add_argument("--tau", type=float,
                   help="gate decay rate, dimensionless (default: 10)")
    p.add_argument("--warp-mode", dest="warp_mode", choices=["backward", "forward"],
                   help="how prev is aligned onto curr (default: backward)")
    p.add_argument("--out", required=True, help="output directory")

    p = add("loss", cmd_loss, "full training-loss report for one frame")
    p.add_argument("--pred", required=True, help="predicted directions .pvt")
    p.add_argument("--gt", required=True, help="ground-truth directions .pvt")
    p.add_argument("--gt-prev", dest="gt_prev", required=True,
                   help="previous ground-truth directions .pvt")
    p.add_argument("--flow", required=True, help="reverse flow t -> t-1 (.flo)")
    p.add_argument("--pred-flow", dest="pred_flow",
                   help="predicted flow .flo for the flow term")
    p.add_argument("--gt-flow", dest="gt_flow",
                   help="reference flow .flo for the flow term")
    p.add_argument("--tau", type=float,
                   help="gate decay rate, dimensionless (default: 10)")
    p.add_argument("--eps", type=float,
                   help="Charbonnier floor, intensity units (default: 1e-5)")
    p.add_argument("--lambda1", type=float,
                   help="flow term weight, dimensionless (default: 0.1)")
    p.add_argument("--lambda2", type=float,
                   help="polarization term weight, dimensionless (default: 0.2)")
    p.add_argument("--warp-mode", dest="warp_mode", choices=["backward", "forward"],
                   help="how prev is aligned onto curr (default: backward)")
    p.add_argument("--out", required=True, help="output JSON path")

    p = add("eval", cmd_eval, "parameter-domain metrics against ground truth")
    p.add_argument("--pred", nargs="+", required=True,
                   help="reconstructed stacks (.pvt) or a directory")
    p.add_argument("--gt", nargs="+", required=True,
                   help="reference stacks (.pvt) or a directory of dirs_*.pvt")
    p.add_argument("--tag", help="method label recorded in the report")
    p.add_argument("--workers", type=int,
                   help="parallel frame workers, count (default: PVT_NUM_THREADS or 1)")
    p.add_argument("--out", help="directory for report.json")

    p = add("viz", cmd_viz, "HSV polarization preview and flow structure maps")
    p.add_argument("--params", help="params .pvt to render as HSV")
    p.add_argument("--flow", help=".flo to render divergence/curl from")
    p.add_argument("--gamma", type=float,
                   help="display gamma, dimensionless (default: 1 = linear)")
    p.add_argument("--out", required=True, help="output directory")

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args) or 0
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
