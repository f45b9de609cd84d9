#!/usr/bin/env python3
"""The sensor sampling operator and three ways back from a raw mosaic.

A full (4, 3, H, W) stack is reduced to one (H, W) readout by the 4x4
superpixel pattern; this script reconstructs it with the half-resolution
initialization and the full-resolution bicubic baseline, scores both against
ground truth, and renders the residual map of detail the mosaic cannot carry.
"""

import argparse
from pathlib import Path

import numpy as np

import pvt


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="demo_out/02_sensor_sampling",
                    help="output directory")
    args = ap.parse_args(argv)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    layout = pvt.get_layout()
    print("superpixel directions:\n", layout.directions)
    print("superpixel colors (0=R 1=G 2=B):\n", layout.colors)

    bundle = pvt.render_frame(pvt.get_scene_preset("turntable"), 0)
    gt = bundle.directions_gt
    mosaic = bundle.mosaic
    print(f"stack {gt.data.shape} -> mosaic {mosaic.shape} "
          f"({gt.data.size // mosaic.data.size}x fewer samples)")

    lr = pvt.initialize_lr(mosaic)
    full = pvt.demosaic_full(mosaic)
    lr_up = pvt.PolarFrame(pvt.bicubic_resize_to(lr.data, gt.data.shape[-2:]))
    for tag, rec in (("init (half-res, upsampled)", lr_up),
                     ("demosaic_full", full)):
        rep = pvt.evaluate_reconstruction(rec, gt, method_tag=tag)
        print(f"{tag}: PSNR_I {rep.psnr_i:.2f} dB  PSNR_p {rep.psnr_p:.2f} dB  "
              f"MAE_AoP {rep.mae_aop_deg:.2f} deg")

    res = pvt.difficulty_residual(gt, layout)
    mag = np.abs(res).mean(axis=(0, 1))
    print(f"difficulty residual: mean |r| {mag.mean():.4f}, "
          f"99th percentile {np.quantile(mag, 0.99):.4f}")
    pvt.write_png16(out / "difficulty_residual.png", mag)

    pvt.write_png16(out / "mosaic.png", mosaic.data, scale=1.0)
    pvt.write_png8(out / "hsv_full.png",
                   pvt.hsv_visualize(pvt.polar_params(full)))
    pvt.write_png8(out / "hsv_init.png",
                   pvt.hsv_visualize(pvt.polar_params(lr)))
    print(f"wrote mosaic, reconstruction previews and residual map to {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
