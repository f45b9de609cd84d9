#!/usr/bin/env python3
"""Why DoLP denoising is guided by intensity instead of blurred blindly.

DoLP is a ratio of Stokes components, so sensor noise is amplified wherever
light is weak. Smoothing S1/S2 with a Gaussian kills the noise and the
boundaries together; a guided filter steered by the intensity image keeps the
boundaries because every DoLP step in this scene coincides with an intensity
step. The table reports PSNR over flat regions (noise floor), PSNR overall,
and gradient energy across the true edges (edge survival).
"""

import argparse
from pathlib import Path

import numpy as np
from scipy.ndimage import binary_dilation

import pvt


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="demo_out/04_denoising_comparison",
                    help="output directory")
    args = ap.parse_args(argv)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    spec = pvt.get_scene_preset("static-noise")
    bundle = pvt.render_frame(spec, 0)
    gt_full = bundle.params_gt.p.mean(axis=0)
    h, w = gt_full.shape
    gt_p = gt_full.reshape(h // 2, 2, w // 2, 2).mean(axis=(1, 3))

    stokes = pvt.stokes_from_directions(pvt.initialize_lr(bundle.mosaic))
    candidates = {"none": stokes,
                  "guided (r=8, eps=1e-3)": pvt.guided_denoise_stokes(stokes)}
    for sigma in (1.0, 2.0, 3.0, 5.0):
        candidates[f"gaussian s={sigma:.0f}"] = pvt.gaussian_denoise_stokes(
            stokes, sigma)

    gy, gx = np.gradient(gt_p)
    edge = np.hypot(gx, gy) > 1e-6
    edge_band = binary_dilation(edge, iterations=3)
    flat = ~binary_dilation(edge, iterations=11)

    def stats(st):
        p = pvt.params_from_stokes(st).p.mean(axis=0)
        mse_flat = float(np.mean((p[flat] - gt_p[flat]) ** 2))
        ey, ex = np.gradient(p)
        return (pvt.psnr(p, gt_p, peak=1.0), 10 * np.log10(1.0 / mse_flat),
                float((ex ** 2 + ey ** 2)[edge_band].mean()), p)

    print(f"{'method':<22}{'PSNR_p':>9}{'flat':>9}{'edge energy':>14}")
    for name, st in candidates.items():
        full_db, flat_db, energy, p = stats(st)
        print(f"{name:<22}{full_db:>9.2f}{flat_db:>9.2f}{energy:>14.6f}")
        safe = name.split()[0].replace("=", "")
        pvt.write_png16(out / f"dolp_{safe}.png", p, scale=1.0)
    pvt.write_png16(out / "dolp_ground_truth.png", gt_p, scale=1.0)
    print("read: guided reaches the Gaussian noise floor while keeping edge "
          "energy close to the noisy input")
    print(f"wrote DoLP maps to {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
