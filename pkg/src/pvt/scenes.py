"""Analytic test scenes with exact ground truth for every derived quantity.

Scenes compose a constant-polarization background with simple primitives
(discs, rectangles, linear intensity ramps) that either sit still, translate,
or rotate about a fixed pivot. Because the geometry is analytic, each frame
ships with exact parameter maps, exact analyzer stacks, the sensor mosaic,
and the exact optical flow to the next frame; nothing is estimated.

Coordinates follow image conventions: x runs along columns, y along rows,
pixel centers on integers. Rasterization supersamples each pixel on a 4x4
grid; a primitive's coverage scales its intensity and DoLP contribution
linearly while AoP switches to the foreground value past half coverage.
Rotating primitives can carry their AoP with them (a polarizer glued to a
turntable), advancing phi by omega per frame.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, FormatError
from .flow import FlowField
from .mosaic import DegradationConfig, MosaicFrame, MosaicLayout, apply_forward, get_layout
from .stokes import PolarFrame, PolarParams, render_directions

#: Subsamples per pixel axis during rasterization.
SUPERSAMPLE = 4


@dataclass(frozen=True)
class Rotation:
    """Rigid rotation about a fixed pivot, omega radians per frame."""

    center: tuple
    omega: float
    aop_corotates: bool = True


@dataclass(frozen=True)
class Translation:
    """Constant per-frame shift in pixels."""

    dx: float
    dy: float


@dataclass(frozen=True)
class Disc:
    center: tuple
    radius: float
    i: object
    p: float
    phi: float
    motion: object = None

    def __post_init__(self):
        if self.radius <= 0:
            raise DomainError(f"disc radius must be > 0, got {self.radius}")


@dataclass(frozen=True)
class Rect:
    x0: float
    y0: float
    x1: float
    y1: float
    i: object
    p: float
    phi: float
    motion: object = None

    def __post_init__(self):
        if self.x1 <= self.x0 or self.y1 <= self.y0:
            raise DomainError("rect needs x1 > x0 and y1 > y0")


@dataclass(frozen=True)
class RampPatch(Rect):
    """Rectangle whose intensity ramps linearly in its own frame."""

    gx: float = 0.0
    gy: float = 0.0


@dataclass(frozen=True)
class SceneSpec:
    """Complete description of an analytic sequence."""

    width: int
    height: int
    n_frames: int
    background: tuple  # (i, p, phi)
    objects: tuple = ()
    noise_sigma: float = 0.0
    seed: int = 0
    name: str = ""

    def __post_init__(self):
        if self.width % 4 or self.height % 4 or self.width < 8 or self.height < 8:
            raise DomainError(
                f"scene dims must be multiples of 4 and >= 8, got "
                f"{self.width}x{self.height}")
        if self.n_frames < 2:
            raise DomainError(f"n_frames must be >= 2, got {self.n_frames}")
        if self.noise_sigma < 0:
            raise DomainError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        _, bg_p, _ = self.background
        for label, p in [("background", bg_p)] + [
                (f"object {k}", o.p) for k, o in enumerate(self.objects)]:
            if not 0 <= p <= 1:
                raise DomainError(f"{label} DoLP {p} outside [0, 1]")
        object.__setattr__(self, "objects", tuple(self.objects))


@dataclass(frozen=True)
class SceneFrameBundle:
    """Everything known about one rendered frame."""

    params_gt: PolarParams
    directions_gt: PolarFrame
    mosaic: MosaicFrame
    flow_to_next: Optional[FlowField]
    timestamp: float


def _rgb(i) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(i, dtype=np.float64))
    if arr.shape == (1,):
        arr = np.repeat(arr, 3)
    if arr.shape != (3,):
        raise DomainError(f"intensity must be a scalar or 3 values, got shape {arr.shape}")
    if arr.min() < 0:
        raise DomainError(f"intensity must be >= 0, got min {arr.min():.6g}")
    return arr


def _to_object_frame(motion, x, y, t: float):
    """Map scene coordinates at frame t back to the primitive's rest frame."""
    if motion is None:
        return x, y
    if isinstance(motion, Translation):
        return x - motion.dx * t, y - motion.dy * t
    if isinstance(motion, Rotation):
        cx, cy = motion.center
        ang = -motion.omega * t
        ca, sa = np.cos(ang), np.sin(ang)
        dx, dy = x - cx, y - cy
        return cx + ca * dx - sa * dy, cy + sa * dx + ca * dy
    raise DomainError(f"unknown motion law {type(motion).__name__}")


def _displacement(motion, x, y, t_from: float, t_to: float):
    """Where content at (x, y, t_from) lands at t_to, minus its position."""
    dt = t_to - t_from
    if motion is None:
        z = np.zeros_like(x)
        return z, z
    if isinstance(motion, Translation):
        return np.full_like(x, motion.dx * dt), np.full_like(y, motion.dy * dt)
    if isinstance(motion, Rotation):
        cx, cy = motion.center
        ang = motion.omega * dt
        ca, sa = np.cos(ang), np.sin(ang)
        dx, dy = x - cx, y - cy
        return (cx + ca * dx - sa * dy) - x, (cy + sa * dx + ca * dy) - y
    raise DomainError(f"unknown motion law {type(motion).__name__}")


def _inside(obj, x, y):
    if isinstance(obj, Disc):
        cx, cy = obj.center
        return (x - cx) ** 2 + (y - cy) ** 2 <= obj.radius ** 2
    return (obj.x0 <= x) & (x <= obj.x1) & (obj.y0 <= y) & (y <= obj.y1)


def _phi_at(obj, t: float) -> float:
    if isinstance(obj.motion, Rotation) and obj.motion.aop_corotates:
        return float(np.mod(obj.phi + obj.motion.omega * t, np.pi))
    return float(np.mod(obj.phi, np.pi))


def _fine_axes(w: int, h: int):
    ss = SUPERSAMPLE
    xf = (np.arange(w * ss) + 0.5) / ss - 0.5
    yf = (np.arange(h * ss) + 0.5) / ss - 0.5
    return xf, yf


def object_coverage(spec: SceneSpec, index: int, frame: float) -> np.ndarray:
    """Supersampled coverage in [0, 1] of one primitive at one frame."""
    obj = spec.objects[index]
    xf, yf = _fine_axes(spec.width, spec.height)
    x0, y0 = _to_object_frame(obj.motion, xf[None, :], yf[:, None], frame)
    fine = _inside(obj, x0, y0).astype(np.float64)
    ss = SUPERSAMPLE
    return fine.reshape(spec.height, ss, spec.width, ss).mean(axis=(1, 3))


def _intensity_field(obj, t: float, w: int, h: int) -> np.ndarray:
    base = _rgb(obj.i)[:, None, None]
    if isinstance(obj, RampPatch) and (obj.gx or obj.gy):
        x = np.arange(w, dtype=np.float64)[None, :]
        y = np.arange(h, dtype=np.float64)[:, None]
        x0, y0 = _to_object_frame(obj.motion, x, y, t)
        ramp = obj.gx * (x0 - obj.x0) + obj.gy * (y0 - obj.y0)
        return np.maximum(base + ramp[None], 0.0)
    return np.broadcast_to(base, (3, h, w)).copy()


def render_params(spec: SceneSpec, frame: float) -> PolarParams:
    """Rasterize the exact (i, p, phi) maps of one frame, C = 3."""
    h, w = spec.height, spec.width
    bg_i, bg_p, bg_phi = spec.background
    i = np.broadcast_to(_rgb(bg_i)[:, None, None], (3, h, w)).copy()
    p = np.full((h, w), float(bg_p))
    phi = np.full((h, w), float(np.mod(bg_phi, np.pi)))
    for k, obj in enumerate(spec.objects):
        cov = object_coverage(spec, k, frame)
        i = i * (1.0 - cov) + _intensity_field(obj, frame, w, h) * cov
        p = p * (1.0 - cov) + obj.p * cov
        phi = np.where(cov > 0.5, _phi_at(obj, frame), phi)
    rep = lambda m: np.repeat(m[None], 3, axis=0)
    return PolarParams(i=i, p=rep(p), phi=rep(phi))


def exact_flow(spec: SceneSpec, t_from: float, t_to: float) -> FlowField:
    """Exact displacement field from the motion laws, t_from grid -> t_to.

    Each pixel takes the displacement of the topmost primitive covering it
    (coverage > 1/2) at t_from; uncovered pixels keep the static background's
    zero flow.
    """
    h, w = spec.height, spec.width
    u = np.zeros((h, w))
    v = np.zeros((h, w))
    x = np.arange(w, dtype=np.float64)[None, :]
    y = np.arange(h, dtype=np.float64)[:, None]
    for k, obj in enumerate(spec.objects):
        mask = object_coverage(spec, k, t_from) > 0.5
        if not mask.any():
            continue
        du, dv = _displacement(obj.motion, x + 0 * y, y + 0 * x, t_from, t_to)
        u[mask] = du[mask]
        v[mask] = dv[mask]
    return FlowField(u, v, t_src=float(t_from), t_dst=float(t_to))


def render_sequence(spec: SceneSpec, layout: Optional[MosaicLayout] = None):
    """Render every frame of a scene into SceneFrameBundles.

    Frames are independent given the spec: parameter maps and flows are
    deterministic functions of the frame index, and mosaic noise derives its
    seed from (spec.seed, frame), so any frame can be re-rendered in
    isolation (or in parallel) with identical results.
    """
    layout = layout or get_layout()
    bundles = []
    for t in range(spec.n_frames):
        bundles.append(render_frame(spec, t, layout))
    return bundles


def render_frame(spec: SceneSpec, t: int, layout: Optional[MosaicLayout] = None
                 ) -> SceneFrameBundle:
    """Render a single frame bundle (see render_sequence)."""
    layout = layout or get_layout()
    params = render_params(spec, t)
    dirs = render_directions(params)
    config = None
    if spec.noise_sigma > 0:
        # per-frame seed keeps noise reproducible and frames independent
        config = DegradationConfig(m=1, noise_sigma=spec.noise_sigma,
                                   rng_seed=spec.seed * 1_000_003 + t)
    mosaic = apply_forward(dirs, layout, config)
    flow = exact_flow(spec, t, t + 1) if t + 1 < spec.n_frames else None
    return SceneFrameBundle(params_gt=params, directions_gt=dirs, mosaic=mosaic,
                            flow_to_next=flow, timestamp=float(t))


# ---------------------------------------------------------------------------
# Presets


def turntable() -> SceneSpec:
    """Rotating polarizer disc (p 0.95, omega 0.1 rad/frame) on a static set.

    The disc spins about its own center, so its silhouette is frame-
    invariant while its AoP co-rotates; the backdrop carries smooth ramps
    and off-disc rectangles for texture. 256x256, 8 frames, noise-free.
    """
    objects = (
        RampPatch(0, 0, 256, 256, i=(0.42, 0.40, 0.36), p=0.12, phi=0.4,
                  gx=0.0012, gy=0.0008),
        Rect(8, 180, 70, 244, i=(0.78, 0.34, 0.30), p=0.30, phi=1.1),
        Rect(182, 10, 246, 70, i=(0.28, 0.52, 0.74), p=0.25, phi=2.2),
        RampPatch(28, 8, 108, 48, i=(0.58, 0.62, 0.40), p=0.20, phi=0.9,
                  gx=-0.003, gy=0.002),
        Disc(center=(128.0, 128.0), radius=70.0, i=(0.92, 0.84, 0.72),
             p=0.95, phi=0.2,
             motion=Rotation(center=(128.0, 128.0), omega=0.1, aop_corotates=True)),
    )
    return SceneSpec(width=256, height=256, n_frames=8,
                     background=((0.50, 0.48, 0.46), 0.08, 0.3),
                     objects=objects, noise_sigma=0.0, seed=7, name="turntable")


def translating_patches() -> SceneSpec:
    """Two rectangles sliding right at 1 and 2 px/frame. 128x128, 6 frames."""
    objects = (
        Rect(10, 20, 42, 60, i=(0.85, 0.30, 0.25), p=0.60, phi=0.9,
             motion=Translation(dx=1.0, dy=0.0)),
        Rect(58, 70, 102, 110, i=(0.25, 0.80, 0.35), p=0.40, phi=1.9,
             motion=Translation(dx=2.0, dy=0.0)),
    )
    return SceneSpec(width=128, height=128, n_frames=6,
                     background=((0.40, 0.42, 0.44), 0.05, 0.2),
                     objects=objects, noise_sigma=0.0, seed=11,
                     name="translating-patches")


def static_noise() -> SceneSpec:
    """Static DoLP step edges under sigma = 0.02 sensor noise. 512x512, 2 frames.

    Every DoLP boundary coincides with a strong intensity step; an
    intensity-guided edge-preserving filter has something to hold on to,
    which is the regime the guided denoiser is built for. Patches are sized
    so the default radius-8 window fits their half-resolution interiors.
    """
    objects = (
        Rect(48, 48, 256, 256, i=0.90, p=0.42, phi=1.2),
        Rect(280, 280, 480, 464, i=0.30, p=0.18, phi=2.4),
        Disc(center=(352.0, 144.0), radius=88.0, i=0.75, p=0.45, phi=0.7),
    )
    return SceneSpec(width=512, height=512, n_frames=2,
                     background=(0.55, 0.30, 0.5),
                     objects=objects, noise_sigma=0.02, seed=23,
                     name="static-noise")


SCENE_PRESETS = {
    "turntable": turntable,
    "translating-patches": translating_patches,
    "static-noise": static_noise,
}


def get_scene_preset(name: str) -> SceneSpec:
    """Look up a scene preset by name."""
    try:
        return SCENE_PRESETS[name]()
    except KeyError:
        raise DomainError(
            f"unknown scene preset {name!r}; available: {sorted(SCENE_PRESETS)}") from None


# ---------------------------------------------------------------------------
# JSON (de)serialization for custom scene files


def _motion_to_dict(m):
    if m is None:
        return None
    if isinstance(m, Translation):
        return {"type": "translation", "dx": m.dx, "dy": m.dy}
    if isinstance(m, Rotation):
        return {"type": "rotation", "center": list(m.center), "omega": m.omega,
                "aop_corotates": m.aop_corotates}
    raise DomainError(f"unknown motion law {type(m).__name__}")


def _motion_from_dict(d):
    if d is None:
        return None
    kind = d.get("type")
    if kind == "translation":
        return Translation(dx=float(d["dx"]), dy=float(d["dy"]))
    if kind == "rotation":
        return Rotation(center=tuple(d["center"]), omega=float(d["omega"]),
                        aop_corotates=bool(d.get("aop_corotates", True)))
    raise FormatError(f"unknown motion type {kind!r}")


def _intensity_value(i):
    arr = _rgb(i)
    return arr[0] if np.all(arr == arr[0]) else arr.tolist()


def scene_spec_to_dict(spec: SceneSpec) -> dict:
    objs = []
    for o in spec.objects:
        d = {"i": _intensity_value(o.i), "p": o.p, "phi": o.phi,
             "motion": _motion_to_dict(o.motion)}
        if isinstance(o, Disc):
            d.update(type="disc", center=list(o.center), radius=o.radius)
        elif isinstance(o, RampPatch):
            d.update(type="ramp", bounds=[o.x0, o.y0, o.x1, o.y1], gx=o.gx, gy=o.gy)
        else:
            d.update(type="rect", bounds=[o.x0, o.y0, o.x1, o.y1])
        objs.append(d)
    bg_i, bg_p, bg_phi = spec.background
    return {"name": spec.name, "width": spec.width, "height": spec.height,
            "n_frames": spec.n_frames,
            "background": {"i": _intensity_value(bg_i), "p": bg_p, "phi": bg_phi},
            "objects": objs, "noise_sigma": spec.noise_sigma, "seed": spec.seed}


def scene_spec_from_dict(d: dict) -> SceneSpec:
    try:
        bg = d["background"]
        objects = []
        for od in d.get("objects", []):
            kind = od.get("type")
            common = dict(i=od["i"], p=float(od["p"]), phi=float(od["phi"]),
                          motion=_motion_from_dict(od.get("motion")))
            if kind == "disc":
                objects.append(Disc(center=tuple(od["center"]),
                                    radius=float(od["radius"]), **common))
            elif kind == "rect":
                x0, y0, x1, y1 = od["bounds"]
                objects.append(Rect(x0, y0, x1, y1, **common))
            elif kind == "ramp":
                x0, y0, x1, y1 = od["bounds"]
                objects.append(RampPatch(x0, y0, x1, y1,
                                         gx=float(od.get("gx", 0.0)),
                                         gy=float(od.get("gy", 0.0)), **common))
            else:
                raise FormatError(f"unknown object type {kind!r}")
        return SceneSpec(width=int(d["width"]), height=int(d["height"]),
                         n_frames=int(d["n_frames"]),
                         background=(bg["i"], float(bg["p"]), float(bg["phi"])),
                         objects=tuple(objects),
                         noise_sigma=float(d.get("noise_sigma", 0.0)),
                         seed=int(d.get("seed", 0)), name=d.get("name", ""))
    except KeyError as e:
        raise FormatError(f"scene spec missing required key {e.args[0]!r}") from None
