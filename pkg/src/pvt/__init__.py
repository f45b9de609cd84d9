"""Color-polarization video toolkit.

Analytic scene simulation, division-of-focal-plane mosaicking, bicubic
reconstruction, Stokes-domain denoising, optical flow with forward splatting,
temporal polarization losses, and full-reference evaluation, plus binary
container formats tying the pieces together on disk.
"""

from .errors import DimensionError, DomainError, FormatError
from .stokes import (DIRECTIONS, PolarFrame, StokesFrame, PolarParams,
                     PolarFeatureStack, render_directions, stokes_from_directions,
                     params_from_stokes, polar_params, aop_distance,
                     encode_polar_features, hsv_visualize)
from .mosaic import (MosaicLayout, MosaicFrame, DegradationConfig, get_layout,
                     layout_from_text, apply_forward, pseudo_inverse,
                     difficulty_residual, reorganize_proxy_gt, make_training_pair,
                     bicubic_resize, bicubic_resize_to)
from .demosaic import initialize_lr, demosaic_full
from .denoise import (GuidedFilterConfig, gaussian_denoise_stokes,
                      guided_denoise_stokes, guided_filter)
from .flow import (FlowField, zero_flow, divergence, curl, backward_warp,
                   softmax_splat, blend_splat, residual_importance,
                   estimate_flow_hs, scale_flow)
from .dynamics import (CHARBONNIER_EPS, MASK_DECAY_TAU, LAMBDA_FLOW, LAMBDA_POLAR,
                       VariationMasks, LossReport, charbonnier_map, charbonnier,
                       aop_cosine_map, variation_mask, gate_masks, loss_var,
                       loss_smooth, loss_total)
from .metrics import MetricsReport, psnr, ssim, mae_aop, evaluate_reconstruction
from .scenes import (SceneSpec, SceneFrameBundle, Disc, Rect, RampPatch, Rotation,
                     Translation, render_params, render_frame, render_sequence,
                     exact_flow, object_coverage, get_scene_preset, SCENE_PRESETS,
                     scene_spec_to_dict, scene_spec_from_dict)
from .io import (write_pvt, read_pvt, read_pvt_header, write_polar_frame,
                 read_polar_frame, write_stokes, read_stokes, write_params,
                 read_params, write_mosaic, read_mosaic, write_flo, read_flo,
                 write_png16, read_png16, write_png8)

__version__ = "0.1.0"

__all__ = [
    "DimensionError", "DomainError", "FormatError",
    "DIRECTIONS", "PolarFrame", "StokesFrame", "PolarParams", "PolarFeatureStack",
    "render_directions", "stokes_from_directions", "params_from_stokes",
    "polar_params", "aop_distance", "encode_polar_features", "hsv_visualize",
    "MosaicLayout", "MosaicFrame", "DegradationConfig", "get_layout",
    "layout_from_text", "apply_forward", "pseudo_inverse", "difficulty_residual",
    "reorganize_proxy_gt", "make_training_pair", "bicubic_resize",
    "bicubic_resize_to",
    "initialize_lr", "demosaic_full",
    "GuidedFilterConfig", "gaussian_denoise_stokes", "guided_denoise_stokes",
    "guided_filter",
    "FlowField", "zero_flow", "divergence", "curl", "backward_warp",
    "softmax_splat", "blend_splat", "residual_importance", "estimate_flow_hs",
    "scale_flow",
    "CHARBONNIER_EPS", "MASK_DECAY_TAU", "LAMBDA_FLOW", "LAMBDA_POLAR",
    "VariationMasks", "LossReport", "charbonnier_map", "charbonnier",
    "aop_cosine_map", "variation_mask", "gate_masks", "loss_var", "loss_smooth",
    "loss_total",
    "MetricsReport", "psnr", "ssim", "mae_aop", "evaluate_reconstruction",
    "SceneSpec", "SceneFrameBundle", "Disc", "Rect", "RampPatch", "Rotation",
    "Translation", "render_params", "render_frame", "render_sequence",
    "exact_flow", "object_coverage", "get_scene_preset", "SCENE_PRESETS",
    "scene_spec_to_dict", "scene_spec_from_dict",
    "write_pvt", "read_pvt", "read_pvt_header", "write_polar_frame",
    "read_polar_frame", "write_stokes", "read_stokes", "write_params",
    "read_params", "write_mosaic", "read_mosaic", "write_flo", "read_flo",
    "write_png16", "read_png16", "write_png8",
    "__version__",
]
