"""Deformable periodic B-spline surface fitting for valve point clouds."""

from ._cuspfit import (
    AdamParams,
    FitConfig,
    FitResult,
    FitStatus,
    Frame,
    HistoryEntry,
    LossBreakdown,
    LossWeights,
    PointCloud,
    SimilarityTransform,
    SnndReport,
    SplineSurface,
    SurfaceSamples,
    SynthStage,
    TemplateSpec,
    __version__,
    add_gaussian_noise,
    affine_prealign,
    annulus_loss,
    chamfer_one_sided,
    compute_prealign,
    evaluate_fit,
    finite_difference_gradient,
    fit_sequence,
    fit_single,
    hausdorff,
    load_point_cloud,
    load_surface,
    loss_gradient,
    make_template,
    min_nonneighbor_distance,
    normal_deviation_energy,
    orthogonality_energy,
    sample_poisson_disk,
    sample_surface,
    save_point_cloud,
    save_quad_mesh,
    save_surface,
    snnd_report,
    surface_area,
    synth_valve_surface,
    tangent_point_energy,
    total_loss,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
