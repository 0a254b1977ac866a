"""Sub-diffraction imaging from speckle-illuminated single-pixel measurements.

The pipeline simulates diffraction-limited speckle illumination, collects
bucket-detector measurements y = A x, and reconstructs the image from far
fewer measurements than pixels by basis pursuit, basis pursuit denoising,
or search over the latent space of a fixed pre-trained generator network.
"""

from .dataset import (
    IdxFormatError,
    IdxLengthError,
    LabeledSample,
    load_idx_images,
    load_idx_labels,
    load_labeled,
    load_test_split,
    mean_sparsity,
    pick_one_per_class,
    save_idx_images,
    save_idx_labels,
)
from .experiments import (
    AggregateCell,
    CorrelationRecord,
    SweepGrid,
    aggregate,
    aggregate_to_csv,
    is_sub_nyquist,
    nyquist_count,
    pearson,
    records_from_csv,
    records_to_csv,
    run_cell,
    run_sweep,
)
from .fixtures import random_generator_model, synthetic_digits
from .forward_model import (
    NoiseSpec,
    add_noise,
    build_matrix,
    matrix_from_patterns,
    measure,
    resize_area,
)
from .generator import (
    AdamState,
    AffineChannel,
    ConvTranspose2d,
    Dense,
    GeneratorModel,
    GgwFormatError,
    GgwLengthError,
    GgwMagicError,
    GgwShapeError,
    LeakyRelu,
    NumericError,
    Reshape,
    Tanh,
    adam_step,
    forward,
    load_model,
    loss_and_gradient,
    loss_value,
    output_image,
    save_model,
    to_measurement_domain,
)
from .images import load_image, save_image
from .l1 import (
    BpdnConfig,
    SolveReport,
    project_l1_ball,
    solve_bp,
    solve_bpdn,
    solve_lasso,
    tune_delta,
)
from .recon import ReconConfig, ReconResult, ReconstructionError, reconstruct, reconstruct_digit_case
from .speckle import (
    SpeckleConfig,
    diffraction_limited_image,
    field_spectrum,
    generate_speckle,
    generate_speckle_field,
    low_pass,
    lowpass_mask,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
