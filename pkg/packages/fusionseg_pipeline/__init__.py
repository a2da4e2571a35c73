"""
Pipeline package.

Input assembly per setup (TRUS-only, MRI-only, multimodal), patch sampling,
flip augmentation, the training loop, sliding-window inference and
projection of MRI-space outputs to TRUS space.
"""

from fusionseg_pipeline.config import InferenceConfig, TrainConfig
from fusionseg_pipeline.inference import (
    blend_tiles,
    gaussian_weight_map,
    predict_study,
    sliding_window_infer,
    tile_starts,
)
from fusionseg_pipeline.inputs import (
    ChannelStack,
    assemble_input,
    label_maps,
    label_targets,
    project_labels,
    project_prediction,
)
from fusionseg_pipeline.sampling import (
    Batch,
    TrainingCase,
    augment_flip,
    prepare_case,
    sample_center,
    sample_patches,
)
from fusionseg_pipeline.training import (
    LOSS_COLUMNS,
    LossRecord,
    TrainResult,
    train,
    write_loss_csv,
)

__all__ = [
    "InferenceConfig",
    "TrainConfig",
    "blend_tiles",
    "gaussian_weight_map",
    "predict_study",
    "sliding_window_infer",
    "tile_starts",
    "ChannelStack",
    "assemble_input",
    "label_maps",
    "label_targets",
    "project_labels",
    "project_prediction",
    "Batch",
    "TrainingCase",
    "augment_flip",
    "prepare_case",
    "sample_center",
    "sample_patches",
    "LOSS_COLUMNS",
    "LossRecord",
    "TrainResult",
    "train",
    "write_loss_csv",
]
