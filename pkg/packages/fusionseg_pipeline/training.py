"""
Training loop.

Every step draws one study (uniformly), samples a batch of patches, applies
flip augmentation and takes one Adam step on the combined loss. All
randomness comes from one generator seeded with cfg.seed, so a run is
reproducible step for step.
"""

from __future__ import annotations

import csv
import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from fusionseg_core.constants import HEAD_LABELS, SETUP_CHANNELS
from fusionseg_core.exceptions import IoError, NonFiniteLoss, ShapeMismatch
from fusionseg_nngraph import (
    AdamState,
    Tape,
    Tensor5,
    adam_step,
    combine_terms,
    loss_terms,
    term_values,
    zero_grad,
)
from fusionseg_pipeline.config import TrainConfig
from fusionseg_pipeline.sampling import (
    Batch,
    TrainingCase,
    augment_flip,
    prepare_case,
    sample_patches,
)
from fusionseg_unet import UNetModel, forward, save_checkpoint
from fusionseg_volume import MultimodalStudy

logger = logging.getLogger(__name__)

LOSS_COLUMNS = ["step", "total"] + [
    f"{term}_{label}" for label in HEAD_LABELS for term in ("bce", "dice")
]


@dataclass(frozen=True)
class LossRecord:
    step: int
    total: float
    terms: dict[str, float]

    def row(self) -> dict[str, float | int]:
        return {"step": self.step, "total": self.total, **self.terms}


@dataclass
class TrainResult:
    model: UNetModel
    history: list[LossRecord] = field(default_factory=list)
    val_history: list[tuple[int, float]] = field(default_factory=list)

    def totals(self) -> list[float]:
        return [r.total for r in self.history]


def check_setup(model: UNetModel, cfg: TrainConfig) -> None:
    """
    Raises:
        ShapeMismatch: channel count or patch size incompatible with the model
    """
    expected = len(SETUP_CHANNELS[cfg.setup])
    if model.config.in_channels != expected:
        raise ShapeMismatch(
            f"Setup '{cfg.setup.value}' has {expected} channels, "
            f"model expects {model.config.in_channels}"
        )
    m = model.config.size_multiple
    if any(d % m for d in cfg.patch_size):
        raise ShapeMismatch(f"Patch size {cfg.patch_size} must be divisible by {m}")


def batch_loss(
    model: UNetModel, batch: Batch, cfg: TrainConfig
) -> tuple[Tensor5, dict[str, float]]:
    """Combined loss of one batch plus the per-term values."""
    heads = forward(model, Tensor5(batch.inputs))
    terms = loss_terms(heads, [batch.target(i) for i in range(len(heads))])
    total = combine_terms(terms, cfg.label_weights, cfg.bce_weight, cfg.dice_weight)
    return total, dict(term_values(model.config.head_labels, terms))


def validation_loss(
    model: UNetModel, cases: Sequence[TrainingCase], cfg: TrainConfig, epoch: int
) -> float:
    """Mean combined loss over one seeded batch per validation case (no gradients)."""
    rng = np.random.default_rng([cfg.seed, epoch, 1])
    losses = [batch_loss(model, sample_patches(case, cfg, rng), cfg)[0].item() for case in cases]
    return float(np.mean(losses))


def train(
    studies: Sequence[MultimodalStudy],
    model: UNetModel,
    cfg: TrainConfig,
    checkpoint_dir: Path | None = None,
    val_studies: Sequence[MultimodalStudy] = (),
) -> TrainResult:
    """
    Train `model` in place on the given studies.

    Args:
        studies: training studies (at least one)
        model: UNet whose in_channels matches cfg.setup
        cfg: training configuration
        checkpoint_dir: when set, writes epoch_NNN.ckpt after every epoch
        val_studies: used only when cfg.validate_each_epoch

    Raises:
        ShapeMismatch: model/setup/patch mismatch
        NonFiniteLoss: loss became NaN or Inf (carries the step index)
    """
    if not studies:
        raise ShapeMismatch("train needs at least one study")
    check_setup(model, cfg)

    cases = [prepare_case(study, cfg.setup) for study in studies]
    val_cases = (
        [prepare_case(study, cfg.setup) for study in val_studies]
        if cfg.validate_each_epoch
        else []
    )
    rng = np.random.default_rng(cfg.seed)
    state = AdamState(lr=cfg.learning_rate)
    result = TrainResult(model=model)
    logger.info(
        f"Training {cfg.setup.value} on {len(cases)} studies: "
        f"{cfg.epochs} epochs x {cfg.steps_per_epoch} steps"
    )

    step = 0
    for epoch in range(cfg.epochs):
        epoch_losses = []
        for _ in range(cfg.steps_per_epoch):
            case = cases[int(rng.integers(len(cases)))]
            batch = augment_flip(
                sample_patches(case, cfg, rng), cfg.augment_flips, rng, cfg.flip_probability
            )
            with Tape() as tape:
                total, terms = batch_loss(model, batch, cfg)
                value = total.item()
                if not np.isfinite(value):
                    raise NonFiniteLoss(step, value)
                tape.backward(total)
            adam_step(model.params, {n: p.grad for n, p in model.params.items()}, state)
            zero_grad(model.parameters())

            result.history.append(LossRecord(step, value, terms))
            epoch_losses.append(value)
            logger.debug(f"step {step} loss {value:.5f}")
            step += 1

        logger.info(f"Epoch {epoch + 1}/{cfg.epochs}: mean loss {np.mean(epoch_losses):.4f}")
        if val_cases:
            val = validation_loss(model, val_cases, cfg, epoch)
            result.val_history.append((epoch, val))
            logger.info(f"Epoch {epoch + 1}/{cfg.epochs}: validation loss {val:.4f}")
        if checkpoint_dir is not None:
            checkpoint_dir.mkdir(parents=True, exist_ok=True)
            save_checkpoint(model, checkpoint_dir / f"epoch_{epoch + 1:03d}.ckpt")

    return result


def write_loss_csv(history: Sequence[LossRecord], path: Path) -> None:
    """step, total, bce/dice per label; floats written with repr precision."""
    try:
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.DictWriter(f, fieldnames=LOSS_COLUMNS)
            writer.writeheader()
            for record in history:
                writer.writerow(record.row())
    except OSError as e:
        raise IoError(f"Cannot write loss history {path}: {e}") from e
