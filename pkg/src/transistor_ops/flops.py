"""Multiply-accumulate baseline: the count the transistor-operation
model improves on.

Only the linear layers' multiply-accumulates are counted; activations,
loss and optimizer work contribute nothing. The consequence, exercised
in the tests, is that the baseline cannot distinguish activation
functions: every activation variant of a skeleton gets the same count.

Conventions: FLOPs = 2 * MACs, and training costs three forward-passes
worth of MACs (forward plus two backward traversals).
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import AnalysisLevel, Convolutional, FullyConnected, LayerSpec, ModelSpec
from .basic_ops import UnsupportedError


@dataclass(frozen=True)
class FlopsCount:
    macs: int

    def __post_init__(self) -> None:
        if self.macs < 0:
            raise ValueError("MAC count must be non-negative")

    @property
    def flops(self) -> int:
        return 2 * self.macs

    def __add__(self, other: "FlopsCount") -> "FlopsCount":
        return FlopsCount(self.macs + other.macs)

    def __mul__(self, factor: int) -> "FlopsCount":
        return FlopsCount(self.macs * factor)

    __rmul__ = __mul__


@dataclass(frozen=True)
class FlopsReport:
    per_instance: FlopsCount
    per_run: FlopsCount
    instances_per_run: int
    steps_per_run: int

    @property
    def per_step_flops(self) -> float:
        """Per-optimizer-step average FLOPs, for run-scale comparisons."""
        return self.per_run.flops / self.steps_per_run


def flops_forward(layer: LayerSpec) -> FlopsCount:
    """Forward MACs for one layer; activation contributes zero."""
    if isinstance(layer, FullyConnected):
        return FlopsCount(layer.inputs * layer.outputs)
    if isinstance(layer, Convolutional):
        return FlopsCount(layer.out_width ** 2 * layer.out_channels
                          * layer.in_channels * layer.kernel ** 2)
    raise UnsupportedError(f"unknown layer kind: {layer!r}")


def flops_model(model: ModelSpec, level: AnalysisLevel) -> FlopsReport:
    """Sum the baseline over all layers and scale it to a full run."""
    forward = FlopsCount(0)
    for layer in model.layers:
        forward = forward + flops_forward(layer)
    per_instance = forward * 3 if level.includes_backprop else forward
    instances = model.dataset_len * model.epochs
    steps = model.steps_per_epoch * model.epochs
    return FlopsReport(
        per_instance=per_instance,
        per_run=per_instance * instances,
        instances_per_run=instances,
        steps_per_run=steps,
    )
