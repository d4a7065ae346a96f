"""Transistor-operation lowering through an arithmetic-circuit cost model.

Basic-operation counts are priced by opening the arithmetic unit one
level further: an n-bit ripple adder costs (n-1) full adders plus one
half adder; multipliers and dividers are priced from 64-bit reference
circuits (a Booth-Wallace style multiplier at 90k transistors, an SRT
style divider at 110k) scaled by a power law in operand width; the root
slot, covering exponentials and square roots alike, is simulated as
Newton-Raphson iterations of one divide, one multiply and one add.

Floating-point operations decompose per the binary interchange layout:
add/sub run a significand-wide adder (exponent alignment shifts are not
priced); mul/div run a sign XOR, a significand-wide multiplier or
divider, and an exponent-wide adder.

Transistor-operation totals are a real-valued workload index, not a
physical transistor census, so fractional values are kept exact.

The cost table is immutable after load and every function here is pure.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

from .basic_ops import BasicOpCounts, ModelBoReport, count_model
from .model import AnalysisLevel, FloatFormat, ModelSpec, ParseError


class OpKind(Enum):
    ADD = "add"
    SUB = "sub"
    MUL = "mul"
    DIV = "div"
    ROOT = "root"


@dataclass(frozen=True)
class ScaledUnitRef:
    """Reference circuit: transistor count at a known operand width."""

    bits: int
    transistors: float

    def __post_init__(self) -> None:
        if self.bits < 1:
            raise ValueError("reference bit width must be >= 1")
        if self.transistors <= 0:
            raise ValueError("reference transistor count must be positive")


@dataclass(frozen=True)
class CostTable:
    """Transistor costs for circuit primitives plus scaling parameters."""

    fa_transistors: float = 10.0
    ha_transistors: float = 5.0
    xor_transistors: float = 6.0
    mult_ref: ScaledUnitRef = ScaledUnitRef(64, 90_000.0)
    div_ref: ScaledUnitRef = ScaledUnitRef(64, 110_000.0)
    scaling_exponent: float = 2.0
    newton_iterations: int = 3

    def __post_init__(self) -> None:
        for name in ("fa_transistors", "ha_transistors", "xor_transistors"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.scaling_exponent <= 0:
            raise ValueError("scaling_exponent must be positive")
        if self.newton_iterations < 1:
            raise ValueError("newton_iterations must be >= 1")


DEFAULT_COST_TABLE = CostTable()

_TABLE_KEYS = {
    "fa", "ha", "xor",
    "mult_ref_bits", "mult_ref_transistors",
    "div_ref_bits", "div_ref_transistors",
    "scaling_exponent", "newton_iterations",
}


def parse_cost_table(text: str) -> CostTable:
    """Parse a cost-table document; every key is optional, unknown keys
    are rejected."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"line {e.lineno}, column {e.colno}: {e.msg}") from None
    if not isinstance(doc, dict):
        raise ParseError("cost table: expected an object")
    unknown = sorted(set(doc) - _TABLE_KEYS)
    if unknown:
        raise ParseError(f"cost table: unknown key(s) {', '.join(unknown)}")
    base = DEFAULT_COST_TABLE
    try:
        return CostTable(
            fa_transistors=float(doc.get("fa", base.fa_transistors)),
            ha_transistors=float(doc.get("ha", base.ha_transistors)),
            xor_transistors=float(doc.get("xor", base.xor_transistors)),
            mult_ref=ScaledUnitRef(
                int(doc.get("mult_ref_bits", base.mult_ref.bits)),
                float(doc.get("mult_ref_transistors", base.mult_ref.transistors)),
            ),
            div_ref=ScaledUnitRef(
                int(doc.get("div_ref_bits", base.div_ref.bits)),
                float(doc.get("div_ref_transistors", base.div_ref.transistors)),
            ),
            scaling_exponent=float(doc.get("scaling_exponent", base.scaling_exponent)),
            newton_iterations=int(doc.get("newton_iterations", base.newton_iterations)),
        )
    except (TypeError, ValueError) as e:
        raise ParseError(f"cost table: {e}") from None


def load_cost_table(path) -> CostTable:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_cost_table(fh.read())


def adder_tos(bits: int, table: CostTable = DEFAULT_COST_TABLE) -> float:
    """An n-bit adder: (n-1) full adders plus one half adder."""
    if bits < 1:
        raise ValueError(f"adder width must be >= 1, got {bits}")
    return (bits - 1) * table.fa_transistors + table.ha_transistors


def scaled_unit_tos(bits: int, ref: ScaledUnitRef, exponent: float) -> float:
    """Power-law width scaling around a reference circuit; exact at the
    reference width for any exponent."""
    if bits < 1:
        raise ValueError(f"unit width must be >= 1, got {bits}")
    return ref.transistors * (bits / ref.bits) ** exponent


def fp_op_tos(op: OpKind, fmt: FloatFormat,
              table: CostTable = DEFAULT_COST_TABLE) -> float:
    """Transistor operations for one floating-point basic operation."""
    frac = fmt.significand_bits
    if op is OpKind.ADD or op is OpKind.SUB:
        # Subtraction runs through the adder via two's complement.
        return adder_tos(frac, table)
    if op is OpKind.MUL:
        return (table.xor_transistors
                + scaled_unit_tos(frac, table.mult_ref, table.scaling_exponent)
                + adder_tos(fmt.exponent_bits, table))
    if op is OpKind.DIV:
        return (table.xor_transistors
                + scaled_unit_tos(frac, table.div_ref, table.scaling_exponent)
                + adder_tos(fmt.exponent_bits, table))
    if op is OpKind.ROOT:
        per_iter = (fp_op_tos(OpKind.DIV, fmt, table)
                    + fp_op_tos(OpKind.MUL, fmt, table)
                    + fp_op_tos(OpKind.ADD, fmt, table))
        return table.newton_iterations * per_iter
    raise ValueError(f"unknown op kind: {op!r}")


def fp_cost_vector(fmt: FloatFormat,
                   table: CostTable = DEFAULT_COST_TABLE) -> tuple[float, ...]:
    """Costs for (add, sub, mul, div, root) in census order."""
    return tuple(fp_op_tos(op, fmt, table) for op in
                 (OpKind.ADD, OpKind.SUB, OpKind.MUL, OpKind.DIV, OpKind.ROOT))


def tos_from_bos(bos: BasicOpCounts, fmt: FloatFormat,
                 table: CostTable = DEFAULT_COST_TABLE) -> float:
    """Lower a census vector to transistor operations (linear in the census)."""
    costs = fp_cost_vector(fmt, table)
    return float(sum(n * c for n, c in zip(bos.as_tuple(), costs)))


@dataclass(frozen=True)
class PhaseTos:
    """Transistor operations split by run step."""

    forward: float = 0.0
    backprop: float = 0.0
    loss: float = 0.0
    update: float = 0.0

    @property
    def total(self) -> float:
        return self.forward + self.backprop + self.loss + self.update

    def scaled(self, factor: float) -> "PhaseTos":
        return PhaseTos(self.forward * factor, self.backprop * factor,
                        self.loss * factor, self.update * factor)


@dataclass(frozen=True)
class ToProfile:
    """Per-layer and aggregate transistor-operation workload.

    ``per_instance`` covers one data instance (updates are per batch
    step, so its update slot is zero and the per-step census is exposed
    separately as ``update_per_batch``). ``per_run`` covers one full run
    (dataset_len * epochs instances plus every optimizer step), and
    ``per_step`` is the per-optimizer-step average, per_run divided by
    the total step count.

    ``nonlinear_share`` is the fraction of the run total attributable to
    operations outside the layers' multiply-accumulates: activations,
    activation derivatives, the loss and parameter updates.
    """

    layer_forward: tuple[float, ...]
    layer_backprop: tuple[float, ...]
    update_per_batch: float
    per_instance: PhaseTos
    per_run: PhaseTos
    per_step: PhaseTos
    nonlinear_share: float
    instances_per_run: int
    steps_per_run: int


def analyze(model: ModelSpec, level: AnalysisLevel,
            table: CostTable = DEFAULT_COST_TABLE) -> ToProfile:
    """Lower the model's census at ``level`` to transistor operations."""
    report: ModelBoReport = count_model(model, level)
    fmt = model.float_format

    def lower(bos: BasicOpCounts) -> float:
        return tos_from_bos(bos, fmt, table)

    layer_forward = tuple(lower(p.forward) for p in report.layers)
    layer_backprop = tuple(lower(p.backprop) for p in report.layers)
    update_per_batch = lower(report.update_per_batch)
    loss = lower(report.loss)

    per_instance = PhaseTos(
        forward=sum(layer_forward),
        backprop=sum(layer_backprop),
        loss=loss,
        update=0.0,
    )
    per_run = PhaseTos(
        forward=per_instance.forward * report.instances_per_run,
        backprop=per_instance.backprop * report.instances_per_run,
        loss=per_instance.loss * report.instances_per_run,
        update=update_per_batch * report.steps_per_run,
    )
    per_step = per_run.scaled(1.0 / report.steps_per_run)

    nonlinear_run = lower(report.nonlinear_per_run)
    share = nonlinear_run / per_run.total if per_run.total > 0 else 0.0

    return ToProfile(
        layer_forward=layer_forward,
        layer_backprop=layer_backprop,
        update_per_batch=update_per_batch,
        per_instance=per_instance,
        per_run=per_run,
        per_step=per_step,
        nonlinear_share=share,
        instances_per_run=report.instances_per_run,
        steps_per_run=report.steps_per_run,
    )
