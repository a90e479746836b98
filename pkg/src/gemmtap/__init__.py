"""Cache-probe analysis of blocked GEMM: recover the first conv layer's input size.

The toolkit has two halves that check each other:

* a forward model (`gemm_model`, `synth`) that maps convolution geometry to
  GEMM dimensions, a blocked loop schedule, and a synthetic probe trace;
* an inverse pipeline (`trace_io`, `noise_filter`, `loop_profile`,
  `dim_inverter`) that turns a probe log back into loop properties and an
  input-dimension estimate.
"""

from gemmtap.gemm_model import (
    BlockingConstants,
    ConvGeometry,
    GemmDims,
    LoopSchedule,
    conv_to_gemm,
    schedule,
)
from gemmtap.trace_io import (
    DcgEvent,
    ProbeConfig,
    ProbeSample,
    TraceParseError,
    create_dcg,
    read_probe_log,
    write_probe_log,
)
from gemmtap.noise_filter import FilterConfig, filter_dcg
from gemmtap.loop_profile import LoopId, LoopProperties, PatternError, extract_properties
from gemmtap.dim_inverter import (
    AnalysisError,
    AnalysisReport,
    CalibrationError,
    IdEstimate,
    analyze,
    estimate_id,
    estimate_k,
    estimate_l1_at,
    estimate_m,
    estimate_n,
)
from gemmtap.synth import ObfuscationPlan, SynthExecutor, TimingModel, apply_obfuscation, synthesize

__all__ = [
    "AnalysisError",
    "AnalysisReport",
    "BlockingConstants",
    "CalibrationError",
    "ConvGeometry",
    "DcgEvent",
    "FilterConfig",
    "GemmDims",
    "IdEstimate",
    "LoopId",
    "LoopProperties",
    "LoopSchedule",
    "ObfuscationPlan",
    "PatternError",
    "ProbeConfig",
    "ProbeSample",
    "SynthExecutor",
    "TimingModel",
    "TraceParseError",
    "analyze",
    "apply_obfuscation",
    "conv_to_gemm",
    "create_dcg",
    "estimate_id",
    "estimate_k",
    "estimate_l1_at",
    "estimate_m",
    "estimate_n",
    "extract_properties",
    "filter_dcg",
    "read_probe_log",
    "schedule",
    "synthesize",
    "write_probe_log",
]
