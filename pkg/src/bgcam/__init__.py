"""Simulation toolkit for energy-efficient binary gradient cameras."""

from .analysis import (
    CalibrationResult,
    SweepRow,
    active_fraction,
    build_sweep,
    calibrate_threshold,
    default_sweep,
    edge_fattening_ratio,
)
from .aer import (
    BandwidthStats,
    EventFrame,
    EventStream,
    StreamHeader,
    bandwidth_stats,
    decode_frame,
    decode_stream,
    encode_frame,
    encode_stream,
    read_stream,
    write_stream,
)
from .errors import (
    BgcamError,
    ConfigError,
    ContractError,
    CorruptStreamError,
    UndefinedRatioError,
)
from .frames import GradientFrame, IntensityFrame, Modality, SensorConfig
from .ingest import ingest_images, load_image
from .pipeline import ConversionResult, DatasetManifest, RunConfig, convert_dataset
from .power import PowerConstants, PowerReport, estimate_power, power_ratio
from .sensor import (
    convert_all,
    convert_stream,
    local_contrast,
    multibit_gradient,
    spatial_gradient,
    temporal_gradient,
)

__version__ = "0.1.0"
