"""Address-event codec: sparse readout of active pixels and the .bgc file format.

Only active pixels leave the sensor; a frame is read out as the ordered
list of their linear addresses (row * width + col), plus the code value
when the stream is more than 1 bit deep.

File layout (all integers little-endian):

    magic "BGC1" | version u8=1 | modality u8 (0 spatial, 1 temporal)
    bits u8 | reserved u8=0 | width u16 | height u16
    frame_rate f32 | threshold f32 | frame_count u32
    per frame: timestamp_index u32, event_count u32,
               event_count x (address u32 [+ value u8 iff bits > 1])
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, CorruptStreamError
from .frames import GradientFrame, Modality, SensorConfig

MAGIC = b"BGC1"
VERSION = 1

_HEADER = struct.Struct("<4sBBBBHHffI")
_FRAME_HEAD = struct.Struct("<II")


@dataclass(frozen=True)
class StreamHeader:
    width: int
    height: int
    frame_rate: float
    threshold: float
    bits: int
    modality: Modality

    @classmethod
    def from_config(cls, config: SensorConfig, width: int, height: int) -> "StreamHeader":
        return cls(
            width=width,
            height=height,
            frame_rate=config.frame_rate,
            threshold=config.threshold,
            bits=config.bits,
            modality=config.modality,
        )


@dataclass(frozen=True)
class EventFrame:
    """Sparse frame: (address, value) pairs in ascending address order."""

    timestamp_index: int
    addresses: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        addrs = np.asarray(self.addresses, dtype=np.uint32)
        vals = np.asarray(self.values, dtype=np.uint8)
        object.__setattr__(self, "addresses", addrs)
        object.__setattr__(self, "values", vals)
        if addrs.shape != vals.shape:
            raise ContractError("addresses and values must have equal length")
        if addrs.size > 1 and not np.all(np.diff(addrs.astype(np.int64)) > 0):
            raise ContractError("addresses must be strictly ascending")
        if vals.size and vals.min() < 1:
            raise ContractError("event values must be >= 1")

    @property
    def event_count(self) -> int:
        return int(self.addresses.size)


@dataclass(frozen=True)
class EventStream:
    header: StreamHeader
    frames: tuple[EventFrame, ...]

    def __post_init__(self):
        object.__setattr__(self, "frames", tuple(self.frames))
        limit = self.header.width * self.header.height
        prev_ts = None
        for f in self.frames:
            if f.addresses.size and int(f.addresses.max()) >= limit:
                raise ContractError(f"address out of bounds for {self.header.width}x{self.header.height}")
            if prev_ts is not None and f.timestamp_index <= prev_ts:
                raise ContractError("frame timestamps must be strictly increasing")
            prev_ts = f.timestamp_index


def encode_frame(frame: GradientFrame) -> EventFrame:
    """List the active pixels of a dense gradient frame, address-ascending."""
    flat = frame.values.ravel()
    addresses = np.flatnonzero(flat).astype(np.uint32)
    return EventFrame(
        timestamp_index=frame.timestamp_index,
        addresses=addresses,
        values=flat[addresses].astype(np.uint8),
    )


def decode_frame(event_frame: EventFrame, header: StreamHeader) -> GradientFrame:
    """Rebuild the dense frame an event frame was encoded from."""
    size = header.width * header.height
    if event_frame.addresses.size and int(event_frame.addresses.max()) >= size:
        raise CorruptStreamError("event address out of bounds")
    flat = np.zeros(size, dtype=np.uint8)
    flat[event_frame.addresses] = event_frame.values
    return GradientFrame(
        values=flat.reshape(header.height, header.width),
        bits=header.bits,
        modality=header.modality,
        threshold=header.threshold,
        timestamp_index=event_frame.timestamp_index,
    )


def encode_stream(frames: list[GradientFrame], config: SensorConfig) -> EventStream:
    """Encode a converted sequence into a stream with a config-derived header."""
    if not frames:
        raise ContractError("cannot encode an empty frame sequence")
    header = StreamHeader.from_config(config, frames[0].width, frames[0].height)
    return EventStream(header=header, frames=tuple(encode_frame(f) for f in frames))


def decode_stream(stream: EventStream) -> list[GradientFrame]:
    return [decode_frame(f, stream.header) for f in stream.frames]


def serialize(stream: EventStream) -> bytes:
    """Canonical byte serialization; identical streams yield identical bytes."""
    h = stream.header
    out = bytearray(
        _HEADER.pack(
            MAGIC,
            VERSION,
            0 if h.modality is Modality.SPATIAL else 1,
            h.bits,
            0,
            h.width,
            h.height,
            h.frame_rate,
            h.threshold,
            len(stream.frames),
        )
    )
    for f in stream.frames:
        out += _FRAME_HEAD.pack(f.timestamp_index, f.event_count)
        if h.bits > 1:
            rec = np.empty(f.event_count, dtype=np.dtype([("a", "<u4"), ("v", "u1")]))
            rec["a"] = f.addresses
            rec["v"] = f.values
            out += rec.tobytes()
        else:
            out += f.addresses.astype("<u4").tobytes()
    return bytes(out)


def deserialize(data: bytes) -> EventStream:
    """Parse a .bgc byte string, validating structure as it goes."""
    if len(data) < _HEADER.size:
        raise CorruptStreamError("truncated header")
    (magic, version, modality_code, bits, _reserved, width, height,
     frame_rate, threshold, frame_count) = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise CorruptStreamError(f"bad magic {magic!r}")
    if version != VERSION:
        raise CorruptStreamError(f"unsupported version {version}")
    if modality_code not in (0, 1):
        raise CorruptStreamError(f"unknown modality code {modality_code}")
    if not (1 <= bits <= 8):
        raise CorruptStreamError(f"bits out of range: {bits}")
    header = StreamHeader(
        width=width,
        height=height,
        frame_rate=frame_rate,
        threshold=threshold,
        bits=bits,
        modality=Modality.SPATIAL if modality_code == 0 else Modality.TEMPORAL,
    )
    offset = _HEADER.size
    event_size = 5 if bits > 1 else 4
    frames = []
    limit = width * height
    for _ in range(frame_count):
        if offset + _FRAME_HEAD.size > len(data):
            raise CorruptStreamError("truncated frame header")
        ts, count = _FRAME_HEAD.unpack_from(data, offset)
        offset += _FRAME_HEAD.size
        end = offset + count * event_size
        if end > len(data):
            raise CorruptStreamError("truncated event list")
        if bits > 1:
            rec = np.frombuffer(data, dtype=np.dtype([("a", "<u4"), ("v", "u1")]),
                                count=count, offset=offset)
            addresses = rec["a"].astype(np.uint32)
            values = rec["v"].copy()
        else:
            addresses = np.frombuffer(data, dtype="<u4", count=count, offset=offset).copy()
            values = np.ones(count, dtype=np.uint8)
        offset = end
        if count and int(addresses.max()) >= limit:
            raise CorruptStreamError("event address out of bounds")
        if count > 1 and not np.all(np.diff(addresses.astype(np.int64)) > 0):
            raise CorruptStreamError("event addresses not strictly ascending")
        if bits > 1 and count and (values.min() < 1 or values.max() > (1 << bits) - 1):
            raise CorruptStreamError("event value out of range for bit depth")
        frames.append(EventFrame(timestamp_index=ts, addresses=addresses, values=values))
    if offset != len(data):
        raise CorruptStreamError(f"{len(data) - offset} trailing bytes")
    return EventStream(header=header, frames=tuple(frames))


def write_stream(stream: EventStream, path) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize(stream))


def read_stream(path) -> EventStream:
    with open(path, "rb") as fh:
        return deserialize(fh.read())


@dataclass(frozen=True)
class BandwidthStats:
    frame_event_counts: tuple[int, ...]
    mean_active_fraction: float
    wire_bytes: int
    dense_bytes: int
    compression_ratio: float


def bandwidth_stats(stream: EventStream) -> BandwidthStats:
    """Wire-size accounting for a stream versus an equivalent dense raster."""
    if not stream.frames:
        raise ContractError("bandwidth_stats requires a nonempty stream")
    h = stream.header
    counts = tuple(f.event_count for f in stream.frames)
    pixels = h.width * h.height
    total_events = sum(counts)
    event_size = 5 if h.bits > 1 else 4
    wire = _HEADER.size + len(counts) * _FRAME_HEAD.size + total_events * event_size
    dense = len(counts) * pixels  # one byte per pixel per frame
    return BandwidthStats(
        frame_event_counts=counts,
        mean_active_fraction=total_events / (len(counts) * pixels),
        wire_bytes=wire,
        dense_bytes=dense,
        compression_ratio=dense / wire,
    )
