"""Packet-capture CSV ingestion and time binning.

Capture exports are read as plain RFC-4180 CSV with the columns
``seq, time, source, destination, protocol[, info, ...]``.  Times are
seconds since the start of the capture session, so bins are anchored
at zero rather than at the first packet.
"""
from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass
from typing import IO, Iterable, Sequence, Union

import numpy as np

from .errors import EmptyInput, MalformedRow, NonMonotonicPart, ParameterError

DEFAULT_PROTOCOLS = frozenset({"TCP", "UDP"})
DEFAULT_STEP_SECONDS = 30.0

# tolerated backwards jitter inside one capture part
_MONOTONIC_SLACK = 1e-3


@dataclass(frozen=True)
class PacketRecord:
    seq: int
    time: float
    source: str
    destination: str
    protocol: str
    info: str = ""

    def __post_init__(self):
        if not self.time >= 0:
            raise ValueError(f"packet time must be >= 0, got {self.time!r}")
        if not self.protocol.strip():
            raise ValueError("packet protocol must be non-empty")


@dataclass(frozen=True)
class BinnedSeries:
    """Packets per time step.

    ``counts[k]`` is the number of packets whose time falls in
    ``[origin_seconds + k*step_seconds, origin_seconds + (k+1)*step_seconds)``.
    """

    counts: np.ndarray
    step_seconds: float = DEFAULT_STEP_SECONDS
    origin_seconds: float = 0.0

    def __post_init__(self):
        counts = np.asarray(self.counts)
        if counts.ndim != 1 or counts.size == 0:
            raise ValueError("counts must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(counts)) or np.any(counts != np.round(counts)):
            raise ValueError("counts must be integers")
        if np.any(counts < 0):
            raise ValueError("counts must be non-negative")
        if not self.step_seconds > 0:
            raise ValueError("step_seconds must be positive")
        counts = counts.astype(np.int64)
        counts.flags.writeable = False
        object.__setattr__(self, "counts", counts)

    def __len__(self):
        return len(self.counts)

    def __eq__(self, other):
        if not isinstance(other, BinnedSeries):
            return NotImplemented
        return (
            self.step_seconds == other.step_seconds
            and self.origin_seconds == other.origin_seconds
            and np.array_equal(self.counts, other.counts)
        )

    def start_seconds(self, k):
        return self.origin_seconds + k * self.step_seconds


def _is_number(text):
    try:
        float(text)
    except ValueError:
        return False
    return True


def _open_text(source):
    if isinstance(source, (str, os.PathLike)):
        return open(source, "r", encoding="utf-8", newline="")
    if isinstance(source, (bytes, bytearray)):
        return io.StringIO(bytes(source).decode("utf-8"), newline="")
    if isinstance(source, io.TextIOBase):
        return source
    # binary stream
    return io.TextIOWrapper(source, encoding="utf-8", newline="")


def parse_capture_csv(source: Union[str, os.PathLike, bytes, IO]) -> list[PacketRecord]:
    """Parse a capture export into packet records.

    Parameters
    ----------
    source : path, bytes or file object
        UTF-8 CSV text.  The first row is treated as a header when its
        time column is not numeric.

    Returns
    -------
    list of PacketRecord
        One record per data row, in file order.

    Raises
    ------
    MalformedRow
        A data row has fewer than five columns, or a bad seq/time field.
    EmptyInput
        No data rows were found.
    """
    fh = _open_text(source)
    owned = fh is not source
    try:
        records = []
        reader = csv.reader(fh)
        first = True
        for row in reader:
            line_no = reader.line_num
            if not row or all(not cell.strip() for cell in row):
                continue
            if first:
                first = False
                if len(row) >= 2 and not _is_number(row[1].strip()):
                    continue
            records.append(_record_from_row(row, line_no))
    finally:
        if owned:
            fh.close()
    if not records:
        raise EmptyInput("capture contains no data rows")
    return records


def _record_from_row(row, line_no):
    if len(row) < 5:
        raise MalformedRow(line_no, f"expected at least 5 columns, got {len(row)}")
    seq_text, time_text = row[0].strip(), row[1].strip()
    try:
        time = float(time_text)
    except ValueError:
        raise MalformedRow(line_no, f"non-numeric time {time_text!r}") from None
    try:
        seq = int(seq_text)
    except ValueError:
        raise MalformedRow(line_no, f"non-integer sequence number {seq_text!r}") from None
    if seq < 1 or not (time >= 0 and math.isfinite(time)):
        raise MalformedRow(line_no, "sequence number must be >= 1 and time finite, >= 0")
    protocol = row[4].strip()
    if not protocol:
        raise MalformedRow(line_no, "empty protocol")
    info = row[5] if len(row) > 5 else ""
    return PacketRecord(seq, time, row[2].strip(), row[3].strip(), protocol, info)


def filter_transport(
    records: Iterable[PacketRecord], allowed: Iterable[str] = DEFAULT_PROTOCOLS
) -> list[PacketRecord]:
    """Keep records whose protocol is in `allowed` (case-insensitive)."""
    wanted = {p.strip().upper() for p in allowed}
    if not wanted:
        raise ParameterError("allowed protocol set must be non-empty")
    return [r for r in records if r.protocol.strip().upper() in wanted]


def merge_captures(
    parts: Sequence[Sequence[PacketRecord]], per_file_offset: float = 0.0
) -> list[PacketRecord]:
    """Merge per-file captures into one time-ordered sequence.

    Each part must already be in capture order.  When the capture
    clock restarts at zero for every file, pass ``per_file_offset``
    (seconds) and part ``k`` is shifted by ``k * per_file_offset``.
    Sequence numbers are left untouched.
    """
    merged = []
    for k, part in enumerate(parts):
        prev = -math.inf
        shift = k * per_file_offset
        for rec in part:
            if rec.time < prev - _MONOTONIC_SLACK:
                raise NonMonotonicPart(k)
            prev = max(prev, rec.time)
            if shift:
                rec = PacketRecord(
                    rec.seq, rec.time + shift, rec.source, rec.destination,
                    rec.protocol, rec.info,
                )
            merged.append(rec)
    # sorted() is stable, so ties keep part/file order
    return sorted(merged, key=lambda r: r.time)


def bin_counts(
    records: Sequence[PacketRecord], step_seconds: float = DEFAULT_STEP_SECONDS
) -> BinnedSeries:
    """Count packets per ``step_seconds`` bin, anchored at time 0.

    Bins are half-open, interior gaps are zero-filled and the series
    stops at the bin holding the last packet.
    """
    if not step_seconds > 0:
        raise ParameterError("step_seconds must be positive")
    if len(records) == 0:
        raise EmptyInput("no records to bin")
    times = np.fromiter((r.time for r in records), dtype=float, count=len(records))
    idx = np.floor(times / step_seconds).astype(np.int64)
    counts = np.bincount(idx, minlength=int(idx.max()) + 1)
    return BinnedSeries(counts, float(step_seconds), 0.0)


def write_binned_csv(series: BinnedSeries, fh: IO[str]) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["bin_index", "start_seconds", "count"])
    for k, c in enumerate(series.counts):
        writer.writerow([k, repr(float(series.start_seconds(k))), int(c)])


def read_binned_csv(fh: IO[str], step_seconds: float | None = None) -> BinnedSeries:
    """Read a series written by :func:`write_binned_csv`.

    The step is recovered from the first two ``start_seconds`` values;
    a one-row file needs ``step_seconds`` (default 30 s otherwise).
    """
    reader = csv.reader(fh)
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["bin_index", "start_seconds", "count"]:
        raise MalformedRow(1, "expected header bin_index,start_seconds,count")
    starts, counts = [], []
    for row in reader:
        if not row:
            continue
        try:
            starts.append(float(row[1]))
            counts.append(int(row[2]))
        except (IndexError, ValueError):
            raise MalformedRow(reader.line_num) from None
    if not counts:
        raise EmptyInput("binned series has no rows")
    origin = starts[0]
    if step_seconds is not None:
        step = step_seconds
    elif len(starts) > 1:
        step = starts[1] - starts[0]
    else:
        step = DEFAULT_STEP_SECONDS
    if step <= 0:
        raise MalformedRow(3, "start_seconds must increase")
    return BinnedSeries(np.array(counts), step, origin)
