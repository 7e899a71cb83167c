"""Landmark file formats.

Blocks
    One ``x y`` pair per line, configurations separated by blank lines.
CSV
    Header ``config,landmark,x,y``; rows may come in any order.
TPS
    ``LM=<k>`` followed by k coordinate lines; ``ID=`` names the record.
"""
import csv
from dataclasses import dataclass, field
import enum
import io
from pathlib import Path

from .errors import EmptyFile, InconsistentK, ParseError
from .shapes import KAdConfig


class Format(str, enum.Enum):
    BLOCKS = "blocks"
    CSV = "csv"
    TPS = "tps"


@dataclass
class LandmarkFile:
    format: Format
    configurations: list
    k: int
    warnings: list = field(default_factory=list)


def _floats(parts, lineno, count=2):
    # float() only accepts a decimal point, independent of locale
    if len(parts) != count:
        raise ParseError(f"expected {count} numbers, got {' '.join(parts)!r}", lineno)
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise ParseError(f"not a number in {' '.join(parts)!r}", lineno) from None


def _check_k(configs):
    k = configs[0].k
    bad = [c.id for c in configs if c.k != k]
    if bad:
        raise InconsistentK(k, bad)
    return k


def _parse_blocks(lines):
    blocks, current = [], []
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            if current:
                blocks.append(current)
                current = []
            continue
        current.append(_floats(line.split(), lineno))
    if current:
        blocks.append(current)
    configs = []
    for i, block in enumerate(blocks, 1):
        if len(block) < 3:
            raise ParseError(f"configuration {i} has only {len(block)} landmarks")
        configs.append(KAdConfig.from_xy(f"config-{i}", block))
    return configs, []


def _parse_csv(text):
    reader = csv.reader(io.StringIO(text))
    header = None
    rows = {}
    for lineno, row in enumerate(reader, 1):
        if not row or not any(cell.strip() for cell in row):
            continue
        if header is None:
            header = [h.strip().lower() for h in row]
            if header != ["config", "landmark", "x", "y"]:
                raise ParseError("CSV header must be config,landmark,x,y", lineno)
            continue
        if len(row) != 4:
            raise ParseError(f"expected 4 fields, got {len(row)}", lineno)
        cid = row[0].strip()
        try:
            idx = int(row[1])
        except ValueError:
            raise ParseError(f"landmark index {row[1]!r} is not an integer", lineno) from None
        xy = _floats([row[2].strip(), row[3].strip()], lineno)
        entry = rows.setdefault(cid, {})
        if idx in entry:
            raise ParseError(f"duplicate landmark {idx} in config {cid!r}", lineno)
        entry[idx] = xy
    configs = []
    for cid, entry in rows.items():
        if len(entry) < 3:
            raise ParseError(f"config {cid!r} has only {len(entry)} landmarks")
        configs.append(KAdConfig.from_xy(cid, [entry[i] for i in sorted(entry)]))
    return configs, []


def _parse_tps(lines):
    records, warnings = [], []
    i = 0
    while i < len(lines):
        line = lines[i].strip()
        lineno = i + 1
        i += 1
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().upper()
        if not sep:
            raise ParseError(f"unexpected line {line!r}", lineno)
        if key == "LM":
            try:
                k = int(value)
            except ValueError:
                raise ParseError(f"bad landmark count {value!r}", lineno) from None
            pts = []
            for _ in range(k):
                if i >= len(lines):
                    raise ParseError(f"LM={k} record truncated", i)
                pts.append(_floats(lines[i].split(), i + 1))
                i += 1
            records.append({"id": None, "xy": pts, "line": lineno})
        elif key == "ID":
            if not records:
                raise ParseError("ID= before any LM= record", lineno)
            records[-1]["id"] = value.strip()
        else:
            warnings.append(f"line {lineno}: ignored TPS key {key}")
    configs = []
    for n, rec in enumerate(records, 1):
        if len(rec["xy"]) < 3:
            raise ParseError(f"record has only {len(rec['xy'])} landmarks", rec["line"])
        configs.append(KAdConfig.from_xy(rec["id"] or f"specimen-{n}", rec["xy"]))
    return configs, warnings


def detect_format(text):
    for line in text.splitlines():
        s = line.strip()
        if not s:
            continue
        if s.upper().startswith("LM="):
            return Format.TPS
        if s.replace(" ", "").lower().startswith("config,landmark"):
            return Format.CSV
        return Format.BLOCKS
    raise EmptyFile("file has no content")


def parse_text(text, format_hint=None):
    fmt = Format(format_hint) if format_hint else detect_format(text)
    lines = text.splitlines()
    if fmt is Format.BLOCKS:
        configs, warnings = _parse_blocks(lines)
    elif fmt is Format.CSV:
        configs, warnings = _parse_csv(text)
    else:
        configs, warnings = _parse_tps(lines)
    if not configs:
        raise EmptyFile("no configurations found")
    return LandmarkFile(fmt, configs, _check_k(configs), warnings)


def parse_landmarks(path, format_hint=None) -> LandmarkFile:
    raw = Path(path).read_bytes()
    try:
        text = raw.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path}: not UTF-8 ({exc})") from None
    if not text.strip():
        raise EmptyFile(f"{path} is empty")
    return parse_text(text, format_hint)


def format_landmarks(configs, fmt=Format.BLOCKS):
    fmt = Format(fmt)
    out = []
    if fmt is Format.CSV:
        out.append("config,landmark,x,y")
    for c in configs:
        xy = [(float(z.real), float(z.imag)) for z in c.landmarks]
        if fmt is Format.BLOCKS:
            out.extend(f"{x!r} {y!r}" for x, y in xy)
            out.append("")
        elif fmt is Format.CSV:
            out.extend(f"{c.id},{j},{x!r},{y!r}" for j, (x, y) in enumerate(xy, 1))
        else:
            out.append(f"LM={c.k}")
            out.extend(f"{x!r} {y!r}" for x, y in xy)
            out.append(f"ID={c.id}")
    return "\n".join(out) + "\n"


def write_landmarks(path, configs, fmt=Format.BLOCKS):
    Path(path).write_text(format_landmarks(configs, fmt), encoding="utf-8")
