import numpy as np
import pytest

from shapetest.errors import EmptyFile, InconsistentK, ParseError
from shapetest.landmarks import Format, format_landmarks, parse_landmarks, parse_text
from shapetest.shapes import KAdConfig

BLOCKS = "0 0\n1 0\n0.5 0.8\n\n0 0\n2 0\n1 1.5\n"
TPS = "LM=5\n0 0\n1 0\n1.5 1\n0.5 1.5\n-0.5 1\nIMAGE=skull.jpg\nID=specimen-17\n"


def write(tmp_path, text, name="f.txt", newline="\n"):
    p = tmp_path / name
    p.write_bytes(text.replace("\n", newline).encode("utf-8"))
    return p


def test_blocks_two_triangles(tmp_path):
    lf = parse_landmarks(write(tmp_path, BLOCKS))
    assert lf.format is Format.BLOCKS and lf.k == 3 and len(lf.configurations) == 2
    assert lf.configurations[1].landmarks[2] == 1 + 1.5j
    assert [c.id for c in lf.configurations] == ["config-1", "config-2"]


def test_tps_record(tmp_path):
    lf = parse_landmarks(write(tmp_path, TPS, "f.tps"))
    assert lf.format is Format.TPS and lf.k == 5
    assert lf.configurations[0].id == "specimen-17"
    assert len(lf.warnings) == 1 and "IMAGE" in lf.warnings[0]


def test_inconsistent_k(tmp_path):
    text = "0 0\n1 0\n1 1\n0 1\n0.5 2\n\n0 0\n1 0\n1 1\n0 1\n"
    with pytest.raises(InconsistentK) as err:
        parse_landmarks(write(tmp_path, text))
    assert err.value.offenders == ["config-2"] and err.value.expected == 5


def test_csv_sorted_by_landmark(tmp_path):
    text = "config,landmark,x,y\nA,2,1,0\nA,1,0,0\nA,3,0.5,0.9\nB,1,0,0\nB,3,1,1\nB,2,2,0\n"
    lf = parse_landmarks(write(tmp_path, text, "f.csv"))
    assert lf.format is Format.CSV
    assert [c.id for c in lf.configurations] == ["A", "B"]
    assert np.array_equal(lf.configurations[0].landmarks, [0, 1, 0.5 + 0.9j])
    assert np.array_equal(lf.configurations[1].landmarks, [0, 2, 1 + 1j])


def test_crlf_and_bom(tmp_path):
    crlf = parse_landmarks(write(tmp_path, BLOCKS, newline="\r\n"))
    lf = parse_landmarks(write(tmp_path, "﻿" + BLOCKS, "g.txt"))
    assert crlf.k == lf.k == 3
    for a, b in zip(crlf.configurations, lf.configurations):
        assert np.array_equal(a.landmarks, b.landmarks)
    tps = parse_landmarks(write(tmp_path, TPS, "f.tps", newline="\r\n"))
    assert tps.configurations[0].id == "specimen-17"


def test_decimal_comma_rejected(tmp_path):
    with pytest.raises(ParseError) as err:
        parse_landmarks(write(tmp_path, "0 0\n1,5 0\n0 1\n"))
    assert err.value.line == 2


@pytest.mark.parametrize("text,line", [
    ("0 0\n1 0\nabc 1\n", 3),
    ("0 0\n1 0 2\n0 1\n", 2),
    ("config,landmark,x,y\nA,1,0,0\nA,x,1,0\n", 3),
    ("config,landmark,x,y\nA,1,0,0\nA,1,1,0\n", 3),
    ("LM=3\n0 0\n1 0\n", 3),
    ("LM=3\n0 0\n1 0\nfoo 1\n", 4),
])
def test_parse_error_line_numbers(tmp_path, text, line):
    with pytest.raises(ParseError) as err:
        parse_landmarks(write(tmp_path, text))
    assert err.value.line == line and f"line {line}" in str(err.value)


def test_empty_files(tmp_path):
    with pytest.raises(EmptyFile):
        parse_landmarks(write(tmp_path, ""))
    with pytest.raises(EmptyFile):
        parse_landmarks(write(tmp_path, "\n  \n\r\n"))
    with pytest.raises(EmptyFile):
        parse_text("config,landmark,x,y\n")


def test_format_hint_overrides_detection():
    with pytest.raises(ParseError):
        parse_text(BLOCKS, "csv")


@pytest.mark.parametrize("fmt", list(Format))
def test_write_parse_round_trip(fmt):
    rng = np.random.default_rng(0)
    configs = [KAdConfig(f"c{i}", rng.standard_normal(4) + 1j * rng.standard_normal(4))
               for i in range(3)]
    lf = parse_text(format_landmarks(configs, fmt))
    assert lf.format is fmt and lf.k == 4
    for a, b in zip(configs, lf.configurations):
        assert np.array_equal(a.landmarks, b.landmarks)
        if fmt is not Format.BLOCKS:
            assert a.id == b.id
