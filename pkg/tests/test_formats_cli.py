import json
from fractions import Fraction as F

import numpy as np
import pytest

from spernerkit import cli
from spernerkit.covers import BoxCover, RationalBox, random_open_cover
from spernerkit.formats import (
    ParseError,
    parse_colouring,
    parse_colouring_text,
    parse_cover_text,
    parse_simplicial_text,
    write_colouring,
    write_cover,
    write_simplicial,
)
from spernerkit.labelings import Colouring, random_simplicial_labeling, random_sperner_colouring
from spernerkit.lattice import Index


@pytest.mark.parametrize("dim,n,seed", [(1, 2, 0), (2, 3, 1), (3, 2, 2), (2, 4, 3)])
def test_colouring_round_trip(dim, n, seed):
    phi = random_sperner_colouring(dim, n, seed, "wide")
    assert parse_colouring_text(write_colouring(phi)) == phi


def test_simplicial_round_trip():
    phi = random_simplicial_labeling(2, 4, seed=3)
    back = parse_simplicial_text(write_simplicial(phi))
    assert back.labels == phi.labels and back.complex.m == 4


@pytest.mark.parametrize("seed", range(5))
def test_cover_round_trip(seed):
    cover = random_open_cover(1 + seed % 3, seed)
    back = parse_cover_text(write_cover(cover))
    assert back.members == cover.members


def test_missing_grid_line_names_index():
    text = write_colouring(Colouring(2, 1, np.array([[0, 1], [2, 3]])))
    lines = [l for l in text.splitlines() if not l.startswith("1,0")]
    with pytest.raises(ValueError, match=r"\(1, ?0\)|1,0"):
        parse_colouring_text("\n".join(lines))


def test_parse_errors_carry_line_numbers():
    with pytest.raises(ParseError) as e:
        parse_colouring_text("cubical n=1 N=1\n0 -> 1\n1 => 2\n")
    assert e.value.line == 3 and "line 3" in str(e.value)
    with pytest.raises(ParseError) as e:
        parse_colouring_text("# header\ncubical n=1\n")
    assert e.value.line == 2
    with pytest.raises(ParseError) as e:
        parse_cover_text("cover N=1\nmember a\naxis_0 lo 0 closed hi 1/0 open\n")
    assert e.value.line == 3


def test_duplicate_cover_labels_rejected():
    text = ("cover N=1\n"
            "member 7\naxis_0 lo 0 closed hi 2/3 open\n"
            "member 7\naxis_0 lo 1/3 open hi 1 closed\n")
    with pytest.raises(ParseError, match="duplicate") as e:
        parse_cover_text(text)
    assert e.value.line == 4 and "line 2" in str(e.value)


def test_cover_text_example():
    cover = parse_cover_text("cover N=2\nmember 0\n"
                             "axis_0 lo 0 closed hi 2/3 open\n"
                             "axis_1 lo 0 closed hi 1 closed\n")
    (label, (box,)), = cover.members
    assert label == 0 and box.hi == (F(2, 3), F(1)) and box.hi_open == (True, False)


# command line ---------------------------------------------------------------

def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_kuhn_example(capsys):
    code, out, _ = run(capsys, "kuhn-verify", "N=2", "n=2", "seeds=100")
    rep = json.loads(out)
    assert code == 0 and rep["results"]["min_count"] >= 3
    assert rep["results"]["sweeps"][0]["seeds"] == 100
    assert rep["config"]["params"] == {"N": "2", "n": "2", "seeds": "100"}
    assert "wall_clock_s" not in rep


def test_randomized_needs_seed(capsys):
    code, _, err = run(capsys, "kuhn-verify", "N=2", "n=2")
    assert code == 1 and "seed" in err


def test_malformed_file_exit_one(tmp_path, capsys):
    p = tmp_path / "bad.col"
    p.write_text("cubical n=2 N=1\n0 -> 0\n1 -> x\n2 -> 1\n")
    code, _, err = run(capsys, "kuhn-verify", f"colouring={p}")
    assert code == 1 and "line 3" in err


def test_trivial_cover(tmp_path, capsys):
    p = tmp_path / "one.cover"
    p.write_text(write_cover(BoxCover(2, ((0, (RationalBox.unit(2),)),))))
    code, out, _ = run(capsys, "lebesgue-witness", f"cover={p}")
    assert code == 0 and json.loads(out)["results"]["multiplicity"] == 1


def test_violation_exit_two(tmp_path, capsys, monkeypatch):
    p = tmp_path / "c.col"
    p.write_text(write_colouring(random_sperner_colouring(2, 2, 0)))
    # a counter that under-reports must be flagged as a defect
    monkeypatch.setattr(cli, "max_colours_per_cube",
                        lambda phi: (Index(phi.n, (0,) * phi.dim), phi.dim))
    code, out, _ = run(capsys, "kuhn-verify", f"colouring={p}")
    assert code == 2 and json.loads(out)["exit_code"] == 2


def test_budget_exit_three(capsys):
    code, out, _ = run(capsys, "c0-chains", "oracle=hashed", "n=3", "seed=1", "budget=3",
                       "--depth", "5")
    rep = json.loads(out)
    assert code == 3 and rep["results"]["budget_exhausted"]
    code, out, _ = run(capsys, "subdivide", "N=2", "seed=5", "--max-level", "1")
    assert code == 3 and json.loads(out)["results"]["finite"] is False


@pytest.mark.parametrize("argv", [
    ("kuhn-verify", "N=1,2", "n=2,3", "seeds=5"),
    ("reduction-roundtrip", "N=2", "n=3", "seeds=4"),
    ("lebesgue-witness", "N=2", "seeds=4"),
    ("subdivide", "N=2", "seeds=3"),
    ("nerve-chains", "N=2", "seeds=3"),
    ("c0-chains", "oracle=hashed", "n=2", "seed=4"),
    ("brouwer", "map=rotate", "m=8,16"),
    ("emulate-induction", "N=2", "n=2", "seed=1", "min_new_coords=1"),
])
def test_threads_do_not_change_reports(argv, capsys):
    a = run(capsys, *argv, "--threads", "1")
    b = run(capsys, *argv, "--threads", "4")
    assert a[0] == b[0] == 0
    assert a[1] == b[1]


def test_output_dir_env_and_csv(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv(cli.OUTPUT_DIR_ENV, str(tmp_path))
    code, out, _ = run(capsys, "brouwer", "map=square", "N=1", "m=8,16", "--format", "csv")
    assert code == 0 and out == ""
    rows = (tmp_path / "brouwer.csv").read_text().splitlines()
    assert rows[0].startswith("m,m_used,residual") and len(rows) == 3


def test_subdivide_export(tmp_path, capsys):
    p = tmp_path / "leaves.jsonl"
    code, out, _ = run(capsys, "subdivide", "N=1", "seed=2", f"export={p}")
    lines = p.read_text().splitlines()
    assert code == 0 and len(lines) == json.loads(out)["results"]["leaves"]


def test_parse_colouring_file(tmp_path):
    phi = random_sperner_colouring(2, 2, 4)
    p = tmp_path / "x.col"
    p.write_text(write_colouring(phi))
    assert parse_colouring(p) == phi


def test_replay_names_agree(capsys):
    argv = ("N=2", "n=2", "seed=1", "min_new_coords=1")
    a = run(capsys, "emulate-induction", *argv)
    b = run(capsys, "emulate-5.1", *argv)
    assert a[0] == b[0] == 0
    assert json.loads(a[1])["results"] == json.loads(b[1])["results"]
