"""Command line surface: flags, stdout contracts, exit codes."""

import numpy as np
import pytest

from latbeam import read_lattice_text
from latbeam.cli import main
from tests.conftest import W1_COSTS, W1_TEXT


@pytest.fixture
def w1_files(tmp_path):
    wfst = tmp_path / "w1.fst"
    wfst.write_text(W1_TEXT)
    costs = tmp_path / "utt1.mat"
    costs.write_text(W1_COSTS)
    return wfst, costs


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestDecode:
    def test_w1_stdout_exact(self, w1_files, capsys):
        wfst, costs = w1_files
        code, out, _ = run(capsys, "decode", "--wfst", wfst, "--costs", costs)
        assert code == 0
        assert out == "words: 1  cost: 0.8\n"

    def test_word_symbols_render_names(self, w1_files, tmp_path, capsys):
        wfst, costs = w1_files
        words = tmp_path / "words.txt"
        words.write_text("<eps> 0\nyes 1\nno 2\n")
        code, out, _ = run(capsys, "decode", "--wfst", wfst, "--costs", costs,
                           "--words", words)
        assert code == 0
        assert out == "words: yes  cost: 0.8\n"

    def test_lattice_out_is_readable(self, w1_files, tmp_path, capsys):
        wfst, costs = w1_files
        lat = tmp_path / "w1.lat"
        code, out, _ = run(capsys, "decode", "--wfst", wfst, "--costs", costs,
                           "--lattice-out", lat, "--lattice-beam", "8.0")
        assert code == 0
        fl = read_lattice_text(lat.read_text())
        assert fl.num_arcs == 2

    def test_partial_decode_warns_but_succeeds(self, tmp_path, capsys):
        wfst = tmp_path / "g.fst"
        wfst.write_text("0 1 1 1 0.5\n2 0.0\n")
        costs = tmp_path / "u.mat"
        costs.write_text("1 1\n0.3\n")
        code, out, err = run(capsys, "decode", "--wfst", wfst,
                             "--costs", costs)
        assert code == 0
        assert "partial" in err
        assert out == "words: 1  cost: 0.8\n"

    def test_missing_file_is_usage_error(self, w1_files, capsys):
        wfst, _ = w1_files
        code, _, err = run(capsys, "decode", "--wfst", wfst,
                           "--costs", "/nonexistent.mat")
        assert code == 2
        assert "cannot read" in err

    def test_parse_error_exit_code(self, tmp_path, capsys):
        wfst = tmp_path / "bad.fst"
        wfst.write_text("0 1 x y z\n")
        costs = tmp_path / "u.mat"
        costs.write_text("1 1\n0.3\n")
        code, _, err = run(capsys, "decode", "--wfst", wfst, "--costs", costs)
        assert code == 2
        assert "line 1" in err

    def test_dead_frontier_exit_code(self, tmp_path, capsys):
        wfst = tmp_path / "g.fst"
        wfst.write_text(W1_TEXT)
        costs = tmp_path / "u.mat"
        costs.write_text("2 2\n0.3 0.1\n0.3 0.1\n")
        code, _, err = run(capsys, "decode", "--wfst", wfst, "--costs", costs)
        assert code == 1
        assert err.strip()

    def test_lattice_capacity_exit_code(self, w1_files, capsys):
        wfst, costs = w1_files
        code, _, err = run(capsys, "decode", "--wfst", wfst, "--costs", costs,
                           "--max-lattice-arcs", "1")
        assert code == 3
        assert "max-lattice-arcs" in err

    def test_bad_flag_value_exit_code(self, w1_files, capsys):
        wfst, costs = w1_files
        code, _, _ = run(capsys, "decode", "--wfst", wfst, "--costs", costs,
                         "--beam", "-1")
        assert code == 2

    def test_unknown_flag_exit_code(self, w1_files, capsys):
        wfst, costs = w1_files
        code, _, _ = run(capsys, "decode", "--wfst", wfst, "--costs", costs,
                         "--no-such-flag", "1")
        assert code == 2


class TestBatchDecode:
    def test_batch_matches_single_decodes(self, tmp_path, capsys):
        from latbeam.synthetic import random_task
        from latbeam import CostMatrix, write_cost_matrix, write_wfst_text

        wfst_obj, _ = random_task(7, max_states=20, max_arcs=60)
        wfst = tmp_path / "g.fst"
        wfst.write_text(write_wfst_text(wfst_obj))
        rng = np.random.default_rng(3)
        paths = []
        for i in range(4):
            t = int(rng.integers(2, 7))
            mat = CostMatrix(rng.uniform(0, 4, size=(t, 8)))
            p = tmp_path / f"utt{i}.mat"
            p.write_text(write_cost_matrix(mat))
            paths.append(p)
        lst = tmp_path / "list.txt"
        lst.write_text("\n".join(str(p) for p in paths) + "\n")
        out_dir = tmp_path / "lats"

        code, out, _ = run(capsys, "batch-decode", "--wfst", wfst,
                           "--costs-list", lst, "--out-dir", out_dir,
                           "--beam", "8.0")
        assert code == 0
        assert len(out.strip().splitlines()) == 4

        for i, p in enumerate(paths):
            lat_file = out_dir / f"utt{i}.lat"
            single = tmp_path / f"single{i}.lat"
            c, _, _ = run(capsys, "decode", "--wfst", wfst, "--costs", p,
                          "--lattice-out", single, "--beam", "8.0")
            assert c == 0
            assert lat_file.read_text() == single.read_text()

    def test_empty_list_rejected(self, tmp_path, capsys):
        wfst = tmp_path / "g.fst"
        wfst.write_text(W1_TEXT)
        lst = tmp_path / "list.txt"
        lst.write_text("\n")
        code, _, err = run(capsys, "batch-decode", "--wfst", wfst,
                           "--costs-list", lst)
        assert code == 2
        assert "lists no matrix files" in err


class TestVerify:
    def test_small_run_reports_all_matched(self, capsys):
        code, out, _ = run(capsys, "verify", "--instances", "8",
                           "--seed", "11", "--workers", "2")
        assert code == 0
        assert "8/8 matched" in out


class TestScore:
    def test_wer_table(self, tmp_path, capsys):
        ref = tmp_path / "ref.txt"
        ref.write_text("1 2 3\n4 5\n")
        hyp = tmp_path / "hyp.txt"
        hyp.write_text("1 2 3\n4 6\n")
        code, out, _ = run(capsys, "score", "--ref", ref, "--hyp", hyp)
        assert code == 0
        lines = out.strip().splitlines()
        assert any("all" in ln for ln in lines)
        # 1 substitution over 5 reference words.
        assert any("20.0" in ln for ln in lines)

    def test_oracle_and_density_from_lattices(self, tmp_path, capsys):
        wfst = tmp_path / "g.fst"
        wfst.write_text(W1_TEXT)
        costs = tmp_path / "u.mat"
        costs.write_text(W1_COSTS)
        lat = tmp_path / "u.lat"
        c, _, _ = run(capsys, "decode", "--wfst", wfst, "--costs", costs,
                      "--lattice-out", lat, "--lattice-beam", "8.0")
        assert c == 0
        ref = tmp_path / "ref.txt"
        ref.write_text("2\n")
        hyp = tmp_path / "hyp.txt"
        hyp.write_text("1\n")
        lats = tmp_path / "lats.txt"
        lats.write_text(f"{lat}\n")
        frames = tmp_path / "frames.txt"
        frames.write_text("1\n")
        code, out, _ = run(capsys, "score", "--ref", ref, "--hyp", hyp,
                           "--lattice-list", lats, "--frames", frames)
        assert code == 0
        # 1-best is wrong (100% WER) but the lattice still contains the
        # reference word, so oracle WER is 0; density is 2 arcs / 1 frame.
        row = next(ln for ln in out.splitlines() if ln.startswith("1\t"))
        cols = row.split("\t")
        assert cols[2] == "100.00"  # wer%
        assert cols[6] == "0.00"    # oracle wer%
        assert cols[7] == "2.00"    # density

    def test_mismatched_counts_rejected(self, tmp_path, capsys):
        ref = tmp_path / "ref.txt"
        ref.write_text("1 2\n3\n")
        hyp = tmp_path / "hyp.txt"
        hyp.write_text("1 2\n")
        code, _, err = run(capsys, "score", "--ref", ref, "--hyp", hyp)
        assert code == 2
        assert err.strip()


class TestBench:
    def test_csv_header_and_rows(self, tmp_path, capsys):
        csv = tmp_path / "bench.csv"
        code, _, _ = run(capsys, "bench", "--states", "60",
                         "--arcs-per-state", "4", "--frames", "12",
                         "--labels", "8", "--workers", "1,2",
                         "--schedulers", "dynamic", "--engines", "numpy",
                         "--csv", csv)
        assert code == 0
        lines = csv.read_text().strip().splitlines()
        assert lines[0] == "config,workers,scheduler,wall_ms,speedup"
        assert len(lines) >= 3  # reference row plus two worker counts
        for ln in lines[1:]:
            parts = ln.split(",")
            assert len(parts) == 5
            assert float(parts[3]) > 0.0

    def test_stdout_csv_when_no_file(self, capsys):
        code, out, _ = run(capsys, "bench", "--states", "60",
                           "--arcs-per-state", "4", "--frames", "8",
                           "--labels", "8", "--workers", "1",
                           "--schedulers", "dynamic", "--engines", "numpy")
        assert code == 0
        assert out.splitlines()[0] == "config,workers,scheduler,wall_ms,speedup"
