import json
import subprocess
import sys

import numpy as np
import pytest

from stereoforge.audio import AudioBuffer, read_wav, write_wav
from stereoforge.errors import EmptyManifest, NotStereo
from stereoforge.metrics import VadParams
from stereoforge.pipeline import (
    ManifestRecord,
    PipelineConfig,
    SplitSpec,
    read_manifest,
    run_generate,
    run_split,
    run_stats,
    run_synth,
)

RATE = 16000

ORACLE_BACKENDS = {
    "diarizer": "builtin:oracle",
    "separator": "builtin:band-split",
    "verifier": "builtin:band-energy",
}


@pytest.fixture(scope="module")
def synth_corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus")
    run_synth(root, count=4, seed=11, duration_s=45.0)
    return root


class TestRunSynth:
    def test_layout_and_determinism(self, tmp_path):
        a_dir, b_dir = tmp_path / "a", tmp_path / "b"
        ids = run_synth(a_dir, count=3, seed=7, duration_s=12.0)
        run_synth(b_dir, count=3, seed=7, duration_s=12.0)
        assert len(ids) == 3
        for item in ids:
            for suffix in (".mix.wav", ".truth.wav", ".truth.tsv", ".meta.json"):
                fa, fb = a_dir / f"{item}{suffix}", b_dir / f"{item}{suffix}"
                assert fa.exists()
                assert fa.read_bytes() == fb.read_bytes()


class TestRunGenerate:
    def test_oracle_run_all_ok(self, synth_corpus, tmp_path):
        config = PipelineConfig(workers=1, min_window_s=20.0)
        records, manifest = run_generate(synth_corpus, tmp_path / "out",
                                         ORACLE_BACKENDS, config)
        assert records
        assert all(r.status == "ok" for r in records)
        for record in records:
            out = tmp_path / "out" / record.output_path
            assert out.exists()
            buf = read_wav(out)
            assert buf.channels == 2
            expected = int((record.window_end_s - record.window_start_s) * RATE)
            assert abs(buf.n_samples - expected) <= 1

    def test_rerun_byte_identical(self, synth_corpus, tmp_path):
        config = PipelineConfig(workers=1, min_window_s=20.0, seed=3)
        _, m1 = run_generate(synth_corpus, tmp_path / "r1", ORACLE_BACKENDS, config)
        _, m2 = run_generate(synth_corpus, tmp_path / "r2", ORACLE_BACKENDS, config)
        assert m1.read_bytes() == m2.read_bytes()
        for record in read_manifest(m1):
            if record.status != "ok":
                continue
            a = (tmp_path / "r1" / record.output_path).read_bytes()
            b = (tmp_path / "r2" / record.output_path).read_bytes()
            assert a == b

    def test_parallel_matches_serial(self, synth_corpus, tmp_path):
        serial = PipelineConfig(workers=1, min_window_s=20.0)
        parallel = PipelineConfig(workers=2, min_window_s=20.0)
        _, m1 = run_generate(synth_corpus, tmp_path / "s", ORACLE_BACKENDS, serial)
        _, m2 = run_generate(synth_corpus, tmp_path / "p", ORACLE_BACKENDS, parallel)
        assert m1.read_bytes() == m2.read_bytes()

    def test_unreadable_file_isolated(self, synth_corpus, tmp_path):
        bad_dir = tmp_path / "mixed"
        bad_dir.mkdir()
        for wav in synth_corpus.glob("*.wav"):
            (bad_dir / wav.name).write_bytes(wav.read_bytes())
        for tsv in synth_corpus.glob("*.tsv"):
            (bad_dir / tsv.name).write_bytes(tsv.read_bytes())
        (bad_dir / "broken.wav").write_bytes(b"not a wav at all")
        config = PipelineConfig(workers=1, min_window_s=20.0)
        records, _ = run_generate(bad_dir, tmp_path / "out2", ORACLE_BACKENDS, config)
        by_status = {}
        for r in records:
            by_status.setdefault(r.status, []).append(r)
        assert len(by_status.get("skipped:io", [])) == 1
        assert by_status["skipped:io"][0].id == "broken"
        assert by_status.get("ok")

    def test_stereo_input_skipped(self, tmp_path):
        src = tmp_path / "in"
        src.mkdir()
        write_wav(AudioBuffer(np.zeros((2, RATE)), RATE), src / "stereo.wav")
        records, _ = run_generate(src, tmp_path / "out",
                                  {"diarizer": "builtin:band-energy"},
                                  PipelineConfig(workers=1))
        assert records[0].status == "skipped:not-mono"

    def test_wrong_rate_skipped(self, tmp_path):
        src = tmp_path / "in"
        src.mkdir()
        write_wav(AudioBuffer(np.zeros(8000), 8000), src / "slow.wav")
        records, _ = run_generate(src, tmp_path / "out",
                                  {"diarizer": "builtin:band-energy"},
                                  PipelineConfig(workers=1))
        assert records[0].status == "skipped:sample-rate"

    def test_windows_never_overlap_per_source(self, synth_corpus, tmp_path):
        config = PipelineConfig(workers=1, min_window_s=20.0)
        records, _ = run_generate(synth_corpus, tmp_path / "out3",
                                  ORACLE_BACKENDS, config)
        by_source = {}
        for r in records:
            if r.status == "ok":
                by_source.setdefault(r.source_path, []).append(r)
        for rows in by_source.values():
            rows.sort(key=lambda r: r.window_start_s)
            for a, b in zip(rows, rows[1:]):
                assert a.window_end_s <= b.window_start_s

    def test_manifest_duration_accounting(self, synth_corpus, tmp_path, capsys):
        config = PipelineConfig(workers=1, min_window_s=20.0)
        records, _ = run_generate(synth_corpus, tmp_path / "out4",
                                  ORACLE_BACKENDS, config)
        total_h = sum(r.window_end_s - r.window_start_s
                      for r in records if r.status == "ok") / 3600
        out = capsys.readouterr().out
        assert f"{total_h:.3f} h" in out

    def test_config_snapshot_written(self, synth_corpus, tmp_path):
        config = PipelineConfig(workers=1, min_window_s=20.0, seed=42)
        run_generate(synth_corpus, tmp_path / "out5", ORACLE_BACKENDS, config)
        snap = json.loads((tmp_path / "out5" / "config.resolved.json").read_text())
        assert snap["seed"] == 42
        assert snap["backends"]["diarizer"] == "builtin:oracle"
        assert snap["min_window_s"] == 20.0


def fake_records(n):
    return [ManifestRecord(id=f"rec{i:04d}", source_path="x.wav",
                           window_start_s=0.0, window_end_s=60.0,
                           output_path=f"rec{i:04d}.wav", status="ok")
            for i in range(n)]


class TestRunSplit:
    def test_exact_one_percent(self):
        train, eval_ = run_split(fake_records(1000), SplitSpec(0.01, seed=1))
        assert len(eval_) == 10
        assert len(train) == 990

    def test_partition_exact(self):
        rng = np.random.default_rng(2)
        for trial in range(100):
            n = int(rng.integers(1, 400))
            records = fake_records(n)
            # sprinkle some skipped records; they belong to neither side
            for i in range(0, n, 7):
                records[i].status = "skipped:io"
            spec = SplitSpec(float(rng.uniform(0.01, 0.5)), seed=trial)
            train, eval_ = run_split(records, spec)
            ok_ids = {r.id for r in records if r.status == "ok"}
            train_ids = {r.id for r in train}
            eval_ids = {r.id for r in eval_}
            assert train_ids | eval_ids == ok_ids
            assert not (train_ids & eval_ids)
            assert len(eval_) == round(spec.eval_fraction * len(ok_ids))

    def test_seeded_rerun_identical(self):
        records = fake_records(500)
        a = run_split(records, SplitSpec(0.05, seed=9))
        b = run_split(records, SplitSpec(0.05, seed=9))
        assert [r.id for r in a[1]] == [r.id for r in b[1]]
        c = run_split(records, SplitSpec(0.05, seed=10))
        assert [r.id for r in c[1]] != [r.id for r in a[1]]

    def test_empty_manifest(self):
        with pytest.raises(EmptyManifest):
            run_split([], SplitSpec(0.01, seed=0))

    def test_bad_fraction(self):
        with pytest.raises(ValueError):
            SplitSpec(0.0, seed=0)
        with pytest.raises(ValueError):
            SplitSpec(1.0, seed=0)


class TestRunStats:
    def test_zero_overlap_corpus(self, tmp_path):
        from stereoforge.synthcorpus import DialogueScript, generate, write_corpus_item
        script = DialogueScript(seed=1, duration_s=30.0, overlap_prob=0.0)
        mix, truth, ann = generate(script)
        stereo_dir = tmp_path / "stereo"
        stereo_dir.mkdir()
        write_wav(truth, stereo_dir / "item.wav")
        stats, doc, text = run_stats(stereo_dir)
        assert stats.stats["overlap"].dur_mean_s == 0.0
        assert doc["stats"]["overlap"]["occur_mean"] == 0.0

    def test_not_stereo(self, tmp_path):
        write_wav(AudioBuffer(np.zeros(RATE), RATE), tmp_path / "mono.wav")
        with pytest.raises(NotStereo):
            run_stats(tmp_path / "mono.wav")

    def test_channel_swap_invariant(self, tmp_path):
        from stereoforge.synthcorpus import DialogueScript, generate
        a_dir, b_dir = tmp_path / "a", tmp_path / "b"
        a_dir.mkdir(), b_dir.mkdir()
        for seed in range(20):
            _, truth, _ = generate(DialogueScript(seed=seed, duration_s=20.0))
            write_wav(truth, a_dir / f"{seed}.wav")
            swapped = AudioBuffer(truth.data[::-1].copy(), truth.sample_rate)
            write_wav(swapped, b_dir / f"{seed}.wav")
        stats_a, _, _ = run_stats(a_dir)
        stats_b, _, _ = run_stats(b_dir)
        for cls in ("ipu", "gap", "pause", "overlap"):
            assert stats_a.stats[cls] == stats_b.stats[cls]

    def test_reference_deltas(self, tmp_path):
        from reference_corpus import build_reference_matching_wavs
        wav_dir = tmp_path / "ref"
        build_reference_matching_wavs(wav_dir)
        stats, doc, text = run_stats(wav_dir, VadParams(), "fisher-table1")
        for cls in ("ipu", "gap", "pause", "overlap"):
            assert abs(stats.delta[cls].dur_mean_s) < 1e-9
            assert abs(stats.delta[cls].occur_mean) < 1e-9
        assert doc["reference_name"] == "fisher-table1"


class TestCli:
    def run_cli(self, *args):
        return subprocess.run([sys.executable, "-m", "stereoforge.cli", *args],
                              capture_output=True, text=True)

    def test_synth_generate_stats_split_flow(self, tmp_path):
        corpus = tmp_path / "corpus"
        out = tmp_path / "out"
        proc = self.run_cli("synth", "--out", str(corpus), "--count", "2",
                            "--seed", "5", "--duration-s", "40")
        assert proc.returncode == 0, proc.stderr

        proc = self.run_cli("generate", "--input", str(corpus), "--out", str(out),
                            "--diarizer", "builtin:oracle",
                            "--separator", "builtin:band-split",
                            "--verifier", "builtin:band-energy",
                            "--min-window-s", "20", "--workers", "1", "--seed", "1")
        assert proc.returncode == 0, proc.stderr
        assert (out / "manifest.jsonl").exists()

        proc = self.run_cli("stats", "--input", str(out / "manifest.jsonl"),
                            "--reference", "fisher-table1",
                            "--out", str(tmp_path / "report"))
        assert proc.returncode == 0, proc.stderr
        report = json.loads((tmp_path / "report" / "report.json").read_text())
        assert report["reference_name"] == "fisher-table1"
        assert report["delta"] is not None

        proc = self.run_cli("split", "--input", str(out / "manifest.jsonl"),
                            "--out", str(tmp_path / "split"),
                            "--eval-fraction", "0.5", "--seed", "2")
        assert proc.returncode == 0, proc.stderr
        assert (tmp_path / "split" / "train.jsonl").exists()
        assert (tmp_path / "split" / "eval.jsonl").exists()

    def test_backends_check_command(self):
        proc = self.run_cli("backends", "check",
                            "--separator", "builtin:band-split",
                            "--verifier", "builtin:band-energy", "--json")
        assert proc.returncode == 0, proc.stderr
        report = json.loads(proc.stdout)
        assert all(entry["passed"] for entry in report)

    def test_backends_check_failure_exit_code(self):
        cmd = (f"{sys.executable} -m stereoforge.backends.testproc"
               f" --kind verifier --mode badsim")
        proc = self.run_cli("backends", "check", "--verifier", f"external:{cmd}")
        assert proc.returncode == 2

    def test_fatal_error_exit_code(self, tmp_path):
        proc = self.run_cli("generate", "--input", str(tmp_path / "missing"),
                            "--out", str(tmp_path / "o"))
        assert proc.returncode == 1

    def test_unknown_reference_fails(self, tmp_path):
        write_wav(AudioBuffer(np.zeros((2, RATE)), RATE), tmp_path / "s.wav")
        proc = self.run_cli("stats", "--input", str(tmp_path / "s.wav"),
                            "--reference", "bogus")
        assert proc.returncode == 1
