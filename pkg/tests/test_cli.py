import json
import shutil

import pytest

from cupcleaner.cli import EXIT_INPUT, EXIT_OK, EXIT_PROVIDER, main

from conftest import CORPUS_DIR


@pytest.fixture
def corpus(tmp_path):
    target = tmp_path / "corpus"
    shutil.copytree(CORPUS_DIR, target)
    return target


def run(argv):
    return main(argv)


class TestClean:
    def test_full_run(self, corpus, tmp_path, capsys):
        out = tmp_path / "out"
        code = run([
            "clean", "--train", str(corpus / "train.jsonl"),
            "--valid", str(corpus / "valid.jsonl"),
            "--test", str(corpus / "test.jsonl"), "--split-test",
            "--out", str(out),
        ])
        assert code == EXIT_OK
        printed = capsys.readouterr().out
        assert "delete rate" in printed
        for name in ("train.cleaned.jsonl", "train.noisy.jsonl", "valid.cleaned.jsonl",
                     "valid.noisy.jsonl", "test.cleaned.jsonl", "test.noisy.jsonl",
                     "scores.csv", "histogram.csv", "report.json", "rejects.jsonl"):
            assert (out / name).exists(), name

    def test_missing_input_is_exit_2(self, tmp_path, capsys):
        code = run([
            "clean", "--train", str(tmp_path / "absent.jsonl"),
            "--valid", str(tmp_path / "absent2.jsonl"), "--out", str(tmp_path / "out"),
        ])
        assert code == EXIT_INPUT
        assert "error" in capsys.readouterr().err

    def test_unreachable_service_is_exit_3(self, corpus, tmp_path, capsys, monkeypatch):
        # shrink the retry budget so the failure is quick
        from cupcleaner import pipeline
        from cupcleaner.embedding import ServiceEmbedder

        def fast_provider(config):
            return ServiceEmbedder(config.service_url, max_attempts=1, timeout=0.3, backoff=0.0)

        monkeypatch.setattr(pipeline, "make_provider", fast_provider)
        code = run([
            "clean", "--train", str(corpus / "train.jsonl"),
            "--valid", str(corpus / "valid.jsonl"),
            "--embedder", "service", "--service-url", "http://127.0.0.1:9",
            "--out", str(tmp_path / "out"),
        ])
        assert code == EXIT_PROVIDER
        assert "provider" in capsys.readouterr().err

    def test_service_without_url_is_exit_2(self, corpus, tmp_path, monkeypatch, capsys):
        monkeypatch.delenv("CUPCLEANER_SERVICE_URL", raising=False)
        code = run([
            "clean", "--train", str(corpus / "train.jsonl"),
            "--valid", str(corpus / "valid.jsonl"),
            "--embedder", "service", "--out", str(tmp_path / "out"),
        ])
        assert code == EXIT_INPUT

    def test_determinism_across_runs_modulo_timing(self, corpus, tmp_path):
        args = [
            "clean", "--train", str(corpus / "train.jsonl"),
            "--valid", str(corpus / "valid.jsonl"),
        ]
        run(args + ["--out", str(tmp_path / "a")])
        run(args + ["--out", str(tmp_path / "b")])
        for name in ("train.cleaned.jsonl", "train.noisy.jsonl", "valid.cleaned.jsonl",
                     "valid.noisy.jsonl", "scores.csv", "histogram.csv", "rejects.jsonl"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
        ra = json.loads((tmp_path / "a" / "report.json").read_text("utf-8"))
        rb = json.loads((tmp_path / "b" / "report.json").read_text("utf-8"))
        ra.pop("timing"), rb.pop("timing")
        assert ra == rb


class TestScore:
    def test_score_and_report_roundtrip(self, corpus, tmp_path, capsys):
        out = tmp_path / "out"
        assert run(["score", "--input", str(corpus / "valid.jsonl"),
                    "--out", str(out)]) == EXIT_OK
        assert "scored 20 samples" in capsys.readouterr().out
        rows = (out / "scores.csv").read_text("utf-8").splitlines()
        assert len(rows) == 21


class TestReport:
    def test_render_from_directory(self, corpus, tmp_path, capsys):
        out = tmp_path / "out"
        run(["clean", "--train", str(corpus / "train.jsonl"),
             "--valid", str(corpus / "valid.jsonl"), "--out", str(out)])
        capsys.readouterr()
        assert run(["report", "--in", str(out)]) == EXIT_OK
        printed = capsys.readouterr().out
        assert "train" in printed and "delete rate" in printed

    def test_missing_report_is_exit_2(self, tmp_path):
        assert run(["report", "--in", str(tmp_path)]) == EXIT_INPUT


class TestSubsample:
    def test_subsample_writes_output(self, corpus, tmp_path, capsys):
        out = tmp_path / "sub.jsonl"
        code = run(["subsample", "--input", str(corpus / "train.jsonl"),
                    "--rate", "0.5", "--seed", "7", "--output", str(out)])
        assert code == EXIT_OK
        lines = out.read_text("utf-8").splitlines()
        assert len(lines) == 30
        again = tmp_path / "sub2.jsonl"
        run(["subsample", "--input", str(corpus / "train.jsonl"),
             "--rate", "0.5", "--seed", "7", "--output", str(again)])
        assert again.read_bytes() == out.read_bytes()


class TestEnvDefaults:
    def test_service_url_from_environment(self, corpus, tmp_path, monkeypatch):
        captured = {}
        from cupcleaner import cli

        real = cli._cmd_clean

        def spy(args):
            captured["url"] = args.service_url
            return real(args)

        monkeypatch.setenv("CUPCLEANER_SERVICE_URL", "http://example.invalid:1")
        monkeypatch.setitem(cli._COMMANDS, "clean", spy)
        run(["clean", "--train", str(corpus / "train.jsonl"),
             "--valid", str(corpus / "valid.jsonl"), "--out", str(tmp_path / "out")])
        assert captured["url"] == "http://example.invalid:1"
