import numpy as np
import pytest

from synthmetrics import load_idx, load_image_dir, read_embeddings, write_idx, write_image_dir
from synthmetrics.cli import main
from synthmetrics.embed import embed_reference

from conftest import make_manifest, random_image_set


@pytest.fixture
def class_manifest(tmp_path, rng):
    """Manifest with one class backed by two small distinct image dirs."""
    real = random_image_set(rng, count=8, class_label="normal", provenance="real")
    synth = random_image_set(rng, count=8, class_label="normal", provenance="synthetic")
    write_image_dir(real, tmp_path / "real")
    write_image_dir(synth, tmp_path / "synth")
    return make_manifest(
        tmp_path,
        [
            ("normal", "real", "image_dir", "real"),
            ("normal", "synthetic", "image_dir", "synth"),
        ],
    )


@pytest.fixture
def identical_manifest(tmp_path, rng):
    images = random_image_set(rng, count=6, class_label="twin", provenance="real")
    write_image_dir(images, tmp_path / "twin_real")
    write_image_dir(images, tmp_path / "twin_synth")
    return make_manifest(
        tmp_path,
        [
            ("twin", "real", "image_dir", "twin_real"),
            ("twin", "synthetic", "image_dir", "twin_synth"),
        ],
    )


def read_rows(csv_path):
    lines = csv_path.read_text().strip().split("\n")
    header = lines[0].split(",")
    return [dict(zip(header, line.split(","))) for line in lines[1:]]


class TestEvaluate:
    def test_identical_sets(self, identical_manifest, tmp_path):
        out = tmp_path / "out"
        code = main(
            [
                "evaluate",
                "--manifest",
                str(identical_manifest),
                "--class",
                "twin",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        rows = read_rows(out / "reports.csv")
        fid_rows = [r for r in rows if r["metric"] == "fid"]
        assert len(fid_rows) == 1
        assert abs(float(fid_rows[0]["value"])) < 1e-8
        ms_values = {
            r["provenance"]: float(r["value"]) for r in rows if r["metric"] == "ms_ssim_diversity"
        }
        assert ms_values["real"] == ms_values["synthetic"]
        assert (out / "evaluation.json").exists()

    def test_missing_provenance_exits_2(self, tmp_path, rng):
        real = random_image_set(rng, count=4, class_label="lonely")
        write_image_dir(real, tmp_path / "only_real")
        manifest = make_manifest(tmp_path, [("lonely", "real", "image_dir", "only_real")])
        code = main(
            ["evaluate", "--manifest", str(manifest), "--class", "lonely", "--out", str(tmp_path / "o")]
        )
        assert code == 2

    def test_missing_manifest_exits_2(self, tmp_path):
        code = main(
            ["evaluate", "--manifest", str(tmp_path / "none.tsv"), "--class", "x", "--out", str(tmp_path / "o")]
        )
        assert code == 2

    def test_directory_as_manifest_exits_2(self, tmp_path):
        code = main(
            ["evaluate", "--manifest", str(tmp_path), "--class", "x", "--out", str(tmp_path / "o")]
        )
        assert code == 2

    def test_repeat_runs_byte_identical(self, class_manifest, tmp_path):
        outputs = []
        for name in ("a", "b"):
            out = tmp_path / name
            assert (
                main(
                    [
                        "evaluate",
                        "--manifest",
                        str(class_manifest),
                        "--class",
                        "normal",
                        "--seed",
                        "7",
                        "--out",
                        str(out),
                    ]
                )
                == 0
            )
            outputs.append(
                (
                    (out / "reports.csv").read_bytes(),
                    (out / "evaluation.json").read_bytes(),
                )
            )
        assert outputs[0] == outputs[1]

    def test_reproducibility_stanza(self, class_manifest, tmp_path):
        import json

        out = tmp_path / "out"
        main(
            ["evaluate", "--manifest", str(class_manifest), "--class", "normal", "--seed", "3", "--out", str(out)]
        )
        payload = json.loads((out / "evaluation.json").read_text())
        assert payload["seed"] == 3
        assert payload["embedder_id"] == "ref-avgpool-64"
        assert payload["toolkit"]["name"] == "synthmetrics"
        assert payload["counts"] == {"real": 8, "synthetic": 8}


class TestSweep:
    def test_default_fraction_grid(self, class_manifest, tmp_path):
        out = tmp_path / "out"
        code = main(
            [
                "sweep",
                "--manifest",
                str(class_manifest),
                "--class",
                "normal",
                "--trials",
                "2",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        rows = read_rows(out / "reports.csv")
        assert {r["fraction"] for r in rows} == {"0.25", "0.5", "0.75", "1.0"}

    def test_fraction_and_trial_overrides(self, class_manifest, tmp_path):
        out = tmp_path / "out"
        code = main(
            [
                "sweep",
                "--manifest",
                str(class_manifest),
                "--class",
                "normal",
                "--fractions",
                "0.5,1.0",
                "--trials",
                "3",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        rows = read_rows(out / "reports.csv")
        half = {r["trial"] for r in rows if r["fraction"] == "0.5"}
        full = {r["trial"] for r in rows if r["fraction"] == "1.0"}
        assert half == {"0", "1", "2"}
        assert full == {"0"}

    def test_too_small_fraction_exits_1(self, tmp_path, rng):
        real = random_image_set(rng, count=100, class_label="c", provenance="real")
        synth = random_image_set(rng, count=100, class_label="c", provenance="synthetic")
        write_image_dir(real, tmp_path / "r")
        write_image_dir(synth, tmp_path / "s")
        manifest = make_manifest(
            tmp_path, [("c", "real", "image_dir", "r"), ("c", "synthetic", "image_dir", "s")]
        )
        code = main(
            [
                "sweep",
                "--manifest",
                str(manifest),
                "--class",
                "c",
                "--fractions",
                "0.001,1.0",
                "--out",
                str(tmp_path / "o"),
            ]
        )
        assert code == 1

    def test_repeat_runs_byte_identical(self, class_manifest, tmp_path):
        captures = []
        for name in ("a", "b"):
            out = tmp_path / name
            code = main(
                [
                    "sweep",
                    "--manifest",
                    str(class_manifest),
                    "--class",
                    "normal",
                    "--seed",
                    "5",
                    "--trials",
                    "2",
                    "--out",
                    str(out),
                ]
            )
            assert code == 0
            captures.append(
                ((out / "reports.csv").read_bytes(), (out / "aggregates.json").read_bytes())
            )
        assert captures[0] == captures[1]

    def test_stability_block_present_with_enough_trials(self, class_manifest, tmp_path):
        import json

        out = tmp_path / "out"
        main(
            [
                "sweep",
                "--manifest",
                str(class_manifest),
                "--class",
                "normal",
                "--trials",
                "2",
                "--out",
                str(out),
            ]
        )
        payload = json.loads((out / "aggregates.json").read_text())
        assert set(payload["stability"]) == {"ms_ssim_diversity", "cosine_diversity", "fid"}

    def test_stability_skipped_when_not_computable(self, class_manifest, tmp_path):
        import json

        out = tmp_path / "out"
        code = main(
            [
                "sweep",
                "--manifest",
                str(class_manifest),
                "--class",
                "normal",
                "--fractions",
                "0.5,1.0",
                "--trials",
                "3",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        payload = json.loads((out / "aggregates.json").read_text())
        assert payload["stability"] is None
        assert "stability_skipped" in payload


class TestEmbedAndConvert:
    def test_embed_single_image_set(self, tmp_path, rng):
        images = random_image_set(rng, count=1, class_label="single")
        write_image_dir(images, tmp_path / "imgs")
        manifest = make_manifest(tmp_path, [("single", "real", "image_dir", "imgs")])
        out = tmp_path / "emb"
        code = main(
            ["embed", "--manifest", str(manifest), "--class", "single", "--out", str(out)]
        )
        assert code == 0
        matrix = read_embeddings(out / "single_real.emb")
        assert (matrix.count, matrix.dims) == (1, 64)

    def test_embed_file_matches_in_memory_result(self, class_manifest, tmp_path):
        out = tmp_path / "emb"
        code = main(
            ["embed", "--manifest", str(class_manifest), "--class", "normal", "--out", str(out)]
        )
        assert code == 0
        from synthmetrics import read_manifest

        manifest = read_manifest(class_manifest)
        for provenance in ("real", "synthetic"):
            stored = read_embeddings(out / f"normal_{provenance}.emb")
            direct = embed_reference(manifest.load_set("normal", provenance))
            assert np.array_equal(stored.values, direct.values)

    def test_embed_unknown_class_exits_2(self, class_manifest, tmp_path):
        code = main(
            ["embed", "--manifest", str(class_manifest), "--class", "ghost", "--out", str(tmp_path / "o")]
        )
        assert code == 2

    def test_convert_round_trip(self, tmp_path, rng):
        source = random_image_set(rng, count=5, height=12, width=9)
        write_idx(source, tmp_path / "src.idx")
        code = main(["convert", str(tmp_path / "src.idx"), str(tmp_path / "pngs")])
        assert code == 0
        from_dir = load_image_dir(tmp_path / "pngs", "c", "real")
        from_idx = load_idx(tmp_path / "src.idx")
        assert np.array_equal(from_dir.pixels, from_idx.pixels)

    def test_convert_bad_idx_exits_1(self, tmp_path):
        bad = tmp_path / "bad.idx"
        bad.write_bytes(b"\xff\xff\xff\xff")
        code = main(["convert", str(bad), str(tmp_path / "o")])
        assert code == 1


class TestEmbedderFlag:
    def test_file_embedder_matches_ref(self, class_manifest, tmp_path):
        emb_dir = tmp_path / "emb"
        main(["embed", "--manifest", str(class_manifest), "--class", "normal", "--out", str(emb_dir)])
        out_ref = tmp_path / "ref"
        out_file = tmp_path / "file"
        for out, embedder in ((out_ref, "ref"), (out_file, f"file:{emb_dir}")):
            code = main(
                [
                    "evaluate",
                    "--manifest",
                    str(class_manifest),
                    "--class",
                    "normal",
                    "--embedder",
                    embedder,
                    "--out",
                    str(out),
                ]
            )
            assert code == 0
        assert (out_ref / "reports.csv").read_bytes() == (out_file / "reports.csv").read_bytes()

    def test_unknown_embedder_exits_2(self, class_manifest, tmp_path):
        code = main(
            [
                "evaluate",
                "--manifest",
                str(class_manifest),
                "--class",
                "normal",
                "--embedder",
                "inception",
                "--out",
                str(tmp_path / "o"),
            ]
        )
        assert code == 2

    def test_missing_embedding_files_exit_2(self, class_manifest, tmp_path):
        code = main(
            [
                "evaluate",
                "--manifest",
                str(class_manifest),
                "--class",
                "normal",
                "--embedder",
                f"file:{tmp_path / 'missing'}",
                "--out",
                str(tmp_path / "o"),
            ]
        )
        assert code == 2


class TestValueRange:
    def test_unit_range_evaluation(self, class_manifest, tmp_path):
        out = tmp_path / "out"
        code = main(
            [
                "evaluate",
                "--manifest",
                str(class_manifest),
                "--class",
                "normal",
                "--value-range",
                "1",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        rows = read_rows(out / "reports.csv")
        assert {r["metric"] for r in rows} == {"ms_ssim_diversity", "cosine_diversity", "fid"}

    def test_value_range_does_not_change_msssim(self, class_manifest, tmp_path):
        # SSIM is invariant to jointly rescaling pixels and L.
        values = {}
        for tag in ("255", "1"):
            out = tmp_path / tag
            main(
                [
                    "evaluate",
                    "--manifest",
                    str(class_manifest),
                    "--class",
                    "normal",
                    "--value-range",
                    tag,
                    "--out",
                    str(out),
                ]
            )
            rows = read_rows(out / "reports.csv")
            values[tag] = [
                float(r["value"]) for r in rows if r["metric"] == "ms_ssim_diversity"
            ]
        assert np.allclose(values["255"], values["1"], atol=1e-9)


class TestUsage:
    def test_no_command_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2

    def test_bad_fraction_order_is_usage_error(self, class_manifest, tmp_path):
        code = main(
            [
                "sweep",
                "--manifest",
                str(class_manifest),
                "--class",
                "normal",
                "--fractions",
                "0.5,0.25",
                "--out",
                str(tmp_path / "o"),
            ]
        )
        assert code == 2

    def test_even_window_size_is_usage_error(self, class_manifest, tmp_path):
        code = main(
            [
                "evaluate",
                "--manifest",
                str(class_manifest),
                "--class",
                "normal",
                "--window-size",
                "10",
                "--out",
                str(tmp_path / "o"),
            ]
        )
        assert code == 2

    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0
        assert "synthmetrics" in capsys.readouterr().out
