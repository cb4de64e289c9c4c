import numpy as np
import pytest

from freqlens_figures import EmptyDataError, FigureSpec, RenderError, SchemaError, render


@pytest.fixture
def heatmap_csv(tmp_path):
    rng = np.random.default_rng(0)
    lines = ["bin_row,bin_col,mean_sim,n_pairs,shortfall"]
    bins = [1, 2, 3, 4]
    for i in bins:
        for j in bins:
            if i <= j:
                v = round(float(rng.uniform(-0.2, 0.9)), 6)
                lines.append(f"{i},{j},{v},500,0")
                if i != j:
                    lines.append(f"{j},{i},{v},500,0")
    path = tmp_path / "heatmap.csv"
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture
def pca_csv(tmp_path):
    rng = np.random.default_rng(1)
    lines = ["word,bin,pc1,pc2,is_centroid"]
    for b in (1, 2, 3):
        for k in range(20):
            lines.append(f"w{b}_{k},{b},{rng.normal():.5f},{rng.normal():.5f},0")
        lines.append(f",{b},{rng.normal():.5f},{rng.normal():.5f},1")
    path = tmp_path / "pca.csv"
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture
def bias_csv(tmp_path):
    lines = ["corpus_id,bin,class,n,mean,ci_low,ci_high"]
    for c, shift in (("b1000", 0.3), ("b10000", 0.0), ("b100000", -0.2)):
        for b in (2, 3, 4):
            mean = shift - 0.05 * b
            lines.append(f"{c},{b},all,40,{mean:.4f},{mean - 0.02:.4f},{mean + 0.02:.4f}")
            lines.append(f"{c},{b},female,12,{mean + 0.01:.4f},{mean - 0.01:.4f},{mean + 0.03:.4f}")
    path = tmp_path / "bias.csv"
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture
def rmse_csv(tmp_path):
    rng = np.random.default_rng(2)
    lines = ["setting_id,metric,rmse_actual,baseline_q50,baseline_q99,baseline_max,n_perm"]
    for metric in ("cosine", "neg_euclidean"):
        for w in (2, 10):
            for neg in (1, 15):
                actual = float(rng.uniform(0.05, 0.2))
                q50 = actual / 10
                lines.append(
                    f"sgns_win{w}_wcno_cds0.75_neg{neg},{metric},{actual:.5f},"
                    f"{q50:.5f},{q50 * 1.5:.5f},{q50 * 2:.5f},200"
                )
    path = tmp_path / "rmse.csv"
    path.write_text("\n".join(lines) + "\n")
    return path


class TestRenderKinds:
    def test_heatmap_has_one_cell_per_bin_pair(self, heatmap_csv, tmp_path):
        info = render(FigureSpec(heatmap_csv, "heatmap", tmp_path / "h.svg"))
        assert info.details["n_bins"] == 4
        assert info.details["n_cells"] == 16  # bins squared
        assert (tmp_path / "h.svg").stat().st_size > 0

    def test_heatmap_cells_visible_in_svg(self, heatmap_csv, tmp_path):
        out = tmp_path / "h.svg"
        render(FigureSpec(heatmap_csv, "heatmap", out))
        # Each cell is one filled Rectangle patch in the SVG body.
        assert out.read_text().count("<g id=\"patch_") >= 16

    def test_pca_scatter_draws_centroids(self, pca_csv, tmp_path):
        info = render(FigureSpec(pca_csv, "pca_scatter", tmp_path / "p.svg"))
        assert info.details["n_centroids"] == 3
        assert info.details["n_points"] == 60

    def test_bias_lines(self, bias_csv, tmp_path):
        info = render(FigureSpec(bias_csv, "bias_lines", tmp_path / "b.svg"))
        assert info.details["n_corpora"] == 3
        assert info.details["n_bins"] == 3

    def test_rmse_strips(self, rmse_csv, tmp_path):
        info = render(FigureSpec(rmse_csv, "rmse_strips", tmp_path / "r.svg"))
        assert info.details["metrics"] == ["cosine", "neg_euclidean"]
        assert info.details["n_settings"] == 4

    def test_png_output(self, heatmap_csv, tmp_path):
        out = tmp_path / "h.png"
        render(FigureSpec(heatmap_csv, "heatmap", out))
        assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


class TestDeterminism:
    @pytest.mark.parametrize("kind,fixture", [
        ("heatmap", "heatmap_csv"),
        ("pca_scatter", "pca_csv"),
        ("bias_lines", "bias_csv"),
        ("rmse_strips", "rmse_csv"),
    ])
    def test_repeated_svg_renders_byte_identical(self, kind, fixture, tmp_path, request):
        csv_path = request.getfixturevalue(fixture)
        out1 = tmp_path / "one.svg"
        out2 = tmp_path / "two.svg"
        render(FigureSpec(csv_path, kind, out1))
        render(FigureSpec(csv_path, kind, out2))
        assert out1.read_bytes() == out2.read_bytes()


class TestErrors:
    def test_missing_column_named(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("bin_row,bin_col,mean_sim,n_pairs\n1,1,0.5,10\n")
        with pytest.raises(SchemaError, match="shortfall"):
            render(FigureSpec(bad, "heatmap", tmp_path / "o.svg"))

    def test_header_only_is_empty_data(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text("bin_row,bin_col,mean_sim,n_pairs,shortfall\n")
        with pytest.raises(EmptyDataError):
            render(FigureSpec(empty, "heatmap", tmp_path / "o.svg"))

    def test_unknown_kind_rejected(self, tmp_path):
        with pytest.raises(RenderError):
            FigureSpec(tmp_path / "x.csv", "pie", tmp_path / "o.svg")

    def test_no_output_written_on_schema_error(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("word,bin,pc1\n")
        out = tmp_path / "o.svg"
        with pytest.raises(SchemaError):
            render(FigureSpec(bad, "pca_scatter", out))
        assert not out.exists()


class TestCli:
    def test_main_renders(self, heatmap_csv, tmp_path, capsys):
        from freqlens_figures.__main__ import main

        out = tmp_path / "cli.svg"
        assert main(["heatmap", str(heatmap_csv), str(out)]) == 0
        assert out.exists()

    def test_main_reports_errors(self, tmp_path, capsys):
        from freqlens_figures.__main__ import main

        bad = tmp_path / "bad.csv"
        bad.write_text("nope\n")
        assert main(["heatmap", str(bad), str(tmp_path / "o.svg")]) == 1
        assert "error:" in capsys.readouterr().err
