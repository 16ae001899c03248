import math

import pytest

from brachistochrone_tangle import __version__, verification
from brachistochrone_tangle.casestudies import case1_tangle_closed_form
from brachistochrone_tangle.cli import EXIT_FAILURE, EXIT_INPUT_ERROR, EXIT_IO_ERROR, EXIT_OK, RunConfig, main
from brachistochrone_tangle.serialization import OutputFormat, Table
from brachistochrone_tangle.settings import Tolerances

AVERAGE_AT_GHZ = 3 / 8 + 8 / (3 * math.sqrt(6) * math.pi)
H = 1 / math.sqrt(2)
PHASE_GHZ_INITIAL = " ".join([f"{H!r},0"] + ["0,0"] * 6 + [f"0,{-H!r}"])
PHASE_GHZ_FINAL = " ".join([f"0,{H!r}"] + ["0,0"] * 6 + [f"{-H!r},0"])


def run(capsys, *argv: str):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_scan_alpha_as_json(capsys):
    code, out, _ = run(capsys, "scan-alpha", "--alpha-points", "3", "--format", "json")

    # assert
    assert code == EXIT_OK
    table = Table.parse(out, OutputFormat.JSON)
    assert table.columns == ["alpha", "avg_tangle"]
    assert len(table.rows) == 3
    assert table.rows[0][1] == pytest.approx(AVERAGE_AT_GHZ, abs=1e-8)
    assert table.rows[2][1] == pytest.approx(1 / 6, abs=1e-8)
    assert table.metadata["version"] == __version__


def test_scan_alpha_as_csv(capsys):
    code, out, _ = run(capsys, "scan-alpha", "--alpha-points", "3")

    # assert
    assert code == EXIT_OK
    assert out.startswith("# command: scan-alpha\n")
    table = Table.parse(out, OutputFormat.CSV)
    assert table.metadata["alpha_points"] == 3
    assert table.metadata["seed"] == 20091106
    assert table.rows[2][0] == pytest.approx(math.pi / 2)


def test_evolve_between_identical_states_has_no_rows(capsys):
    code, out, _ = run(capsys, "evolve", "--initial", "ghz", "--final", "GHZ")

    # assert
    assert code == EXIT_OK
    table = Table.parse(out, OutputFormat.CSV)
    assert table.metadata["verdict"] == "identical"
    assert table.rows == []


def test_evolve_along_phase_rotation(capsys):
    code, out, _ = run(
        capsys, "evolve", "--initial", PHASE_GHZ_INITIAL, "--final", PHASE_GHZ_FINAL, "--points", "7"
    )

    # assert
    assert code == EXIT_OK
    table = Table.parse(out, OutputFormat.CSV)
    assert table.metadata["verdict"] == "genuine"
    assert table.metadata["theta"] == pytest.approx(math.pi)
    assert table.metadata["duration"] == pytest.approx(math.pi / 2)
    assert len(table.rows) == 7
    for xi, tau, c2_a_bc, c2_ab, c2_ac, c2_bc, residual in table.rows:
        assert tau == pytest.approx(1, abs=1e-10)
        assert c2_a_bc == pytest.approx(1, abs=1e-10)
        assert c2_ab == pytest.approx(0, abs=1e-10)
        assert c2_ac == pytest.approx(0, abs=1e-10)
        assert c2_bc == pytest.approx(0, abs=1e-10)
        assert residual <= 1e-8


def test_evolve_matches_the_closed_form(capsys):
    code, out, _ = run(capsys, "evolve", "--initial", "wtilde", "--final", "ghz", "--omega", "2")

    # assert
    assert code == EXIT_OK
    table = Table.parse(out, OutputFormat.CSV)
    assert table.metadata["duration"] == pytest.approx(math.pi / 4)
    assert len(table.rows) == 101
    for row in table.rows:
        xi = min(row[0], math.pi / 2)
        assert row[1] == pytest.approx(case1_tangle_closed_form(xi, 0), abs=1e-9)


def test_evolve_names_the_malformed_field(capsys):
    code, _, err = run(
        capsys, "evolve", "--initial", "1,0 0,0 0,0 x,0 0,0 0,0 0,0 0,0", "--final", "ghz"
    )

    assert code == EXIT_INPUT_ERROR
    assert "initial" in err


def test_evolve_requires_both_states(capsys):
    code, _, _ = run(capsys, "evolve", "--initial", "ghz")

    assert code == EXIT_INPUT_ERROR


def test_small_pdf_campaign(capsys):
    code, out, _ = run(
        capsys,
        "pdf",
        "--theta-half", "0.5",
        "--measure", "tau",
        "--ensemble", "general",
        "--samples", "200",
        "--bins", "10",
        "--shard-size", "100",
    )

    # assert
    assert code == EXIT_OK
    table = Table.parse(out, OutputFormat.CSV)
    assert table.columns == ["theta_half", "measure", "bin_left", "bin_right", "density"]
    assert len(table.rows) == 10
    integral = sum(density * (right - left) for _, _, left, right, density in table.rows)
    assert integral == pytest.approx(1, abs=1e-9)
    assert 0 < table.metadata["mode[0.5,tau]"] < 1
    assert table.metadata["trivial_count"] == 0
    assert table.metadata["rng"] == "philox4x64"
    assert table.metadata["n"] == 200
    assert table.metadata["bins"] == 10


@pytest.mark.parametrize(
    "argv",
    [
        ["pdf", "--samples", "50"],
        ["pdf", "--theta-half", "0.7"],
        ["pdf", "--bins", "5"],
        ["scan-alpha", "--nodes", "8"],
        ["scan-alpha", "--alpha-points", "1"],
        ["unknown"],
        [],
    ],
)
def test_invalid_arguments_are_input_errors(capsys, argv):
    code, _, err = run(capsys, *argv)

    assert code == EXIT_INPUT_ERROR
    assert err


def test_output_goes_to_the_requested_file(capsys, tmp_path):
    path = tmp_path / "scan.json"

    # act
    code, out, _ = run(capsys, "scan-alpha", "--alpha-points", "2", "--format", "json", "--out", str(path))

    # assert
    assert code == EXIT_OK
    assert out == ""
    assert len(Table.parse(path.read_text(encoding="utf-8"), OutputFormat.JSON).rows) == 2


def test_unwritable_output_is_an_io_error(capsys, tmp_path):
    path = tmp_path / "missing" / "scan.csv"

    code, _, err = run(capsys, "scan-alpha", "--alpha-points", "2", "--out", str(path))

    assert code == EXIT_IO_ERROR
    assert "cannot write" in err


def test_quick_verification_passes(capsys):
    code, out, _ = run(capsys, "verify", "--quick")

    # assert
    assert code == EXIT_OK
    table = Table.parse(out, OutputFormat.CSV)
    assert table.rows
    assert all(row[1] == "pass" for row in table.rows)


def test_version(capsys):
    with pytest.raises(SystemExit) as exit_info:
        main(["--version"])

    assert exit_info.value.code == 0
    assert capsys.readouterr().out.strip() == __version__


def test_run_config_converts_half_angles():
    config = RunConfig(command="pdf", theta_half=[0.25, 0.5])

    assert config.thetas == pytest.approx([math.pi / 2, math.pi])


@pytest.mark.parametrize("fmt", ["csv", "json"])
@pytest.mark.parametrize(
    "argv",
    [
        ["scan-alpha", "--alpha-points", "2"],
        ["evolve", "--initial", "ghz", "--final", "ghz"],
    ],
)
def test_commands_without_sampling_record_empty_counts(capsys, argv, fmt):
    code, out, _ = run(capsys, *argv, "--format", fmt)

    # assert
    assert code == EXIT_OK
    table = Table.parse(out, OutputFormat(fmt))
    for key in ("command", "version", "seed", "stream_base", "nodes"):
        assert table.metadata[key] is not None, key
    assert "n" in table.metadata and table.metadata["n"] is None
    assert "bins" in table.metadata and table.metadata["bins"] is None


def test_pdf_output_does_not_depend_on_the_worker_count(capsys, tmp_path):
    paths = [tmp_path / "serial.csv", tmp_path / "parallel.csv"]
    common = [
        "pdf",
        "--samples", "300",
        "--bins", "10",
        "--shard-size", "100",
        "--theta-half", "0.25", "0.5",
    ]

    # act
    codes = [
        run(capsys, *common, "--workers", workers, "--out", str(path))[0]
        for workers, path in zip(["1", "3"], paths)
    ]

    # assert
    assert codes == [EXIT_OK, EXIT_OK]
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_verification_uses_the_requested_nodes_and_streams(capsys):
    code, out, _ = run(capsys, "verify", "--quick", "--nodes", "32", "--stream-base", "100", "--seed", "7")

    # assert
    assert code == EXIT_OK
    table = Table.parse(out, OutputFormat.CSV)
    assert table.metadata["nodes"] == 32
    assert table.metadata["stream_base"] == 100
    assert table.metadata["seed"] == 7


def _rejected_configuration(g, sizes, tolerances):
    Tolerances(monogamy=-1.0)
    return 0.0, ""


@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_failed_suite_is_reported_with_an_empty_residual(capsys, monkeypatch, fmt):
    monkeypatch.setattr(
        verification, "SUITES", [("rejected", _rejected_configuration, lambda t: 1e-10)]
    )

    # act
    code, out, _ = run(capsys, "verify", "--quick", "--format", fmt)

    # assert
    assert code == EXIT_FAILURE
    table = Table.parse(out, OutputFormat(fmt))
    ((name, status, worst, threshold, detail),) = table.rows
    assert (name, status, worst, threshold) == ("rejected", "fail", None, 1e-10)
    assert "monogamy" in detail


@pytest.mark.parametrize("value", [math.inf, -math.inf, math.nan])
def test_non_finite_numbers_are_written_as_empty_values_in_both_formats(value):
    table = Table.build({"worst": value}, ["suite", "worst"], [["broken", value]])

    # act
    parsed = [Table.parse(table.encode(fmt), fmt) for fmt in OutputFormat]

    # assert
    for result in parsed:
        assert result.metadata == {"worst": None}
        assert result.rows == [["broken", None]]
